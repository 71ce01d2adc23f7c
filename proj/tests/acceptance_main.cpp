// Runs the library self-check suite and prints one verdict line per check.
// Exit status is the number of failed checks, so the binary doubles as the
// acceptance gate under ctest.

#include <cstdio>

#include "germlab/selfcheck.hpp"

int main() {
  const auto results = germlab::run_selfchecks();
  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.pass) ++failed;
    std::printf("[%s] %zu %s (%.2f s) %s\n", r.pass ? "PASS" : "FAIL", i + 1, r.name.c_str(),
                r.seconds, r.notes.c_str());
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed;
}
