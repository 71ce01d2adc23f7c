#pragma once

// End-to-end verification suite spanning every layer of the library: exact
// rational identities of the bifurcation strata, classification of the
// corank-1 normal forms under random conjugation, the fitted sharksfin
// swallowtail series, stratum round-trips through locate_and_classify, the
// gulls exclusion argument, contour regime transitions across walls, the
// crosscap characteristic curves, and the agreement of caustic sweeps with
// bifurcation sections. The CLI `validate` verb and the acceptance binary
// both run this list; each check reports pass/fail with wall-clock time and
// a notes line carrying the measured residuals and counts.

#include <cstdint>
#include <string>
#include <vector>

namespace germlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string notes;  // measured residuals, counts, and any deviations
};

// Runs all checks in a fixed order. The seed drives every randomized sample
// stream (one independent stream per check); equal seeds give identical
// reports, including the notes text.
std::vector<CheckResult> run_selfchecks(std::uint64_t seed = 9271u);

}  // namespace germlab
