#include "germlab/unfolding.hpp"

namespace germlab {

const char* unfolding_name(UnfoldingId u) {
  switch (u) {
    case UnfoldingId::Sharksfin: return "sharksfin";
    case UnfoldingId::OddSharksfin: return "odd_sharksfin";
    case UnfoldingId::I23: return "i23";
  }
  return "?";
}

}  // namespace germlab
