#include "keyape/decode_result.hpp"

namespace keyape {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kStop: return "STOP";
    case StopReason::kLoop: return "LOOP";
    case StopReason::kCap: return "CAP";
  }
  return "unknown";
}

}  // namespace keyape
