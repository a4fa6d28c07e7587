#ifndef KEYAPE_DECODE_RESULT_HPP
#define KEYAPE_DECODE_RESULT_HPP

#include <cstddef>
#include <string_view>

#include "keyape/edit.hpp"

namespace keyape {

enum class StopReason { kStop, kLoop, kCap };

std::string_view to_string(StopReason reason);

struct DecodeResult {
  // Executed actions; ends in STOP only when stop_reason is kStop.
  Trace trace;
  Sentence final;
  StopReason stop_reason = StopReason::kStop;
  std::size_t steps = 0;
};

}  // namespace keyape

#endif  // KEYAPE_DECODE_RESULT_HPP
