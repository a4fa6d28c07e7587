#include "keyape/error.hpp"

namespace keyape {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kPosition: return "position";
    case ErrorCode::kTokenMismatch: return "token-mismatch";
    case ErrorCode::kPermutation: return "permutation";
    case ErrorCode::kNoDelta: return "no-delta";
    case ErrorCode::kReplayDivergence: return "replay-divergence";
    case ErrorCode::kMismatch: return "mismatch";
    case ErrorCode::kLength: return "length";
    case ErrorCode::kImpossibleState: return "impossible-state";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kPairing: return "pairing";
    case ErrorCode::kEmptyCurve: return "empty-curve";
    case ErrorCode::kDataCorruption: return "data-corruption";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace keyape
