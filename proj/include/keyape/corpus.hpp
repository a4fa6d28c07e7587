#ifndef KEYAPE_CORPUS_HPP
#define KEYAPE_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "keyape/edit.hpp"
#include "keyape/keystrokes.hpp"

namespace keyape {

// A (src, mt, pe) triplet with optional keystroke states and POS tags.
struct Sample {
  std::string id;
  Sentence src;
  Sentence mt;
  Sentence pe;
  std::optional<KeystrokeLog> keystrokes;
  std::map<std::string, std::string> pos_tags;
};

// Throws Error(kValidation) naming the sample id.
void validate_sample(const Sample& sample);

// JSON-lines sample format:
//   {"id": "...", "src": "...", "mt": "...", "pe": "...",
//    "keystrokes": ["...", ...], "pos": {"token": "TAG", ...}}
// The last two keys are optional. Blank lines are skipped.
Sample parse_sample(std::string_view json_line);
std::string format_sample(const Sample& sample);

// Parse failures are reported as Error(kParse) and invariant violations as
// Error(kValidation); both messages start with "line <n>:".
std::vector<Sample> load_samples(const std::string& path);
void save_samples(const std::string& path, std::span<const Sample> samples);

enum class OrderingMode { kL2r, kShuffled, kHumanOrdered, kHumanUnfiltered };

std::string_view to_string(OrderingMode mode);
// Accepts "l2r", "shuff", "h-ord", "human-unfiltered".
OrderingMode parse_ordering_mode(std::string_view text);

struct OrderedEntry {
  std::string id;
  OrderingMode mode = OrderingMode::kL2r;
  Trace trace;
  // h-ord only: the alignment failed and `trace` is the unfiltered human one.
  bool fallback = false;
};

struct OrderedDataset {
  std::vector<OrderedEntry> entries;
  std::uint64_t seed = 0;
  // h-ord only: samples whose keystroke replay diverged, left out entirely.
  std::vector<std::string> excluded;

  double fallback_rate() const;
};

// Builds one trace per sample under `mode` (each ending in STOP; mt == pe
// gives a STOP-only trace). Shuffled orders use a per-sample stream derived
// from `seed`. h-ord replays the keystrokes, aligns them to the minimal script
// and falls back to the unfiltered human trace when alignment fails.
// human-unfiltered keeps the replayed trace as is.
//
// Every produced trace is checked to turn mt into pe. Throws
// Error(kConfiguration) for a keystroke-based mode on a sample without
// keystrokes.
OrderedDataset build_training_set(std::span<const Sample> samples, OrderingMode mode,
                                  std::uint64_t seed);

// Dataset JSON lines: {"id", "mode", "trace", "fallback"}.
std::string format_entry(const OrderedEntry& entry);
OrderedEntry parse_entry(std::string_view json_line);
void save_dataset(const std::string& path, const OrderedDataset& dataset);
OrderedDataset load_dataset(const std::string& path);

}  // namespace keyape

#endif  // KEYAPE_CORPUS_HPP
