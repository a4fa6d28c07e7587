#include "keyape/corpus.hpp"

#include <json.hpp>

#include "keyape/align.hpp"
#include "keyape/error.hpp"
#include "keyape/io.hpp"
#include "keyape/reorder.hpp"

namespace keyape {

using nlohmann::json;

namespace {

bool has_inner_whitespace(const std::string& token) {
  return token.find_first_of(" \t\r\n\v\f") != std::string::npos;
}

void require_tokens(const Sample& sample, const Sentence& tokens, const char* field) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kValidation,
                "sample '" + sample.id + "': " + field + " is empty");
  }
  for (const std::string& t : tokens) {
    if (has_inner_whitespace(t)) {
      throw Error(ErrorCode::kValidation, "sample '" + sample.id + "': " + field +
                                              " token contains whitespace");
    }
  }
}

std::string get_string(const json& record, const char* key) {
  const auto it = record.find(key);
  if (it == record.end()) {
    throw Error(ErrorCode::kParse, std::string("missing key '") + key + "'");
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::kParse, std::string("key '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

json parse_json_object(std::string_view text) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  if (!record.is_object()) throw Error(ErrorCode::kParse, "record is not a JSON object");
  return record;
}

}  // namespace

void validate_sample(const Sample& sample) {
  if (sample.id.empty()) throw Error(ErrorCode::kValidation, "sample with empty id");
  require_tokens(sample, sample.src, "src");
  require_tokens(sample, sample.mt, "mt");
  require_tokens(sample, sample.pe, "pe");
  if (sample.keystrokes) {
    try {
      validate_log(*sample.keystrokes, sample.mt, sample.pe);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation,
                  "sample '" + sample.id + "': " + std::string(e.what()));
    }
  }
}

Sample parse_sample(std::string_view json_line) {
  const json record = parse_json_object(json_line);
  Sample sample;
  sample.id = get_string(record, "id");
  sample.src = tokenize(get_string(record, "src"));
  sample.mt = tokenize(get_string(record, "mt"));
  sample.pe = tokenize(get_string(record, "pe"));
  if (const auto it = record.find("keystrokes"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::kParse, "'keystrokes' must be an array");
    KeystrokeLog log;
    for (const json& state : *it) {
      if (!state.is_string()) {
        throw Error(ErrorCode::kParse, "'keystrokes' entries must be strings");
      }
      log.states.push_back(state.get<std::string>());
    }
    sample.keystrokes = std::move(log);
  }
  if (const auto it = record.find("pos"); it != record.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorCode::kParse, "'pos' must be an object");
    for (const auto& [token, tag] : it->items()) {
      if (!tag.is_string()) throw Error(ErrorCode::kParse, "'pos' tags must be strings");
      sample.pos_tags[token] = tag.get<std::string>();
    }
  }
  return sample;
}

std::string format_sample(const Sample& sample) {
  json record = {{"id", sample.id},
                 {"src", detokenize(sample.src)},
                 {"mt", detokenize(sample.mt)},
                 {"pe", detokenize(sample.pe)}};
  if (sample.keystrokes) record["keystrokes"] = sample.keystrokes->states;
  if (!sample.pos_tags.empty()) record["pos"] = sample.pos_tags;
  return record.dump();
}

std::vector<Sample> load_samples(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<Sample> samples;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(n + 1) + ": ";
    try {
      samples.push_back(parse_sample(lines[n]));
      validate_sample(samples.back());
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  return samples;
}

void save_samples(const std::string& path, std::span<const Sample> samples) {
  std::string out;
  for (const Sample& s : samples) out += format_sample(s) + "\n";
  write_file_atomic(path, out);
}

std::string_view to_string(OrderingMode mode) {
  switch (mode) {
    case OrderingMode::kL2r: return "l2r";
    case OrderingMode::kShuffled: return "shuff";
    case OrderingMode::kHumanOrdered: return "h-ord";
    case OrderingMode::kHumanUnfiltered: return "human-unfiltered";
  }
  return "unknown";
}

OrderingMode parse_ordering_mode(std::string_view text) {
  if (text == "l2r") return OrderingMode::kL2r;
  if (text == "shuff") return OrderingMode::kShuffled;
  if (text == "h-ord") return OrderingMode::kHumanOrdered;
  if (text == "human-unfiltered") return OrderingMode::kHumanUnfiltered;
  throw Error(ErrorCode::kConfiguration, "unknown ordering mode '" + std::string(text) + "'");
}

double OrderedDataset::fallback_rate() const {
  if (entries.empty()) return 0.0;
  std::size_t n = 0;
  for (const OrderedEntry& e : entries) n += e.fallback ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(entries.size());
}

OrderedDataset build_training_set(std::span<const Sample> samples, OrderingMode mode,
                                  std::uint64_t seed) {
  const bool needs_keystrokes =
      mode == OrderingMode::kHumanOrdered || mode == OrderingMode::kHumanUnfiltered;
  if (needs_keystrokes) {
    for (const Sample& s : samples) {
      if (!s.keystrokes) {
        throw Error(ErrorCode::kConfiguration,
                    std::string(to_string(mode)) + " requires keystrokes; sample '" +
                        s.id + "' has none");
      }
    }
  }

  OrderedDataset dataset;
  dataset.seed = seed;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& sample = samples[i];
    OrderedEntry entry{sample.id, mode, {}, false};
    const AnchoredScript script = min_edit_script(sample.mt, sample.pe);
    switch (mode) {
      case OrderingMode::kL2r:
        entry.trace = l2r_trace(script);
        break;
      case OrderingMode::kShuffled:
        entry.trace = shuffled_trace(script, derive_seed(seed, i));
        break;
      case OrderingMode::kHumanOrdered:
      case OrderingMode::kHumanUnfiltered: {
        Trace human;
        try {
          human = replay(*sample.keystrokes);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kReplayDivergence) throw;
          dataset.excluded.push_back(sample.id);
          continue;
        }
        if (mode == OrderingMode::kHumanUnfiltered) {
          entry.trace = std::move(human);
          break;
        }
        const Alignment alignment = align_human(sample.mt, script, human);
        if (alignment.aligned()) {
          entry.trace = human_ordered_trace(script, alignment);
        } else {
          entry.trace = std::move(human);
          entry.fallback = true;
        }
        break;
      }
    }
    if (apply_all(sample.mt, entry.trace) != sample.pe) {
      throw Error(ErrorCode::kDataCorruption,
                  "trace for sample '" + sample.id + "' does not reach pe");
    }
    dataset.entries.push_back(std::move(entry));
  }
  return dataset;
}

std::string format_entry(const OrderedEntry& entry) {
  const json record = {{"id", entry.id},
                       {"mode", std::string(to_string(entry.mode))},
                       {"trace", format_trace(entry.trace)},
                       {"fallback", entry.fallback}};
  return record.dump();
}

OrderedEntry parse_entry(std::string_view json_line) {
  const json record = parse_json_object(json_line);
  OrderedEntry entry;
  entry.id = get_string(record, "id");
  entry.mode = parse_ordering_mode(get_string(record, "mode"));
  entry.trace = parse_trace(get_string(record, "trace"));
  if (const auto it = record.find("fallback"); it != record.end()) {
    if (!it->is_boolean()) throw Error(ErrorCode::kParse, "'fallback' must be a boolean");
    entry.fallback = it->get<bool>();
  }
  return entry;
}

void save_dataset(const std::string& path, const OrderedDataset& dataset) {
  std::string out;
  for (const OrderedEntry& e : dataset.entries) out += format_entry(e) + "\n";
  write_file_atomic(path, out);
}

OrderedDataset load_dataset(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  OrderedDataset dataset;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].find_first_not_of(" \t") == std::string::npos) continue;
    try {
      dataset.entries.push_back(parse_entry(lines[n]));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(n + 1) + ": " + e.what());
    }
  }
  return dataset;
}

}  // namespace keyape
