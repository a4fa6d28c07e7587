#include "keyape/edit.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include "keyape/error.hpp"

namespace keyape {

Sentence tokenize(std::string_view text) {
  Sentence out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string detokenize(const Sentence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

void apply_in_place(Sentence& sentence, const EditAction& action) {
  switch (action.kind) {
    case ActionKind::kInsert:
      if (action.position > sentence.size()) {
        throw Error(ErrorCode::kPosition,
                    "insert position " + std::to_string(action.position) +
                        " beyond sentence length " +
                        std::to_string(sentence.size()));
      }
      sentence.insert(sentence.begin() + static_cast<std::ptrdiff_t>(action.position),
                      action.token);
      return;
    case ActionKind::kDelete:
      if (action.position >= sentence.size()) {
        throw Error(ErrorCode::kPosition,
                    "delete position " + std::to_string(action.position) +
                        " out of range for length " +
                        std::to_string(sentence.size()));
      }
      if (sentence[action.position] != action.token) {
        throw Error(ErrorCode::kTokenMismatch,
                    "delete expects '" + action.token + "' at " +
                        std::to_string(action.position) + " but found '" +
                        sentence[action.position] + "'");
      }
      sentence.erase(sentence.begin() + static_cast<std::ptrdiff_t>(action.position));
      return;
    case ActionKind::kStop:
      throw Error(ErrorCode::kValidation, "STOP cannot be applied");
  }
}

Sentence apply_action(const Sentence& sentence, const EditAction& action) {
  Sentence out = sentence;
  apply_in_place(out, action);
  return out;
}

Sentence apply_all(const Sentence& sentence, const Trace& trace) {
  Sentence out = sentence;
  for (std::size_t step = 0; step < trace.size(); ++step) {
    const EditAction& action = trace[step];
    if (action.is_stop()) {
      if (step + 1 != trace.size()) {
        throw TraceError(ErrorCode::kValidation, step,
                         "STOP must be the last action");
      }
      break;
    }
    try {
      apply_in_place(out, action);
    } catch (const Error& e) {
      throw TraceError(e.code(), step, e.what());
    }
  }
  return out;
}

std::size_t action_count(const Trace& trace) {
  return static_cast<std::size_t>(
      std::count_if(trace.begin(), trace.end(),
                    [](const EditAction& a) { return !a.is_stop(); }));
}

std::string format_action(const EditAction& action) {
  switch (action.kind) {
    case ActionKind::kStop: return "STOP";
    case ActionKind::kInsert:
      return "I:" + std::to_string(action.position) + ":" + action.token;
    case ActionKind::kDelete:
      return "D:" + std::to_string(action.position) + ":" + action.token;
  }
  return {};
}

std::string format_trace(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += format_action(trace[i]);
  }
  return out;
}

EditAction parse_action(std::string_view text) {
  if (text == "STOP") return EditAction::stop();
  const auto first = text.find(':');
  const auto second =
      first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) {
    throw Error(ErrorCode::kParse,
                "expected <kind>:<pos>:<token>, got '" + std::string(text) + "'");
  }
  const std::string_view kind = text.substr(0, first);
  const std::string_view pos = text.substr(first + 1, second - first - 1);
  const std::string_view token = text.substr(second + 1);

  EditAction action;
  if (kind == "I") {
    action.kind = ActionKind::kInsert;
  } else if (kind == "D") {
    action.kind = ActionKind::kDelete;
  } else {
    throw Error(ErrorCode::kParse, "unknown action kind '" + std::string(kind) + "'");
  }
  const auto [ptr, ec] =
      std::from_chars(pos.data(), pos.data() + pos.size(), action.position);
  if (pos.empty() || ec != std::errc() || ptr != pos.data() + pos.size()) {
    throw Error(ErrorCode::kParse, "non-integer position '" + std::string(pos) + "'");
  }
  if (token.empty()) {
    throw Error(ErrorCode::kParse, "empty token in '" + std::string(text) + "'");
  }
  action.token = std::string(token);
  return action;
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  for (const std::string& piece : tokenize(text)) {
    if (!trace.empty() && trace.back().is_stop()) {
      throw Error(ErrorCode::kParse, "action after STOP");
    }
    trace.push_back(parse_action(piece));
  }
  return trace;
}

AnchoredScript::AnchoredScript(std::size_t source_length,
                               std::vector<Deletion> deletions,
                               std::vector<Insertion> insertions)
    : source_length_(source_length),
      deletions_(std::move(deletions)),
      insertions_(std::move(insertions)) {
  std::sort(deletions_.begin(), deletions_.end(),
            [](const Deletion& a, const Deletion& b) { return a.index < b.index; });
  std::sort(insertions_.begin(), insertions_.end(),
            [](const Insertion& a, const Insertion& b) {
              return std::tie(a.gap, a.ordinal) < std::tie(b.gap, b.ordinal);
            });
  for (std::size_t i = 0; i < deletions_.size(); ++i) {
    const Deletion& d = deletions_[i];
    if (d.index >= source_length_) {
      throw Error(ErrorCode::kValidation, "deletion index out of range");
    }
    if (i > 0 && deletions_[i - 1].index == d.index) {
      throw Error(ErrorCode::kValidation, "index deleted twice");
    }
    if (d.token.empty()) throw Error(ErrorCode::kValidation, "empty token");
  }
  for (std::size_t i = 0; i < insertions_.size(); ++i) {
    const Insertion& ins = insertions_[i];
    if (ins.gap > source_length_) {
      throw Error(ErrorCode::kValidation, "insertion gap out of range");
    }
    const bool gap_start = i == 0 || insertions_[i - 1].gap != ins.gap;
    const std::size_t expected = gap_start ? 0 : insertions_[i - 1].ordinal + 1;
    if (ins.ordinal != expected) {
      throw Error(ErrorCode::kValidation, "insertion ordinals must be 0..k-1 per gap");
    }
    if (ins.token.empty()) throw Error(ErrorCode::kValidation, "empty token");
  }

  items_.reserve(deletions_.size() + insertions_.size());
  for (const Deletion& d : deletions_) {
    items_.push_back({ActionKind::kDelete, d.index, 0, d.token});
  }
  for (const Insertion& ins : insertions_) {
    items_.push_back({ActionKind::kInsert, ins.gap, ins.ordinal, ins.token});
  }
  std::stable_sort(items_.begin(), items_.end(),
                   [](const ScriptItem& a, const ScriptItem& b) {
                     const int ka = a.kind == ActionKind::kDelete ? 0 : 1;
                     const int kb = b.kind == ActionKind::kDelete ? 0 : 1;
                     return std::tie(a.anchor, ka, a.ordinal) <
                            std::tie(b.anchor, kb, b.ordinal);
                   });
}

namespace {

// dist[i][j] = indel distance between mt[0..i) and pe[0..j).
std::vector<std::vector<std::size_t>> prefix_table(const Sentence& a,
                                                   const Sentence& b) {
  std::vector<std::vector<std::size_t>> dist(a.size() + 1,
                                             std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) dist[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) dist[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        dist[i][j] = dist[i - 1][j - 1];
      } else {
        dist[i][j] = 1 + std::min(dist[i - 1][j], dist[i][j - 1]);
      }
    }
  }
  return dist;
}

}  // namespace

std::size_t indel_distance(const Sentence& a, const Sentence& b) {
  return prefix_table(a, b)[a.size()][b.size()];
}

AnchoredScript min_edit_script(const Sentence& mt, const Sentence& pe,
                               TieBreak tie_break) {
  const auto dist = prefix_table(mt, pe);

  std::vector<bool> deleted(mt.size(), false);
  std::vector<Deletion> deletions;
  // (gap, pe index, token), collected back to front.
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> raw_insertions;

  std::size_t i = mt.size();
  std::size_t j = pe.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && mt[i - 1] == pe[j - 1]) {
      --i;
      --j;
      continue;
    }
    const bool can_delete = i > 0 && dist[i - 1][j] + 1 == dist[i][j];
    const bool can_insert = j > 0 && dist[i][j - 1] + 1 == dist[i][j];
    const bool take_delete =
        can_delete && (tie_break == TieBreak::kPreferDelete || !can_insert);
    if (take_delete) {
      --i;
      deleted[i] = true;
      deletions.push_back({i, mt[i]});
    } else {
      --j;
      raw_insertions.emplace_back(i, j, pe[j]);
    }
  }

  // Slide each insertion past the deleted run that starts at its gap, so a
  // replaced region reads as deletions first, then insertions.
  for (auto& [gap, pe_index, token] : raw_insertions) {
    while (gap < mt.size() && deleted[gap]) ++gap;
  }
  std::sort(raw_insertions.begin(), raw_insertions.end(),
            [](const auto& a, const auto& b) { return std::get<1>(a) < std::get<1>(b); });
  std::vector<Insertion> insertions;
  insertions.reserve(raw_insertions.size());
  for (std::size_t k = 0; k < raw_insertions.size(); ++k) {
    const auto& [gap, pe_index, token] = raw_insertions[k];
    const bool same_gap = k > 0 && std::get<0>(raw_insertions[k - 1]) == gap;
    const std::size_t ordinal = same_gap ? insertions.back().ordinal + 1 : 0;
    insertions.push_back({gap, ordinal, token});
  }
  return AnchoredScript(mt.size(), std::move(deletions), std::move(insertions));
}

}  // namespace keyape
