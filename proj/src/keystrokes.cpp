#include "keyape/keystrokes.hpp"

#include <algorithm>
#include <optional>

#include "keyape/error.hpp"

namespace keyape {
namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

bool boundary(std::string_view s, std::size_t i) {
  return i >= s.size() || !is_continuation(static_cast<unsigned char>(s[i]));
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> token_spans(std::string_view text) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) spans.push_back({i, j});
    i = j;
  }
  return spans;
}

// Token-level effect of one keystroke: tokens [start, start + old_count) of
// the old state became tokens [start, start + new_count) of the new state.
struct TokenChange {
  std::size_t start = 0;
  std::size_t old_count = 0;
  std::size_t new_count = 0;
  // Sizes of the windows before trimming identical edge tokens.
  std::size_t raw_old = 0;
  std::size_t raw_new = 0;

  bool noop() const { return old_count == 0 && new_count == 0; }
};

TokenChange token_change(std::string_view before, const Sentence& before_tokens,
                         std::string_view after, const Sentence& after_tokens,
                         const CharDelta& delta) {
  const std::vector<Span> old_spans = token_spans(before);
  const std::vector<Span> new_spans = token_spans(after);
  const std::size_t new_end = delta.begin + delta.inserted.size();

  // Tokens strictly left of the edit are shared; so are tokens strictly right.
  std::size_t prefix = 0;
  while (prefix < old_spans.size() && old_spans[prefix].end < delta.begin) ++prefix;
  std::size_t old_suffix = 0;
  while (old_suffix < old_spans.size() - prefix &&
         old_spans[old_spans.size() - 1 - old_suffix].begin > delta.end) {
    ++old_suffix;
  }
  std::size_t new_suffix = 0;
  while (new_suffix + prefix < new_spans.size() &&
         new_spans[new_spans.size() - 1 - new_suffix].begin > new_end) {
    ++new_suffix;
  }

  TokenChange change;
  change.start = prefix;
  change.raw_old = old_spans.size() - prefix - old_suffix;
  change.raw_new = new_spans.size() - prefix - new_suffix;
  std::size_t old_count = change.raw_old;
  std::size_t new_count = change.raw_new;
  while (old_count > 0 && new_count > 0 &&
         before_tokens[change.start + old_count - 1] ==
             after_tokens[change.start + new_count - 1]) {
    --old_count;
    --new_count;
  }
  while (old_count > 0 && new_count > 0 &&
         before_tokens[change.start] == after_tokens[change.start]) {
    ++change.start;
    --old_count;
    --new_count;
  }
  change.old_count = old_count;
  change.new_count = new_count;
  return change;
}

struct Window {
  std::size_t begin;
  std::size_t end;
};

bool touches(const Window& focus, const TokenChange& change) {
  const std::size_t lo = change.start;
  const std::size_t hi = change.start + change.old_count;
  if (change.old_count == 0 || focus.begin == focus.end) {
    return lo <= focus.end && focus.begin <= hi;
  }
  return lo < focus.end && focus.begin < hi;
}

// Appends the net change between `committed` and `current` inside the focus
// window, as deletions then insertions.
void emit(const Sentence& committed, const Sentence& current, const Window& focus,
          Trace& out) {
  const std::size_t tail = current.size() - focus.end;
  if (committed.size() < focus.begin + tail ||
      !std::equal(committed.begin(), committed.begin() + static_cast<std::ptrdiff_t>(focus.begin),
                  current.begin()) ||
      !std::equal(committed.end() - static_cast<std::ptrdiff_t>(tail), committed.end(),
                  current.end() - static_cast<std::ptrdiff_t>(tail))) {
    throw Error(ErrorCode::kReplayDivergence, "edits escaped the tracked word region");
  }
  std::size_t old_begin = focus.begin;
  std::size_t old_end = committed.size() - tail;
  std::size_t new_begin = focus.begin;
  std::size_t new_end = focus.end;
  while (old_end > old_begin && new_end > new_begin &&
         committed[old_end - 1] == current[new_end - 1]) {
    --old_end;
    --new_end;
  }
  while (old_end > old_begin && new_end > new_begin &&
         committed[old_begin] == current[new_begin]) {
    ++old_begin;
    ++new_begin;
  }
  const std::size_t position = new_begin;
  for (std::size_t i = old_begin; i < old_end; ++i) {
    out.push_back(EditAction::remove(position, committed[i]));
  }
  for (std::size_t i = new_begin; i < new_end; ++i) {
    out.push_back(EditAction::insert(i, current[i]));
  }
}

}  // namespace

CharDelta diff_states(std::string_view a, std::string_view b) {
  if (a == b) throw Error(ErrorCode::kNoDelta, "consecutive states are identical");
  std::size_t prefix = 0;
  const std::size_t shorter = std::min(a.size(), b.size());
  while (prefix < shorter && a[prefix] == b[prefix]) ++prefix;
  while (prefix > 0 && !(boundary(a, prefix) && boundary(b, prefix))) --prefix;

  std::size_t suffix = 0;
  while (suffix < shorter - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  while (suffix > 0 &&
         !(boundary(a, a.size() - suffix) && boundary(b, b.size() - suffix))) {
    --suffix;
  }
  return {prefix, a.size() - suffix,
          std::string(b.substr(prefix, b.size() - suffix - prefix))};
}

void validate_log(const KeystrokeLog& log, const Sentence& mt, const Sentence& pe) {
  if (log.states.empty()) throw Error(ErrorCode::kValidation, "empty keystroke log");
  if (log.states.front() != detokenize(mt)) {
    throw Error(ErrorCode::kValidation, "first keystroke state differs from mt");
  }
  if (log.states.back() != detokenize(pe)) {
    throw Error(ErrorCode::kValidation, "last keystroke state differs from pe");
  }
  for (std::size_t t = 1; t < log.states.size(); ++t) {
    if (log.states[t] == log.states[t - 1]) {
      throw Error(ErrorCode::kValidation,
                  "keystroke states " + std::to_string(t - 1) + " and " +
                      std::to_string(t) + " are identical");
    }
  }
}

Trace replay(const KeystrokeLog& log) {
  if (log.states.empty()) throw Error(ErrorCode::kValidation, "empty keystroke log");
  const Sentence initial = tokenize(log.states.front());
  Sentence committed = initial;
  Sentence current = initial;
  std::optional<Window> focus;
  Trace trace;

  for (std::size_t t = 1; t < log.states.size(); ++t) {
    const std::string& before = log.states[t - 1];
    const std::string& after = log.states[t];
    const CharDelta delta = diff_states(before, after);
    Sentence next = tokenize(after);
    const TokenChange change = token_change(before, current, after, next, delta);
    if (change.noop()) {
      current = std::move(next);
      continue;
    }
    if (focus && touches(*focus, change)) {
      const std::size_t end =
          std::max(focus->end, change.start + change.old_count);
      focus = Window{std::min(focus->begin, change.start),
                     end + change.new_count - change.old_count};
    } else {
      if (focus) emit(committed, current, *focus, trace);
      committed = current;
      focus = Window{change.start, change.start + change.new_count};
    }
    current = std::move(next);

    const bool split = delta.inserted.find(' ') != std::string::npos &&
                       change.raw_new > change.raw_old;
    if (split) {
      emit(committed, current, *focus, trace);
      committed = current;
      focus.reset();
    }
  }
  if (focus) emit(committed, current, *focus, trace);

  const Sentence reached = apply_all(initial, trace);
  if (reached != tokenize(log.states.back())) {
    throw Error(ErrorCode::kReplayDivergence,
                "replayed actions reach '" + detokenize(reached) + "'");
  }
  trace.push_back(EditAction::stop());
  return trace;
}

}  // namespace keyape
