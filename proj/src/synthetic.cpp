#include "keyape/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "keyape/error.hpp"

namespace keyape {
namespace {

std::vector<std::string> code_points(const std::string& word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    std::size_t j = i + 1;
    while (j < word.size() && (static_cast<unsigned char>(word[j]) & 0xC0) == 0x80) ++j;
    out.push_back(word.substr(i, j - i));
    i = j;
  }
  return out;
}

class Typist {
 public:
  Typist(const Sentence& mt, Rng& rng, const TypingOptions& options)
      : tokens_(mt), rng_(rng), options_(options) {
    log_.states.push_back(detokenize(tokens_));
  }

  void insert(std::size_t p, const std::string& word) {
    std::string text = log_.states.back();
    std::size_t at;
    bool trailing_space = false;
    if (tokens_.empty()) {
      at = 0;
    } else if (p == tokens_.size()) {
      text.push_back(' ');
      push(text);
      at = text.size();
    } else {
      at = offset(p);
      trailing_space = true;
    }
    const std::vector<std::string> chars = code_points(word);
    const std::size_t typo_at =
        rng_.bernoulli(options_.typo_rate) ? rng_.uniform(chars.size()) : chars.size();
    for (std::size_t k = 0; k < chars.size(); ++k) {
      if (k == typo_at) {
        text.insert(at, "q");
        push(text);
        text.erase(at, 1);
        push(text);
      }
      text.insert(at, chars[k]);
      at += chars[k].size();
      push(text);
    }
    if (trailing_space) {
      text.insert(at, " ");
      push(text);
    }
    tokens_.insert(tokens_.begin() + static_cast<std::ptrdiff_t>(p), word);
  }

  void remove(std::size_t p) {
    std::string text = log_.states.back();
    const std::size_t begin = offset(p);
    std::size_t end = begin + tokens_[p].size();
    if (rng_.bernoulli(options_.block_delete_rate)) {
      if (p > 0) {
        text.erase(begin - 1, end - begin + 1);
      } else if (tokens_.size() > 1) {
        text.erase(begin, end - begin + 1);
      } else {
        text.erase(begin, end - begin);
      }
      push(text);
    } else {
      for (const std::string& c : [&] {
             auto chars = code_points(tokens_[p]);
             std::reverse(chars.begin(), chars.end());
             return chars;
           }()) {
        end -= c.size();
        text.erase(end, c.size());
        push(text);
      }
      if (p > 0) {
        text.erase(begin - 1, 1);
        push(text);
      } else if (tokens_.size() > 1) {
        text.erase(0, 1);
        push(text);
      }
    }
    tokens_.erase(tokens_.begin() + static_cast<std::ptrdiff_t>(p));
  }

  void hesitate() {
    const std::string word = "hes" + std::to_string(fresh_++);
    const std::size_t p = rng_.uniform(tokens_.size() + 1);
    insert(p, word);
    remove(p);
  }

  const Sentence& tokens() const { return tokens_; }
  KeystrokeLog take() { return std::move(log_); }

 private:
  std::size_t offset(std::size_t p) const {
    std::size_t o = 0;
    for (std::size_t j = 0; j < p; ++j) o += tokens_[j].size() + 1;
    return o;
  }

  void push(const std::string& text) { log_.states.push_back(text); }

  Sentence tokens_;
  Rng& rng_;
  TypingOptions options_;
  KeystrokeLog log_;
  std::size_t fresh_ = 0;
};

using Counts = std::map<std::pair<ActionKind, std::string>, std::size_t>;

Counts item_counts(const AnchoredScript& script) {
  Counts counts;
  for (const ScriptItem& item : script.items()) ++counts[{item.kind, item.token}];
  return counts;
}

}  // namespace

std::string vocab_word(std::size_t i) { return "w" + std::to_string(i); }

Sentence random_sentence(Rng& rng, std::size_t vocab, std::size_t min_len,
                         std::size_t max_len) {
  const std::size_t n = min_len + rng.uniform(max_len - min_len + 1);
  Sentence s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(vocab_word(rng.uniform(vocab)));
  return s;
}

Sentence random_post_edit(const Sentence& mt, Rng& rng, std::size_t vocab,
                          std::size_t edits) {
  Sentence pe = mt;
  for (std::size_t e = 0; e < edits; ++e) {
    const std::uint64_t op = pe.empty() ? 1 : rng.uniform(3);
    if (op == 0) {
      pe[rng.uniform(pe.size())] = vocab_word(rng.uniform(vocab));
    } else if (op == 1) {
      const auto at = static_cast<std::ptrdiff_t>(rng.uniform(pe.size() + 1));
      pe.insert(pe.begin() + at, vocab_word(rng.uniform(vocab)));
    } else if (pe.size() > 1) {
      pe.erase(pe.begin() + static_cast<std::ptrdiff_t>(rng.uniform(pe.size())));
    }
  }
  return pe;
}

KeystrokeLog synthesize_log(const Sentence& mt, const Trace& trace, Rng& rng,
                            const TypingOptions& options) {
  Typist typist(mt, rng, options);
  for (std::size_t step = 0; step < trace.size(); ++step) {
    const EditAction& action = trace[step];
    if (action.is_stop()) break;
    if (rng.bernoulli(options.hesitation_rate)) typist.hesitate();
    const Sentence& tokens = typist.tokens();
    if (action.kind == ActionKind::kInsert) {
      if (action.position > tokens.size()) {
        throw TraceError(ErrorCode::kPosition, step, "insert position out of range");
      }
      typist.insert(action.position, action.token);
    } else {
      if (action.position >= tokens.size()) {
        throw TraceError(ErrorCode::kPosition, step, "delete position out of range");
      }
      if (tokens[action.position] != action.token) {
        throw TraceError(ErrorCode::kTokenMismatch, step,
                         "deleted token differs from the state");
      }
      typist.remove(action.position);
    }
  }
  return typist.take();
}

bool well_separated(const Sentence& mt, const Trace& trace) {
  Sentence state = mt;
  const EditAction* previous = nullptr;
  for (const EditAction& action : trace) {
    if (action.is_stop()) break;
    if (previous) {
      const std::size_t a = previous->position;
      const std::size_t b = action.position;
      if ((a > b ? a - b : b - a) < 2) return false;
    }
    if (action.kind == ActionKind::kDelete) {
      const std::size_t p = action.position;
      if ((p > 0 && state[p - 1] == action.token) ||
          (p + 1 < state.size() && state[p + 1] == action.token)) {
        return false;
      }
    }
    apply_in_place(state, action);
    previous = &action;
  }
  return true;
}

SyntheticCorpus synthetic_corpus(const CorpusOptions& options) {
  Rng rng(options.seed);
  SyntheticCorpus corpus;
  const auto n_injected = static_cast<std::size_t>(
      std::llround(options.injected_rate * static_cast<double>(options.samples)));
  const Permutation which = Permutation::random(options.samples, rng);
  corpus.injected.assign(options.samples, false);
  for (std::size_t k = 0; k < n_injected; ++k) corpus.injected[which.order[k]] = true;

  for (std::size_t i = 0; i < options.samples; ++i) {
    Sample sample;
    sample.id = "syn-" + std::to_string(i);
    Trace human;
    if (!corpus.injected[i]) {
      sample.mt = random_sentence(rng, options.vocab, options.min_len, options.max_len);
      sample.pe = random_post_edit(sample.mt, rng, options.vocab,
                                   rng.uniform(options.max_edits + 1));
      const AnchoredScript script = min_edit_script(sample.mt, sample.pe);
      human = realize(script, Permutation::random(script.size(), rng));
    } else {
      // Swap two different adjacent words and let the editor move the word
      // the minimal script leaves in place.
      const std::size_t min_len = std::max<std::size_t>(options.min_len, 2);
      for (;;) {
        sample.mt = random_sentence(rng, options.vocab, min_len, options.max_len);
        Sentence pe = random_post_edit(sample.mt, rng, options.vocab,
                                       rng.uniform(options.max_edits));
        if (pe.size() < 2) continue;
        const std::size_t q = rng.uniform(pe.size() - 1);
        if (pe[q] == pe[q + 1]) continue;
        std::swap(pe[q], pe[q + 1]);
        const AnchoredScript minimal = min_edit_script(sample.mt, pe);
        const AnchoredScript other = min_edit_script(sample.mt, pe, TieBreak::kPreferInsert);
        if (item_counts(minimal) == item_counts(other)) continue;
        sample.pe = std::move(pe);
        human = realize(other, Permutation::random(other.size(), rng));
        break;
      }
    }
    std::vector<std::string> src;
    for (const std::string& w : sample.pe) src.push_back("s:" + w);
    sample.src = std::move(src);
    sample.keystrokes = synthesize_log(sample.mt, human, rng, options.typing);
    corpus.samples.push_back(std::move(sample));
    corpus.human.push_back(std::move(human));
  }
  return corpus;
}

}  // namespace keyape
