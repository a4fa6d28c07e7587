#ifndef KEYAPE_SYNTHETIC_HPP
#define KEYAPE_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "keyape/corpus.hpp"
#include "keyape/edit.hpp"
#include "keyape/keystrokes.hpp"
#include "keyape/reorder.hpp"

namespace keyape {

// Word i of the synthetic vocabulary: "w0", "w1", ...
std::string vocab_word(std::size_t i);

// Length drawn uniformly from [min_len, max_len], tokens uniform over the
// first `vocab` words.
Sentence random_sentence(Rng& rng, std::size_t vocab, std::size_t min_len,
                         std::size_t max_len);

// Applies `edits` random word substitutions, insertions and deletions to mt.
Sentence random_post_edit(const Sentence& mt, Rng& rng, std::size_t vocab,
                          std::size_t edits);

struct TypingOptions {
  // Before each action, type a fresh word somewhere and erase it again.
  double hesitation_rate = 0.0;
  // Per typed word, one wrong character that is immediately backspaced.
  double typo_rate = 0.0;
  // Per deletion, remove the word in one keystroke instead of backspacing.
  double block_delete_rate = 0.0;
};

// Types `trace` (a state-relative trace applying to mt) character by
// character. Insertions in front of word p are typed as "<word> " at the
// start of word p; deletions are backspaced from the end of the word, then
// the separating space goes. Throws the TraceError of a trace that does not
// apply.
KeystrokeLog synthesize_log(const Sentence& mt, const Trace& trace, Rng& rng,
                            const TypingOptions& options = {});

// True when consecutive actions are at least two positions apart, so each
// action is replayed as its own word region, and no deleted word sits next
// to a copy of itself (the states cannot tell which copy went).
bool well_separated(const Sentence& mt, const Trace& trace);

struct CorpusOptions {
  std::size_t samples = 100;
  std::size_t vocab = 50;
  std::size_t min_len = 3;
  std::size_t max_len = 20;
  std::size_t max_edits = 4;
  // Fraction of samples whose editor moves a different word than the minimal
  // script does, so that alignment cannot succeed.
  double injected_rate = 0.0;
  TypingOptions typing;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<Sample> samples;
  // Generating human trace of each sample.
  std::vector<Trace> human;
  std::vector<bool> injected;
};

// Samples with keystroke logs. Source sentences are the pe words with an
// "s:" prefix. Exactly round(injected_rate * samples) samples are injected.
SyntheticCorpus synthetic_corpus(const CorpusOptions& options);

}  // namespace keyape

#endif  // KEYAPE_SYNTHETIC_HPP
