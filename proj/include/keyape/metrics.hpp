#ifndef KEYAPE_METRICS_HPP
#define KEYAPE_METRICS_HPP

#include <cstddef>
#include <span>

#include "keyape/edit.hpp"

namespace keyape {

struct TerOptions {
  // Greedy block shifts (cost 1 each) before the final edit distance.
  bool shifts = false;
  std::size_t max_shift_size = 10;
};

// Word edits (insertion, deletion, substitution, plus shifts when enabled)
// turning hyp into ref.
std::size_t ter_edits(const Sentence& hyp, const Sentence& ref, const TerOptions& options = {});

// ter_edits / |ref|. Throws Error(kUndefinedMetric) for an empty ref.
double ter(const Sentence& hyp, const Sentence& ref, const TerOptions& options = {});

// Total edits over total reference length.
double corpus_ter(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                  const TerOptions& options = {});

// Corpus 4-gram BLEU in [0, 100] with brevity penalty. Orders n >= 2 without
// any match use (matches + 1) / (total + 1); no unigram match gives 0.
// Throws Error(kPairing) on a length mismatch.
double bleu(std::span<const Sentence> hyps, std::span<const Sentence> refs);

struct EvalReport {
  double ter = 0.0;
  double bleu = 0.0;
  std::size_t n_sentences = 0;
};

EvalReport evaluate(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                    const TerOptions& options = {});

}  // namespace keyape

#endif  // KEYAPE_METRICS_HPP
