#include "keyape/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "keyape/error.hpp"

namespace keyape {
namespace {

std::size_t levenshtein(const Sentence& a, const Sentence& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

bool occurs_in(const Sentence& ref, const Sentence& hyp, std::size_t begin, std::size_t len) {
  if (len > ref.size()) return false;
  for (std::size_t r = 0; r + len <= ref.size(); ++r) {
    if (std::equal(hyp.begin() + static_cast<std::ptrdiff_t>(begin),
                   hyp.begin() + static_cast<std::ptrdiff_t>(begin + len),
                   ref.begin() + static_cast<std::ptrdiff_t>(r))) {
      return true;
    }
  }
  return false;
}

Sentence shifted(const Sentence& hyp, std::size_t begin, std::size_t len, std::size_t to) {
  Sentence rest;
  rest.reserve(hyp.size());
  rest.insert(rest.end(), hyp.begin(), hyp.begin() + static_cast<std::ptrdiff_t>(begin));
  rest.insert(rest.end(), hyp.begin() + static_cast<std::ptrdiff_t>(begin + len), hyp.end());
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(to),
              hyp.begin() + static_cast<std::ptrdiff_t>(begin),
              hyp.begin() + static_cast<std::ptrdiff_t>(begin + len));
  return rest;
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Sentence& s, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[{s.begin() + static_cast<std::ptrdiff_t>(i),
              s.begin() + static_cast<std::ptrdiff_t>(i + n)}];
  }
  return counts;
}

void check_paired(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw Error(ErrorCode::kPairing, std::to_string(hyps) + " hypotheses for " +
                                         std::to_string(refs) + " references");
  }
}

}  // namespace

std::size_t ter_edits(const Sentence& hyp, const Sentence& ref, const TerOptions& options) {
  if (!options.shifts) return levenshtein(hyp, ref);
  Sentence current = hyp;
  std::size_t shifts = 0;
  std::size_t distance = levenshtein(current, ref);
  for (;;) {
    std::size_t best = distance;
    Sentence best_hyp;
    for (std::size_t begin = 0; begin < current.size(); ++begin) {
      for (std::size_t len = 1;
           len <= options.max_shift_size && begin + len <= current.size(); ++len) {
        if (!occurs_in(ref, current, begin, len)) break;
        for (std::size_t to = 0; to + len <= current.size(); ++to) {
          if (to == begin) continue;
          Sentence candidate = shifted(current, begin, len, to);
          const std::size_t d = levenshtein(candidate, ref);
          if (d + 1 < best) {
            best = d + 1;
            best_hyp = std::move(candidate);
          }
        }
      }
    }
    if (best_hyp.empty()) break;
    current = std::move(best_hyp);
    ++shifts;
    distance = best - 1;
  }
  return distance + shifts;
}

double ter(const Sentence& hyp, const Sentence& ref, const TerOptions& options) {
  if (ref.empty()) throw Error(ErrorCode::kUndefinedMetric, "TER of an empty reference");
  return static_cast<double>(ter_edits(hyp, ref, options)) / static_cast<double>(ref.size());
}

double corpus_ter(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                  const TerOptions& options) {
  check_paired(hyps.size(), refs.size());
  std::size_t edits = 0;
  std::size_t length = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    edits += ter_edits(hyps[i], refs[i], options);
    length += refs[i].size();
  }
  if (length == 0) throw Error(ErrorCode::kUndefinedMetric, "TER of empty references");
  return static_cast<double>(edits) / static_cast<double>(length);
}

double bleu(std::span<const Sentence> hyps, std::span<const Sentence> refs) {
  check_paired(hyps.size(), refs.size());
  constexpr std::size_t kOrder = 4;
  std::size_t matches[kOrder] = {};
  std::size_t totals[kOrder] = {};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += hyps[i].size();
    ref_len += refs[i].size();
    for (std::size_t n = 1; n <= kOrder; ++n) {
      const NgramCounts h = ngrams(hyps[i], n);
      const NgramCounts r = ngrams(refs[i], n);
      for (const auto& [gram, count] : h) {
        totals[n - 1] += count;
        const auto it = r.find(gram);
        if (it != r.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (ref_len == 0) throw Error(ErrorCode::kUndefinedMetric, "BLEU of empty references");
  if (matches[0] == 0) return 0.0;
  double log_precision = 0.0;
  for (std::size_t n = 0; n < kOrder; ++n) {
    const double p = matches[n] == 0
                         ? 1.0 / static_cast<double>(totals[n] + 1)
                         : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    log_precision += std::log(p) / kOrder;
  }
  const double brevity =
      hyp_len < ref_len ? 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)
                        : 0.0;
  return 100.0 * std::exp(brevity + log_precision);
}

EvalReport evaluate(std::span<const Sentence> hyps, std::span<const Sentence> refs,
                    const TerOptions& options) {
  return {corpus_ter(hyps, refs, options), bleu(hyps, refs), hyps.size()};
}

}  // namespace keyape
