#ifndef SEMKEY_BASELINES_H_
#define SEMKEY_BASELINES_H_

// Surface-level comparison metrics over pre-segmented tokens.

#include <span>
#include <string>
#include <vector>

#include "semkey/model.h"

namespace semkey {

// Sentence BLEU: geometric mean of clipped n-gram precisions for n = 1..max_n
// with uniform weights, times the brevity penalty. Unigram precision is
// unsmoothed; higher orders use (matches + 1) / (total + 1). Returns 0 for an
// empty hypothesis. Throws std::invalid_argument if max_n < 1.
double bleu(std::span<const std::string> ref, std::span<const std::string> hyp,
            int max_n = 4);

// Cosine of term-frequency vectors; 0 if either side is empty.
double vsm_cosine(std::span<const std::string> ref, std::span<const std::string> hyp);

// Token surfaces in sentence order.
std::vector<std::string> surfaces(const SemGraph& graph);

}  // namespace semkey

#endif  // SEMKEY_BASELINES_H_
