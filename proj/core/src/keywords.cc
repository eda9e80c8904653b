#include "semkey/keywords.h"

#include <algorithm>
#include <stdexcept>

namespace semkey {

KeywordMatrix::KeywordMatrix(KeywordSet ref, KeywordSet hyp, std::vector<double> cells)
    : ref_(std::move(ref)), hyp_(std::move(hyp)), cells_(std::move(cells)) {
  if (cells_.size() != ref_.size() * hyp_.size()) {
    throw std::invalid_argument("keyword matrix has " + std::to_string(cells_.size()) +
                                " cells for a " + std::to_string(ref_.size()) + "x" +
                                std::to_string(hyp_.size()) + " shape");
  }
}

KeywordMatrix build_matrix(const KeywordSet& ref, const KeywordSet& hyp,
                           const WordSimilarity& sw) {
  std::vector<double> cells;
  cells.reserve(ref.size() * hyp.size());
  for (const KeywordEntry& r : ref.entries()) {
    for (const KeywordEntry& h : hyp.entries()) {
      cells.push_back(sw.similarity(r.word, h.word));
    }
  }
  return KeywordMatrix(ref, hyp, std::move(cells));
}

GreedyMatch greedy_match(const KeywordMatrix& matrix) {
  GreedyMatch match;
  match.rows = matrix.rows();
  match.cols = matrix.cols();
  std::vector<bool> row_used(matrix.rows(), false);
  std::vector<bool> col_used(matrix.cols(), false);
  const std::size_t steps = std::min(matrix.rows(), matrix.cols());
  for (std::size_t s = 0; s < steps; ++s) {
    bool found = false;
    std::size_t best_r = 0, best_c = 0;
    double best = 0.0;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      if (row_used[r]) continue;
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        if (col_used[c]) continue;
        const double v = matrix.at(r, c);
        if (!found || v > best) {
          found = true;
          best = v;
          best_r = r;
          best_c = c;
        }
      }
    }
    row_used[best_r] = true;
    col_used[best_c] = true;
    const double weight = (matrix.ref().entries()[best_r].weight +
                           matrix.hyp().entries()[best_c].weight) /
                          2.0;
    match.steps.push_back({best_r, best_c, best, weight});
  }
  return match;
}

std::optional<double> sim_kw(const GreedyMatch& match) {
  if (match.rows == 0 && match.cols == 0) return std::nullopt;
  if (match.steps.empty()) return 0.0;
  double weighted = 0.0, weights = 0.0, plain = 0.0;
  for (const GreedyStep& s : match.steps) {
    weighted += s.weight * s.similarity;
    weights += s.weight;
    plain += s.similarity;
  }
  if (weights == 0.0) return plain / static_cast<double>(match.steps.size());
  return std::clamp(weighted / weights, 0.0, 1.0);
}

}  // namespace semkey
