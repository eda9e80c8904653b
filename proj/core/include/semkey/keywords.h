#ifndef SEMKEY_KEYWORDS_H_
#define SEMKEY_KEYWORDS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "semkey/model.h"
#include "semkey/wordsim.h"

namespace semkey {

// n x m word similarities between reference (rows) and hypothesis (columns)
// keywords, row-major.
class KeywordMatrix {
 public:
  KeywordMatrix(KeywordSet ref, KeywordSet hyp, std::vector<double> cells);

  std::size_t rows() const { return ref_.size(); }
  std::size_t cols() const { return hyp_.size(); }
  double at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }

  const KeywordSet& ref() const { return ref_; }
  const KeywordSet& hyp() const { return hyp_; }

 private:
  KeywordSet ref_;
  KeywordSet hyp_;
  std::vector<double> cells_;
};

KeywordMatrix build_matrix(const KeywordSet& ref, const KeywordSet& hyp,
                           const WordSimilarity& sw);

struct GreedyStep {
  std::size_t row = 0;  // 0-based
  std::size_t col = 0;
  double similarity = 0.0;
  double weight = 0.0;  // mean of the two keyword weights

  bool operator==(const GreedyStep&) const = default;
};

struct GreedyMatch {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<GreedyStep> steps;
};

// Takes the largest surviving cell, records it, strikes out its row and
// column, and repeats min(n, m) times. Ties go to the smallest row, then the
// smallest column. Zero cells are matched like any other.
GreedyMatch greedy_match(const KeywordMatrix& matrix);

// sum(weight * similarity) / sum(weight) over the greedy steps. Absent when
// both keyword sets are empty, 0 when only one is. If every matched weight is
// zero the plain mean of the matched similarities is used.
std::optional<double> sim_kw(const GreedyMatch& match);

}  // namespace semkey

#endif  // SEMKEY_KEYWORDS_H_
