#ifndef SEMKEY_TESTS_SUPPORT_H_
#define SEMKEY_TESTS_SUPPORT_H_

// Fixture access, random generators and brute-force oracles shared by the
// unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "semkey/ingest.h"
#include "semkey/keywords.h"
#include "semkey/model.h"
#include "semkey/wordsim.h"

namespace semkey::support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SEMKEY_FIXTURE_DIR) / name;
}

inline SemGraph fixture_graph(const std::string& name) {
  const auto path = fixture(name);
  if (path.extension() == ".conll") return parse_sdp_conll(read_file(path)).at(0);
  return parse_sdp_json(read_file(path));
}

inline KeywordSet fixture_keywords(const std::string& name) {
  return parse_keywords(read_file(fixture(name)));
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("semkey-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Symmetric similarity with an independent random value per unordered word
// pair; 1 on the diagonal. Distinct pairs get distinct values with
// overwhelming probability.
class RandomTableSimilarity final : public WordSimilarity {
 public:
  RandomTableSimilarity(const std::vector<std::string>& vocab, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      for (std::size_t j = i + 1; j < vocab.size(); ++j) {
        table_[ordered(vocab[i], vocab[j])] = u(rng);
      }
    }
  }
  double similarity(std::string_view a, std::string_view b) const override {
    if (a == b) return 1.0;
    auto it = table_.find(ordered(std::string(a), std::string(b)));
    return it == table_.end() ? 0.0 : it->second;
  }
  bool knows(std::string_view) const override { return true; }
  std::string name() const override { return "random-table"; }

 private:
  static std::pair<std::string, std::string> ordered(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }
  std::map<std::pair<std::string, std::string>, double> table_;
};

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {"港口", "恢复", "运行", "周", "几",
                                                 "后",   "才",   "爷爷", "小明", "看到"};
  return words;
}

inline const std::vector<std::string>& relations() {
  static const std::vector<std::string> labels = {"Agt", "Pat", "Exp", "Time", "mDepd", "mPunc"};
  return labels;
}

// Small random graph: 1..max_tokens tokens drawn from `vocabulary()` (with
// repeats), random labelled edges, optionally a root edge.
inline SemGraph random_graph(std::mt19937_64& rng, int max_tokens = 6, int max_edges = 8) {
  std::uniform_int_distribution<int> ntok(1, max_tokens);
  const int n = ntok(rng);
  std::uniform_int_distribution<std::size_t> word(0, vocabulary().size() - 1);
  std::uniform_int_distribution<std::size_t> rel(0, relations().size() - 1);
  std::uniform_int_distribution<int> idx(1, n);
  std::uniform_int_distribution<int> nedge(0, max_edges);

  std::vector<Token> tokens;
  std::string text;
  for (int i = 1; i <= n; ++i) {
    tokens.push_back({i, vocabulary()[word(rng)], "n"});
    text += tokens.back().surface;
  }
  std::set<std::tuple<int, int, std::string>> seen;
  std::vector<SemEdge> edges;
  if (rng() % 2 == 0) {
    edges.push_back({0, idx(rng), "Root"});
    seen.emplace(edges.back().head_index, edges.back().dep_index, "Root");
  }
  const int want = nedge(rng);
  for (int k = 0; k < want * 3 && static_cast<int>(edges.size()) < want; ++k) {
    const int h = idx(rng), d = idx(rng);
    if (h == d) continue;
    const std::string& r = relations()[rel(rng)];
    if (!seen.emplace(h, d, r).second) continue;
    edges.push_back({h, d, r});
  }
  return SemGraph(std::move(tokens), std::move(edges), std::move(text));
}

inline KeywordSet random_keywords(std::mt19937_64& rng, std::size_t max_size = 5) {
  std::vector<std::string> words = vocabulary();
  std::shuffle(words.begin(), words.end(), rng);
  std::uniform_int_distribution<std::size_t> size(0, std::min(max_size, words.size()));
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<KeywordEntry> entries;
  const std::size_t k = size(rng);
  for (std::size_t i = 0; i < k; ++i) entries.push_back({words[i], weight(rng)});
  return KeywordSet(std::move(entries));
}

// Keyword sets of exact sizes with placeholder words, for matrix tests.
inline KeywordSet placeholder_keywords(std::size_t n, std::mt19937_64& rng,
                                       const std::string& prefix) {
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<KeywordEntry> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({prefix + std::to_string(i), weight(rng)});
  return KeywordSet(std::move(entries));
}

inline KeywordMatrix random_matrix(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                   bool coarse = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 4);
  std::vector<double> cells(n * m);
  for (double& c : cells) c = coarse ? level(rng) / 4.0 : u(rng);
  return KeywordMatrix(placeholder_keywords(n, rng, "r"), placeholder_keywords(m, rng, "h"),
                       std::move(cells));
}

namespace oracle {

struct RelationScore {
  std::vector<double> per_pair;
  double mean = 0.0;
};

// Directional relation scores by direct enumeration over the graphs' edges: every source
// pair is compared against every target pair, and only same-label targets
// count toward the max.
inline std::vector<std::pair<std::string, RelationScore>> directional(
    const SemGraph& src, const SemGraph& tgt, const WordSimilarity& sw,
    const RelationDenylist& deny = {}) {
  auto pairs_of = [&](const SemGraph& g) {
    std::vector<AssociationPair> out;
    for (const SemEdge& e : g.edges()) {
      if (e.head_index == 0 || is_root_relation(e.relation) || deny.contains(e.relation)) {
        continue;
      }
      out.push_back({g.token(e.head_index).surface, g.token(e.dep_index).surface, e.relation});
    }
    return out;
  };
  const auto sp = pairs_of(src);
  const auto tp = pairs_of(tgt);

  std::vector<std::string> order;
  for (const auto& p : sp) {
    if (std::find(order.begin(), order.end(), p.relation) == order.end()) {
      order.push_back(p.relation);
    }
  }
  std::vector<std::pair<std::string, RelationScore>> out;
  for (const std::string& rel : order) {
    RelationScore rs;
    double sum = 0.0;
    for (const auto& p : sp) {
      if (p.relation != rel) continue;
      double best = 0.0;
      for (const auto& q : tp) {
        if (q.relation != rel) continue;
        const double s = (sw.similarity(p.head_word, q.head_word) +
                          sw.similarity(p.dep_word, q.dep_word)) /
                         2.0;
        if (s > best) best = s;
      }
      rs.per_pair.push_back(best);
      sum += best;
    }
    rs.mean = sum / static_cast<double>(rs.per_pair.size());
    out.emplace_back(rel, std::move(rs));
  }
  return out;
}

// Best value of sum(weight * similarity) over all matchings of size
// min(rows, cols), by enumerating permutations of the larger side.
inline double optimal_objective(const KeywordMatrix& m) {
  const bool transpose = m.rows() > m.cols();
  const std::size_t small = transpose ? m.cols() : m.rows();
  const std::size_t large = transpose ? m.rows() : m.cols();
  auto weight = [&](std::size_t r, std::size_t c) {
    return (m.ref().entries()[r].weight + m.hyp().entries()[c].weight) / 2.0;
  };
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small; ++i) {
      const std::size_t r = transpose ? perm[i] : i;
      const std::size_t c = transpose ? i : perm[i];
      total += weight(r, c) * m.at(r, c);
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct Step {
  std::size_t row, col;
  double similarity, weight;
};

// The max-delete procedure on a physically shrinking copy of the matrix.
inline std::vector<Step> greedy(const KeywordMatrix& m) {
  std::vector<std::size_t> rows(m.rows()), cols(m.cols());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::vector<std::vector<double>> grid(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) grid[r][c] = m.at(r, c);
  }
  std::vector<Step> steps;
  while (!rows.empty() && !cols.empty()) {
    std::vector<double> flat;
    for (const auto& row : grid) flat.insert(flat.end(), row.begin(), row.end());
    const auto at = static_cast<std::size_t>(
        std::max_element(flat.begin(), flat.end()) - flat.begin());
    const std::size_t r = at / cols.size(), c = at % cols.size();
    const std::size_t orow = rows[r], ocol = cols[c];
    steps.push_back({orow, ocol, grid[r][c],
                     (m.ref().entries()[orow].weight + m.hyp().entries()[ocol].weight) / 2.0});
    grid.erase(grid.begin() + static_cast<std::ptrdiff_t>(r));
    for (auto& row : grid) row.erase(row.begin() + static_cast<std::ptrdiff_t>(c));
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(r));
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(c));
  }
  return steps;
}

inline double objective(const std::vector<GreedyStep>& steps) {
  double total = 0.0;
  for (const auto& s : steps) total += s.weight * s.similarity;
  return total;
}

}  // namespace oracle

}  // namespace semkey::support

#endif  // SEMKEY_TESTS_SUPPORT_H_
