#include "semkey/baselines.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace semkey {

namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

}  // namespace

double bleu(std::span<const std::string> ref, std::span<const std::string> hyp,
            int max_n) {
  if (max_n < 1) throw std::invalid_argument("max_n must be at least 1");
  if (hyp.empty()) return 0.0;

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp_counts = count_ngrams(hyp, static_cast<std::size_t>(n));
    const auto ref_counts = count_ngrams(ref, static_cast<std::size_t>(n));
    long matches = 0, total = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    double precision;
    if (n == 1) {
      if (matches == 0) return 0.0;
      precision = static_cast<double>(matches) / static_cast<double>(total);
    } else {
      precision = static_cast<double>(matches + 1) / static_cast<double>(total + 1);
    }
    log_sum += std::log(precision);
  }

  const double c = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::clamp(brevity * std::exp(log_sum / max_n), 0.0, 1.0);
}

double vsm_cosine(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty() || hyp.empty()) return 0.0;
  std::map<std::string_view, std::pair<double, double>> tf;
  for (const auto& t : ref) tf[t].first += 1.0;
  for (const auto& t : hyp) tf[t].second += 1.0;
  double dot = 0.0, nr = 0.0, nh = 0.0;
  for (const auto& [term, counts] : tf) {
    dot += counts.first * counts.second;
    nr += counts.first * counts.first;
    nh += counts.second * counts.second;
  }
  return std::clamp(dot / std::sqrt(nr * nh), 0.0, 1.0);
}

std::vector<std::string> surfaces(const SemGraph& graph) {
  std::vector<std::string> out;
  out.reserve(graph.tokens().size());
  for (const Token& t : graph.tokens()) out.push_back(t.surface);
  return out;
}

}  // namespace semkey
