#include "semkey/semdep.h"

#include <algorithm>

namespace semkey {

double pair_similarity(const AssociationPair& a, const AssociationPair& b,
                       const WordSimilarity& sw) {
  return (sw.similarity(a.head_word, b.head_word) +
          sw.similarity(a.dep_word, b.dep_word)) /
         2.0;
}

std::vector<DirectionalRelationScore> directional_similarity(
    const RelationGroups& src, const RelationGroups& tgt,
    const WordSimilarity& sw) {
  std::vector<DirectionalRelationScore> out;
  out.reserve(src.relation_count());
  for (const auto& group : src.groups()) {
    DirectionalRelationScore score;
    score.relation = group.relation;
    const RelationGroups::Group* match = tgt.find(group.relation);
    double sum = 0.0;
    for (const AssociationPair& p : group.pairs) {
      double best = 0.0;
      if (match != nullptr) {
        for (const AssociationPair& q : match->pairs) {
          best = std::max(best, pair_similarity(p, q, sw));
        }
      }
      score.per_pair_scores.push_back(best);
      sum += best;
    }
    score.mean = sum / static_cast<double>(group.pairs.size());
    out.push_back(std::move(score));
  }
  return out;
}

double mean_relation_score(const std::vector<DirectionalRelationScore>& scores) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : scores) sum += s.mean;
  return sum / static_cast<double>(scores.size());
}

DependencySimilarity dependency_similarity(const RelationGroups& ref,
                                           const RelationGroups& hyp,
                                           const WordSimilarity& sw) {
  DependencySimilarity out;
  if (ref.empty() && hyp.empty()) {
    out.forward = out.backward = out.value = 1.0;
    return out;
  }
  out.forward_scores = directional_similarity(ref, hyp, sw);
  out.backward_scores = directional_similarity(hyp, ref, sw);
  if (ref.empty() || hyp.empty()) {
    out.value = 0.0;
    return out;
  }
  out.forward = mean_relation_score(out.forward_scores);
  out.backward = mean_relation_score(out.backward_scores);
  out.value = (out.forward + out.backward) / 2.0;
  return out;
}

}  // namespace semkey
