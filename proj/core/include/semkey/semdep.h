#ifndef SEMKEY_SEMDEP_H_
#define SEMKEY_SEMDEP_H_

// Sentence similarity from semantic dependency structure.
//
// Pairs are compared position by position (head with head, dependent with
// dependent). Every pair of the source sentence takes its best match among
// the target pairs carrying the same relation label, or 0 when the target has
// no such relation. Target pairs may serve several source pairs. Relation
// scores are averaged per direction, and the two directions are averaged.

#include <vector>

#include "semkey/model.h"
#include "semkey/wordsim.h"

namespace semkey {

// (sw(head1, head2) + sw(dep1, dep2)) / 2
double pair_similarity(const AssociationPair& a, const AssociationPair& b,
                       const WordSimilarity& sw);

// One entry per relation of `src`, in `src` order.
std::vector<DirectionalRelationScore> directional_similarity(
    const RelationGroups& src, const RelationGroups& tgt,
    const WordSimilarity& sw);

// Mean of the relation means; 0 for an empty list.
double mean_relation_score(const std::vector<DirectionalRelationScore>& scores);

struct DependencySimilarity {
  double forward = 0.0;   // reference as source
  double backward = 0.0;  // hypothesis as source
  double value = 0.0;     // sim_de
  std::vector<DirectionalRelationScore> forward_scores;
  std::vector<DirectionalRelationScore> backward_scores;
};

// Both sides empty scores 1; exactly one side empty scores 0.
DependencySimilarity dependency_similarity(const RelationGroups& ref,
                                           const RelationGroups& hyp,
                                           const WordSimilarity& sw);

inline double sim_de(const RelationGroups& ref, const RelationGroups& hyp,
                     const WordSimilarity& sw) {
  return dependency_similarity(ref, hyp, sw).value;
}

}  // namespace semkey

#endif  // SEMKEY_SEMDEP_H_
