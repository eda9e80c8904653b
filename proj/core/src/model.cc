#include "semkey/model.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>
#include <unordered_set>

#include "semkey/errors.h"

namespace semkey {

bool is_root_relation(std::string_view relation) {
  static constexpr std::string_view kRoot = "root";
  if (relation.size() != kRoot.size()) return false;
  for (std::size_t i = 0; i < relation.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(relation[i])) != kRoot[i]) {
      return false;
    }
  }
  return true;
}

SemGraph::SemGraph(std::vector<Token> tokens, std::vector<SemEdge> edges,
                   std::string sentence_text)
    : tokens_(std::move(tokens)),
      edges_(std::move(edges)),
      sentence_text_(std::move(sentence_text)) {
  std::stable_sort(tokens_.begin(), tokens_.end(),
                   [](const Token& a, const Token& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const Token& t = tokens_[i];
    if (t.index != static_cast<int>(i) + 1) {
      throw MalformedGraphError("token indices must be 1.." +
                                std::to_string(tokens_.size()) +
                                " without gaps or repeats; found " +
                                std::to_string(t.index));
    }
    if (t.surface.empty()) {
      throw MalformedGraphError("token " + std::to_string(t.index) +
                                " has an empty surface");
    }
  }

  const int n = static_cast<int>(tokens_.size());
  for (const SemEdge& e : edges_) {
    const std::string where = "edge (" + std::to_string(e.head_index) + ", " +
                              std::to_string(e.dep_index) + ", " + e.relation +
                              ")";
    if (e.relation.empty()) {
      throw MalformedGraphError(where + " has an empty relation");
    }
    const bool root = is_root_relation(e.relation);
    if (e.dep_index < 1 || e.dep_index > n) {
      throw MalformedGraphError(where + ": dependent index out of range");
    }
    if (e.head_index < 0 || e.head_index > n || (e.head_index == 0 && !root)) {
      throw MalformedGraphError(where + ": head index out of range");
    }
    if (e.head_index == e.dep_index && !root) {
      throw MalformedGraphError(where + ": self loop");
    }
  }

  std::sort(edges_.begin(), edges_.end(), [](const SemEdge& a, const SemEdge& b) {
    return std::tie(a.dep_index, a.head_index, a.relation) <
           std::tie(b.dep_index, b.head_index, b.relation);
  });
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw MalformedGraphError("duplicate edge (" +
                              std::to_string(dup->head_index) + ", " +
                              std::to_string(dup->dep_index) + ", " +
                              dup->relation + ")");
  }
}

const Token& SemGraph::token(int index) const {
  if (!has_token(index)) {
    throw MalformedGraphError("token index " + std::to_string(index) +
                              " out of range 1.." +
                              std::to_string(tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(index) - 1];
}

AssociationPair canonicalize_pair(const SemEdge& edge, const SemGraph& graph) {
  return {graph.token(edge.head_index).surface,
          graph.token(edge.dep_index).surface, edge.relation};
}

void RelationGroups::add(AssociationPair pair) {
  for (Group& g : groups_) {
    if (g.relation == pair.relation) {
      g.pairs.push_back(std::move(pair));
      return;
    }
  }
  std::string relation = pair.relation;
  groups_.push_back({std::move(relation), {std::move(pair)}});
}

const RelationGroups::Group* RelationGroups::find(
    std::string_view relation) const {
  for (const Group& g : groups_) {
    if (g.relation == relation) return &g;
  }
  return nullptr;
}

std::size_t RelationGroups::pair_count() const {
  std::size_t n = 0;
  for (const Group& g : groups_) n += g.pairs.size();
  return n;
}

KeywordSet::KeywordSet(std::vector<KeywordEntry> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const KeywordEntry& e = entries_[i];
    const std::string field = "keywords[" + std::to_string(i) + "]";
    if (e.word.empty()) throw SchemaError(field + ".word", "empty keyword");
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
      throw SchemaError(field + ".score",
                        "weight " + std::to_string(e.weight) +
                            " outside [0, 1]");
    }
    if (!seen.insert(e.word).second) {
      throw SchemaError(field + ".word", "duplicate keyword '" + e.word + "'");
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const KeywordEntry& a, const KeywordEntry& b) {
                     return a.weight > b.weight;
                   });
}

void validate_group(const CorpusGroup& group) {
  if (group.systems.empty()) {
    throw SchemaError("systems", "group '" + group.id + "' has no systems");
  }
  std::set<std::string> names;
  for (const SystemOutput& s : group.systems) {
    if (s.name.empty()) {
      throw SchemaError("systems.name", "empty system name in group '" +
                                            group.id + "'");
    }
    if (!names.insert(s.name).second) {
      throw SchemaError("systems.name", "duplicate system '" + s.name +
                                            "' in group '" + group.id + "'");
    }
  }
  if (!names.contains(group.human_best)) {
    throw SchemaError("human_best", "'" + group.human_best +
                                        "' is not a system of group '" +
                                        group.id + "'");
  }
}

}  // namespace semkey
