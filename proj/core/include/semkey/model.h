#ifndef SEMKEY_MODEL_H_
#define SEMKEY_MODEL_H_

// Domain types shared by every module. All of them are immutable once
// constructed and may be shared freely across scoring threads.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semkey {

struct Token {
  int index = 0;  // 1-based
  std::string surface;
  std::string pos;  // opaque, may be empty; kept for reports only

  bool operator==(const Token&) const = default;
};

struct SemEdge {
  int head_index = 0;  // 0 is the virtual root
  int dep_index = 0;
  std::string relation;

  auto operator<=>(const SemEdge&) const = default;
};

// True for labels that mark the virtual root ("Root", "ROOT", ...).
bool is_root_relation(std::string_view relation);

// Tokens plus labeled semantic dependency edges of one sentence.
//
// The constructor sorts tokens by index and edges by (dep, head, relation),
// so two graphs describing the same annotation compare equal regardless of
// the order the input listed them in. Throws MalformedGraphError when:
//   - token indices are not exactly 1..n, or a surface is empty;
//   - an edge refers to a missing token (0 only with a root label);
//   - an edge has an empty label or is a self loop without a root label;
//   - a (head, dep, relation) triple appears twice.
class SemGraph {
 public:
  SemGraph() = default;
  SemGraph(std::vector<Token> tokens, std::vector<SemEdge> edges,
           std::string sentence_text);

  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<SemEdge>& edges() const { return edges_; }
  const std::string& sentence_text() const { return sentence_text_; }

  // Token with the given 1-based index; throws MalformedGraphError.
  const Token& token(int index) const;
  bool has_token(int index) const {
    return index >= 1 && static_cast<std::size_t>(index) <= tokens_.size();
  }

  bool operator==(const SemGraph&) const = default;

 private:
  std::vector<Token> tokens_;
  std::vector<SemEdge> edges_;
  std::string sentence_text_;
};

// ((head word, dependent word), relation). Always governor first.
struct AssociationPair {
  std::string head_word;
  std::string dep_word;
  std::string relation;

  bool operator==(const AssociationPair&) const = default;
};

// Projects an edge onto the surfaces of its tokens. Throws
// MalformedGraphError if either index is outside the graph (including the
// virtual root, which has no surface).
AssociationPair canonicalize_pair(const SemEdge& edge, const SemGraph& graph);

// Association pairs of one sentence grouped by relation label. Groups keep
// the order in which their label first appeared; no group is ever empty.
class RelationGroups {
 public:
  struct Group {
    std::string relation;
    std::vector<AssociationPair> pairs;

    bool operator==(const Group&) const = default;
  };

  void add(AssociationPair pair);

  const std::vector<Group>& groups() const { return groups_; }
  const Group* find(std::string_view relation) const;

  bool empty() const { return groups_.empty(); }
  std::size_t relation_count() const { return groups_.size(); }
  std::size_t pair_count() const;

  bool operator==(const RelationGroups&) const = default;

 private:
  std::vector<Group> groups_;
};

struct KeywordEntry {
  std::string word;
  double weight = 0.0;  // in [0, 1]

  bool operator==(const KeywordEntry&) const = default;
};

// Keywords ordered by non-increasing weight. Equal weights keep their input
// order. Throws SchemaError for out-of-range weights or repeated words.
class KeywordSet {
 public:
  KeywordSet() = default;
  explicit KeywordSet(std::vector<KeywordEntry> entries);

  const std::vector<KeywordEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const KeywordSet&) const = default;

 private:
  std::vector<KeywordEntry> entries_;
};

// Score of one relation in one direction: per-pair maxima and their mean.
struct DirectionalRelationScore {
  std::string relation;
  std::vector<double> per_pair_scores;
  double mean = 0.0;
};

struct MatchedKeywordPair {
  std::string ref_word;
  std::string hyp_word;
  double similarity = 0.0;
  double weight = 0.0;
};

struct ScoreBreakdown {
  double sim_de = 0.0;
  std::optional<double> sim_kw;  // absent when both keyword sets are empty
  double final_score = 0.0;
  std::vector<DirectionalRelationScore> forward_relation_scores;
  std::vector<DirectionalRelationScore> backward_relation_scores;
  std::vector<MatchedKeywordPair> matched_keyword_pairs;
};

// One sentence with everything the metric needs.
struct AnnotatedSentence {
  std::string text;
  SemGraph graph;
  KeywordSet keywords;
};

struct SystemOutput {
  std::string name;
  AnnotatedSentence sentence;
};

struct CorpusGroup {
  std::string id;
  std::string source_text;
  AnnotatedSentence reference;
  std::vector<SystemOutput> systems;
  std::string human_best;
};

// Throws SchemaError unless system names are unique, there is at least one
// system, and human_best names one of them.
void validate_group(const CorpusGroup& group);

}  // namespace semkey

#endif  // SEMKEY_MODEL_H_
