#ifndef SEMKEY_INGEST_H_
#define SEMKEY_INGEST_H_

// Readers and writers for the on-disk annotation formats:
//
//   graph JSON    {"sentence": str,
//                  "tokens": [{"index": int, "surface": str, "pos": str}],
//                  "edges":  [{"head": int, "dep": int, "rel": str}]}
//   keyword JSON  {"keywords": [{"word": str, "score": float | str}]}
//   CoNLL-style   ID <tab> FORM <tab> POS <tab> HEAD <tab> DEPREL, one row per
//                 edge; an ID may repeat to give a token several heads;
//                 HEAD and DEPREL are "_" for a token without a head; an
//                 optional "# text = ..." comment carries the sentence.
//   corpus JSONL  one group per line, see load_corpus().

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semkey/model.h"

namespace semkey {

// Relation labels dropped before scoring. Defaults to {"mPunc"}.
struct RelationDenylist {
  std::set<std::string, std::less<>> labels{"mPunc"};

  bool contains(std::string_view relation) const {
    return labels.contains(relation);
  }

  // Comma-separated labels; surrounding blanks are ignored and an empty
  // string yields an empty denylist.
  static RelationDenylist parse(std::string_view comma_separated);
};

SemGraph parse_sdp_json(std::string_view bytes);
std::string emit_sdp_json(const SemGraph& graph);

std::vector<SemGraph> parse_sdp_conll(std::string_view text);
std::string emit_conll(const SemGraph& graph);

// Drops root-marked and denylisted edges, then groups the canonical pairs of
// what is left by relation.
RelationGroups extract_relation_groups(
    const SemGraph& graph, const RelationDenylist& denylist = {});

KeywordSet parse_keywords(std::string_view bytes);
std::string emit_keywords_json(const KeywordSet& keywords);

// Supplies annotations that a corpus entry leaves out.
class AnnotationSource {
 public:
  virtual ~AnnotationSource() = default;
  virtual SemGraph annotate_sdp(const std::string& text) = 0;
  virtual KeywordSet annotate_keywords(const std::string& text) = 0;
};

// Loads a corpus in JSONL form:
//
//   {"id": str, "source": str,
//    "reference": {"text": str, "sdp": <graph | {"file": str}>,
//                  "keywords": <keywords | {"file": str}>},
//    "systems": [{"name": str, "text": str, "sdp": ..., "keywords": ...}],
//    "human_best": str}
//
// File references are resolved against the corpus file's directory; a
// referenced file ending in ".conll" must hold exactly one sentence. When
// "sdp" or "keywords" is missing, `source` is asked for it; without a source
// that is a schema error. Blank lines are skipped.
std::vector<CorpusGroup> load_corpus(const std::filesystem::path& path,
                                     AnnotationSource* source = nullptr);

std::vector<CorpusGroup> parse_corpus(std::string_view jsonl,
                                      const std::filesystem::path& base_dir,
                                      AnnotationSource* source = nullptr);

// Reads one sentence for single-pair scoring. Accepts a sentence document
// ({"text", "sdp", "keywords"} as in the corpus), a bare graph JSON document
// (no keywords), or a one-sentence ".conll" file.
AnnotatedSentence load_annotated_sentence(const std::filesystem::path& path,
                                          AnnotationSource* source = nullptr);

// Whole file as bytes; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);

}  // namespace semkey

#endif  // SEMKEY_INGEST_H_
