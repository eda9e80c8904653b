#ifndef SEMKEY_WORDSIM_H_
#define SEMKEY_WORDSIM_H_

// Word-to-word similarity Sw(a, b) in [0, 1].
//
// Every provider is reflexive (sw(w, w) == 1), symmetric and bounded. Words a
// provider has no data for fall back to exact surface comparison, so the
// result is always defined.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semkey {

class WordSimilarity {
 public:
  virtual ~WordSimilarity() = default;

  virtual double similarity(std::string_view a, std::string_view b) const = 0;

  // Whether the provider has its own data for this word.
  virtual bool knows(std::string_view word) const = 0;

  virtual std::string name() const = 0;
};

using WordSimilarityPtr = std::shared_ptr<const WordSimilarity>;

class ExactMatch final : public WordSimilarity {
 public:
  double similarity(std::string_view a, std::string_view b) const override {
    return a == b ? 1.0 : 0.0;
  }
  bool knows(std::string_view) const override { return true; }
  std::string name() const override { return "exact"; }
};

// Word -> category codes in a Cilin-style hierarchy such as "Aa01A01=".
// A code is split into levels at every change of character class
// (upper case, lower case, digit); a trailing '=', '#' or '@' marker is
// dropped. All codes in one lexicon must have the same number of levels.
class Lexicon {
 public:
  Lexicon() = default;

  // Throws std::invalid_argument on an empty code, a repeated word or a level
  // count different from codes already present.
  void add(std::string word, const std::vector<std::string>& codes);

  const std::vector<std::vector<std::string>>* codes(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t levels() const { return levels_; }

  static std::vector<std::string> split_levels(std::string_view code);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  // Each code is stored pre-split into levels.
  std::unordered_map<std::string, std::vector<std::vector<std::string>>, Hash,
                     std::equal_to<>>
      entries_;
  std::size_t levels_ = 0;
};

// Lines "word<TAB>code[,code...]". Blank lines are skipped. Throws LoadError
// with the 1-based line number, or IoError if the file cannot be read.
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::string_view text);

// Word -> dense vector; every vector has the same dimension and is non-zero.
class EmbeddingTable {
 public:
  // Throws std::invalid_argument on dimension mismatch, zero vector or
  // repeated word.
  void add(std::string word, std::vector<double> vector);

  const std::vector<double>* find(std::string_view word) const;
  std::size_t size() const { return vectors_.size(); }
  std::size_t dimension() const { return dimension_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, std::vector<double>, Hash, std::equal_to<>>
      vectors_;
  std::size_t dimension_ = 0;
};

// Lines "word v1 v2 ... vd" separated by blanks. Same error contract as
// load_lexicon().
EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable parse_embeddings(std::string_view text);

// max over code pairs of shared leading levels / total levels.
class LexiconSimilarity final : public WordSimilarity {
 public:
  explicit LexiconSimilarity(std::shared_ptr<const Lexicon> lexicon)
      : lexicon_(std::move(lexicon)) {}

  double similarity(std::string_view a, std::string_view b) const override;
  bool knows(std::string_view word) const override {
    return lexicon_->codes(word) != nullptr;
  }
  std::string name() const override { return "lexicon"; }

 private:
  std::shared_ptr<const Lexicon> lexicon_;
};

// Cosine similarity mapped onto [0, 1] as (cos + 1) / 2.
class EmbeddingSimilarity final : public WordSimilarity {
 public:
  explicit EmbeddingSimilarity(std::shared_ptr<const EmbeddingTable> table)
      : table_(std::move(table)) {}

  double similarity(std::string_view a, std::string_view b) const override;
  bool knows(std::string_view word) const override {
    return table_->find(word) != nullptr;
  }
  std::string name() const override { return "embedding"; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

// Combines several providers.
//
// In priority mode the first constituent that knows both words answers. In
// weighted mode the answer is the weight-renormalized blend of the
// positive-weight constituents that know both words. Either way, when no
// constituent qualifies the pair is compared by exact match.
class FusionSimilarity final : public WordSimilarity {
 public:
  struct Component {
    WordSimilarityPtr provider;
    double weight = 0.0;
  };

  // Priority order, e.g. lexicon then embedding.
  static FusionSimilarity priority(std::vector<WordSimilarityPtr> order);

  // Weights must be non-negative and sum to 1 (within 1e-9); throws
  // std::invalid_argument otherwise.
  static FusionSimilarity weighted(std::vector<Component> components);

  double similarity(std::string_view a, std::string_view b) const override;
  bool knows(std::string_view word) const override;
  std::string name() const override { return "fusion"; }

 private:
  FusionSimilarity(std::vector<Component> components, bool weighted)
      : components_(std::move(components)), weighted_(weighted) {}

  std::vector<Component> components_;
  bool weighted_;
};

// Provider selection as exposed on the command line.
enum class ProviderKind { kExact, kLexicon, kEmbedding, kFusion };

ProviderKind parse_provider_kind(std::string_view name);
std::string_view to_string(ProviderKind kind);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kExact;
  std::filesystem::path lexicon_path;
  std::filesystem::path embeddings_path;
  // Fusion only. Constituents are the lexicon (if a path is set), the
  // embeddings (if a path is set) and exact match, in that order. Empty means
  // priority mode; otherwise one weight per constituent.
  std::vector<double> fusion_weights;
};

// Loads whatever resources the kind needs. Throws UsageError when a needed
// path is missing, LoadError / IoError when a resource is bad.
WordSimilarityPtr make_provider(const ProviderConfig& config);

}  // namespace semkey

#endif  // SEMKEY_WORDSIM_H_
