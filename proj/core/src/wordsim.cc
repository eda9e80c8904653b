#include "semkey/wordsim.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "semkey/errors.h"
#include "semkey/ingest.h"

namespace semkey {

namespace {

enum class CharClass { kUpper, kLower, kDigit, kOther };

CharClass classify(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (std::isupper(u)) return CharClass::kUpper;
  if (std::islower(u)) return CharClass::kLower;
  if (std::isdigit(u)) return CharClass::kDigit;
  return CharClass::kOther;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    fn(line, line_no);
  }
}

std::size_t shared_levels(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

}  // namespace

std::vector<std::string> Lexicon::split_levels(std::string_view code) {
  while (!code.empty() &&
         (code.back() == '=' || code.back() == '#' || code.back() == '@')) {
    code.remove_suffix(1);
  }
  std::vector<std::string> levels;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= code.size(); ++i) {
    if (i == code.size() || classify(code[i]) != classify(code[i - 1])) {
      levels.emplace_back(code.substr(start, i - start));
      start = i;
    }
  }
  return levels;
}

void Lexicon::add(std::string word, const std::vector<std::string>& codes) {
  if (word.empty()) throw std::invalid_argument("empty word");
  if (codes.empty()) throw std::invalid_argument("word '" + word + "' has no codes");
  if (entries_.contains(word)) {
    throw std::invalid_argument("duplicate word '" + word + "'");
  }
  std::vector<std::vector<std::string>> split;
  for (const std::string& code : codes) {
    auto levels = split_levels(code);
    if (levels.empty()) throw std::invalid_argument("empty code for '" + word + "'");
    if (levels_ != 0 && levels.size() != levels_) {
      throw std::invalid_argument("code '" + code + "' has " +
                                  std::to_string(levels.size()) +
                                  " levels, expected " + std::to_string(levels_));
    }
    levels_ = levels.size();
    split.push_back(std::move(levels));
  }
  entries_.emplace(std::move(word), std::move(split));
}

const std::vector<std::vector<std::string>>* Lexicon::codes(
    std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon parse_lexicon(std::string_view text) {
  Lexicon lexicon;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw LoadError("expected 'word<TAB>code[,code...]'", line_no);
    }
    std::string word(trim(line.substr(0, tab)));
    std::vector<std::string> codes;
    std::string_view rest = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      if (comma == std::string_view::npos) comma = rest.size();
      codes.emplace_back(trim(rest.substr(start, comma - start)));
      start = comma + 1;
    }
    try {
      lexicon.add(std::move(word), codes);
    } catch (const std::invalid_argument& e) {
      throw LoadError(e.what(), line_no);
    }
  });
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_file(path));
}

void EmbeddingTable::add(std::string word, std::vector<double> vector) {
  if (word.empty()) throw std::invalid_argument("empty word");
  if (vector.empty()) throw std::invalid_argument("'" + word + "' has no components");
  if (dimension_ != 0 && vector.size() != dimension_) {
    throw std::invalid_argument("'" + word + "' has dimension " +
                                std::to_string(vector.size()) + ", expected " +
                                std::to_string(dimension_));
  }
  if (std::all_of(vector.begin(), vector.end(), [](double x) { return x == 0.0; })) {
    throw std::invalid_argument("'" + word + "' is a zero vector");
  }
  if (vectors_.contains(word)) {
    throw std::invalid_argument("duplicate word '" + word + "'");
  }
  dimension_ = vector.size();
  vectors_.emplace(std::move(word), std::move(vector));
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable parse_embeddings(std::string_view text) {
  EmbeddingTable table;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string_view::npos) break;
      auto end = line.find_first_of(" \t\r", pos);
      if (end == std::string_view::npos) end = line.size();
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (fields.size() < 2) throw LoadError("expected 'word v1 ... vd'", line_no);
    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      auto f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw LoadError("component " + std::to_string(i) + " '" + std::string(f) +
                            "' is not a finite number",
                        line_no);
      }
      values.push_back(v);
    }
    try {
      table.add(std::string(fields[0]), std::move(values));
    } catch (const std::invalid_argument& e) {
      throw LoadError(e.what(), line_no);
    }
  });
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

double LexiconSimilarity::similarity(std::string_view a, std::string_view b) const {
  if (a == b) return 1.0;
  const auto* ca = lexicon_->codes(a);
  const auto* cb = lexicon_->codes(b);
  if (ca == nullptr || cb == nullptr) return 0.0;
  std::size_t best = 0;
  for (const auto& x : *ca) {
    for (const auto& y : *cb) best = std::max(best, shared_levels(x, y));
  }
  return static_cast<double>(best) / static_cast<double>(lexicon_->levels());
}

double EmbeddingSimilarity::similarity(std::string_view a, std::string_view b) const {
  if (a == b) return 1.0;
  const auto* u = table_->find(a);
  const auto* v = table_->find(b);
  if (u == nullptr || v == nullptr) return 0.0;
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u->size(); ++i) {
    dot += (*u)[i] * (*v)[i];
    nu += (*u)[i] * (*u)[i];
    nv += (*v)[i] * (*v)[i];
  }
  const double cosine = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
  return (cosine + 1.0) / 2.0;
}

FusionSimilarity FusionSimilarity::priority(std::vector<WordSimilarityPtr> order) {
  std::vector<Component> components;
  for (auto& p : order) {
    if (!p) throw std::invalid_argument("null provider in fusion");
    components.push_back({std::move(p), 1.0});
  }
  return FusionSimilarity(std::move(components), false);
}

FusionSimilarity FusionSimilarity::weighted(std::vector<Component> components) {
  double total = 0.0;
  for (const Component& c : components) {
    if (!c.provider) throw std::invalid_argument("null provider in fusion");
    if (!(c.weight >= 0.0)) {
      throw std::invalid_argument("fusion weights must be non-negative");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("fusion weights must sum to 1, got " +
                                std::to_string(total));
  }
  return FusionSimilarity(std::move(components), true);
}

double FusionSimilarity::similarity(std::string_view a, std::string_view b) const {
  if (a == b) return 1.0;
  if (!weighted_) {
    for (const Component& c : components_) {
      if (c.provider->knows(a) && c.provider->knows(b)) {
        return c.provider->similarity(a, b);
      }
    }
    return 0.0;
  }
  double sum = 0.0, weight = 0.0;
  for (const Component& c : components_) {
    if (c.weight > 0.0 && c.provider->knows(a) && c.provider->knows(b)) {
      sum += c.weight * c.provider->similarity(a, b);
      weight += c.weight;
    }
  }
  if (weight == 0.0) return 0.0;
  return std::clamp(sum / weight, 0.0, 1.0);
}

bool FusionSimilarity::knows(std::string_view word) const {
  return std::any_of(components_.begin(), components_.end(),
                     [&](const Component& c) {
                       return (!weighted_ || c.weight > 0.0) && c.provider->knows(word);
                     });
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "exact") return ProviderKind::kExact;
  if (name == "lexicon") return ProviderKind::kLexicon;
  if (name == "embedding") return ProviderKind::kEmbedding;
  if (name == "fusion") return ProviderKind::kFusion;
  throw UsageError("unknown provider '" + std::string(name) +
                   "' (expected exact, lexicon, embedding or fusion)");
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kExact: return "exact";
    case ProviderKind::kLexicon: return "lexicon";
    case ProviderKind::kEmbedding: return "embedding";
    case ProviderKind::kFusion: return "fusion";
  }
  return "exact";
}

WordSimilarityPtr make_provider(const ProviderConfig& config) {
  auto lexicon = [&]() -> WordSimilarityPtr {
    return std::make_shared<LexiconSimilarity>(
        std::make_shared<const Lexicon>(load_lexicon(config.lexicon_path)));
  };
  auto embedding = [&]() -> WordSimilarityPtr {
    return std::make_shared<EmbeddingSimilarity>(
        std::make_shared<const EmbeddingTable>(load_embeddings(config.embeddings_path)));
  };

  switch (config.kind) {
    case ProviderKind::kExact:
      return std::make_shared<ExactMatch>();
    case ProviderKind::kLexicon:
      if (config.lexicon_path.empty()) throw UsageError("--provider lexicon needs --lexicon");
      return lexicon();
    case ProviderKind::kEmbedding:
      if (config.embeddings_path.empty()) {
        throw UsageError("--provider embedding needs --embeddings");
      }
      return embedding();
    case ProviderKind::kFusion: {
      std::vector<WordSimilarityPtr> order;
      if (!config.lexicon_path.empty()) order.push_back(lexicon());
      if (!config.embeddings_path.empty()) order.push_back(embedding());
      order.push_back(std::make_shared<ExactMatch>());
      if (config.fusion_weights.empty()) {
        return std::make_shared<FusionSimilarity>(FusionSimilarity::priority(order));
      }
      if (config.fusion_weights.size() != order.size()) {
        throw UsageError("fusion needs " + std::to_string(order.size()) +
                         " weights (lexicon, embedding, exact as configured), got " +
                         std::to_string(config.fusion_weights.size()));
      }
      std::vector<FusionSimilarity::Component> components;
      for (std::size_t i = 0; i < order.size(); ++i) {
        components.push_back({order[i], config.fusion_weights[i]});
      }
      try {
        return std::make_shared<FusionSimilarity>(
            FusionSimilarity::weighted(std::move(components)));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  return std::make_shared<ExactMatch>();
}

}  // namespace semkey
