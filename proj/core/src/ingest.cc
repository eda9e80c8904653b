#include "semkey/ingest.h"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "semkey/errors.h"

namespace semkey {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// nlohmann reports a byte position; turn it into line/column.
ParseError json_syntax_error(std::string_view bytes,
                             const json::parse_error& e) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min<std::size_t>(e.byte ? e.byte - 1 : 0,
                                                bytes.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (bytes[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return ParseError("syntax error at line " + std::to_string(line) +
                        ", column " + std::to_string(column) + ": " +
                        e.what(),
                    line, column);
}

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw json_syntax_error(bytes, e);
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

int require_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) {
    throw SchemaError(path + "." + key, "expected an integer");
  }
  const auto value = v.get<std::int64_t>();
  if (value < 0 || value > std::numeric_limits<int>::max()) {
    throw SchemaError(path + "." + key, "index out of range");
  }
  return static_cast<int>(value);
}

SemGraph graph_from_json(const json& doc, const std::string& path,
                         const std::string& default_sentence) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");

  std::string sentence = default_sentence;
  if (auto it = doc.find("sentence"); it != doc.end()) {
    if (!it->is_string()) throw SchemaError(path + ".sentence", "expected a string");
    sentence = it->get<std::string>();
  }

  const json& tokens_json = require(doc, "tokens", path);
  if (!tokens_json.is_array()) throw SchemaError(path + ".tokens", "expected an array");
  std::vector<Token> tokens;
  tokens.reserve(tokens_json.size());
  for (std::size_t i = 0; i < tokens_json.size(); ++i) {
    const std::string at = path + ".tokens[" + std::to_string(i) + "]";
    const json& t = tokens_json[i];
    if (!t.is_object()) throw SchemaError(at, "expected an object");
    Token token;
    token.index = require_int(t, "index", at);
    token.surface = require_string(t, "surface", at);
    if (t.contains("pos")) token.pos = require_string(t, "pos", at);
    if (token.index < 1 ||
        static_cast<std::size_t>(token.index) > tokens_json.size()) {
      throw SchemaError(at + ".index", "index " + std::to_string(token.index) +
                                           " outside 1.." +
                                           std::to_string(tokens_json.size()));
    }
    if (token.surface.empty()) throw SchemaError(at + ".surface", "empty surface");
    tokens.push_back(std::move(token));
  }

  const json& edges_json = require(doc, "edges", path);
  if (!edges_json.is_array()) throw SchemaError(path + ".edges", "expected an array");
  const int n = static_cast<int>(tokens.size());
  std::vector<SemEdge> edges;
  edges.reserve(edges_json.size());
  for (std::size_t i = 0; i < edges_json.size(); ++i) {
    const std::string at = path + ".edges[" + std::to_string(i) + "]";
    const json& e = edges_json[i];
    if (!e.is_object()) throw SchemaError(at, "expected an object");
    SemEdge edge;
    edge.head_index = require_int(e, "head", at);
    edge.dep_index = require_int(e, "dep", at);
    edge.relation = require_string(e, "rel", at);
    if (edge.relation.empty()) throw SchemaError(at + ".rel", "empty relation");
    if (edge.head_index > n) {
      throw SchemaError(at + ".head", "no token " + std::to_string(edge.head_index));
    }
    if (edge.dep_index < 1 || edge.dep_index > n) {
      throw SchemaError(at + ".dep", "no token " + std::to_string(edge.dep_index));
    }
    if (edge.head_index == 0 && !is_root_relation(edge.relation)) {
      throw SchemaError(at + ".head", "head 0 requires a root relation");
    }
    edges.push_back(std::move(edge));
  }

  try {
    return SemGraph(std::move(tokens), std::move(edges), std::move(sentence));
  } catch (const MalformedGraphError& e) {
    throw SchemaError(path, e.what());
  }
}

ordered_json graph_to_json(const SemGraph& graph) {
  ordered_json doc;
  doc["sentence"] = graph.sentence_text();
  doc["tokens"] = ordered_json::array();
  for (const Token& t : graph.tokens()) {
    doc["tokens"].push_back({{"index", t.index}, {"surface", t.surface}, {"pos", t.pos}});
  }
  doc["edges"] = ordered_json::array();
  for (const SemEdge& e : graph.edges()) {
    doc["edges"].push_back(
        {{"head", e.head_index}, {"dep", e.dep_index}, {"rel", e.relation}});
  }
  return doc;
}

double parse_score(const json& v, const std::string& at) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const std::string_view body = trim(s);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec == std::errc() && ptr == body.data() + body.size() && !body.empty()) {
      return value;
    }
    throw SchemaError(at, "'" + s + "' is not a number");
  }
  throw SchemaError(at, "expected a number or numeric string");
}

KeywordSet keywords_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  const json& list = require(doc, "keywords", path);
  if (!list.is_array()) throw SchemaError(path + ".keywords", "expected an array");
  std::vector<KeywordEntry> entries;
  entries.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = path + ".keywords[" + std::to_string(i) + "]";
    const json& k = list[i];
    if (!k.is_object()) throw SchemaError(at, "expected an object");
    KeywordEntry entry;
    entry.word = require_string(k, "word", at);
    entry.weight = parse_score(require(k, "score", at), at + ".score");
    entries.push_back(std::move(entry));
  }
  try {
    return KeywordSet(std::move(entries));
  } catch (const SchemaError& e) {
    throw SchemaError(path, e.what());
  }
}

bool is_file_ref(const json& v) {
  return v.is_object() && v.size() == 1 && v.contains("file");
}

std::filesystem::path resolve_ref(const json& v, const std::string& at,
                                  const std::filesystem::path& base_dir) {
  const json& f = v["file"];
  if (!f.is_string()) throw SchemaError(at + ".file", "expected a string");
  std::filesystem::path p = f.get<std::string>();
  return p.is_absolute() ? p : base_dir / p;
}

SemGraph graph_from_file(const std::filesystem::path& file) {
  const std::string bytes = read_file(file);
  if (file.extension() == ".conll") {
    auto graphs = parse_sdp_conll(bytes);
    if (graphs.size() != 1) {
      throw SchemaError(file.string(), "expected exactly one sentence, found " +
                                           std::to_string(graphs.size()));
    }
    return std::move(graphs.front());
  }
  return parse_sdp_json(bytes);
}

// Reads a file reference; any failure is reported against the corpus line.
template <typename Fn>
auto load_ref(const std::filesystem::path& file, const std::string& where, Fn fn) {
  try {
    return fn(file);
  } catch (const IoError& e) {
    throw IoError(where + ": cannot load '" + file.string() + "': " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(where + ": '" + file.string() + "': " + e.what(), e.line(),
                     e.column());
  } catch (const SchemaError& e) {
    throw SchemaError(e.field(), where + ": '" + file.string() + "': " + e.what());
  }
}

AnnotatedSentence sentence_from_json(const json& doc, const std::string& at,
                                     const std::filesystem::path& base_dir,
                                     AnnotationSource* source,
                                     const std::string& where) {
  if (!doc.is_object()) throw SchemaError(at, "expected an object");
  AnnotatedSentence s;
  s.text = require_string(doc, "text", at);

  if (auto it = doc.find("sdp"); it != doc.end()) {
    if (is_file_ref(*it)) {
      s.graph = load_ref(resolve_ref(*it, at + ".sdp", base_dir), where,
                         graph_from_file);
    } else {
      s.graph = graph_from_json(*it, at + ".sdp", s.text);
    }
  } else if (source != nullptr) {
    s.graph = source->annotate_sdp(s.text);
  } else {
    throw SchemaError(at + ".sdp", "missing field and no annotation source");
  }

  if (auto it = doc.find("keywords"); it != doc.end()) {
    if (is_file_ref(*it)) {
      s.keywords = load_ref(resolve_ref(*it, at + ".keywords", base_dir), where,
                            [](const std::filesystem::path& p) {
                              return parse_keywords(read_file(p));
                            });
    } else if (it->is_array()) {
      // Bare list as returned by the service.
      s.keywords = keywords_from_json(json{{"keywords", *it}}, at);
    } else {
      s.keywords = keywords_from_json(*it, at + ".keywords");
    }
  } else if (source != nullptr) {
    s.keywords = source->annotate_keywords(s.text);
  } else {
    throw SchemaError(at + ".keywords", "missing field and no annotation source");
  }
  return s;
}

CorpusGroup group_from_json(const json& doc, const std::filesystem::path& base_dir,
                            AnnotationSource* source, const std::string& where) {
  if (!doc.is_object()) throw SchemaError(where, "expected an object");
  CorpusGroup g;
  g.id = require_string(doc, "id", where);
  if (doc.contains("source")) g.source_text = require_string(doc, "source", where);
  g.reference = sentence_from_json(require(doc, "reference", where),
                                   where + ".reference", base_dir, source, where);
  const json& systems = require(doc, "systems", where);
  if (!systems.is_array()) throw SchemaError(where + ".systems", "expected an array");
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const std::string at = where + ".systems[" + std::to_string(i) + "]";
    SystemOutput out;
    out.name = require_string(systems[i], "name", at);
    out.sentence = sentence_from_json(systems[i], at, base_dir, source, where);
    g.systems.push_back(std::move(out));
  }
  g.human_best = require_string(doc, "human_best", where);
  try {
    validate_group(g);
  } catch (const SchemaError& e) {
    throw SchemaError(e.field(), where + ": " + e.what());
  }
  return g;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::size_t field_column(std::span<const std::string_view> fields, std::size_t k) {
  std::size_t col = 1;
  for (std::size_t i = 0; i < k; ++i) col += fields[i].size() + 1;
  return col;
}

constexpr std::string_view kTextComment = "# text = ";

struct ConllBlock {
  std::optional<std::string> text;
  std::map<int, Token> tokens;
  std::vector<SemEdge> edges;
  bool seen = false;
};

SemGraph finish_block(ConllBlock& block, std::size_t line_no) {
  std::vector<Token> tokens;
  std::string joined;
  for (auto& [id, token] : block.tokens) {
    joined += token.surface;
    tokens.push_back(std::move(token));
  }
  try {
    return SemGraph(std::move(tokens), std::move(block.edges),
                    block.text.value_or(joined));
  } catch (const MalformedGraphError& e) {
    throw ParseError("sentence ending at line " + std::to_string(line_no) +
                         ": " + e.what(),
                     line_no, 0);
  }
}

}  // namespace

RelationDenylist RelationDenylist::parse(std::string_view comma_separated) {
  RelationDenylist out;
  out.labels.clear();
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    auto comma = comma_separated.find(',', start);
    if (comma == std::string_view::npos) comma = comma_separated.size();
    std::string_view label = trim(comma_separated.substr(start, comma - start));
    if (!label.empty()) out.labels.emplace(label);
    start = comma + 1;
  }
  return out;
}

SemGraph parse_sdp_json(std::string_view bytes) {
  return graph_from_json(parse_json(bytes), "graph", "");
}

std::string emit_sdp_json(const SemGraph& graph) {
  return graph_to_json(graph).dump(2) + "\n";
}

std::vector<SemGraph> parse_sdp_conll(std::string_view text) {
  std::vector<SemGraph> graphs;
  ConllBlock block;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (trim(line).empty()) {
      if (block.seen) graphs.push_back(finish_block(block, line_no - 1));
      block = ConllBlock{};
      continue;
    }
    block.seen = true;
    if (line.front() == '#') {
      if (line.starts_with(kTextComment)) {
        block.text = std::string(line.substr(kTextComment.size()));
      }
      continue;
    }

    const auto fields = split_tabs(line);
    if (fields.size() < 5) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 columns, found " +
                           std::to_string(fields.size()),
                       line_no, 1);
    }
    int id = 0;
    if (!parse_int(fields[0], id) || id < 1) {
      throw ParseError("line " + std::to_string(line_no) + ": ID '" +
                           std::string(fields[0]) + "' is not a positive integer",
                       line_no, 1);
    }
    const std::string form(fields[1]);
    const std::string pos_tag = fields[2] == "_" ? std::string() : std::string(fields[2]);
    if (form.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty FORM", line_no,
                       field_column(fields, 1));
    }

    auto [it, inserted] = block.tokens.try_emplace(id, Token{id, form, pos_tag});
    if (!inserted) {
      if (it->second.surface != form) {
        throw ConsistencyError("line " + std::to_string(line_no) + ": token " +
                               std::to_string(id) + " is '" + it->second.surface +
                               "' on an earlier row but '" + form + "' here");
      }
      if (it->second.pos != pos_tag) {
        throw ConsistencyError("line " + std::to_string(line_no) + ": token " +
                               std::to_string(id) + " has POS '" + it->second.pos +
                               "' on an earlier row but '" + pos_tag + "' here");
      }
    }

    if (fields[3] == "_") {
      if (fields[4] != "_") {
        throw ParseError("line " + std::to_string(line_no) +
                             ": DEPREL given without a HEAD",
                         line_no, field_column(fields, 4));
      }
      continue;
    }
    int head = 0;
    if (!parse_int(fields[3], head) || head < 0) {
      throw ParseError("line " + std::to_string(line_no) + ": HEAD '" +
                           std::string(fields[3]) + "' is not an integer",
                       line_no, field_column(fields, 3));
    }
    if (fields[4].empty() || fields[4] == "_") {
      throw ParseError("line " + std::to_string(line_no) + ": missing DEPREL", line_no,
                       field_column(fields, 4));
    }
    block.edges.push_back({head, id, std::string(fields[4])});
  }
  if (block.seen) graphs.push_back(finish_block(block, line_no));
  return graphs;
}

std::string emit_conll(const SemGraph& graph) {
  std::ostringstream out;
  out << kTextComment << graph.sentence_text() << '\n';
  const auto& edges = graph.edges();
  std::size_t e = 0;
  for (const Token& t : graph.tokens()) {
    const std::string prefix = std::to_string(t.index) + '\t' + t.surface + '\t' +
                               (t.pos.empty() ? "_" : t.pos) + '\t';
    bool any = false;
    // Edges are sorted by dependent, so each token's rows are contiguous.
    for (; e < edges.size() && edges[e].dep_index == t.index; ++e) {
      out << prefix << edges[e].head_index << '\t' << edges[e].relation << '\n';
      any = true;
    }
    if (!any) out << prefix << "_\t_\n";
  }
  out << '\n';
  return out.str();
}

RelationGroups extract_relation_groups(const SemGraph& graph,
                                       const RelationDenylist& denylist) {
  RelationGroups groups;
  for (const SemEdge& e : graph.edges()) {
    if (e.head_index == 0 || is_root_relation(e.relation)) continue;
    if (denylist.contains(e.relation)) continue;
    groups.add(canonicalize_pair(e, graph));
  }
  return groups;
}

KeywordSet parse_keywords(std::string_view bytes) {
  return keywords_from_json(parse_json(bytes), "keywords");
}

std::string emit_keywords_json(const KeywordSet& keywords) {
  ordered_json doc;
  doc["keywords"] = ordered_json::array();
  for (const KeywordEntry& k : keywords.entries()) {
    doc["keywords"].push_back({{"word", k.word}, {"score", k.weight}});
  }
  return doc.dump(2) + "\n";
}

std::vector<CorpusGroup> parse_corpus(std::string_view jsonl,
                                      const std::filesystem::path& base_dir,
                                      AnnotationSource* source) {
  std::vector<CorpusGroup> groups;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      const ParseError inner = json_syntax_error(line, e);
      throw ParseError(where + ": " + inner.what(), line_no, inner.column());
    }
    groups.push_back(group_from_json(doc, base_dir, source, where));
  }
  return groups;
}

std::vector<CorpusGroup> load_corpus(const std::filesystem::path& path,
                                     AnnotationSource* source) {
  return parse_corpus(read_file(path), path.parent_path(), source);
}

AnnotatedSentence load_annotated_sentence(const std::filesystem::path& path,
                                          AnnotationSource* source) {
  const std::string bytes = read_file(path);
  if (path.extension() == ".conll") {
    AnnotatedSentence s;
    s.graph = graph_from_file(path);
    s.text = s.graph.sentence_text();
    return s;
  }
  const json doc = parse_json(bytes);
  if (doc.is_object() && doc.contains("tokens")) {
    AnnotatedSentence s;
    s.graph = graph_from_json(doc, "graph", "");
    s.text = s.graph.sentence_text();
    return s;
  }
  return sentence_from_json(doc, "sentence", path.parent_path(), source,
                            path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return buf.str();
}

}  // namespace semkey
