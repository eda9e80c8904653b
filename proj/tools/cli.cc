#include "cli.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "semkey/baselines.h"
#include "semkey/errors.h"
#include "semkey/ingest.h"
#include "semkey/pipeline.h"
#include "semkey/wordsim.h"

namespace semkey::cli {

namespace {

namespace fs = std::filesystem;

// Raw flag values; `set` tells whether each came from the command line.
struct Flags {
  std::string config;
  std::string provider = "exact";
  std::string lexicon;
  std::string embeddings;
  std::string fusion_weights;
  std::string denylist = "mPunc";
  bool no_keywords = false;
  std::string metric = "sdpkey";
  unsigned jobs = 1;
  std::string mode = "replay";
  std::string cache;
  std::string out = ".";
  std::string endpoint;
  std::string token;
  double timeout = 10.0;
  int retries = 3;
  unsigned max_in_flight = 4;
  int max_n = 4;

  std::map<std::string, CLI::Option*> options;

  bool set(const std::string& name) const {
    auto it = options.find(name);
    return it != options.end() && it->second->count() > 0;
  }
};

struct Settings {
  ProviderConfig provider;
  RelationDenylist denylist;
  bool use_keywords = true;
  Metric metric = Metric::kSdpKey;
  unsigned jobs = 1;
  AnnotatorConfig annotator;
  std::string cache;
  fs::path out;
  int max_n = 4;
};

std::vector<double> parse_weights(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (std::string item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      const auto b = part.find_first_not_of(" \t[]");
      const auto e = part.find_last_not_of(" \t[]");
      if (b == std::string::npos) continue;
      const std::string body = part.substr(b, e - b + 1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec != std::errc() || ptr != body.data() + body.size()) {
        throw UsageError("fusion weight '" + body + "' is not a number");
      }
      out.push_back(v);
    }
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw UsageError("config: '" + key + "' expects true or false, got '" + text + "'");
}

// Applies one layer of string-valued settings (config file or environment).
void apply(Settings& s, const std::string& key, const std::vector<std::string>& inputs) {
  const std::string value = inputs.empty() ? std::string() : inputs.front();
  if (key == "provider") {
    s.provider.kind = parse_provider_kind(value);
  } else if (key == "lexicon") {
    s.provider.lexicon_path = value;
  } else if (key == "embeddings") {
    s.provider.embeddings_path = value;
  } else if (key == "fusion-weights" || key == "fusion_weights") {
    s.provider.fusion_weights = parse_weights(inputs);
  } else if (key == "denylist") {
    std::string joined;
    for (const auto& i : inputs) joined += i + ",";
    s.denylist = RelationDenylist::parse(joined);
  } else if (key == "no-keywords" || key == "no_keywords") {
    s.use_keywords = !parse_bool(key, value);
  } else if (key == "metric") {
    s.metric = parse_metric(value);
  } else if (key == "jobs") {
    s.jobs = parse_number<unsigned>(key, value);
  } else if (key == "mode") {
    s.annotator.mode = parse_annotation_mode(value);
  } else if (key == "cache") {
    s.cache = value;
  } else if (key == "out") {
    s.out = value;
  } else if (key == "endpoint") {
    s.annotator.endpoint = value;
  } else if (key == "token") {
    s.annotator.auth_token = value;
  } else if (key == "timeout") {
    s.annotator.timeout = std::chrono::milliseconds(
        static_cast<long long>(parse_number<double>(key, value) * 1000.0));
  } else if (key == "retries") {
    s.annotator.max_retries = parse_number<int>(key, value);
  } else if (key == "max-in-flight" || key == "max_in_flight") {
    s.annotator.max_in_flight = parse_number<unsigned>(key, value);
  } else if (key == "max-n" || key == "max_n") {
    s.max_n = parse_number<int>(key, value);
  } else {
    throw UsageError("config: unknown key '" + key + "'");
  }
}

Settings resolve(const Flags& f, const Environment& env) {
  Settings s;
  // Defaults come from Flags' initializers.
  apply(s, "provider", {f.provider});
  apply(s, "denylist", {f.denylist});
  apply(s, "metric", {f.metric});
  apply(s, "mode", {f.mode});
  s.out = f.out;
  s.jobs = f.jobs;
  s.max_n = f.max_n;
  s.annotator.max_retries = f.retries;
  s.annotator.max_in_flight = f.max_in_flight;
  s.annotator.timeout =
      std::chrono::milliseconds(static_cast<long long>(f.timeout * 1000.0));

  if (!f.config.empty()) {
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigTOML().from_file(f.config);
    } catch (const CLI::Error& e) {
      throw UsageError("config '" + f.config + "': " + e.what());
    }
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--") continue;  // section markers
      apply(s, item.fullname(), item.inputs);
    }
  }

  if (env.getenv) {
    if (auto v = env.getenv("SEMKEY_ENDPOINT")) s.annotator.endpoint = *v;
    if (auto v = env.getenv("SEMKEY_TOKEN")) s.annotator.auth_token = *v;
  }

  if (f.set("provider")) apply(s, "provider", {f.provider});
  if (f.set("lexicon")) s.provider.lexicon_path = f.lexicon;
  if (f.set("embeddings")) s.provider.embeddings_path = f.embeddings;
  if (f.set("fusion-weights")) apply(s, "fusion-weights", {f.fusion_weights});
  if (f.set("denylist")) apply(s, "denylist", {f.denylist});
  if (f.set("no-keywords")) s.use_keywords = !f.no_keywords;
  if (f.set("metric")) apply(s, "metric", {f.metric});
  if (f.set("jobs")) s.jobs = f.jobs;
  if (f.set("mode")) apply(s, "mode", {f.mode});
  if (f.set("cache")) s.cache = f.cache;
  if (f.set("out")) s.out = f.out;
  if (f.set("endpoint")) s.annotator.endpoint = f.endpoint;
  if (f.set("token")) s.annotator.auth_token = f.token;
  if (f.set("timeout")) {
    s.annotator.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout * 1000.0));
  }
  if (f.set("retries")) s.annotator.max_retries = f.retries;
  if (f.set("max-in-flight")) s.annotator.max_in_flight = f.max_in_flight;
  if (f.set("max-n")) s.max_n = f.max_n;

  if (s.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (s.annotator.max_retries < 0) throw UsageError("--retries must not be negative");
  return s;
}

// Builds the annotator only when a sentence actually lacks annotations.
class LazyAnnotationSource final : public AnnotationSource {
 public:
  LazyAnnotationSource(const Settings& settings, const Environment& env)
      : settings_(settings), env_(env) {}

  SemGraph annotate_sdp(const std::string& text) override { return get().annotate_sdp(text); }
  KeywordSet annotate_keywords(const std::string& text) override {
    return get().annotate_keywords(text);
  }

  Annotator& get() {
    if (!annotator_) {
      std::shared_ptr<AnnotationCache> cache;
      if (!settings_.cache.empty()) cache = std::make_shared<AnnotationCache>(settings_.cache);
      std::shared_ptr<Transport> transport;
      if (settings_.annotator.mode != AnnotationMode::kReplay && env_.make_transport) {
        transport = env_.make_transport();
      }
      annotator_ = std::make_unique<Annotator>(settings_.annotator, std::move(cache),
                                               std::move(transport), nullptr, env_.sleeper);
    }
    return *annotator_;
  }

 private:
  const Settings& settings_;
  const Environment& env_;
  std::unique_ptr<Annotator> annotator_;
};

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  out.flush();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir.string() + "'");
  }
}

std::string stats_cell(const Stats& s) {
  return format_fixed(s.mean) + "/" + format_fixed(s.variance);
}

int cmd_score(const Settings& s, const Environment& env, const std::string& ref_path,
              const std::string& hyp_path, std::ostream& out) {
  LazyAnnotationSource source(s, env);
  const AnnotatedSentence ref = load_annotated_sentence(ref_path, &source);
  const AnnotatedSentence hyp = load_annotated_sentence(hyp_path, &source);
  const auto sw = make_provider(s.provider);
  const ScoreBreakdown b = score_pair(ref, hyp, *sw, {s.denylist, s.use_keywords});
  out << breakdown_json(b);
  return kExitOk;
}

int cmd_evaluate(const Settings& s, const Environment& env, const std::string& corpus_path,
                 std::ostream& out) {
  LazyAnnotationSource source(s, env);
  const std::vector<CorpusGroup> groups = load_corpus(corpus_path, &source);
  const auto sw = make_provider(s.provider);
  EvalOptions options;
  options.metric = s.metric;
  options.scoring = {s.denylist, s.use_keywords};
  options.jobs = s.jobs;
  const EvalReport report = evaluate_corpus(groups, *sw, options);

  ensure_directory(s.out);
  write_file(s.out / "report.json", report_json(report));
  write_file(s.out / "report.csv", report_csv(report));

  out << "groups: " << report.groups.size() << "\n";
  out << "sdp P=" << format_fixed(report.precision_for(Metric::kSdp), 3) << "\n";
  out << "sdp+key P=" << format_fixed(report.precision_for(Metric::kSdpKey), 3) << "\n";
  out << "bleu P=" << format_fixed(report.precision_for(Metric::kBleu), 3) << "\n";
  out << "vsm P=" << format_fixed(report.precision_for(Metric::kVsm), 3) << "\n";
  out << "selection metric: " << to_string(report.metric)
      << " P=" << format_fixed(report.precision, 3) << "\n\n";

  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-15s %-15s %-15s\n", "system",
                "final mean/var", "sim_de mean/var", "sim_kw mean/var");
  out << line;
  for (const SystemStats& st : report.systems) {
    const std::string kw = st.sim_kw ? stats_cell(*st.sim_kw) : "-";
    std::snprintf(line, sizeof line, "%-16s %-15s %-15s %-15s\n", st.system.c_str(),
                  stats_cell(st.final_score).c_str(), stats_cell(st.sim_de).c_str(),
                  kw.c_str());
    out << line;
  }
  return kExitOk;
}

int cmd_annotate(const Settings& s, const Environment& env, const std::string& input,
                 std::ostream& out) {
  LazyAnnotationSource source(s, env);
  Annotator& annotator = source.get();
  const std::string text = read_file(input);
  ensure_directory(s.out);

  std::istringstream lines(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++n;
    char stem[32];
    std::snprintf(stem, sizeof stem, "%04zu", n);
    const SemGraph graph = annotator.annotate_sdp(line);
    const KeywordSet keywords = annotator.annotate_keywords(line);
    write_file(s.out / (std::string(stem) + ".sdp.json"), emit_sdp_json(graph));
    write_file(s.out / (std::string(stem) + ".keywords.json"), emit_keywords_json(keywords));
  }
  out << "annotated " << n << " sentence(s) into " << s.out.string() << "\n";
  return kExitOk;
}

int cmd_baseline(const Settings& s, const Flags& f, const Environment& env,
                 const std::string& ref_path, const std::string& hyp_path, std::ostream& out) {
  LazyAnnotationSource source(s, env);
  const auto ref = surfaces(load_annotated_sentence(ref_path, &source).graph);
  const auto hyp = surfaces(load_annotated_sentence(hyp_path, &source).graph);
  if (s.max_n < 1) throw UsageError("--max-n must be at least 1");
  nlohmann::ordered_json doc;
  const bool only = f.set("metric");
  if (only && s.metric != Metric::kBleu && s.metric != Metric::kVsm) {
    throw UsageError("baseline supports --metric bleu or vsm");
  }
  if (!only || s.metric == Metric::kBleu) doc["bleu"] = bleu(ref, hyp, s.max_n);
  if (!only || s.metric == Metric::kVsm) doc["vsm"] = vsm_cosine(ref, hyp);
  out << doc.dump(2) << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Flags& f) {
  f.options["config"] = cmd->add_option("--config", f.config, "TOML-style settings file");
  f.options["provider"] = cmd->add_option("--provider", f.provider,
                                          "word similarity: exact|lexicon|embedding|fusion");
  f.options["lexicon"] = cmd->add_option("--lexicon", f.lexicon, "Cilin-style lexicon file");
  f.options["embeddings"] = cmd->add_option("--embeddings", f.embeddings, "embedding table");
  f.options["fusion-weights"] = cmd->add_option(
      "--fusion-weights", f.fusion_weights, "comma-separated fusion weights");
  f.options["denylist"] =
      cmd->add_option("--denylist", f.denylist, "comma-separated relations to drop");
  f.options["mode"] = cmd->add_option("--mode", f.mode, "annotation mode: live|record|replay");
  f.options["cache"] = cmd->add_option("--cache", f.cache, "annotation cache directory");
  f.options["endpoint"] = cmd->add_option("--endpoint", f.endpoint, "annotation service URL");
  f.options["token"] = cmd->add_option("--token", f.token, "annotation service token");
  f.options["timeout"] = cmd->add_option("--timeout", f.timeout, "request timeout, seconds");
  f.options["retries"] = cmd->add_option("--retries", f.retries, "retries on 5xx/429/timeout");
  f.options["max-in-flight"] =
      cmd->add_option("--max-in-flight", f.max_in_flight, "concurrent live requests");
}

}  // namespace

Environment default_environment() {
  Environment env;
  env.getenv = [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
  env.make_transport = [] { return make_http_transport(); };
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env) {
  CLI::App app{"Semantic-dependency and keyword based MT evaluation", "semkey"};
  app.require_subcommand(1);
  Flags f;
  std::string ref, hyp, corpus, input;

  auto* score = app.add_subcommand("score", "score one hypothesis against a reference");
  score->add_option("ref", ref, "reference annotation")->required();
  score->add_option("hyp", hyp, "hypothesis annotation")->required();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a corpus and write reports");
  evaluate->add_option("corpus", corpus, "corpus JSONL file")->required();

  auto* annotate = app.add_subcommand("annotate", "annotate one sentence per line");
  annotate->add_option("input", input, "text file, one sentence per line")->required();

  auto* baseline = app.add_subcommand("baseline", "BLEU / VSM cosine of one pair");
  baseline->add_option("ref", ref, "reference annotation")->required();
  baseline->add_option("hyp", hyp, "hypothesis annotation")->required();

  for (CLI::App* cmd : {score, evaluate, annotate, baseline}) add_common(cmd, f);
  for (CLI::App* cmd : {score, evaluate}) {
    f.options["no-keywords"] =
        cmd->add_flag("--no-keywords", f.no_keywords, "score with dependency similarity only");
  }
  for (CLI::App* cmd : {evaluate, baseline}) {
    f.options["metric"] = cmd->add_option("--metric", f.metric,
                                          "selection metric: sdpkey|sdp|bleu|vsm");
  }
  f.options["jobs"] = evaluate->add_option("--jobs", f.jobs, "groups scored in parallel");
  for (CLI::App* cmd : {evaluate, annotate}) {
    f.options["out"] = cmd->add_option("--out", f.out, "output directory");
  }
  f.options["max-n"] = baseline->add_option("--max-n", f.max_n, "BLEU n-gram order");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Options registered on several subcommands share one map slot; point it at
  // the instance of the subcommand that actually ran.
  CLI::App* active = app.get_subcommands().front();
  for (auto& [name, opt] : f.options) {
    if (auto* o = active->get_option_no_throw("--" + name)) opt = o;
  }

  try {
    const Settings settings = resolve(f, env);
    if (active == score) return cmd_score(settings, env, ref, hyp, out);
    if (active == evaluate) return cmd_evaluate(settings, env, corpus, out);
    if (active == annotate) return cmd_annotate(settings, env, input, out);
    return cmd_baseline(settings, f, env, ref, hyp, out);
  } catch (const UsageError& e) {
    err << "semkey: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "semkey: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace semkey::cli
