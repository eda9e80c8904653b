#include "semkey/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "semkey/baselines.h"
#include "semkey/errors.h"
#include "semkey/keywords.h"
#include "semkey/semdep.h"

namespace semkey {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t metric_slot(Metric metric) {
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    if (kAllMetrics[i] == metric) return i;
  }
  return 0;
}

ordered_json relation_scores_json(const std::vector<DirectionalRelationScore>& scores) {
  ordered_json out = ordered_json::array();
  for (const auto& s : scores) {
    out.push_back({{"relation", s.relation},
                   {"mean", s.mean},
                   {"per_pair", s.per_pair_scores}});
  }
  return out;
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json breakdown_to_json(const ScoreBreakdown& b) {
  ordered_json out;
  out["sim_de"] = b.sim_de;
  out["sim_kw"] = optional_json(b.sim_kw);
  out["final"] = b.final_score;
  out["forward_relations"] = relation_scores_json(b.forward_relation_scores);
  out["backward_relations"] = relation_scores_json(b.backward_relation_scores);
  out["keyword_matches"] = ordered_json::array();
  for (const auto& m : b.matched_keyword_pairs) {
    out["keyword_matches"].push_back({{"ref", m.ref_word},
                                      {"hyp", m.hyp_word},
                                      {"similarity", m.similarity},
                                      {"weight", m.weight}});
  }
  return out;
}

ordered_json stats_json(const Stats& s) {
  return {{"mean", s.mean}, {"variance", s.variance}, {"count", s.count}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

GroupResult score_group(const CorpusGroup& group, const WordSimilarity& sw,
                        const EvalOptions& options) {
  GroupResult result;
  result.group_id = group.id;
  result.human_best = group.human_best;
  const auto ref_tokens = surfaces(group.reference.graph);
  for (const SystemOutput& sys : group.systems) {
    SystemScore score;
    score.name = sys.name;
    score.breakdown = score_pair(group.reference, sys.sentence, sw, options.scoring);
    const auto hyp_tokens = surfaces(sys.sentence.graph);
    score.bleu = bleu(ref_tokens, hyp_tokens);
    score.vsm = vsm_cosine(ref_tokens, hyp_tokens);
    result.systems.push_back(std::move(score));
  }
  for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
    std::vector<double> scores;
    for (const SystemScore& s : result.systems) {
      scores.push_back(s.metric_score(kAllMetrics[m]));
    }
    result.selected_by_metric[m] = result.systems[select_best(scores)].name;
  }
  result.selected_system = result.selected_by_metric[metric_slot(options.metric)];
  return result;
}

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "sdpkey") return Metric::kSdpKey;
  if (name == "sdp") return Metric::kSdp;
  if (name == "bleu") return Metric::kBleu;
  if (name == "vsm") return Metric::kVsm;
  throw UsageError("unknown metric '" + std::string(name) +
                   "' (expected sdpkey, sdp, bleu or vsm)");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kSdpKey: return "sdpkey";
    case Metric::kSdp: return "sdp";
    case Metric::kBleu: return "bleu";
    case Metric::kVsm: return "vsm";
  }
  return "sdpkey";
}

double final_score(double sim_de, std::optional<double> sim_kw) {
  return sim_kw ? (sim_de + *sim_kw) / 2.0 : sim_de;
}

ScoreBreakdown score_pair(const AnnotatedSentence& ref, const AnnotatedSentence& hyp,
                          const WordSimilarity& sw, const ScoringOptions& options) {
  const RelationGroups ref_groups = extract_relation_groups(ref.graph, options.denylist);
  const RelationGroups hyp_groups = extract_relation_groups(hyp.graph, options.denylist);
  DependencySimilarity dep = dependency_similarity(ref_groups, hyp_groups, sw);

  ScoreBreakdown out;
  out.sim_de = dep.value;
  out.forward_relation_scores = std::move(dep.forward_scores);
  out.backward_relation_scores = std::move(dep.backward_scores);
  if (options.use_keywords) {
    const KeywordMatrix matrix = build_matrix(ref.keywords, hyp.keywords, sw);
    const GreedyMatch match = greedy_match(matrix);
    out.sim_kw = sim_kw(match);
    for (const GreedyStep& s : match.steps) {
      out.matched_keyword_pairs.push_back({matrix.ref().entries()[s.row].word,
                                           matrix.hyp().entries()[s.col].word,
                                           s.similarity, s.weight});
    }
  }
  out.final_score = final_score(out.sim_de, out.sim_kw);
  return out;
}

double SystemScore::metric_score(Metric metric) const {
  switch (metric) {
    case Metric::kSdpKey: return breakdown.final_score;
    case Metric::kSdp: return breakdown.sim_de;
    case Metric::kBleu: return bleu;
    case Metric::kVsm: return vsm;
  }
  return breakdown.final_score;
}

std::size_t select_best(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("select_best on an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Stats population_stats(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("statistics of an empty sample");
  Stats s;
  s.count = values.size();
  // Welford: a constant sample yields exactly zero variance.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  s.mean = mean;
  s.variance = m2 / static_cast<double>(k);
  return s;
}

std::vector<SystemStats> system_stats(std::span<const GroupResult> results) {
  if (results.empty()) throw UsageError("no group results to summarize");
  struct Samples {
    std::string name;
    std::vector<double> final_score, sim_de, sim_kw, bleu, vsm;
  };
  std::vector<Samples> samples;
  for (const GroupResult& g : results) {
    for (const SystemScore& s : g.systems) {
      auto it = std::find_if(samples.begin(), samples.end(),
                             [&](const Samples& x) { return x.name == s.name; });
      if (it == samples.end()) {
        samples.push_back({s.name, {}, {}, {}, {}, {}});
        it = std::prev(samples.end());
      }
      it->final_score.push_back(s.breakdown.final_score);
      it->sim_de.push_back(s.breakdown.sim_de);
      if (s.breakdown.sim_kw) it->sim_kw.push_back(*s.breakdown.sim_kw);
      it->bleu.push_back(s.bleu);
      it->vsm.push_back(s.vsm);
    }
  }
  std::vector<SystemStats> out;
  for (const Samples& x : samples) {
    SystemStats st;
    st.system = x.name;
    st.final_score = population_stats(x.final_score);
    st.sim_de = population_stats(x.sim_de);
    if (!x.sim_kw.empty()) st.sim_kw = population_stats(x.sim_kw);
    st.bleu = population_stats(x.bleu);
    st.vsm = population_stats(x.vsm);
    out.push_back(std::move(st));
  }
  return out;
}

double EvalReport::precision_for(Metric m) const {
  return precision_by_metric[metric_slot(m)];
}

EvalReport evaluate_corpus(std::span<const CorpusGroup> groups, const WordSimilarity& sw,
                           const EvalOptions& options) {
  if (groups.empty()) throw UsageError("corpus has no groups");

  std::vector<GroupResult> results(groups.size());
  std::vector<std::exception_ptr> errors(groups.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < groups.size(); i = next++) {
      try {
        results[i] = score_group(groups[i], sw, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs =
      std::clamp<unsigned>(options.jobs, 1, static_cast<unsigned>(groups.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport report;
  report.metric = options.metric;
  report.use_keywords = options.scoring.use_keywords;
  for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
    std::size_t hits = 0;
    for (const GroupResult& g : results) {
      if (g.selected_by_metric[m] == g.human_best) ++hits;
    }
    report.precision_by_metric[m] =
        static_cast<double>(hits) / static_cast<double>(results.size());
  }
  report.precision = report.precision_for(options.metric);
  report.systems = system_stats(results);
  report.groups = std::move(results);
  return report;
}

std::string breakdown_json(const ScoreBreakdown& breakdown) {
  return breakdown_to_json(breakdown).dump(2) + "\n";
}

std::string report_json(const EvalReport& report) {
  ordered_json doc;
  doc["metric"] = std::string(to_string(report.metric));
  doc["use_keywords"] = report.use_keywords;
  doc["group_count"] = report.groups.size();
  doc["precision"] = report.precision;
  doc["precision_by_metric"] = ordered_json::object();
  for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
    doc["precision_by_metric"][std::string(to_string(kAllMetrics[m]))] =
        report.precision_by_metric[m];
  }
  doc["systems"] = ordered_json::array();
  for (const SystemStats& s : report.systems) {
    doc["systems"].push_back({{"name", s.system},
                              {"final", stats_json(s.final_score)},
                              {"sim_de", stats_json(s.sim_de)},
                              {"sim_kw", s.sim_kw ? stats_json(*s.sim_kw)
                                                  : ordered_json(nullptr)},
                              {"bleu", stats_json(s.bleu)},
                              {"vsm", stats_json(s.vsm)}});
  }
  doc["groups"] = ordered_json::array();
  for (const GroupResult& g : report.groups) {
    ordered_json group;
    group["id"] = g.group_id;
    group["human_best"] = g.human_best;
    group["selected"] = g.selected_system;
    group["selected_by_metric"] = ordered_json::object();
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      group["selected_by_metric"][std::string(to_string(kAllMetrics[m]))] =
          g.selected_by_metric[m];
    }
    group["systems"] = ordered_json::array();
    for (const SystemScore& s : g.systems) {
      ordered_json sys;
      sys["name"] = s.name;
      sys["bleu"] = s.bleu;
      sys["vsm"] = s.vsm;
      sys.update(breakdown_to_json(s.breakdown));
      group["systems"].push_back(std::move(sys));
    }
    doc["groups"].push_back(std::move(group));
  }
  return doc.dump(2) + "\n";
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "group_id,system,sim_de,sim_kw,final,selected,human_best\n";
  for (const GroupResult& g : report.groups) {
    for (const SystemScore& s : g.systems) {
      out << csv_field(g.group_id) << ',' << csv_field(s.name) << ','
          << format_fixed(s.breakdown.sim_de) << ','
          << (s.breakdown.sim_kw ? format_fixed(*s.breakdown.sim_kw) : "") << ','
          << format_fixed(s.breakdown.final_score) << ','
          << csv_field(g.selected_system) << ',' << csv_field(g.human_best) << '\n';
    }
  }
  return out.str();
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace semkey
