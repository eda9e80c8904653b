#ifndef SEMKEY_PIPELINE_H_
#define SEMKEY_PIPELINE_H_

// Final score fusion, per-group best-system selection and corpus reports.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semkey/ingest.h"
#include "semkey/model.h"
#include "semkey/wordsim.h"

namespace semkey {

// Score used to pick the best system of a group.
enum class Metric { kSdpKey, kSdp, kBleu, kVsm };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::kSdp, Metric::kSdpKey,
                                                      Metric::kBleu, Metric::kVsm};

Metric parse_metric(std::string_view name);  // throws UsageError
std::string_view to_string(Metric metric);

// (sim_de + sim_kw) / 2, or sim_de alone when sim_kw is absent.
double final_score(double sim_de, std::optional<double> sim_kw);

struct ScoringOptions {
  RelationDenylist denylist;
  bool use_keywords = true;  // false: sim_kw is left absent
};

ScoreBreakdown score_pair(const AnnotatedSentence& ref, const AnnotatedSentence& hyp,
                          const WordSimilarity& sw, const ScoringOptions& options = {});

struct SystemScore {
  std::string name;
  ScoreBreakdown breakdown;
  double bleu = 0.0;
  double vsm = 0.0;

  double metric_score(Metric metric) const;
};

struct GroupResult {
  std::string group_id;
  std::vector<SystemScore> systems;  // corpus order
  std::string selected_system;       // under the active metric
  std::string human_best;
  std::array<std::string, kAllMetrics.size()> selected_by_metric;  // kAllMetrics order
};

// Index of the first maximum; throws std::invalid_argument on empty input.
std::size_t select_best(std::span<const double> scores);

struct Stats {
  double mean = 0.0;
  double variance = 0.0;  // population
  std::size_t count = 0;
};

// Throws std::invalid_argument on empty input.
Stats population_stats(std::span<const double> values);

struct SystemStats {
  std::string system;
  Stats final_score;
  Stats sim_de;
  std::optional<Stats> sim_kw;  // absent if no group produced one
  Stats bleu;
  Stats vsm;
};

// Per system name, in order of first appearance. Throws UsageError on empty
// input.
std::vector<SystemStats> system_stats(std::span<const GroupResult> results);

struct EvalOptions {
  Metric metric = Metric::kSdpKey;
  ScoringOptions scoring;
  unsigned jobs = 1;
};

struct EvalReport {
  Metric metric = Metric::kSdpKey;
  bool use_keywords = true;
  double precision = 0.0;
  std::array<double, kAllMetrics.size()> precision_by_metric{};  // kAllMetrics order
  std::vector<SystemStats> systems;
  std::vector<GroupResult> groups;

  double precision_for(Metric metric) const;
};

// Scores every system of every group against the group's reference, picks
// the best system per group and measures agreement with the human choice.
// Groups are scored on up to `jobs` threads; the report does not depend on
// the thread count. Throws UsageError on an empty corpus.
EvalReport evaluate_corpus(std::span<const CorpusGroup> groups, const WordSimilarity& sw,
                           const EvalOptions& options = {});

// Serializations. JSON keeps full double precision; CSV uses the columns
// group_id, system, sim_de, sim_kw, final, selected, human_best with scores
// printed to 4 decimals and an empty cell for an absent sim_kw.
std::string breakdown_json(const ScoreBreakdown& breakdown);
std::string report_json(const EvalReport& report);
std::string report_csv(const EvalReport& report);

// Fixed-point text with `decimals` digits, as used in human-facing output.
std::string format_fixed(double value, int decimals = 4);

}  // namespace semkey

#endif  // SEMKEY_PIPELINE_H_
