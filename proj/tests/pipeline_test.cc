#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "semkey/errors.h"
#include "semkey/ingest.h"
#include "semkey/pipeline.h"
#include "support.h"

namespace semkey {
namespace {

const ExactMatch kExact;

AnnotatedSentence annotated(const std::string& graph_file, const std::string& keywords_file = "") {
  AnnotatedSentence s;
  s.graph = support::fixture_graph(graph_file);
  s.text = s.graph.sentence_text();
  if (!keywords_file.empty()) s.keywords = support::fixture_keywords(keywords_file);
  return s;
}

TEST(FinalScoreTest, Examples) {
  EXPECT_EQ(final_score(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(final_score(0.75, 0.8591), 0.80455);
  EXPECT_EQ(final_score(0.6, std::nullopt), 0.6);
}

TEST(ScorePairTest, SelfScoreIsOne) {
  const AnnotatedSentence s = annotated("gangkou.sdp.json", "table1.keywords.json");
  const ScoreBreakdown b = score_pair(s, s, kExact);
  EXPECT_EQ(b.sim_de, 1.0);
  ASSERT_TRUE(b.sim_kw.has_value());
  EXPECT_DOUBLE_EQ(*b.sim_kw, 1.0);
  EXPECT_DOUBLE_EQ(b.final_score, 1.0);
  EXPECT_EQ(b.matched_keyword_pairs.size(), 3u);
}

TEST(ScorePairTest, NoKeywordsOption) {
  const AnnotatedSentence ref = annotated("tv_ref.sdp.json", "table1.keywords.json");
  const AnnotatedSentence hyp = annotated("tv_hyp.sdp.json", "case1.keywords.json");
  ScoringOptions options;
  options.use_keywords = false;
  const ScoreBreakdown b = score_pair(ref, hyp, kExact, options);
  EXPECT_FALSE(b.sim_kw.has_value());
  EXPECT_EQ(b.final_score, b.sim_de);
  EXPECT_TRUE(b.matched_keyword_pairs.empty());
}

TEST(ScorePairTest, DisjointRelationsGiveHalfKeywordScore) {
  AnnotatedSentence ref{"ab", SemGraph({{1, "a", ""}, {2, "b", ""}}, {{1, 2, "Agt"}}, "ab"),
                        KeywordSet({{"a", 0.6}, {"b", 0.4}})};
  AnnotatedSentence hyp{"ab", SemGraph({{1, "a", ""}, {2, "b", ""}}, {{1, 2, "Pat"}}, "ab"),
                        KeywordSet({{"a", 0.5}})};
  const ScoreBreakdown b = score_pair(ref, hyp, kExact);
  EXPECT_EQ(b.sim_de, 0.0);
  ASSERT_TRUE(b.sim_kw.has_value());
  EXPECT_EQ(*b.sim_kw, 1.0);
  EXPECT_EQ(b.final_score, *b.sim_kw / 2.0);
}

TEST(ScorePairTest, Case4BelowHalf) {
  const ScoreBreakdown b =
      score_pair(annotated("case4_ref.conll"), annotated("case4_baidu.conll"), kExact);
  EXPECT_LT(b.sim_de, 0.5);
  EXPECT_NEAR(b.sim_de, 0.21175213675213675, 1e-15);
}

TEST(ScorePairTest, PunctuationEdgesChangeNothing) {
  const AnnotatedSentence ref = annotated("tv_ref.sdp.json", "table1.keywords.json");
  const AnnotatedSentence hyp = annotated("tv_hyp.sdp.json", "case1.keywords.json");
  // Same graph with extra mPunc edges between arbitrary tokens.
  auto with_punct = [](const AnnotatedSentence& s) {
    std::vector<SemEdge> edges = s.graph.edges();
    const int n = static_cast<int>(s.graph.tokens().size());
    for (int h = 1; h <= n; ++h) {
      for (int d = 1; d <= n; ++d) {
        if (h != d && (h + d) % 3 == 0) {
          SemEdge e{h, d, "mPunc"};
          if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
        }
      }
    }
    AnnotatedSentence out = s;
    out.graph = SemGraph(s.graph.tokens(), edges, s.graph.sentence_text());
    return out;
  };
  const ScoreBreakdown base = score_pair(ref, hyp, kExact);
  const ScoreBreakdown punct = score_pair(with_punct(ref), with_punct(hyp), kExact);
  EXPECT_EQ(base.sim_de, punct.sim_de);
  EXPECT_EQ(base.sim_kw, punct.sim_kw);
  EXPECT_EQ(base.final_score, punct.final_score);
}

TEST(SelectBestTest, FirstMaximumWins) {
  const std::vector<double> a = {0.2, 0.9, 0.9, 0.1};
  EXPECT_EQ(select_best(a), 1u);
  const std::vector<double> b = {0.5};
  EXPECT_EQ(select_best(b), 0u);
}

TEST(PopulationStatsTest, Examples) {
  const std::vector<double> two = {0.5, 0.7};
  const Stats s = population_stats(two);
  EXPECT_DOUBLE_EQ(s.mean, 0.6);
  EXPECT_NEAR(s.variance, 0.01, 1e-15);
  const std::vector<double> one = {0.3};
  EXPECT_EQ(population_stats(one).mean, 0.3);
  EXPECT_EQ(population_stats(one).variance, 0.0);
  const std::vector<double> flat = {0.4, 0.4, 0.4};
  EXPECT_EQ(population_stats(flat).variance, 0.0);
}

TEST(MetricTest, NamesRoundTrip) {
  for (Metric m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_THROW(parse_metric("meteor"), UsageError);
}

std::vector<CorpusGroup> four_groups() {
  return load_corpus(support::fixture("four_groups.jsonl"));
}

TEST(EvaluateCorpusTest, FourGroupPrecision) {
  const auto groups = four_groups();
  const EvalReport r = evaluate_corpus(groups, kExact);
  EXPECT_EQ(r.precision, 0.75);
  EXPECT_EQ(r.precision_for(Metric::kSdpKey), 0.75);
  EXPECT_EQ(r.precision_for(Metric::kSdp), 0.75);
  ASSERT_EQ(r.groups.size(), 4u);
  EXPECT_EQ(r.groups[0].selected_system, "Alpha");
  EXPECT_EQ(r.groups[1].selected_system, "Beta");
  EXPECT_EQ(r.groups[2].selected_system, "Gamma");
  EXPECT_EQ(r.groups[3].selected_system, "Gamma");
  EXPECT_EQ(r.groups[3].human_best, "Alpha");
}

TEST(EvaluateCorpusTest, FourGroupStats) {
  const auto groups = four_groups();
  const EvalReport r = evaluate_corpus(groups, kExact);
  ASSERT_EQ(r.systems.size(), 3u);
  for (int i = 0; i < 2; ++i) {
    const SystemStats& s = r.systems[i];
    EXPECT_NEAR(s.final_score.mean, 65.0 / 112.0, 1e-9) << s.system;
    EXPECT_NEAR(s.final_score.variance, 1649.0 / 12544.0, 1e-9) << s.system;
    EXPECT_NEAR(s.sim_de.mean, 0.625, 1e-9);
    EXPECT_NEAR(s.sim_de.variance, 0.140625, 1e-9);
    ASSERT_TRUE(s.sim_kw.has_value());
    EXPECT_NEAR(s.sim_kw->mean, 15.0 / 28.0, 1e-9);
  }
  EXPECT_EQ(r.systems[2].system, "Gamma");
  EXPECT_NEAR(r.systems[2].final_score.mean, 0.5, 1e-9);
  EXPECT_NEAR(r.systems[2].final_score.variance, 0.25, 1e-9);
}

TEST(EvaluateCorpusTest, ParallelMatchesSerial) {
  const auto groups = four_groups();
  EvalOptions serial, parallel;
  parallel.jobs = 4;
  EXPECT_EQ(report_json(evaluate_corpus(groups, kExact, serial)),
            report_json(evaluate_corpus(groups, kExact, parallel)));
  EXPECT_EQ(report_csv(evaluate_corpus(groups, kExact, serial)),
            report_csv(evaluate_corpus(groups, kExact, parallel)));
}

TEST(EvaluateCorpusTest, IdenticalSystemsFirstWins) {
  const AnnotatedSentence s{"x y", SemGraph({{1, "x", ""}, {2, "y", ""}}, {{1, 2, "Agt"}}, "x y"),
                            KeywordSet({{"x", 0.5}})};
  std::vector<CorpusGroup> groups;
  for (int i = 0; i < 3; ++i) {
    groups.push_back({"g" + std::to_string(i), "", s, {{"First", s}, {"Second", s}}, "First"});
  }
  EXPECT_EQ(evaluate_corpus(groups, kExact).precision, 1.0);
}

TEST(EvaluateCorpusTest, SingleGroupSingleSystem) {
  const AnnotatedSentence s = annotated("gangkou.sdp.json");
  std::vector<CorpusGroup> groups = {{"only", "", s, {{"A", s}}, "A"}};
  EXPECT_EQ(evaluate_corpus(groups, kExact).precision, 1.0);
}

TEST(EvaluateCorpusTest, EmptyCorpusIsUsageError) {
  std::vector<CorpusGroup> none;
  EXPECT_THROW(evaluate_corpus(none, kExact), UsageError);
}

TEST(EvaluateCorpusTest, MetricSelectsByBaseline) {
  const auto groups = four_groups();
  EvalOptions options;
  options.metric = Metric::kBleu;
  const EvalReport r = evaluate_corpus(groups, kExact, options);
  EXPECT_EQ(r.metric, Metric::kBleu);
  EXPECT_EQ(r.precision, r.precision_for(Metric::kBleu));
}

TEST(EvaluateCorpusTest, ScalingScoresKeepsArgmax) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> scores(1 + rng() % 6);
    for (double& s : scores) s = u(rng);
    const double k = 0.01 + u(rng) * 10.0;
    std::vector<double> scaled = scores;
    for (double& s : scaled) s *= k;
    EXPECT_EQ(select_best(scores), select_best(scaled));
  }
}

TEST(ReportTest, CsvLayout) {
  const auto groups = four_groups();
  const std::string csv = report_csv(evaluate_corpus(groups, kExact));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "group_id,system,sim_de,sim_kw,final,selected,human_best");
  EXPECT_NE(csv.find("g1,Beta,0.7500,0.5714,0.6607,Alpha,Alpha\n"), std::string::npos);
  EXPECT_NE(csv.find("g4,Beta,0.0000,0.0000,0.0000,Gamma,Alpha\n"), std::string::npos);
}

TEST(ReportTest, CsvLeavesAbsentKeywordScoreEmpty) {
  EvalOptions options;
  options.scoring.use_keywords = false;
  const auto groups = four_groups();
  const std::string csv = report_csv(evaluate_corpus(groups, kExact, options));
  EXPECT_NE(csv.find("g1,Beta,0.7500,,0.7500,Alpha,Alpha\n"), std::string::npos);
}

TEST(ReportTest, JsonCarriesPrecisionAndFullPrecisionScores) {
  const auto groups = four_groups();
  const auto doc = nlohmann::json::parse(report_json(evaluate_corpus(groups, kExact)));
  EXPECT_EQ(doc.at("precision").get<double>(), 0.75);
  EXPECT_EQ(doc.at("precision_by_metric").at("sdp").get<double>(), 0.75);
  EXPECT_EQ(doc.at("groups").size(), 4u);
  const double beta_g1 = doc.at("groups")[0].at("systems")[1].at("final").get<double>();
  EXPECT_NEAR(beta_g1, 37.0 / 56.0, 1e-15);
}

TEST(FormatFixedTest, Rounding) {
  EXPECT_EQ(format_fixed(0.75), "0.7500");
  EXPECT_EQ(format_fixed(0.75, 3), "0.750");
  EXPECT_EQ(format_fixed(2.0 / 3.0), "0.6667");
}

}  // namespace
}  // namespace semkey
