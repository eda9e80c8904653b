#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "semkey/baselines.h"
#include "support.h"

namespace semkey {
namespace {

std::vector<std::string> words(std::initializer_list<const char*> ws) {
  return {ws.begin(), ws.end()};
}

TEST(BleuTest, HandExample) {
  const double want = std::pow(0.75 * 0.75 * (2.0 / 3.0) * 0.5, 0.25);
  const double got = bleu(words({"a", "b", "c", "d"}), words({"a", "b", "c", "e"}));
  EXPECT_NEAR(got, 0.6580, 5e-4);
  EXPECT_DOUBLE_EQ(got, want);
}

TEST(BleuTest, IdentityIsOne) {
  const auto s = words({"港口", "几", "周", "后", "才"});
  EXPECT_DOUBLE_EQ(bleu(s, s), 1.0);
}

TEST(BleuTest, NoUnigramOverlapIsZero) {
  EXPECT_EQ(bleu(words({"a", "b", "c", "d"}), words({"w", "x", "y", "z"})), 0.0);
}

TEST(BleuTest, EmptyHypothesisIsZero) {
  EXPECT_EQ(bleu(words({"a", "b"}), {}), 0.0);
}

TEST(BleuTest, BrevityPenalty) {
  // Every n-gram of the hypothesis is in the reference; only BP applies.
  const auto ref = words({"a", "b", "c", "d", "e", "f", "g", "h"});
  const auto hyp = words({"a", "b", "c", "d"});
  EXPECT_DOUBLE_EQ(bleu(ref, hyp), std::exp(1.0 - 8.0 / 4.0));
}

TEST(BleuTest, OrderMatters) {
  const auto s = words({"a", "b", "c", "d"});
  EXPECT_LT(bleu(s, words({"d", "c", "b", "a"})), 1.0);
}

TEST(VsmCosineTest, Examples) {
  EXPECT_EQ(vsm_cosine(words({"a", "a", "b"}), words({"a", "b", "b"})), 0.8);
  EXPECT_DOUBLE_EQ(vsm_cosine(words({"a", "b"}), words({"b", "a"})), 1.0);
  EXPECT_EQ(vsm_cosine(words({"a"}), words({"b"})), 0.0);
  EXPECT_EQ(vsm_cosine({}, words({"b"})), 0.0);
}

TEST(BaselinePropertyTest, RangeIdentityAndOrderInvariance) {
  std::mt19937_64 rng(61);
  const auto& vocab = support::vocabulary();
  std::uniform_int_distribution<std::size_t> len(1, 8), pick(0, vocab.size() - 1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> a(len(rng)), b(len(rng));
    for (auto& w : a) w = vocab[pick(rng)];
    for (auto& w : b) w = vocab[pick(rng)];
    const double bl = bleu(a, b), vs = vsm_cosine(a, b);
    EXPECT_GE(bl, 0.0);
    EXPECT_LE(bl, 1.0);
    EXPECT_GE(vs, 0.0);
    EXPECT_LE(vs, 1.0 + 1e-15);
    EXPECT_NEAR(vsm_cosine(a, a), 1.0, 1e-12);
    std::vector<std::string> shuffled = b;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(vsm_cosine(a, shuffled), vs, 1e-12);
  }
}

TEST(SurfacesTest, TokenOrder) {
  EXPECT_EQ(surfaces(support::fixture_graph("tv_ref.sdp.json")),
            words({"爷爷", "看到", "了", "小明", "。"}));
}

}  // namespace
}  // namespace semkey
