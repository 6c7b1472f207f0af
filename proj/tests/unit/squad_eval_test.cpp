#include "vocabsplice/squad_eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace vocabsplice;
using namespace vocabsplice::squad;
using namespace vocabsplice::test;

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_answer("The Finite Element Method"), "finite element method");
  EXPECT_EQ(normalize_answer("(Th, Pu)O2"), "th puo2");
  EXPECT_EQ(normalize_answer("coleman et al."), "coleman et al");
  EXPECT_EQ(normalize_answer("  the   theory of a  an  "), "theory of");
  EXPECT_EQ(normalize_answer(""), "");
}

TEST(ExactMatch, Examples) {
  EXPECT_EQ(exact_match("walters and cockraft", {"walters and cockraft"}), 1);
  EXPECT_EQ(exact_match("Walters and Cockraft", {"walters and cockraft"}), 1);
  EXPECT_EQ(exact_match("coleman", {"coleman et al."}), 0);
  EXPECT_EQ(exact_match("coleman", {"x", "Coleman."}), 1);
  EXPECT_THROW(exact_match("x", {}), Error);
}

TEST(F1, Examples) {
  EXPECT_DOUBLE_EQ(f1("coleman", {"coleman et al."}), 0.5);
  EXPECT_DOUBLE_EQ(f1("finite element method", {"finite element method"}), 1.0);
  EXPECT_DOUBLE_EQ(f1("boron carbide", {"cerium"}), 0.0);
  EXPECT_DOUBLE_EQ(f1("the", {"a"}), 1.0);
  EXPECT_DOUBLE_EQ(f1("", {"cerium"}), 0.0);
  EXPECT_DOUBLE_EQ(f1("coleman", {"cerium", "coleman et al.", "coleman et"}), 2.0 / 3.0);
  EXPECT_THROW(f1("x", {}), Error);
}

TEST(Evaluate, Examples) {
  const auto ds = dataset_with_golds({{"walters and cockraft"}, {"coleman et"}});
  const auto half = evaluate(ds, {{"q0", "Walters and Cockraft"}, {"q1", "coleman"}});
  EXPECT_DOUBLE_EQ(half.exact_match, 50.0);
  EXPECT_DOUBLE_EQ(half.f1, 83.33);
  EXPECT_EQ(half.n_evaluated, 2u);

  const auto ds2 = dataset_with_golds({{"cerium"}, {"finite element method"}});
  const auto mixed = evaluate(ds2, {{"q0", "cerium"}, {"q1", "finite element"}});
  EXPECT_DOUBLE_EQ(mixed.exact_match, 50.0);
  EXPECT_DOUBLE_EQ(mixed.f1, 90.0);

  const auto perfect = evaluate(ds2, {{"q0", "cerium"}, {"q1", "finite element method"}});
  EXPECT_DOUBLE_EQ(perfect.exact_match, 100.0);
  EXPECT_DOUBLE_EQ(perfect.f1, 100.0);

  const auto none = evaluate(ds2, {});
  EXPECT_DOUBLE_EQ(none.exact_match, 0.0);
  EXPECT_DOUBLE_EQ(none.f1, 0.0);
  EXPECT_EQ(none.missing_ids, (std::vector<std::string>{"q0", "q1"}));
}

TEST(Evaluate, TwoQuestionsHalfF1) {
  // One exact hit and one miss scoring F1 0.5.
  const auto ds = dataset_with_golds({{"cerium"}, {"coleman et al."}});
  const auto r = evaluate(ds, {{"q0", "cerium"}, {"q1", "coleman"}});
  EXPECT_DOUBLE_EQ(r.exact_match, 50.0);
  EXPECT_DOUBLE_EQ(r.f1, 75.0);
  EXPECT_TRUE(r.missing_ids.empty());
}

TEST(Predictions, ParseAndJson) {
  EXPECT_EQ(parse_predictions(R"({"a":"x","b":""})"), (PredictionSet{{"a", "x"}, {"b", ""}}));
  EXPECT_THROW(parse_predictions("[]"), Error);
  EXPECT_THROW(parse_predictions(R"({"a":1})"), Error);
  EXPECT_THROW(parse_predictions("{"), Error);
  const auto j = to_json(EvalReport{50.0, 75.0, 2, {"q1"}});
  EXPECT_EQ(j.dump(), R"({"exact_match":50.0,"f1":75.0,"n_evaluated":2,"missing_ids":["q1"]})");
}

TEST(EvalProperties, F1MatchesMultisetOracle) {
  std::mt19937_64 rng(10000);
  for (int i = 0; i < 10000; ++i) {
    const auto pred = random_answer(rng);
    const auto gold = random_answer(rng);
    const double got = f1_single(pred, gold);
    ASSERT_NEAR(got, oracle_f1(pred, gold), 1e-12) << "'" << pred << "' vs '" << gold << "'";
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
    ASSERT_NEAR(got, f1_single(gold, pred), 1e-12);
    if (exact_match(pred, {gold})) {
      ASSERT_EQ(got, 1.0);
    }
  }
}

TEST(EvalProperties, ExactMatchNeverExceedsF1) {
  std::mt19937_64 rng(1000);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::vector<std::string>> golds(1 + rng() % 8);
    for (auto& g : golds) {
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t k = 0; k < n; ++k) g.push_back(random_answer(rng));
    }
    const auto ds = dataset_with_golds(golds);
    PredictionSet preds;
    for (std::size_t q = 0; q < golds.size(); ++q) {
      const auto roll = rng() % 4;
      if (roll == 0) continue;
      preds["q" + std::to_string(q)] = roll == 1 ? golds[q][rng() % golds[q].size()] : random_answer(rng);
    }
    const auto r = evaluate(ds, preds);
    ASSERT_LE(r.exact_match, r.f1);
    ASSERT_GE(r.exact_match, 0.0);
    ASSERT_LE(r.f1, 100.0);
  }
}

TEST(EvalProperties, NormalizationIdempotent) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 5000; ++i) {
    const auto s = random_string(rng, "aAnThe .,()-\t", 0, 20);
    const auto once = normalize_answer(s);
    ASSERT_EQ(normalize_answer(once), once) << s;
  }
}
