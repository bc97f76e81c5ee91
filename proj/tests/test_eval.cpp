// Macro-F1, confusion matrices, random baselines and model-vs-human alpha.

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support.hpp"
#include "whow/eval.hpp"
#include "whow/ingest.hpp"

using namespace whow;

namespace {

// The four moderator sentences of the tiny debate episode.
const SentenceKey kKeys[] = {
    {"tiny", 0, 0}, {"tiny", 0, 1}, {"tiny", 2, 0}, {"tiny", 4, 0}};

std::vector<Annotation> with_acts(const std::vector<DialogueAct>& acts,
                                  const std::string& annotator) {
  std::vector<Annotation> out;
  for (size_t i = 0; i < acts.size(); ++i) {
    Annotation a;
    a.key = kKeys[i];
    a.annotator = annotator;
    a.act = acts[i];
    a.target = TargetLabel::Group(TargetKind::unknown);
    out.push_back(std::move(a));
  }
  return out;
}

Corpus tiny_corpus() {
  Corpus c;
  c.episodes.push_back(testsup::tiny_debate());
  return c;
}

}  // namespace

TEST_CASE("macro_f1 worked example: union vs gold-only universe") {
  using A = DialogueAct;
  auto gold = with_acts({A::prob, A::prob, A::conf, A::conf}, "human:g");
  auto pred = with_acts({A::prob, A::prob, A::supp, A::supp}, "model:m");
  // Union universe {prob, conf, supp}: F1 = 1, 0, 0 -> exactly 1/3.
  CHECK(macro_f1(gold, pred, Dimension::DA) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Gold-only universe {prob, conf}: F1 = 1, 0 -> exactly 1/2.
  CHECK(macro_f1(gold, pred, Dimension::DA, ClassUniverse::gold_only) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("motives always score over both classes") {
  using A = DialogueAct;
  auto gold = with_acts({A::prob, A::prob, A::prob, A::prob}, "human:g");
  auto pred = gold;
  for (auto& a : gold) a.motives.informational = true;
  for (auto& a : pred) {
    a.annotator = "model:m";
    a.motives.informational = true;
  }
  // Perfect on "true" but "false" never occurs: macro over {true,false} = 0.5.
  CHECK(macro_f1(gold, pred, Dimension::IM) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(macro_f1(gold, pred, Dimension::IM, ClassUniverse::gold_only) ==
        doctest::Approx(0.5).epsilon(1e-15));

  auto dim = evaluate_dimension(gold, pred, Dimension::IM);
  REQUIRE(dim.per_class.size() == 2);
  CHECK(dim.per_class[0].label == "false");
  CHECK(dim.per_class[0].f1 == 0.0);
  CHECK(dim.per_class[0].support == 0);
  CHECK(dim.per_class[1].label == "true");
  CHECK(dim.per_class[1].f1 == 1.0);
  CHECK(dim.per_class[1].support == 4);
}

TEST_CASE("per-class precision, recall and F1") {
  using A = DialogueAct;
  auto gold = with_acts({A::prob, A::conf, A::conf, A::supp}, "human:g");
  auto pred = with_acts({A::prob, A::prob, A::conf, A::supp}, "model:m");
  auto dim = evaluate_dimension(gold, pred, Dimension::DA);
  REQUIRE(dim.per_class.size() == 3);  // sorted: conf, prob, supp

  const auto& conf = dim.per_class[0];
  CHECK(conf.label == "conf");
  CHECK(conf.precision == doctest::Approx(1.0));
  CHECK(conf.recall == doctest::Approx(0.5));
  CHECK(conf.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(conf.support == 2);

  const auto& prob = dim.per_class[1];
  CHECK(prob.label == "prob");
  CHECK(prob.precision == doctest::Approx(0.5));
  CHECK(prob.recall == doctest::Approx(1.0));
  CHECK(prob.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  CHECK(dim.per_class[2].f1 == doctest::Approx(1.0));
  CHECK(dim.macro_f1 == doctest::Approx((2.0 / 3.0 + 2.0 / 3.0 + 1.0) / 3.0).epsilon(1e-15));

  auto report = evaluate(gold, pred, {Dimension::DA, Dimension::IM});
  CHECK(report.dims.size() == 2);
  CHECK(report.dims.at(Dimension::DA).macro_f1 == doctest::Approx(dim.macro_f1));
}

TEST_CASE("a gold key without a prediction is an error") {
  using A = DialogueAct;
  auto gold = with_acts({A::prob, A::conf}, "human:g");
  auto pred = with_acts({A::prob}, "model:m");
  CHECK_THROWS_AS(macro_f1(gold, pred, Dimension::DA), std::invalid_argument);
  // Extra predictions for keys outside gold are fine.
  auto wide = with_acts({A::prob, A::conf, A::supp, A::util}, "model:m");
  CHECK(macro_f1(gold, wide, Dimension::DA) == doctest::Approx(1.0));
  CHECK_THROWS_AS(macro_f1({}, pred, Dimension::DA), std::invalid_argument);
}

TEST_CASE("confusion matrix counts and normalization") {
  using A = DialogueAct;
  auto gold = with_acts({A::prob, A::conf, A::conf, A::supp}, "human:g");
  auto pred = with_acts({A::prob, A::prob, A::conf, A::supp}, "model:m");
  auto m = confusion(gold, pred, Dimension::DA);
  REQUIRE(m.labels == std::vector<std::string>{"conf", "prob", "supp"});
  CHECK(m.counts[0] == std::vector<int>{1, 1, 0});  // gold conf: 1 conf, 1 prob
  CHECK(m.counts[1] == std::vector<int>{0, 1, 0});
  CHECK(m.counts[2] == std::vector<int>{0, 0, 1});
  CHECK(m.total() == 4);

  auto norm = m.row_normalized();
  CHECK(norm[0][0] == doctest::Approx(0.5));
  CHECK(norm[0][1] == doctest::Approx(0.5));
  CHECK(norm[1][1] == doctest::Approx(1.0));
}

TEST_CASE("random_baseline is bit-reproducible and bounded") {
  auto corpus = load_corpus_dir(testsup::fixture("corpus"));
  auto gold = read_annotations_file(testsup::fixture("annotations/human_a1.jsonl"));

  for (Dimension dim : kAllDimensions) {
    const double a = random_baseline(gold, corpus, dim);
    const double b = random_baseline(gold, corpus, dim);
    CHECK(a == b);  // identical bits, not just approximately equal
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }

  // Different seed sets draw different predictions.
  const double d0 = random_baseline(gold, corpus, Dimension::DA, {0, 1, 2, 3, 4});
  const double d1 = random_baseline(gold, corpus, Dimension::DA, {50, 51, 52, 53, 54});
  CHECK(d0 != d1);

  // TS draws need the episode's vocabulary.
  Corpus empty;
  CHECK_THROWS_AS(random_baseline(gold, empty, Dimension::TS), std::invalid_argument);
  CHECK_THROWS_AS(random_baseline(gold, corpus, Dimension::DA, {}), std::invalid_argument);
}

TEST_CASE("model_human_alpha: identity is 1, constant labels are degenerate") {
  auto gold = read_annotations_file(testsup::fixture("annotations/human_a1.jsonl"));
  auto pred = gold;
  for (auto& a : pred) a.annotator = "model:echo";
  auto alpha = model_human_alpha(gold, pred, Dimension::DA);
  REQUIRE(alpha.has_value());
  CHECK(*alpha == doctest::Approx(1.0).epsilon(1e-12));

  using A = DialogueAct;
  auto g2 = with_acts({A::prob, A::prob, A::prob}, "human:g");
  auto p2 = with_acts({A::prob, A::prob, A::prob}, "model:m");
  CHECK_FALSE(model_human_alpha(g2, p2, Dimension::DA).has_value());

  // Disagreement drags alpha below 1.
  auto p3 = gold;
  for (auto& a : p3) a.annotator = "model:noisy";
  p3.front().act = p3.front().act == A::prob ? A::conf : A::prob;
  auto noisy = model_human_alpha(gold, p3, Dimension::DA);
  REQUIRE(noisy.has_value());
  CHECK(*noisy < 1.0);
}
