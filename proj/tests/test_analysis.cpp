// Speaker-state sequences and transitions, moderator turn views,
// act-conditioned rotation, motive-conditioned act tables, who-metrics and
// source comparison.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "support.hpp"
#include "whow/analysis.hpp"
#include "whow/ingest.hpp"

using namespace whow;

namespace {

Episode simple_episode(const std::string& id,
                       const std::vector<std::string>& turn_speakers) {
  Episode ep;
  ep.id = id;
  ep.domain = Domain::generic;
  ep.topic = "State machine fixture";
  ep.split = Split::unsplit;
  ep.speakers = {{"mod", "Mod", Role::moderator},
                 {"a", "Speaker A", Role::participant},
                 {"b", "Speaker B", Role::participant}};
  for (size_t i = 0; i < turn_speakers.size(); ++i) {
    Turn t;
    t.index = static_cast<int>(i);
    t.speaker_id = turn_speakers[i];
    t.sentences = {{0, "Turn " + std::to_string(i) + " content."}};
    ep.turns.push_back(std::move(t));
  }
  require_valid(ep);
  return ep;
}

// Independent re-statement of the classification rule, for the property test.
std::vector<SpeakerState> classify_by_hand(const Episode& ep) {
  std::vector<SpeakerState> out;
  std::string last_non_moderator;
  for (const auto& t : ep.turns) {
    if (ep.is_moderator(t.speaker_id)) {
      out.push_back(SpeakerState::moderation);
    } else {
      out.push_back(t.speaker_id == last_non_moderator ? SpeakerState::continuation
                                                       : SpeakerState::rotation);
      last_non_moderator = t.speaker_id;
    }
  }
  return out;
}

Corpus fixture_corpus() { return load_corpus_dir(testsup::fixture("corpus")); }

std::vector<Annotation> fixture_consensus() {
  std::vector<Annotation> all;
  for (const char* name : {"human_a1.jsonl", "human_a2.jsonl", "human_a3.jsonl"}) {
    auto part = read_annotations_file(testsup::fixture("annotations/" + std::string(name)));
    all.insert(all.end(), part.begin(), part.end());
  }
  std::vector<Annotation> consensus;
  for (const auto& agg : aggregate_corpus(all, fixture_corpus()))
    consensus.push_back(to_annotation(agg));
  return consensus;
}

constexpr auto kMod = SpeakerState::moderation;
constexpr auto kCont = SpeakerState::continuation;
constexpr auto kRot = SpeakerState::rotation;

}  // namespace

TEST_CASE("state_sequence classifies a 12-turn episode") {
  auto ep = simple_episode("states", {"mod", "a", "mod", "b", "a", "mod", "a",
                                      "b", "mod", "b", "mod", "a"});
  auto seq = state_sequence(ep);
  CHECK(seq.episode_id == "states");
  CHECK(seq.states == std::vector<SpeakerState>{kMod, kRot, kMod, kRot, kRot, kMod,
                                                kCont, kRot, kMod, kCont, kMod, kRot});
}

TEST_CASE("transition_matrix tallies and row-normalizes the 12-turn fixture") {
  auto ep = simple_episode("states", {"mod", "a", "mod", "b", "a", "mod", "a",
                                      "b", "mod", "b", "mod", "a"});
  auto m = transition_matrix({state_sequence(ep)});
  auto idx = [](SpeakerState s) { return static_cast<size_t>(s); };

  CHECK(m.counts[idx(kMod)][idx(kCont)] == 2);
  CHECK(m.counts[idx(kMod)][idx(kRot)] == 3);
  CHECK(m.counts[idx(kCont)][idx(kMod)] == 1);
  CHECK(m.counts[idx(kCont)][idx(kRot)] == 1);
  CHECK(m.counts[idx(kRot)][idx(kMod)] == 3);
  CHECK(m.counts[idx(kRot)][idx(kRot)] == 1);
  CHECK(m.counts[idx(kMod)][idx(kMod)] == 0);

  CHECK(*m.probs[idx(kMod)][idx(kCont)] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(*m.probs[idx(kMod)][idx(kRot)] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(*m.probs[idx(kCont)][idx(kMod)] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*m.probs[idx(kCont)][idx(kRot)] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*m.probs[idx(kRot)][idx(kMod)] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(*m.probs[idx(kRot)][idx(kRot)] == doctest::Approx(0.25).epsilon(1e-12));
  // Impossible cells have no probability.
  CHECK_FALSE(m.probs[idx(kMod)][idx(kMod)].has_value());
  CHECK_FALSE(m.probs[idx(kCont)][idx(kCont)].has_value());
  CHECK_FALSE(m.probs[idx(kRot)][idx(kCont)].has_value());
}

TEST_CASE("exactly three transitions are structurally impossible") {
  int impossible = 0;
  for (int f = 0; f < kSpeakerStateCount; ++f)
    for (int t = 0; t < kSpeakerStateCount; ++t)
      if (!TransitionMatrix::possible(static_cast<SpeakerState>(f),
                                      static_cast<SpeakerState>(t)))
        ++impossible;
  CHECK(impossible == 3);
  CHECK_FALSE(TransitionMatrix::possible(kMod, kMod));
  CHECK_FALSE(TransitionMatrix::possible(kCont, kCont));
  CHECK_FALSE(TransitionMatrix::possible(kRot, kCont));
  CHECK(TransitionMatrix::possible(kMod, kCont));
  CHECK(TransitionMatrix::possible(kCont, kRot));
  CHECK(TransitionMatrix::possible(kRot, kRot));
}

TEST_CASE("transition_matrix rejects impossible observed transitions") {
  CHECK_THROWS_AS(transition_matrix({{"x", {kCont, kCont}}}), std::invalid_argument);
  CHECK_THROWS_AS(transition_matrix({{"x", {kMod, kMod}}}), std::invalid_argument);
  CHECK_THROWS_AS(transition_matrix({{"x", {kRot, kCont}}}), std::invalid_argument);
}

TEST_CASE("state classification matches the hand rule on random episodes") {
  std::mt19937 rng(99);
  std::vector<SpeakerStateSequence> pool;
  for (int i = 0; i < 200; ++i) {
    auto ep = testsup::random_episode(rng, i);
    auto seq = state_sequence(ep);
    REQUIRE(seq.states.size() == ep.turns.size());
    CHECK(seq.states == classify_by_hand(ep));
    pool.push_back(std::move(seq));
  }

  auto m = transition_matrix(pool);
  for (int f = 0; f < kSpeakerStateCount; ++f) {
    double row = 0;
    bool any = false;
    for (int t = 0; t < kSpeakerStateCount; ++t) {
      const auto from = static_cast<SpeakerState>(f);
      const auto to = static_cast<SpeakerState>(t);
      if (!TransitionMatrix::possible(from, to)) {
        CHECK(m.counts[f][t] == 0);
        CHECK_FALSE(m.probs[f][t].has_value());
        continue;
      }
      if (m.probs[f][t].has_value()) {
        any = true;
        row += *m.probs[f][t];
        CHECK(*m.probs[f][t] >= 0.0);
        CHECK(*m.probs[f][t] <= 1.0);
      }
    }
    if (any) CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("state_sequence is invariant under speaker renaming") {
  std::mt19937 rng(123);
  for (int i = 0; i < 25; ++i) {
    auto ep = testsup::random_episode(rng, 1000 + i);
    auto renamed = ep;
    for (auto& s : renamed.speakers) s.id += "_x";
    for (auto& t : renamed.turns) t.speaker_id += "_x";
    CHECK(state_sequence(ep).states == state_sequence(renamed).states);
  }
}

TEST_CASE("moderator_turn_views on the frozen debate fixture") {
  auto corpus = fixture_corpus();
  const Episode* deb = corpus.find_episode("deb001");
  REQUIRE(deb != nullptr);
  auto index = index_by_key(fixture_consensus());
  auto views = moderator_turn_views(*deb, index);

  REQUIRE(views.size() == 4);  // turns 0, 2, 4, 6
  const auto& v0 = views[0];
  CHECK(v0.turn_index == 0);
  CHECK(v0.acts == std::set<DialogueAct>{DialogueAct::prob, DialogueAct::supp});
  CHECK(v0.acts_per_sentence ==
        std::vector<DialogueAct>{DialogueAct::supp, DialogueAct::supp, DialogueAct::prob});
  CHECK(v0.targets == std::set<TargetLabel>{TargetLabel::Speaker("joe_smith"),
                                            TargetLabel::Group(TargetKind::everyone)});
  CHECK_FALSE(v0.prev_speaker.has_value());
  REQUIRE(v0.next_speaker.has_value());
  CHECK(*v0.next_speaker == "joe_smith");
  REQUIRE(v0.next_state.has_value());
  CHECK(*v0.next_state == kRot);
  CHECK(v0.unannotated.empty());

  const auto& v2 = views[2];
  CHECK(v2.turn_index == 4);
  CHECK(*v2.prev_speaker == "maria_garcia");
  CHECK(*v2.next_speaker == "joe_smith");

  const auto& last = views[3];
  CHECK(last.turn_index == 6);
  CHECK(*last.prev_speaker == "joe_smith");
  CHECK_FALSE(last.next_speaker.has_value());
  CHECK_FALSE(last.next_state.has_value());
}

TEST_CASE("moderator_turn_views tracks unannotated sentences") {
  auto corpus = fixture_corpus();
  const Episode* deb = corpus.find_episode("deb001");
  auto index = index_by_key(fixture_consensus());
  index.erase({"deb001", 0, 1});
  auto views = moderator_turn_views(*deb, index);
  REQUIRE(views[0].unannotated.size() == 1);
  CHECK(views[0].unannotated[0] == SentenceKey{"deb001", 0, 1});
  CHECK(views[0].acts_per_sentence.size() == 2);
}

TEST_CASE("index_by_key rejects multi-annotator pools and points at aggregation") {
  auto a = fixture_consensus();
  auto dup = a;
  dup.insert(dup.end(), a.begin(), a.end());
  CHECK_THROWS_WITH_AS(index_by_key(dup),
                       doctest::Contains("aggregate"), std::invalid_argument);
}

TEST_CASE("act_conditioned_transitions on the frozen fixtures") {
  auto corpus = fixture_corpus();
  auto consensus = fixture_consensus();

  auto per_turn = act_conditioned_transitions(corpus, consensus);
  CHECK(per_turn.unannotated.empty());
  const auto& supp = per_turn.rows.at(DialogueAct::supp);
  CHECK(supp.to_rotation == 3);
  CHECK(supp.to_continuation == 0);
  CHECK(supp.episode_end == 1);
  REQUIRE(supp.p_rotation.has_value());
  // The terminal turn is excluded from normalization: 3/3, not 3/4.
  CHECK(*supp.p_rotation == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*supp.p_continuation == doctest::Approx(0.0));
  CHECK(per_turn.rows.at(DialogueAct::prob).to_rotation == 3);
  CHECK(per_turn.rows.at(DialogueAct::conf).to_rotation == 3);
  CHECK(per_turn.rows.at(DialogueAct::inte).to_rotation == 1);
  CHECK_FALSE(per_turn.rows.at(DialogueAct::inst).p_rotation.has_value());
  CHECK_FALSE(per_turn.rows.at(DialogueAct::util).p_rotation.has_value());

  // Multiset counting: repeated acts within a turn count per sentence.
  auto per_sentence = act_conditioned_transitions(corpus, consensus, true);
  CHECK(per_sentence.rows.at(DialogueAct::supp).to_rotation == 5);
  CHECK(per_sentence.rows.at(DialogueAct::supp).episode_end == 1);
  CHECK(per_sentence.rows.at(DialogueAct::prob).to_rotation == 3);
  CHECK(per_sentence.rows.at(DialogueAct::conf).to_rotation == 3);
  CHECK(per_sentence.rows.at(DialogueAct::inte).to_rotation == 1);
}

TEST_CASE("act_conditioned_transitions reports unannotated moderator sentences") {
  auto corpus = fixture_corpus();
  auto consensus = fixture_consensus();
  std::erase_if(consensus, [](const Annotation& a) {
    return a.key == SentenceKey{"deb001", 0, 1};
  });
  auto report = act_conditioned_transitions(corpus, consensus);
  REQUIRE(report.unannotated.size() == 1);
  CHECK(report.unannotated[0] == SentenceKey{"deb001", 0, 1});
}

TEST_CASE("conditional_table on the frozen fixtures, exact fractions") {
  auto table = conditional_table(fixture_corpus(), fixture_consensus());
  CHECK(table.episode_count == 2);
  CHECK(table.mean_sentences_per_episode == doctest::Approx(6.5).epsilon(1e-12));

  auto act = [](DialogueAct a) { return static_cast<size_t>(a); };
  constexpr size_t kIM = 0, kCM = 1, kSM = 2;

  // IM: debate sentences prob/conf/prob/supp; panel supp/conf/conf.
  CHECK(*table.cells[kIM][act(DialogueAct::prob)] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(*table.cells[kIM][act(DialogueAct::conf)] == doctest::Approx(11.0 / 24).epsilon(1e-12));
  CHECK(*table.cells[kIM][act(DialogueAct::supp)] == doctest::Approx(7.0 / 24).epsilon(1e-12));
  CHECK(*table.cells[kIM][act(DialogueAct::inst)] == doctest::Approx(0.0));
  CHECK(*table.p_motive[kIM] == doctest::Approx(0.55).epsilon(1e-12));

  CHECK(*table.cells[kCM][act(DialogueAct::prob)] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(*table.cells[kCM][act(DialogueAct::conf)] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*table.cells[kCM][act(DialogueAct::inte)] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(*table.cells[kCM][act(DialogueAct::supp)] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(*table.p_motive[kCM] == doctest::Approx(0.4875).epsilon(1e-12));

  CHECK(*table.cells[kSM][act(DialogueAct::supp)] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*table.p_motive[kSM] == doctest::Approx(0.225).epsilon(1e-12));

  CHECK(*table.p_act[act(DialogueAct::prob)] == doctest::Approx(0.1875).epsilon(1e-12));
  CHECK(*table.p_act[act(DialogueAct::conf)] == doctest::Approx(0.2625).epsilon(1e-12));
  CHECK(*table.p_act[act(DialogueAct::inte)] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(*table.p_act[act(DialogueAct::supp)] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(*table.p_act[act(DialogueAct::util)] == doctest::Approx(0.0));

  // Each motive row is a mean of per-episode distributions: sums to 1.
  for (size_t m = 0; m < ConditionalTable::kMotives; ++m) {
    double row = 0;
    for (size_t d = 0; d < kDialogueActCount; ++d) row += table.cells[m][d].value_or(0);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }
  double acts_sum = 0;
  for (size_t d = 0; d < kDialogueActCount; ++d) acts_sum += table.p_act[d].value_or(0);
  CHECK(acts_sum == doctest::Approx(1.0).epsilon(1e-9));

  // Both episodes contribute samples for every motive row.
  for (size_t m = 0; m < ConditionalTable::kMotives; ++m) {
    CHECK(table.motive_samples[m].size() == 2);
    CHECK(table.cell_samples[m][act(DialogueAct::supp)].size() == 2);
  }
}

TEST_CASE("conditional_table excludes motive-free episodes unless zero_fill") {
  auto ep = testsup::tiny_debate();
  Corpus corpus;
  corpus.episodes.push_back(ep);

  auto make = [](SentenceKey key, bool im, bool cm, DialogueAct act) {
    Annotation a;
    a.key = std::move(key);
    a.annotator = "consensus";
    a.motives = {im, cm, false};
    a.act = act;
    a.target = TargetLabel::Group(TargetKind::unknown);
    return a;
  };
  std::vector<Annotation> anns = {
      make({"tiny", 0, 0}, true, false, DialogueAct::prob),
      make({"tiny", 0, 1}, true, true, DialogueAct::supp),
      make({"tiny", 2, 0}, false, true, DialogueAct::supp),
      make({"tiny", 4, 0}, false, false, DialogueAct::util),
  };

  auto table = conditional_table(corpus, anns);
  CHECK(table.episode_count == 1);
  CHECK(table.mean_sentences_per_episode == doctest::Approx(4.0));
  CHECK(*table.cells[0][static_cast<size_t>(DialogueAct::prob)] == doctest::Approx(0.5));
  CHECK(*table.cells[1][static_cast<size_t>(DialogueAct::supp)] == doctest::Approx(1.0));
  // No SM sentence anywhere: the row has no sample without zero_fill.
  CHECK_FALSE(table.cells[2][static_cast<size_t>(DialogueAct::supp)].has_value());
  CHECK(table.cell_samples[2][0].empty());
  // p(SM) is still defined: zero of the annotated sentences carry it.
  CHECK(*table.p_motive[2] == doctest::Approx(0.0));

  auto filled = conditional_table(corpus, anns, true);
  CHECK(*filled.cells[2][static_cast<size_t>(DialogueAct::supp)] == doctest::Approx(0.0));
  CHECK(filled.cell_samples[2][0].size() == 1);
}

TEST_CASE("conditional_table means are unweighted across episodes") {
  auto ep1 = testsup::tiny_debate();
  auto ep2 = testsup::tiny_debate();
  ep2.id = "tiny2";
  Corpus corpus;
  corpus.episodes = {ep1, ep2};

  auto make = [](std::string ep, int turn, int sent, bool im, DialogueAct act) {
    Annotation a;
    a.key = {std::move(ep), turn, sent};
    a.annotator = "consensus";
    a.motives = {im, false, false};
    a.act = act;
    a.target = TargetLabel::Group(TargetKind::unknown);
    return a;
  };
  std::vector<Annotation> anns = {
      // Episode 1: four sentences, two IM (prob, supp).
      make("tiny", 0, 0, true, DialogueAct::prob),
      make("tiny", 0, 1, true, DialogueAct::supp),
      make("tiny", 2, 0, false, DialogueAct::supp),
      make("tiny", 4, 0, false, DialogueAct::util),
      // Episode 2: one sentence, IM (conf).
      make("tiny2", 0, 0, true, DialogueAct::conf),
  };
  auto table = conditional_table(corpus, anns);
  // Unweighted mean of per-episode p(d|IM): (0.5+0)/2, (0+1)/2, (0.5+0)/2.
  CHECK(*table.cells[0][static_cast<size_t>(DialogueAct::prob)] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(*table.cells[0][static_cast<size_t>(DialogueAct::conf)] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*table.cells[0][static_cast<size_t>(DialogueAct::supp)] == doctest::Approx(0.25).epsilon(1e-12));
  // Pooling by sentence would give 1/3 per act instead.
  CHECK(*table.cells[0][static_cast<size_t>(DialogueAct::prob)] != doctest::Approx(1.0 / 3));
  CHECK(*table.p_motive[0] == doctest::Approx((0.5 + 1.0) / 2).epsilon(1e-12));
  CHECK(table.mean_sentences_per_episode == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("who_metrics exact fractions on the frozen fixtures") {
  auto metrics = who_metrics(fixture_corpus(), fixture_consensus());
  CHECK(metrics.moderator_turn_count == 7);
  CHECK(metrics.skipped_turns == 0);
  CHECK(metrics.pro_activity == doctest::Approx(4.0 / 7).epsilon(1e-12));
  CHECK(metrics.interactivity == doctest::Approx(6.0 / 7).epsilon(1e-12));
  CHECK(metrics.specificity == doctest::Approx(3.0 / 7).epsilon(1e-12));

  REQUIRE(metrics.pro_activity_samples.size() == 2);
  CHECK(metrics.pro_activity_samples[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(metrics.pro_activity_samples[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(metrics.interactivity_samples[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(metrics.interactivity_samples[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metrics.specificity_samples[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(metrics.specificity_samples[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("who_metrics skips moderator turns with no annotations") {
  auto consensus = fixture_consensus();
  // Remove the only annotation of deb001 turn 6.
  std::erase_if(consensus, [](const Annotation& a) {
    return a.key == SentenceKey{"deb001", 6, 0};
  });
  auto metrics = who_metrics(fixture_corpus(), consensus);
  CHECK(metrics.moderator_turn_count == 6);
  CHECK(metrics.skipped_turns == 1);
  // deb001 turn 6 was neither pro-active nor interactive nor specific:
  // dropping it raises all three rates.
  CHECK(metrics.pro_activity == doctest::Approx(4.0 / 6).epsilon(1e-12));
  CHECK(metrics.interactivity == doctest::Approx(6.0 / 6).epsilon(1e-12));
  CHECK(metrics.specificity == doctest::Approx(3.0 / 6).epsilon(1e-12));
}

TEST_CASE("compare_sources of identical annotation sets finds nothing") {
  auto corpus = fixture_corpus();
  auto consensus = fixture_consensus();
  auto cmp = compare_sources(corpus, consensus, consensus);
  CHECK(cmp.only_in_a.empty());
  CHECK(cmp.only_in_b.empty());
  for (size_t m = 0; m < ConditionalTable::kMotives; ++m) {
    const auto& r = cmp.tests.p_motive[m];
    if (r.status == TestStatus::ok) {
      REQUIRE(r.p.has_value());
      CHECK(*r.p == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_FALSE(r.significant);
    for (size_t d = 0; d < kDialogueActCount; ++d)
      CHECK_FALSE(cmp.tests.cells[m][d].significant);
  }
}

TEST_CASE("compare_sources reports coverage mismatches") {
  auto corpus = fixture_corpus();
  auto a = fixture_consensus();
  auto b = a;
  std::erase_if(b, [](const Annotation& ann) {
    return ann.key == SentenceKey{"pan001", 4, 1};
  });
  auto cmp = compare_sources(corpus, a, b);
  REQUIRE(cmp.only_in_a.size() == 1);
  CHECK(cmp.only_in_a[0] == SentenceKey{"pan001", 4, 1});
  CHECK(cmp.only_in_b.empty());
}

TEST_CASE("compare_tables flags exactly separated cells") {
  auto mk = [](std::vector<double> im_prob_samples) {
    ConditionalTable t;
    t.cell_samples[0][0] = std::move(im_prob_samples);
    return t;
  };
  auto a = mk({0.1, 0.1, 0.1});
  auto b = mk({0.9, 0.9, 0.9});
  auto cmp = compare_tables(a, b);
  CHECK(cmp.cells[0][0].status == TestStatus::exact_separation);
  CHECK(cmp.cells[0][0].significant);
  CHECK(cmp.cells[0][0].larger == LargerSide::b);
  // Rows without samples are not testable.
  CHECK(cmp.cells[1][0].status == TestStatus::not_testable);
}
