// Microbenchmarks for the hot paths: per-episode state extraction, agreement,
// segmentation, vote aggregation, and prompt assembly.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "whow/aggregate.hpp"
#include "whow/analysis.hpp"
#include "whow/corpus.hpp"
#include "whow/llm.hpp"
#include "whow/schema.hpp"
#include "whow/segment.hpp"

namespace {

// Merged panel episode alternating moderator and guest turns.
whow::Episode synthetic_episode(unsigned seed, int turn_count) {
  std::mt19937 rng(seed);
  whow::Episode ep;
  ep.id = "bench" + std::to_string(seed);
  ep.domain = whow::Domain::panel;
  ep.topic = "benchmarking";
  ep.speakers.push_back({"mod", "The Moderator", whow::Role::moderator});
  constexpr int kGuests = 4;
  for (int i = 0; i < kGuests; ++i)
    ep.speakers.push_back(
        {"s" + std::to_string(i), "Speaker " + std::to_string(i), whow::Role::participant});
  std::uniform_int_distribution<int> pick(0, kGuests - 1);
  std::uniform_int_distribution<int> sentence_count(1, 4);
  for (int t = 0; t < turn_count; ++t) {
    whow::Turn turn;
    turn.index = t;
    turn.speaker_id = t % 2 == 0 ? "mod" : "s" + std::to_string(pick(rng));
    const int count = sentence_count(rng);
    for (int s = 0; s < count; ++s)
      turn.sentences.push_back(
          {s, "This is sentence " + std::to_string(s) + " of turn " + std::to_string(t) + "."});
    ep.turns.push_back(std::move(turn));
  }
  return ep;
}

void BM_StateSequence(benchmark::State& state) {
  const whow::Episode ep = synthetic_episode(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(whow::state_sequence(ep));
}
BENCHMARK(BM_StateSequence)->Arg(64)->Arg(512);

void BM_TransitionMatrix(benchmark::State& state) {
  std::vector<whow::SpeakerStateSequence> seqs;
  seqs.reserve(200);
  for (unsigned i = 0; i < 200; ++i)
    seqs.push_back(whow::state_sequence(synthetic_episode(i, 64)));
  for (auto _ : state) benchmark::DoNotOptimize(whow::transition_matrix(seqs));
}
BENCHMARK(BM_TransitionMatrix);

void BM_KrippendorffAlpha(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> label(0, 5);
  std::uniform_real_distribution<double> missing(0.0, 1.0);
  std::vector<std::vector<std::optional<int>>> units(static_cast<size_t>(state.range(0)),
                                                     std::vector<std::optional<int>>(3));
  for (auto& row : units)
    for (auto& cell : row)
      if (missing(rng) >= 0.15) cell = label(rng);
  for (auto _ : state) benchmark::DoNotOptimize(whow::krippendorff_alpha(units));
}
BENCHMARK(BM_KrippendorffAlpha)->Arg(100)->Arg(2000);

void BM_SegmentText(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 40; ++i)
    text += "Dr. Lee asked question " + std::to_string(i) +
            ". The panel replied at 3.5 p.m. with e.g. an example! Did that settle it? ";
  for (auto _ : state) benchmark::DoNotOptimize(whow::segment_text(text));
}
BENCHMARK(BM_SegmentText);

void BM_MajorityVote(benchmark::State& state) {
  const whow::Episode ep = synthetic_episode(5, 8);
  const whow::TiebreakPolicy policy = whow::TiebreakPolicy::priority_for(ep);
  const auto vocab = whow::target_vocabulary(ep);
  std::vector<whow::Annotation> votes;
  for (int i = 0; i < 5; ++i) {
    whow::Annotation a;
    a.key = {ep.id, 0, 0};
    a.annotator = "human:a" + std::to_string(i);
    a.motives = {i % 2 == 0, i % 3 == 0, false};
    a.act = static_cast<whow::DialogueAct>(i % whow::kDialogueActCount);
    a.target = vocab[static_cast<size_t>(i) % vocab.size()];
    votes.push_back(std::move(a));
  }
  for (auto _ : state) benchmark::DoNotOptimize(whow::majority_vote(votes, policy));
}
BENCHMARK(BM_MajorityVote);

void BM_BuildPrompt(benchmark::State& state) {
  const whow::Episode ep = synthetic_episode(7, 64);
  const whow::PromptSpec spec;
  const whow::SentenceKey key{ep.id, 30, 0};
  for (auto _ : state) benchmark::DoNotOptimize(whow::build_prompt(ep, key, spec));
}
BENCHMARK(BM_BuildPrompt);

}  // namespace

BENCHMARK_MAIN();
