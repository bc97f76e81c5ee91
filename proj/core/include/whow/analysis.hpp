#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "whow/aggregate.hpp"
#include "whow/schema.hpp"
#include "whow/stats.hpp"

namespace whow {

enum class SpeakerState { moderation, continuation, rotation };
inline constexpr int kSpeakerStateCount = 3;
const char* to_string(SpeakerState s);

struct SpeakerStateSequence {
  std::string episode_id;
  std::vector<SpeakerState> states;  // aligned to turns
};

// Per-turn speaker status: moderation when the moderator holds the floor;
// otherwise continuation when the speaker matches the last non-moderator
// turn before it, rotation when it differs (or no such turn exists).
// Requires a merged episode.
SpeakerStateSequence state_sequence(const Episode& ep);

struct TransitionMatrix {
  // counts[from][to]; impossible cells stay zero by construction.
  std::array<std::array<double, 3>, 3> counts{};
  // Row-normalized probabilities; a row with no outgoing transitions is
  // undefined (nullopt), impossible cells are nullopt.
  std::array<std::array<std::optional<double>, 3>, 3> probs{};

  static bool possible(SpeakerState from, SpeakerState to);
};

// Pools consecutive-pair counts over the given sequences and row-normalizes.
// Throws std::invalid_argument if a structurally impossible transition is
// observed (indicates an unmerged episode).
TransitionMatrix transition_matrix(const std::vector<SpeakerStateSequence>& seqs);

// --- Moderator turn views ---------------------------------------------------

struct ModeratorTurnView {
  std::string episode_id;
  int turn_index = 0;
  std::set<DialogueAct> acts;                       // d_t over annotated sentences
  std::vector<DialogueAct> acts_per_sentence;       // multiset variant
  std::set<TargetLabel> targets;                    // r_t over annotated sentences
  std::optional<std::string> prev_speaker;          // p_{t-1}
  std::optional<std::string> next_speaker;          // p_{t+1}
  std::optional<SpeakerState> next_state;           // s_{t+1}; empty at episode end
  std::vector<SentenceKey> unannotated;             // sentences lacking a label
};

// One view per moderator turn, in order. `annotations` must hold at most one
// annotation per sentence key (e.g. consensus or one model's output).
std::vector<ModeratorTurnView> moderator_turn_views(
    const Episode& ep, const std::map<SentenceKey, Annotation>& annotations);

std::map<SentenceKey, Annotation> index_by_key(const std::vector<Annotation>& anns);

// --- Act-conditioned rotation -----------------------------------------------

struct ActTransitionReport {
  struct Row {
    double to_continuation = 0;  // counts
    double to_rotation = 0;
    double episode_end = 0;  // terminal moderator turns; excluded from normalization
    std::optional<double> p_continuation;
    std::optional<double> p_rotation;
  };
  std::map<DialogueAct, Row> rows;
  std::vector<SentenceKey> unannotated;  // excluded sentences
};

// P(s_{t+1} | act): every act of a moderator turn contributes one count to
// the successor state. With per_sentence_counts, each annotated sentence
// contributes (multiset); otherwise each distinct act per turn counts once.
ActTransitionReport act_conditioned_transitions(
    const Corpus& corpus, const std::vector<Annotation>& annotations,
    bool per_sentence_counts = false);

// --- Motive-conditioned act distributions ------------------------------------

struct ConditionalTable {
  static constexpr int kMotives = 3;  // IM, CM, SM row order

  // cells[m][d] = mean over episodes of p(act=d | motive=m); empty when no
  // episode had the motive.
  std::array<std::array<std::optional<double>, kDialogueActCount>, kMotives> cells;
  std::array<std::optional<double>, kMotives> p_motive;       // mean p(m)
  std::array<std::optional<double>, kDialogueActCount> p_act; // mean p(d)
  int episode_count = 0;
  double mean_sentences_per_episode = 0.0;

  // Per-episode samples retained for significance testing.
  std::array<std::array<std::vector<double>, kDialogueActCount>, kMotives> cell_samples;
  std::array<std::vector<double>, kMotives> motive_samples;
  std::array<std::vector<double>, kDialogueActCount> act_samples;
};

// Per episode: p(d|m) over annotated moderator sentences carrying motive m,
// p(m) and p(d) over all annotated moderator sentences; table values are
// unweighted means across episodes. Episodes where the motive never occurs
// are excluded from that row's mean unless zero_fill is set.
ConditionalTable conditional_table(const Corpus& corpus,
                                   const std::vector<Annotation>& annotations,
                                   bool zero_fill = false);

// --- Who-metrics --------------------------------------------------------------

struct WhoMetrics {
  double pro_activity = 0;   // #(p_{t-1} not in r_t) / M
  double interactivity = 0;  // #(p_{t+1} in r_t) / M
  double specificity = 0;    // #(r_t subset of individual participants) / M
  int moderator_turn_count = 0;  // M (turns with at least one annotated sentence)
  int skipped_turns = 0;         // moderator turns with no annotated sentence
  // Per-episode values for downstream significance testing.
  std::vector<double> pro_activity_samples, interactivity_samples, specificity_samples;
};

// Episode-initial moderator turns count as pro-active, episode-final as
// non-interactive. Specificity requires every target in r_t to be an
// individual speaker label; group labels (self, everyone, audience, teams,
// all_speakers, unknown) break it.
WhoMetrics who_metrics(const Corpus& corpus, const std::vector<Annotation>& annotations);

// --- Source/corpus comparison ---------------------------------------------------

struct TableComparison {
  std::array<std::array<WelchResult, kDialogueActCount>, ConditionalTable::kMotives> cells;
  std::array<WelchResult, ConditionalTable::kMotives> p_motive;
  std::array<WelchResult, kDialogueActCount> p_act;
};

// Cell-wise Welch tests between the per-episode samples of two tables.
TableComparison compare_tables(const ConditionalTable& a, const ConditionalTable& b,
                               double alpha = 0.05);

struct SourceComparison {
  ConditionalTable table_a, table_b;
  TableComparison tests;
  std::vector<SentenceKey> only_in_a, only_in_b;  // coverage mismatches
};

// Builds one conditional table per annotation source over the same corpus
// and tests each cell across the shared episode sample.
SourceComparison compare_sources(const Corpus& corpus,
                                 const std::vector<Annotation>& annotations_a,
                                 const std::vector<Annotation>& annotations_b,
                                 bool zero_fill = false);

}  // namespace whow
