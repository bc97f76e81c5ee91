#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "whow/schema.hpp"

namespace whow {

enum class TiebreakKind {
  priority_order,  // motives: positive over negative; acts: prob>conf>inst>inte>supp>util; targets: vocabulary order
  flag_only,       // same deterministic fallback, but callers are expected to filter on tie_flags
  external_file    // consult user-supplied resolutions first, fall back to priority order
};

struct ExternalResolution {
  std::optional<bool> im, cm, sm;
  std::optional<DialogueAct> act;
  std::optional<TargetLabel> target;
};

struct TiebreakPolicy {
  TiebreakKind kind = TiebreakKind::priority_order;
  // Target priority (vocabulary order); required to break target ties.
  std::vector<TargetLabel> target_order;
  std::map<SentenceKey, ExternalResolution> external;

  static TiebreakPolicy priority_for(const Episode& ep);
};

// Which dimensions had a top-2 vote tie.
using TieFlags = std::set<Dimension>;

struct VoteDetail {
  // Counts keyed by canonical label string ("true"/"false" for motives).
  std::map<std::string, int> da, im, cm, sm, ts;
};

struct AggregatedAnnotation {
  SentenceKey key;
  MotiveSet motives;
  DialogueAct act = DialogueAct::util;
  TargetLabel target;
  TieFlags tie_flags;
  VoteDetail vote_detail;
};

// Majority vote over annotations that all share one key; each dimension is
// decided independently. Throws std::invalid_argument on empty input or
// mixed keys.
AggregatedAnnotation majority_vote(const std::vector<Annotation>& annotations,
                                   const TiebreakPolicy& policy);

// Groups by key and majority-votes each group; keys ordered ascending.
std::vector<AggregatedAnnotation> aggregate_corpus(
    const std::vector<Annotation>& annotations, const Corpus& corpus,
    TiebreakKind kind = TiebreakKind::priority_order,
    const std::map<SentenceKey, ExternalResolution>* external = nullptr);

Annotation to_annotation(const AggregatedAnnotation& agg,
                         const std::string& annotator = "consensus");

// --- Krippendorff's alpha -------------------------------------------------

struct DegenerateAgreement : std::runtime_error {
  DegenerateAgreement() : std::runtime_error("degenerate: agreement undefined") {}
};

enum class AlphaLevel { nominal, binary };

// Unit-by-annotator label assignments with missing cells; values are
// arbitrary integer codes. Units with fewer than two present values are
// ignored. Computed from the coincidence matrix with the nominal metric
// (binary data is 2-value nominal). Throws DegenerateAgreement when every
// pairable value in the corpus is identical (expected disagreement zero).
double krippendorff_alpha(const std::vector<std::vector<std::optional<int>>>& units,
                          AlphaLevel level = AlphaLevel::nominal);

struct AlphaReport {
  std::map<Dimension, std::optional<double>> alpha;  // nullopt = degenerate
  int unit_count = 0;
  int annotator_count = 0;
};

// Builds the unit x annotator matrix per dimension from raw annotations
// (units are moderator sentence keys; annotators are annotator ids) and
// computes alpha for each requested dimension.
AlphaReport agreement_report(const std::vector<Annotation>& annotations,
                             const std::vector<Dimension>& dims);

// --- Vote co-occurrence ---------------------------------------------------

struct CooccurrenceMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> counts;  // symmetric

  std::vector<std::vector<double>> row_normalized() const;
};

// For every unit, each unordered annotator pair contributes one count to the
// cell of its label pair (mirrored off the diagonal).
CooccurrenceMatrix vote_cooccurrence(const std::vector<Annotation>& annotations,
                                     Dimension dimension);

}  // namespace whow
