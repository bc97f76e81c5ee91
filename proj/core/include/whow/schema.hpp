#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "whow/corpus.hpp"

namespace whow {

// Multi-label motive flags; the all-false combination is legal.
struct MotiveSet {
  bool informational = false;  // IM
  bool coordinative = false;   // CM
  bool social = false;         // SM

  bool operator==(const MotiveSet&) const = default;
};

enum class DialogueAct { prob, conf, inst, inte, supp, util };
inline constexpr int kDialogueActCount = 6;

// Short codes used in the annotation file format ("prob", "conf", ...).
const char* to_string(DialogueAct a);
// Display names used in prompts and model output ("Probing", "All Utility", ...).
const char* act_display_name(DialogueAct a);
std::optional<DialogueAct> act_from_string(const std::string& s);

// Dimensions of the framework, used by aggregation/evaluation/reporting.
enum class Dimension { DA, IM, CM, SM, TS };
inline constexpr Dimension kAllDimensions[] = {Dimension::DA, Dimension::IM,
                                               Dimension::CM, Dimension::SM,
                                               Dimension::TS};
const char* to_string(Dimension d);
std::optional<Dimension> dimension_from_string(const std::string& s);

enum class TargetKind {
  speaker,
  unknown,
  self,
  everyone,
  audience,
  support_team,
  against_team,
  all_speakers
};

struct TargetLabel {
  TargetKind kind = TargetKind::unknown;
  std::string speaker_id;  // set iff kind == speaker

  static TargetLabel Speaker(std::string id) {
    return {TargetKind::speaker, std::move(id)};
  }
  static TargetLabel Group(TargetKind k) { return {k, {}}; }

  // File-format canonical form: group kinds by name ("unknown", "self",
  // "everyone", "audience", "support_team", "against_team", "all_speakers"),
  // speaker targets as the bare speaker id.
  std::string canonical() const;

  // Display form for prompts: "Unknown", "Support team", or the speaker's
  // display name (with a "- for"/"- against" suffix in debate episodes).
  std::string display(const Episode& ep) const;

  bool operator==(const TargetLabel&) const = default;
  auto operator<=>(const TargetLabel&) const = default;
};

// Maps a raw label string to a TargetLabel. Accepts canonical names, the
// paper-style variants ("Support team", "support side", "Against team",
// "against side", "All speakers", ...) and otherwise treats the string as a
// speaker id/display name resolved against the episode when given.
std::optional<TargetLabel> canonicalize_target(const std::string& raw,
                                               const Episode* ep = nullptr);

struct SentenceKey {
  std::string episode_id;
  int turn_index = 0;
  int sentence_index = 0;

  bool operator==(const SentenceKey&) const = default;
  auto operator<=>(const SentenceKey&) const = default;
};

std::string to_string(const SentenceKey& k);

struct Annotation {
  SentenceKey key;
  std::string annotator;  // "human:<id>", "model:<name>:<mode>" or "consensus"
  MotiveSet motives;
  DialogueAct act = DialogueAct::util;
  TargetLabel target;
  std::optional<std::string> rationale;

  bool operator==(const Annotation&) const = default;
};

// Legal target labels for this episode, in deterministic order: unknown,
// self, everyone, then (debate only) audience, support_team, against_team,
// then one speaker label per named non-moderator speaker in declaration
// order, then all_speakers.
std::vector<TargetLabel> target_vocabulary(const Episode& ep);

// Checks that the key resolves to a moderator sentence of `ep` and that the
// target is in the episode's vocabulary. Returns violations; never throws.
std::vector<std::string> validate_annotation(const Annotation& a, const Episode& ep);

// Annotation line format:
// {"episode":...,"turn":...,"sentence":...,"annotator":...,
//  "motives":{"IM":...,"CM":...,"SM":...},"act":"prob|conf|inst|inte|supp|util",
//  "target":<canonical label>,"rationale":<string or null>}
std::string to_annotation_json(const Annotation& a);
Annotation annotation_from_json(const std::string& line);

void write_annotations_jsonl(const std::vector<Annotation>& anns, std::ostream& out);
std::vector<Annotation> read_annotations_jsonl(std::istream& in);
std::vector<Annotation> read_annotations_file(const std::filesystem::path& path);

}  // namespace whow
