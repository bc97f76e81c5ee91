#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace whow {

enum class Role { moderator, for_team, against_team, participant, audience_member };
enum class Domain { debate, panel, generic };
enum class Split { train, dev, test, unsplit };

const char* to_string(Role r);
const char* to_string(Domain d);
const char* to_string(Split s);
Role role_from_string(const std::string& s);
Domain domain_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct Speaker {
  std::string id;
  std::string display_name;
  Role role = Role::participant;

  bool operator==(const Speaker&) const = default;
};

struct Sentence {
  int index = 0;  // 0-based within the turn
  std::string text;

  bool operator==(const Sentence&) const = default;
};

struct Turn {
  int index = 0;  // 0-based within the episode
  std::string speaker_id;
  std::vector<Sentence> sentences;

  std::string text() const;  // sentences joined with single spaces

  bool operator==(const Turn&) const = default;
};

struct Episode {
  std::string id;
  Domain domain = Domain::generic;
  std::string topic;
  Split split = Split::unsplit;
  std::vector<Speaker> speakers;
  std::vector<Turn> turns;

  const Speaker* find_speaker(const std::string& id) const;
  const Speaker& moderator() const;
  bool is_moderator(const std::string& speaker_id) const;

  bool operator==(const Episode&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<Episode> episodes;

  const Episode* find_episode(const std::string& id) const;
};

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checks the Episode invariants: exactly one moderator, unique speaker ids,
// known speaker references, non-empty merged turns with contiguous indices.
// Returns human-readable violations; empty means valid.
std::vector<std::string> validate_episode(const Episode& ep);

// Throws CorpusError listing every violation.
void require_valid(const Episode& ep);

// Collapses consecutive turns by the same speaker into one turn (sentences
// concatenated in order) and renumbers turn and sentence indices. Idempotent.
Episode merge_consecutive_turns(Episode ep);

// Turns whose speaker has the moderator role, in episode order.
std::vector<const Turn*> moderator_turns(const Episode& ep);

int count_moderator_sentences(const Episode& ep);

}  // namespace whow
