#include "whow/corpus.hpp"

#include <set>
#include <sstream>
#include <utility>

namespace whow {

const char* to_string(Role r) {
  switch (r) {
    case Role::moderator: return "moderator";
    case Role::for_team: return "for_team";
    case Role::against_team: return "against_team";
    case Role::participant: return "participant";
    case Role::audience_member: return "audience_member";
  }
  return "participant";
}

const char* to_string(Domain d) {
  switch (d) {
    case Domain::debate: return "debate";
    case Domain::panel: return "panel";
    case Domain::generic: return "generic";
  }
  return "generic";
}

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    case Split::unsplit: return "unsplit";
  }
  return "unsplit";
}

Role role_from_string(const std::string& s) {
  if (s == "moderator") return Role::moderator;
  if (s == "for_team") return Role::for_team;
  if (s == "against_team") return Role::against_team;
  if (s == "participant") return Role::participant;
  if (s == "audience_member") return Role::audience_member;
  throw CorpusError("unknown speaker role '" + s + "'");
}

Domain domain_from_string(const std::string& s) {
  if (s == "debate") return Domain::debate;
  if (s == "panel") return Domain::panel;
  if (s == "generic") return Domain::generic;
  throw CorpusError("unknown domain '" + s + "'");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  if (s == "unsplit") return Split::unsplit;
  throw CorpusError("unknown split '" + s + "'");
}

std::string Turn::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

const Speaker* Episode::find_speaker(const std::string& speaker_id) const {
  for (const auto& s : speakers)
    if (s.id == speaker_id) return &s;
  return nullptr;
}

const Speaker& Episode::moderator() const {
  for (const auto& s : speakers)
    if (s.role == Role::moderator) return s;
  throw CorpusError("episode '" + id + "' has no moderator");
}

bool Episode::is_moderator(const std::string& speaker_id) const {
  const Speaker* s = find_speaker(speaker_id);
  return s != nullptr && s->role == Role::moderator;
}

const Episode* Corpus::find_episode(const std::string& id) const {
  for (const auto& ep : episodes)
    if (ep.id == id) return &ep;
  return nullptr;
}

std::vector<std::string> validate_episode(const Episode& ep) {
  std::vector<std::string> problems;
  auto complain = [&](std::string msg) { problems.push_back(std::move(msg)); };

  if (ep.id.empty()) complain("episode id is empty");

  std::set<std::string> ids;
  int moderators = 0;
  for (const auto& s : ep.speakers) {
    if (s.id.empty()) complain("speaker with empty id");
    if (!ids.insert(s.id).second) complain("duplicate speaker id '" + s.id + "'");
    if (s.role == Role::moderator) ++moderators;
  }
  if (moderators != 1)
    complain("expected exactly one moderator, found " + std::to_string(moderators));

  const std::string* prev_speaker = nullptr;
  for (size_t i = 0; i < ep.turns.size(); ++i) {
    const Turn& t = ep.turns[i];
    std::string where = "turn " + std::to_string(t.index);
    if (t.index != static_cast<int>(i))
      complain(where + ": index out of order (expected " + std::to_string(i) + ")");
    if (ids.find(t.speaker_id) == ids.end())
      complain(where + ": unknown speaker '" + t.speaker_id + "'");
    if (t.sentences.empty()) complain(where + ": no sentences");
    for (size_t j = 0; j < t.sentences.size(); ++j) {
      if (t.sentences[j].index != static_cast<int>(j))
        complain(where + ": sentence indices not contiguous");
      if (t.sentences[j].text.empty())
        complain(where + ": empty sentence " + std::to_string(j));
    }
    if (prev_speaker != nullptr && *prev_speaker == t.speaker_id)
      complain(where + ": consecutive turns by '" + t.speaker_id + "' (not merged)");
    prev_speaker = &t.speaker_id;
  }
  return problems;
}

void require_valid(const Episode& ep) {
  auto problems = validate_episode(ep);
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "episode '" << ep.id << "' is invalid:";
  for (const auto& p : problems) msg << "\n  - " << p;
  throw CorpusError(msg.str());
}

Episode merge_consecutive_turns(Episode ep) {
  std::vector<Turn> merged;
  for (auto& t : ep.turns) {
    if (!merged.empty() && merged.back().speaker_id == t.speaker_id) {
      auto& dst = merged.back().sentences;
      dst.insert(dst.end(), std::make_move_iterator(t.sentences.begin()),
                 std::make_move_iterator(t.sentences.end()));
    } else {
      merged.push_back(std::move(t));
    }
  }
  for (size_t i = 0; i < merged.size(); ++i) {
    merged[i].index = static_cast<int>(i);
    for (size_t j = 0; j < merged[i].sentences.size(); ++j)
      merged[i].sentences[j].index = static_cast<int>(j);
  }
  ep.turns = std::move(merged);
  return ep;
}

std::vector<const Turn*> moderator_turns(const Episode& ep) {
  std::vector<const Turn*> out;
  for (const auto& t : ep.turns)
    if (ep.is_moderator(t.speaker_id)) out.push_back(&t);
  return out;
}

int count_moderator_sentences(const Episode& ep) {
  int n = 0;
  for (const Turn* t : moderator_turns(ep)) n += static_cast<int>(t->sentences.size());
  return n;
}

}  // namespace whow
