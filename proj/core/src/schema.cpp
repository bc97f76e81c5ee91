#include "whow/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace whow {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

const char* to_string(DialogueAct a) {
  switch (a) {
    case DialogueAct::prob: return "prob";
    case DialogueAct::conf: return "conf";
    case DialogueAct::inst: return "inst";
    case DialogueAct::inte: return "inte";
    case DialogueAct::supp: return "supp";
    case DialogueAct::util: return "util";
  }
  return "util";
}

const char* act_display_name(DialogueAct a) {
  switch (a) {
    case DialogueAct::prob: return "Probing";
    case DialogueAct::conf: return "Confronting";
    case DialogueAct::inst: return "Instruction";
    case DialogueAct::inte: return "Interpretation";
    case DialogueAct::supp: return "Supplement";
    case DialogueAct::util: return "All Utility";
  }
  return "All Utility";
}

std::optional<DialogueAct> act_from_string(const std::string& s) {
  std::string v = lower(s);
  if (v == "prob" || v == "probing") return DialogueAct::prob;
  if (v == "conf" || v == "confronting") return DialogueAct::conf;
  if (v == "inst" || v == "instruction") return DialogueAct::inst;
  if (v == "inte" || v == "interpretation") return DialogueAct::inte;
  if (v == "supp" || v == "supplement") return DialogueAct::supp;
  if (v == "util" || v == "all utility" || v == "utility") return DialogueAct::util;
  return std::nullopt;
}

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::DA: return "DA";
    case Dimension::IM: return "IM";
    case Dimension::CM: return "CM";
    case Dimension::SM: return "SM";
    case Dimension::TS: return "TS";
  }
  return "DA";
}

std::optional<Dimension> dimension_from_string(const std::string& s) {
  std::string v = lower(s);
  if (v == "da") return Dimension::DA;
  if (v == "im") return Dimension::IM;
  if (v == "cm") return Dimension::CM;
  if (v == "sm") return Dimension::SM;
  if (v == "ts") return Dimension::TS;
  return std::nullopt;
}

namespace {

const char* group_canonical(TargetKind k) {
  switch (k) {
    case TargetKind::unknown: return "unknown";
    case TargetKind::self: return "self";
    case TargetKind::everyone: return "everyone";
    case TargetKind::audience: return "audience";
    case TargetKind::support_team: return "support_team";
    case TargetKind::against_team: return "against_team";
    case TargetKind::all_speakers: return "all_speakers";
    case TargetKind::speaker: break;
  }
  return "";
}

const char* group_display(TargetKind k) {
  switch (k) {
    case TargetKind::unknown: return "Unknown";
    case TargetKind::self: return "Self";
    case TargetKind::everyone: return "Everyone";
    case TargetKind::audience: return "Audience";
    case TargetKind::support_team: return "Support team";
    case TargetKind::against_team: return "Against team";
    case TargetKind::all_speakers: return "All speakers";
    case TargetKind::speaker: break;
  }
  return "";
}

}  // namespace

std::string TargetLabel::canonical() const {
  if (kind == TargetKind::speaker) return speaker_id;
  return group_canonical(kind);
}

std::string TargetLabel::display(const Episode& ep) const {
  if (kind != TargetKind::speaker) return group_display(kind);
  const struct Speaker* s = ep.find_speaker(speaker_id);
  if (s == nullptr) return speaker_id;
  std::string name = s->display_name.empty() ? s->id : s->display_name;
  if (ep.domain == Domain::debate) {
    if (s->role == Role::for_team) return name + "- for";
    if (s->role == Role::against_team) return name + "- against";
  }
  return name;
}

std::optional<TargetLabel> canonicalize_target(const std::string& raw, const Episode* ep) {
  std::string v = lower(raw);
  // Strip a debate-side suffix produced by display().
  for (const char* suffix : {"- for", "- against", " - for", " - against"}) {
    if (v.size() > std::string(suffix).size() && v.ends_with(suffix)) {
      v.erase(v.size() - std::string(suffix).size());
      while (!v.empty() && v.back() == ' ') v.pop_back();
      break;
    }
  }
  static const std::map<std::string, TargetKind> kGroups = {
      {"unknown", TargetKind::unknown},
      {"self", TargetKind::self},
      {"everyone", TargetKind::everyone},
      {"audience", TargetKind::audience},
      {"the audience", TargetKind::audience},
      {"support_team", TargetKind::support_team},
      {"support team", TargetKind::support_team},
      {"support side", TargetKind::support_team},
      {"for team", TargetKind::support_team},
      {"against_team", TargetKind::against_team},
      {"against team", TargetKind::against_team},
      {"against side", TargetKind::against_team},
      {"all_speakers", TargetKind::all_speakers},
      {"all speakers", TargetKind::all_speakers},
      {"everyone in the room", TargetKind::everyone},
  };
  if (auto it = kGroups.find(v); it != kGroups.end()) return TargetLabel::Group(it->second);
  if (ep != nullptr) {
    for (const auto& s : ep->speakers) {
      if (lower(s.id) == v || lower(s.display_name) == v)
        return TargetLabel::Speaker(s.id);
    }
    return std::nullopt;
  }
  if (raw.empty()) return std::nullopt;
  return TargetLabel::Speaker(raw);
}

std::string to_string(const SentenceKey& k) {
  return k.episode_id + ":" + std::to_string(k.turn_index) + ":" +
         std::to_string(k.sentence_index);
}

std::vector<TargetLabel> target_vocabulary(const Episode& ep) {
  std::vector<TargetLabel> vocab;
  vocab.push_back(TargetLabel::Group(TargetKind::unknown));
  vocab.push_back(TargetLabel::Group(TargetKind::self));
  vocab.push_back(TargetLabel::Group(TargetKind::everyone));
  if (ep.domain == Domain::debate) {
    vocab.push_back(TargetLabel::Group(TargetKind::audience));
    vocab.push_back(TargetLabel::Group(TargetKind::support_team));
    vocab.push_back(TargetLabel::Group(TargetKind::against_team));
  }
  for (const auto& s : ep.speakers) {
    if (s.role == Role::moderator) continue;
    vocab.push_back(TargetLabel::Speaker(s.id));
  }
  vocab.push_back(TargetLabel::Group(TargetKind::all_speakers));
  return vocab;
}

std::vector<std::string> validate_annotation(const Annotation& a, const Episode& ep) {
  std::vector<std::string> problems;
  std::string where = to_string(a.key);
  if (a.key.episode_id != ep.id) {
    problems.push_back(where + ": episode mismatch (expected '" + ep.id + "')");
    return problems;
  }
  if (a.key.turn_index < 0 || a.key.turn_index >= static_cast<int>(ep.turns.size())) {
    problems.push_back(where + ": turn index out of range");
    return problems;
  }
  const Turn& turn = ep.turns[a.key.turn_index];
  if (!ep.is_moderator(turn.speaker_id))
    problems.push_back(where + ": turn is not a moderator turn");
  if (a.key.sentence_index < 0 ||
      a.key.sentence_index >= static_cast<int>(turn.sentences.size()))
    problems.push_back(where + ": sentence index out of range");
  if (a.annotator.empty()) problems.push_back(where + ": empty annotator");
  auto vocab = target_vocabulary(ep);
  if (std::find(vocab.begin(), vocab.end(), a.target) == vocab.end())
    problems.push_back(where + ": target '" + a.target.canonical() +
                       "' not in episode vocabulary");
  return problems;
}

std::string to_annotation_json(const Annotation& a) {
  ordered_json j;
  j["episode"] = a.key.episode_id;
  j["turn"] = a.key.turn_index;
  j["sentence"] = a.key.sentence_index;
  j["annotator"] = a.annotator;
  j["motives"] = ordered_json{{"IM", a.motives.informational},
                              {"CM", a.motives.coordinative},
                              {"SM", a.motives.social}};
  j["act"] = to_string(a.act);
  j["target"] = a.target.canonical();
  if (a.rationale)
    j["rationale"] = *a.rationale;
  else
    j["rationale"] = nullptr;
  return j.dump();
}

Annotation annotation_from_json(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("annotation line is not JSON: ") + e.what());
  }
  Annotation a;
  try {
    a.key.episode_id = j.at("episode").get<std::string>();
    a.key.turn_index = j.at("turn").get<int>();
    a.key.sentence_index = j.at("sentence").get<int>();
    a.annotator = j.at("annotator").get<std::string>();
    const auto& m = j.at("motives");
    a.motives.informational = m.at("IM").get<bool>();
    a.motives.coordinative = m.at("CM").get<bool>();
    a.motives.social = m.at("SM").get<bool>();
    auto act = act_from_string(j.at("act").get<std::string>());
    if (!act) throw std::runtime_error("unknown act '" + j.at("act").get<std::string>() + "'");
    a.act = *act;
    auto target = canonicalize_target(j.at("target").get<std::string>());
    if (!target) throw std::runtime_error("empty target label");
    a.target = *target;
    if (j.contains("rationale") && !j.at("rationale").is_null())
      a.rationale = j.at("rationale").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad annotation line: ") + e.what());
  }
  return a;
}

void write_annotations_jsonl(const std::vector<Annotation>& anns, std::ostream& out) {
  for (const auto& a : anns) out << to_annotation_json(a) << '\n';
}

std::vector<Annotation> read_annotations_jsonl(std::istream& in) {
  std::vector<Annotation> anns;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      anns.push_back(annotation_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return anns;
}

std::vector<Annotation> read_annotations_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotations file " + path.string());
  try {
    return read_annotations_jsonl(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace whow
