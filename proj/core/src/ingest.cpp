#include "whow/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "whow/segment.hpp"

namespace whow {

namespace {

using ordered_json = nlohmann::ordered_json;

int line_of_byte(const std::string& text, size_t byte) {
  size_t end = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + end, '\n'));
}

std::string slug(const std::string& name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c))
      out += static_cast<char>(std::tolower(c));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- whow_jsonl ------------------------------------------------------------

Episode parse_whow_jsonl(const std::string& text) {
  Episode ep;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  std::map<std::string, int> next_turn_index;  // just for error context

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IngestError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    try {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "episode") {
        if (saw_header) throw IngestError("duplicate episode header", lineno);
        saw_header = true;
        ep.id = j.at("id").get<std::string>();
        ep.domain = domain_from_string(j.at("domain").get<std::string>());
        ep.topic = j.value("topic", std::string{});
        ep.split = split_from_string(j.value("split", std::string{"unsplit"}));
        for (const auto& sj : j.at("speakers")) {
          Speaker s;
          s.id = sj.at("id").get<std::string>();
          s.display_name = sj.value("name", s.id);
          s.role = role_from_string(sj.at("role").get<std::string>());
          ep.speakers.push_back(std::move(s));
        }
      } else if (kind == "turn") {
        if (!saw_header) throw IngestError("turn record before episode header", lineno);
        Turn t;
        t.index = j.at("index").get<int>();
        t.speaker_id = j.at("speaker").get<std::string>();
        if (ep.find_speaker(t.speaker_id) == nullptr)
          throw IngestError("unknown speaker '" + t.speaker_id + "'", lineno);
        if (j.contains("sentences")) {
          int si = 0;
          for (const auto& sent : j.at("sentences"))
            t.sentences.push_back({si++, sent.get<std::string>()});
        } else {
          t.sentences = segment_text(j.at("text").get<std::string>());
        }
        if (t.sentences.empty())
          throw IngestError("turn " + std::to_string(t.index) + " has no sentences", lineno);
        next_turn_index[t.speaker_id]++;
        ep.turns.push_back(std::move(t));
      } else {
        throw IngestError("unknown record kind '" + kind + "'", lineno);
      }
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(std::string("bad record: ") + e.what(), lineno);
    } catch (const CorpusError& e) {
      throw IngestError(e.what(), lineno);
    }
  }
  if (!saw_header) throw IngestError("no episode header record found");
  return ep;
}

// --- insq_json ---------------------------------------------------------------

Role insq_role(std::string type) {
  std::transform(type.begin(), type.end(), type.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (type == "mod" || type == "moderator" || type == "host") return Role::moderator;
  if (type == "for") return Role::for_team;
  if (type == "against") return Role::against_team;
  if (type == "audience" || type == "question") return Role::audience_member;
  return Role::participant;
}

Episode parse_insq_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(std::string("invalid JSON: ") + e.what(), line_of_byte(text, e.byte));
  }
  Episode ep;
  ep.domain = Domain::debate;
  try {
    ep.topic = j.value("title", std::string{});
    ep.id = j.value("id", slug(ep.topic));
    ep.split = split_from_string(j.value("split", std::string{"unsplit"}));
    std::map<std::string, Role> roles;  // id -> role, declaration order via speakers vec
    for (const auto& entry : j.at("transcript")) {
      const std::string name = entry.at("speaker").get<std::string>();
      const std::string id = slug(name);
      const Role role = insq_role(entry.value("speakertype", std::string{}));
      if (roles.emplace(id, role).second)
        ep.speakers.push_back({id, name, role});
      Turn t;
      t.index = static_cast<int>(ep.turns.size());
      t.speaker_id = id;
      for (const auto& para : entry.at("paragraphs")) {
        for (auto& s : segment_text(para.get<std::string>())) {
          s.index = static_cast<int>(t.sentences.size());
          t.sentences.push_back(std::move(s));
        }
      }
      if (t.sentences.empty())
        throw IngestError("transcript entry " + std::to_string(t.index) + " has no text");
      ep.turns.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("bad insq record: ") + e.what());
  }
  if (ep.id.empty()) throw IngestError("insq episode has neither id nor title");
  return ep;
}

// --- npr_json ---------------------------------------------------------------

Episode parse_npr_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(std::string("invalid JSON: ") + e.what(), line_of_byte(text, e.byte));
  }
  Episode ep;
  ep.domain = Domain::panel;
  try {
    ep.topic = j.value("title", std::string{});
    ep.id = j.value("id", slug(ep.topic));
    ep.split = split_from_string(j.value("split", std::string{"unsplit"}));
    std::map<std::string, bool> seen;
    for (const auto& utt : j.at("utterances")) {
      const std::string name = utt.at("speaker").get<std::string>();
      const std::string id = slug(name);
      const std::string role = utt.value("role", std::string{"guest"});
      if (seen.emplace(id, true).second)
        ep.speakers.push_back(
            {id, name, role == "host" ? Role::moderator : Role::participant});
      Turn t;
      t.index = static_cast<int>(ep.turns.size());
      t.speaker_id = id;
      t.sentences = segment_text(utt.at("text").get<std::string>());
      if (t.sentences.empty())
        throw IngestError("utterance " + std::to_string(t.index) + " has no text");
      ep.turns.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("bad npr record: ") + e.what());
  }
  if (ep.id.empty()) throw IngestError("npr episode has neither id nor title");
  return ep;
}

}  // namespace

SourceFormat format_from_string(const std::string& s) {
  if (s == "whow" || s == "whow_jsonl" || s == "jsonl") return SourceFormat::whow_jsonl;
  if (s == "insq" || s == "insq_json") return SourceFormat::insq_json;
  if (s == "npr" || s == "npr_json") return SourceFormat::npr_json;
  throw IngestError("unknown source format '" + s + "'");
}

const char* to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::whow_jsonl: return "whow_jsonl";
    case SourceFormat::insq_json: return "insq_json";
    case SourceFormat::npr_json: return "npr_json";
  }
  return "whow_jsonl";
}

Episode ingest_transcript(std::istream& in, SourceFormat format) {
  const std::string text = read_all(in);
  Episode ep;
  switch (format) {
    case SourceFormat::whow_jsonl: ep = parse_whow_jsonl(text); break;
    case SourceFormat::insq_json: ep = parse_insq_json(text); break;
    case SourceFormat::npr_json: ep = parse_npr_json(text); break;
  }
  ep = merge_consecutive_turns(std::move(ep));
  try {
    require_valid(ep);
  } catch (const CorpusError& e) {
    throw IngestError(e.what());
  }
  return ep;
}

Episode ingest_file(const std::filesystem::path& path, SourceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  try {
    return ingest_transcript(in, format);
  } catch (const IngestError& e) {
    throw IngestError(path.string() + (e.line > 0 ? ":" + std::to_string(e.line) : "") +
                          ": " + e.what(),
                      e.line);
  }
}

void write_whow_jsonl(const Episode& ep, std::ostream& out) {
  ordered_json header;
  header["kind"] = "episode";
  header["id"] = ep.id;
  header["domain"] = to_string(ep.domain);
  header["topic"] = ep.topic;
  header["split"] = to_string(ep.split);
  auto speakers = ordered_json::array();
  for (const auto& s : ep.speakers) {
    ordered_json sj;
    sj["id"] = s.id;
    sj["name"] = s.display_name;
    sj["role"] = to_string(s.role);
    speakers.push_back(std::move(sj));
  }
  header["speakers"] = std::move(speakers);
  out << header.dump() << '\n';
  for (const auto& t : ep.turns) {
    ordered_json tj;
    tj["kind"] = "turn";
    tj["index"] = t.index;
    tj["speaker"] = t.speaker_id;
    auto sentences = ordered_json::array();
    for (const auto& s : t.sentences) sentences.push_back(s.text);
    tj["sentences"] = std::move(sentences);
    out << tj.dump() << '\n';
  }
}

std::string to_whow_jsonl(const Episode& ep) {
  std::ostringstream out;
  write_whow_jsonl(ep, out);
  return out.str();
}

Corpus load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IngestError("corpus directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  Corpus corpus;
  corpus.name = dir.filename().string();
  for (const auto& f : files)
    corpus.episodes.push_back(ingest_file(f, SourceFormat::whow_jsonl));
  std::sort(corpus.episodes.begin(), corpus.episodes.end(),
            [](const Episode& a, const Episode& b) { return a.id < b.id; });
  for (size_t i = 1; i < corpus.episodes.size(); ++i)
    if (corpus.episodes[i].id == corpus.episodes[i - 1].id)
      throw IngestError("duplicate episode id '" + corpus.episodes[i].id + "' in " +
                        dir.string());
  return corpus;
}

}  // namespace whow
