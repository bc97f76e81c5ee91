#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "whow/llm.hpp"

namespace whow {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// First parseable brace-balanced JSON object in the text (models wrap
// answers in prose or markdown fences).
std::optional<ordered_json> extract_json(const std::string& raw) {
  for (size_t start = raw.find('{'); start != std::string::npos;
       start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          try {
            return ordered_json::parse(raw.substr(start, i - start + 1));
          } catch (const nlohmann::json::parse_error&) {
            break;  // try the next opening brace
          }
        }
      }
    }
  }
  return std::nullopt;
}

const ordered_json* find_key(const ordered_json& j,
                             std::initializer_list<const char*> names) {
  for (const char* name : names)
    if (j.contains(name)) return &j.at(name);
  return nullptr;
}

ParseResult fail(ParseErrorKind kind, std::string message, const std::string& raw) {
  ParseResult r;
  r.error = ParseError{kind, std::move(message), raw};
  return r;
}

std::optional<bool> parse_motive_name(const std::string& name, Dimension dim) {
  std::string v = name;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const bool im = v.find("informational") != std::string::npos || v == "im";
  const bool cm = v.find("coordinat") != std::string::npos || v == "cm";
  const bool sm = v.find("social") != std::string::npos || v == "sm";
  if (!im && !cm && !sm) return std::nullopt;
  switch (dim) {
    case Dimension::IM: return im;
    case Dimension::CM: return cm;
    case Dimension::SM: return sm;
    default: return std::nullopt;
  }
}

std::optional<TargetLabel> parse_target_value(const ordered_json& value,
                                              const Episode& ep) {
  const auto vocab = target_vocabulary(ep);
  auto by_ordinal = [&](long long n) -> std::optional<TargetLabel> {
    if (n < 0 || n >= static_cast<long long>(vocab.size())) return std::nullopt;
    return vocab[static_cast<size_t>(n)];
  };
  if (value.is_number_integer()) return by_ordinal(value.get<long long>());
  if (!value.is_string()) return std::nullopt;

  std::string s = trim(value.get<std::string>());
  if (s.empty()) return std::nullopt;
  if (std::all_of(s.begin(), s.end(),
                  [](unsigned char c) { return std::isdigit(c) != 0; }))
    return by_ordinal(std::stoll(s));

  // "7 (Jacob Weisberg- against)": prefer the name, fall back to the ordinal.
  if (std::isdigit(static_cast<unsigned char>(s.front())) && s.back() == ')') {
    size_t open = s.find('(');
    if (open != std::string::npos) {
      const std::string ordinal = trim(s.substr(0, open));
      const std::string inner = trim(s.substr(open + 1, s.size() - open - 2));
      if (auto t = canonicalize_target(inner, &ep)) return t;
      if (std::all_of(ordinal.begin(), ordinal.end(),
                      [](unsigned char c) { return std::isdigit(c) != 0; }) &&
          !ordinal.empty())
        return by_ordinal(std::stoll(ordinal));
      return std::nullopt;
    }
  }
  return canonicalize_target(s, &ep);
}

void read_reason(const ordered_json& j, AnnotationFragment& frag) {
  const ordered_json* reason = find_key(j, {"reason", "rationale"});
  if (reason != nullptr && reason->is_string()) frag.rationale = reason->get<std::string>();
}

ParseResult parse_multi(const ordered_json& j, const Episode& ep, const std::string& raw) {
  AnnotationFragment frag;
  const ordered_json* motives = find_key(j, {"motives", "motive"});
  if (motives == nullptr)
    return fail(ParseErrorKind::missing_field, "no \"motives\" field", raw);
  MotiveSet set;
  if (!motives->is_null()) {
    std::vector<std::string> names;
    if (motives->is_string()) {
      if (!trim(motives->get<std::string>()).empty() &&
          trim(motives->get<std::string>()) != "None")
        names.push_back(motives->get<std::string>());
    } else if (motives->is_array()) {
      for (const auto& entry : *motives) {
        if (!entry.is_string())
          return fail(ParseErrorKind::bad_motive, "motive entry is not a string", raw);
        names.push_back(entry.get<std::string>());
      }
    } else {
      return fail(ParseErrorKind::bad_motive, "\"motives\" is not a list", raw);
    }
    for (const auto& name : names) {
      if (parse_motive_name(name, Dimension::IM).value_or(false))
        set.informational = true;
      else if (parse_motive_name(name, Dimension::CM).value_or(false))
        set.coordinative = true;
      else if (parse_motive_name(name, Dimension::SM).value_or(false))
        set.social = true;
      else
        return fail(ParseErrorKind::bad_motive, "unknown motive '" + name + "'", raw);
    }
  }
  frag.motives = set;

  const ordered_json* act = find_key(j, {"dialogue act", "dialogue_act", "act"});
  if (act == nullptr)
    return fail(ParseErrorKind::missing_field, "no \"dialogue act\" field", raw);
  if (!act->is_string())
    return fail(ParseErrorKind::bad_act, "\"dialogue act\" is not a string", raw);
  auto parsed_act = act_from_string(act->get<std::string>());
  if (!parsed_act)
    return fail(ParseErrorKind::bad_act,
                "unknown dialogue act '" + act->get<std::string>() + "'", raw);
  frag.act = *parsed_act;

  const ordered_json* target = find_key(
      j, {"target speaker(s)", "target speaker", "target_speaker(s)",
          "target_speaker", "target"});
  if (target == nullptr)
    return fail(ParseErrorKind::missing_field, "no \"target speaker(s)\" field", raw);
  auto parsed_target = parse_target_value(*target, ep);
  if (!parsed_target)
    return fail(ParseErrorKind::bad_target, "unresolvable target " + target->dump(), raw);
  frag.target = *parsed_target;

  read_reason(j, frag);
  ParseResult result;
  result.fragment = std::move(frag);
  return result;
}

ParseResult parse_single(const ordered_json& j, Dimension dim, const Episode& ep,
                         const std::string& raw) {
  AnnotationFragment frag;
  switch (dim) {
    case Dimension::IM:
    case Dimension::CM:
    case Dimension::SM: {
      const ordered_json* verdict = find_key(j, {"verdict"});
      if (verdict == nullptr)
        return fail(ParseErrorKind::missing_field, "no \"verdict\" field", raw);
      if (verdict->is_boolean())
        frag.verdict = verdict->get<bool>();
      else if (verdict->is_number_integer() &&
               (verdict->get<int>() == 0 || verdict->get<int>() == 1))
        frag.verdict = verdict->get<int>() == 1;
      else if (verdict->is_string() &&
               (verdict->get<std::string>() == "0" || verdict->get<std::string>() == "1"))
        frag.verdict = verdict->get<std::string>() == "1";
      else
        return fail(ParseErrorKind::bad_verdict, "verdict " + verdict->dump() +
                                                     " is not 0 or 1", raw);
      break;
    }
    case Dimension::DA: {
      const ordered_json* act = find_key(j, {"dialogue act", "dialogue_act", "act"});
      if (act == nullptr)
        return fail(ParseErrorKind::missing_field, "no \"dialogue act\" field", raw);
      if (!act->is_string())
        return fail(ParseErrorKind::bad_act, "\"dialogue act\" is not a string", raw);
      auto parsed = act_from_string(act->get<std::string>());
      if (!parsed)
        return fail(ParseErrorKind::bad_act,
                    "unknown dialogue act '" + act->get<std::string>() + "'", raw);
      frag.act = *parsed;
      break;
    }
    case Dimension::TS: {
      const ordered_json* target = find_key(
          j, {"target speaker(s)", "target speaker", "target_speaker(s)",
              "target_speaker", "target"});
      if (target == nullptr)
        return fail(ParseErrorKind::missing_field, "no \"target speaker(s)\" field", raw);
      auto parsed = parse_target_value(*target, ep);
      if (!parsed)
        return fail(ParseErrorKind::bad_target, "unresolvable target " + target->dump(),
                    raw);
      frag.target = *parsed;
      break;
    }
  }
  read_reason(j, frag);
  ParseResult result;
  result.fragment = std::move(frag);
  return result;
}

}  // namespace

ParseResult parse_response(const std::string& raw, PromptMode mode,
                           std::optional<Dimension> dimension, const Episode& ep) {
  auto j = extract_json(raw);
  if (!j) return fail(ParseErrorKind::no_json, "no JSON object in response", raw);
  if (mode == PromptMode::multi_task) return parse_multi(*j, ep, raw);
  if (!dimension.has_value())
    throw std::invalid_argument("single-task parse needs a dimension");
  return parse_single(*j, *dimension, ep, raw);
}

namespace {

std::string target_option_string(const TargetLabel& target, const Episode& ep) {
  const auto vocab = target_vocabulary(ep);
  auto it = std::find(vocab.begin(), vocab.end(), target);
  if (it == vocab.end())
    throw std::invalid_argument("target '" + target.canonical() +
                                "' is not in the episode vocabulary");
  const auto ordinal = std::distance(vocab.begin(), it);
  return std::to_string(ordinal) + " (" + target.display(ep) + ")";
}

}  // namespace

std::string render_multi_task_response(const MotiveSet& motives, DialogueAct act,
                                       const TargetLabel& target,
                                       const std::string& reason, const Episode& ep) {
  ordered_json j;
  auto list = ordered_json::array();
  if (motives.informational) list.push_back("informational motive");
  if (motives.social) list.push_back("social motive");
  if (motives.coordinative) list.push_back("coordinative motive");
  j["motives"] = std::move(list);
  j["dialogue act"] = act_display_name(act);
  j["target speaker(s)"] = target_option_string(target, ep);
  j["reason"] = reason;
  return j.dump();
}

std::string render_verdict_response(bool verdict, const std::string& reason) {
  ordered_json j;
  j["verdict"] = verdict ? 1 : 0;
  j["reason"] = reason;
  return j.dump();
}

std::string render_da_response(DialogueAct act, const std::string& reason) {
  ordered_json j;
  j["dialogue act"] = act_display_name(act);
  j["reason"] = reason;
  return j.dump();
}

std::string render_ts_response(const TargetLabel& target, const std::string& reason,
                               const Episode& ep) {
  ordered_json j;
  j["target speaker(s)"] = target_option_string(target, ep);
  j["reason"] = reason;
  return j.dump();
}

}  // namespace whow
