#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "whow/llm.hpp"

namespace whow {

const char* to_string(PromptMode m) {
  return m == PromptMode::multi_task ? "multi_task" : "single_task";
}

namespace {

std::string replace_all(std::string text, const std::string& what, const std::string& with) {
  size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
  return text;
}

const char* role_tag(Role r) {
  switch (r) {
    case Role::moderator: return "mod";
    case Role::for_team: return "for";
    case Role::against_team: return "against";
    case Role::audience_member: return "audience";
    case Role::participant: return nullptr;
  }
  return nullptr;
}

std::string speaker_line(const Episode& ep, const std::string& speaker_id,
                         const std::string& text) {
  const Speaker* s = ep.find_speaker(speaker_id);
  std::string name = s != nullptr && !s->display_name.empty() ? s->display_name
                                                              : speaker_id;
  const char* tag = s != nullptr ? role_tag(s->role) : nullptr;
  if (tag != nullptr) name += " (" + std::string(tag) + ")";
  return name + ": " + text;
}

std::string render_turns(const Episode& ep, int first, int last_exclusive) {
  std::string out;
  for (int i = std::max(first, 0);
       i < std::min<int>(last_exclusive, static_cast<int>(ep.turns.size())); ++i) {
    if (!out.empty()) out += "\n\n";
    out += speaker_line(ep, ep.turns[i].speaker_id, ep.turns[i].text());
  }
  return out;
}

const std::string& scenario_template(const PromptTemplates& t, Domain d) {
  switch (d) {
    case Domain::debate: return t.scenario_debate;
    case Domain::panel: return t.scenario_panel;
    case Domain::generic: return t.scenario_generic;
  }
  return t.scenario_generic;
}

}  // namespace

std::vector<std::string> target_options(const Episode& ep) {
  std::vector<std::string> options;
  const auto vocab = target_vocabulary(ep);
  options.reserve(vocab.size());
  for (size_t i = 0; i < vocab.size(); ++i)
    options.push_back(std::to_string(i) + " (" + vocab[i].display(ep) + ")");
  return options;
}

std::string build_prompt(const Episode& ep, const SentenceKey& key,
                         const PromptSpec& spec) {
  if (key.episode_id != ep.id)
    throw std::invalid_argument("prompt key " + to_string(key) +
                                " does not belong to episode '" + ep.id + "'");
  if (key.turn_index < 0 || key.turn_index >= static_cast<int>(ep.turns.size()))
    throw std::invalid_argument("prompt key " + to_string(key) + ": no such turn");
  const Turn& turn = ep.turns[key.turn_index];
  if (!ep.is_moderator(turn.speaker_id))
    throw std::invalid_argument("prompt key " + to_string(key) +
                                ": not a moderator turn");
  if (key.sentence_index < 0 ||
      key.sentence_index >= static_cast<int>(turn.sentences.size()))
    throw std::invalid_argument("prompt key " + to_string(key) + ": no such sentence");
  if (spec.mode == PromptMode::single_task && !spec.dimension.has_value())
    throw std::invalid_argument("single-task prompt needs a dimension");

  const PromptTemplates& t = spec.templates;
  std::vector<std::string> blocks;
  blocks.push_back(replace_all(scenario_template(t, ep.domain), "{topic}", ep.topic));

  if (spec.mode == PromptMode::multi_task) {
    blocks.push_back(t.task_multi);
    blocks.push_back(t.motives_section);
    blocks.push_back(t.acts_section);
    blocks.push_back(t.target_section);
  } else {
    const Dimension dim = *spec.dimension;
    blocks.push_back(t.task_single.at(dim));
    switch (dim) {
      case Dimension::IM:
      case Dimension::CM:
      case Dimension::SM:
        blocks.push_back(t.motive_single.at(dim));
        break;
      case Dimension::DA:
        blocks.push_back(t.acts_section);
        break;
      case Dimension::TS:
        blocks.push_back(t.target_section);
        break;
    }
  }

  const std::string before =
      render_turns(ep, key.turn_index - spec.context_before, key.turn_index);
  if (!before.empty())
    blocks.push_back("Dialogue context before the target sentence:\n\n" + before);

  blocks.push_back("Target sentence:\n\n" +
                   speaker_line(ep, turn.speaker_id,
                                turn.sentences[key.sentence_index].text));

  const std::string after =
      render_turns(ep, key.turn_index + 1, key.turn_index + 1 + spec.context_after);
  if (!after.empty())
    blocks.push_back("Dialogue context after the target sentence:\n\n" + after);

  std::string format;
  if (spec.mode == PromptMode::multi_task) {
    format = t.format_multi;
  } else {
    switch (*spec.dimension) {
      case Dimension::IM:
      case Dimension::CM:
      case Dimension::SM:
        format = t.format_verdict;
        break;
      case Dimension::DA:
        format = t.format_da;
        break;
      case Dimension::TS:
        format = t.format_ts;
        break;
    }
  }
  if (format.find("{target_options}") != std::string::npos) {
    std::string joined;
    for (const auto& opt : target_options(ep)) {
      if (!joined.empty()) joined += ", ";
      joined += "\"" + opt + "\"";
    }
    format = replace_all(format, "{target_options}", joined);
  }
  blocks.push_back(std::move(format));

  std::string prompt;
  for (const auto& b : blocks) {
    if (!prompt.empty()) prompt += "\n\n";
    prompt += b;
  }
  return prompt;
}

}  // namespace whow
