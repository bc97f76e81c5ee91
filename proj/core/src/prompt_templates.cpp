#include <fstream>
#include <sstream>

#include "whow/llm.hpp"

namespace whow {

namespace {

// The label definitions and examples mirror the published annotation manual
// text; examples were curated against development-set mistakes, so the
// wording (including its quirks) is kept verbatim. Deployments can edit the
// copies under templates/ instead of this file.

constexpr const char* kScenarioDebate =
    R"(Your role is an annotator, annotating the moderation behavior and speech of a debate TV show. The debate topic is "{topic}")";
constexpr const char* kScenarioPanel =
    R"(Your role is an annotator, annotating the moderation behavior and speech of a radio panel discussion show. The discussion topic is "{topic}")";
constexpr const char* kScenarioGeneric =
    R"(Your role is an annotator, annotating the moderation behavior and speech of a moderated group conversation. The conversation topic is "{topic}")";

constexpr const char* kTaskMulti =
    "given the definition and the examples, the context of prior and posterior "
    "dialogue, please label which motives the target response carries? And which "
    "dialogue act the target sentence belong to? And who is the moderator talking to?";
constexpr const char* kTaskIm =
    "given the definition and the examples, the context of prior and posterior "
    "dialogue, please label if the target utterance carries informational motive?";
constexpr const char* kTaskCm =
    "given the definition and the examples, the context of prior and posterior "
    "dialogue, please label if the target utterance carries coordinative motive?";
constexpr const char* kTaskSm =
    "given the definition and the examples, the context of prior and posterior "
    "dialogue, please label if the target utterance carries social motive?";
constexpr const char* kTaskDa =
    "given the definition and the examples, the context of prior and posterior "
    "dialogue, please label which dialogue act the target sentence belong to?";
constexpr const char* kTaskTs =
    "given the definition and the examples, the context of prior and posterior "
    "dialogue, please label who is the moderator talking to?";

constexpr const char* kImDefinition =
    "informational motive: Provide or acquire relevant information to constructively "
    "advance the topic or goal of the conversation.  examples: “Why do you think "
    "minimum wage is unfair?” (Relevant information seeking.) “The legal system has "
    "many loopholes.” (Expressing opinion.) “Yea! I agree with your point!” (Agreement "
    "relevant to the topic.)  “The law was established in 1998.” (Providing topic "
    "relevant information.)";

constexpr const char* kSmDefinition =
    "social motive: Enhance the social atmosphere and connections among participants "
    "by addressing feelings, emotions, and interpersonal dynamics within the group. "
    "examples: “It is sad to hear the news of the tragedy.” (Expressing emotion and "
    "feeling.) “Thank you! Mr. Wang.” (Appreciating.) “Hello! Let’s welcome Dr. "
    "Frankton.” (Greeting.) “I can understand your struggle being a single mum.” "
    "(Empathy) “How do you feel? when your work was totally denied.” (Exploring "
    "other’s feeling.) “Please feel free to say your mind because I can’t bite you "
    "online, hehe!” (Humour.) “The definition is short and simple! I love it!” "
    "(Encouragement.) “Maybe Amy’s intention is different to what you thought, you "
    "guys actually believe the same thing.” (Social Reframing.)";

constexpr const char* kCmDefinition =
    "coordinative motive: Ensure adherence to rules, plans, and broader contextual "
    "constraints, such as time and environment. examples: “Let’s move on to the next "
    "question due to time running out.” (Command) “We going to start with the blue "
    "team and then the red team” (Planning) “Do you want to go first?” (Asking for "
    "process preference.) “Please move to the left side and turn on your mic!” "
    "(Managing environment)";

constexpr const char* kMotivesIntroMulti =
    "Motives: During the dialogue, the moderator is acting upon a mixed-motives "
    "scenario, where different motives are expressed through responses depending on "
    "the context of the dialogue. Different from dialogue act, motives are the high "
    "level motivation that the moderator aim to achieve. The definitions and examples "
    "of the 3 motives are below:";

constexpr const char* kMotiveIntroSingle =
    "Motives: During the dialogue, the moderator is acting upon a mixed-motives "
    "scenario, where different motives are expressed through responses depending on "
    "the context of the dialogue. Motives are the high level motivation that the "
    "moderator aim to achieve. The definitions and examples of the {motive} motive "
    "are below:";

constexpr const char* kActsSection =
    "Dialogue act: Dialogue acts is referring to the function of a piece of a speech. "
    "The definitions and examples of the 6 motives are below:\n\n"
    "Probing: Prompt speaker for responses. examples: “What is your view on that Dr. "
    "Foster?” (Questioning.) “Where are you from?” (Social questioning.) “Peter!” "
    "(Name calling for response.) “If the majority of people are voting against it, "
    "would you still insist?” (Elaborated questioning.) “Do you agree with this "
    "statement?” (Binary question.)\n\n"
    "Confronting: Prompt one speaker to response or engage with another speaker's "
    "statement, question or opinion. examples: “So David pointed out the critical "
    "weakness of the system, what is your thought on his critiques, Dr. Foster?”, "
    "\"Judge Anderson, what is your response to this hypothetical scenario posed by "
    "Ms. Lee regarding privacy laws?\", \"Senator Harris, you have proposed reducing "
    "taxes instead. How do you respond to Mr. Walkers suggestion to increase school "
    "funding?\", \"So, Dr. Green, Professor Brown just criticized the emissions "
    "policy. What is your response to his critique?\"\n\n"
    "Supplement: Enrich the conversation by supplementing  details or information "
    "without immediately changing the target speaker's behavior. examples: “And that "
    "concludes round one of this Intelligence Squared U.S. debate where our motion is "
    "Break up the Big Banks.” (Addressing progess) “The blue team will go first, then "
    "the red team can speak” (explaining program rule) “Supposed we live in a world "
    "where such behaviour is accepted.” (Hypothesis) “I suggest the best solution is "
    "giving everyone equal chances.” (Proposal) “The government announced tax raise "
    "from March.” (Providing external information) “I agree with that you said.” "
    "(Agreement) “GM means genetic modified.” (Providing external knowledge) “I think "
    "people should be given the right to say no!” (Opinion) \"The guy with the blue "
    "shirt.\" (Describing appearance) \"The power is off.\" (Describing situation). "
    "“In this section, debaters will address one another and also take questions from "
    "the audience.” (Explaining upcoming segment) \"Let me move this along a little "
    "bit further to a slightly different topic, although we have circled around it.\" "
    "(Explaining self intention) \"I want to remind you that we are in the question "
    "and answer section.\" (Remind current phase of the discussion)\n\n"
    "Interpretation: Clarify, reframe, summarize, paraphrase, or make connection to "
    "earlier conversation content. examples: “So basically, what Amy said is that "
    "they didn’t use the budget efficiently”. (Summarization) “You said ‘I believe GM "
    "is harmless,’.” (Quote) “In another word, you don’t like their plan.”. "
    "(Paraphrase) “My understanding is you don’t support this due to moral reason.” "
    "(Interpretation) “She does not mean to hurt you but just tell the truth.” "
    "(Clarify) “So far, we have Dr. Johnson suggesting…., and Dr. Brown against it "
    "because……”(Summarization) “Amy saying that to justify the reduction of the wage, "
    "but not aiming to induce suffering.” (Reframing)\n\n"
    "Instruction: Explicitly command, influence, halt, or shape the immediate "
    "behavior of the recipients. examples: “Please get back to the topic.” "
    "(Commanding) “Please stop here, we are running out of time.” (Reminding of the "
    "rule) “The red will start now.” (Instruction) “Please mind your choice of words "
    "and manner.” (social policing) “Do not intentionally create misconception.” "
    "(argumentative policing) “Now is not your term, stop here.” (coordinative "
    "policing) “What you need to do is raise your hand, and ushers will come to you.” "
    "(Guiding participation) “Turn on your microphone before speaking.” (Technical "
    "instruction)  All Utility: All other unspecified acts.  examples: “Thanks, you.” "
    "(Greeting) “Sorry.” (Apology) “Okay.” (Back channelling) “Um hm.” (Back "
    "channelling) “But, but, but……” (Floor grabbing)";

constexpr const char* kTargetSection =
    "Target speaker: The target speaker(s) is the group or person the moderator is "
    "addressing in the target sentence. It can be an individual participant of the "
    "conversation, or a group option: \"Audience\" (the people watching or listening), "
    "\"Support team\" / \"Against team\" (one debate side as a whole), \"Everyone\" "
    "(everyone present including the audience), \"All speakers\" (all non-moderator "
    "participants), \"Self\" (the moderator themself), or \"Unknown\" (cannot be "
    "determined from the sentence and its context).";

constexpr const char* kFormatVerdict =
    "Please answer only for the target sentence with the JSON format:"
    "{\"verdict\": 0 or 1,\"reason\": String} For example:  answer: {\"verdict\": 1, "
    "\"reason\": \"The moderator asks a question to Joe Smith aimed at eliciting his "
    "viewpoint or reaction to a statement from the recent policy change for "
    "combatting climate change......\"}";

constexpr const char* kFormatDa =
    "Please answer only for the target sentence with the JSON format:"
    "{\"dialogue act\": String(one option from \"Probing\", \"Confronting\", "
    "\"Supplement\", \"Interpretation\", \"Instruction\", \"All Utility\"),\"reason\": "
    "String} For example: answer: {\"dialogue act\": \"Probing\", \"reason\": \"The "
    "moderator asks a question to Joe Smith aimed at eliciting his viewpoint or "
    "reaction to a statement from the recent policy change for combatting climate "
    "change......\"}";

constexpr const char* kFormatTs =
    "Please answer only for the target sentence with the JSON format:"
    "{\"target speaker(s)\": String(one option from {target_options}),\"reason\": "
    "String} For example: answer: {\"target speaker(s)\": \"7 (Joe Smith- for)\", "
    "\"reason\": \"The moderator asks a question to Joe Smith aimed at eliciting his "
    "viewpoint or reaction to a statement from the recent policy change for "
    "combatting climate change......\"}";

constexpr const char* kFormatMulti =
    "Please answer only for the target sentence with the JSON format:"
    "{\"motives\": List(None or more from \"informational motive\", \"social "
    "motive\", \"coordinative motive\"),\"dialogue act\": String(one option from "
    "\"Probing\", \"Confronting\", \"Supplement\", \"Interpretation\", "
    "\"Instruction\", \"All Utility\"),\"target speaker(s)\": String(one option from "
    "{target_options}),\"reason\": String}\n\n"
    "For example: answer: {\"motive\": [\"informational motive\"], \"dialogue act\": "
    "\"Probing\",  \"target speaker(s)\": \"7 (Joe Smith- for)\", \"reason\": \"The "
    "moderator asks a question to Joe Smith aimed at eliciting his viewpoint or "
    "reaction to a statement from the recent policy change for combatting climate "
    "change......\"}";

std::string replace_all(std::string text, const std::string& what, const std::string& with) {
  size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
  return text;
}

std::string single_motive_block(const char* motive_word, const char* definition) {
  return replace_all(kMotiveIntroSingle, "{motive}", motive_word) + "\n\n" + definition;
}

PromptTemplates build_defaults() {
  PromptTemplates t;
  t.scenario_debate = kScenarioDebate;
  t.scenario_panel = kScenarioPanel;
  t.scenario_generic = kScenarioGeneric;
  t.task_multi = kTaskMulti;
  t.task_single[Dimension::IM] = kTaskIm;
  t.task_single[Dimension::CM] = kTaskCm;
  t.task_single[Dimension::SM] = kTaskSm;
  t.task_single[Dimension::DA] = kTaskDa;
  t.task_single[Dimension::TS] = kTaskTs;
  t.motives_section = std::string(kMotivesIntroMulti) + "\n\n" + kImDefinition +
                      "\n\n " + kSmDefinition + "\n\n " + kCmDefinition;
  t.motive_single[Dimension::IM] = single_motive_block("informational", kImDefinition);
  t.motive_single[Dimension::CM] = single_motive_block("coordinative", kCmDefinition);
  t.motive_single[Dimension::SM] = single_motive_block("social", kSmDefinition);
  t.acts_section = kActsSection;
  t.target_section = kTargetSection;
  t.format_verdict = kFormatVerdict;
  t.format_da = kFormatDa;
  t.format_ts = kFormatTs;
  t.format_multi = kFormatMulti;
  return t;
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // Editors append a trailing newline; the blocks themselves never end in one.
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates kDefaults = build_defaults();
  return kDefaults;
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
  PromptTemplates t = defaults();
  auto load = [&](const char* name, std::string& into) {
    if (auto text = read_file(dir / name)) into = std::move(*text);
  };
  load("scenario_debate.txt", t.scenario_debate);
  load("scenario_panel.txt", t.scenario_panel);
  load("scenario_generic.txt", t.scenario_generic);
  load("task_multi.txt", t.task_multi);
  load("task_im.txt", t.task_single[Dimension::IM]);
  load("task_cm.txt", t.task_single[Dimension::CM]);
  load("task_sm.txt", t.task_single[Dimension::SM]);
  load("task_da.txt", t.task_single[Dimension::DA]);
  load("task_ts.txt", t.task_single[Dimension::TS]);
  load("motives_section.txt", t.motives_section);
  load("motive_im.txt", t.motive_single[Dimension::IM]);
  load("motive_cm.txt", t.motive_single[Dimension::CM]);
  load("motive_sm.txt", t.motive_single[Dimension::SM]);
  load("acts_section.txt", t.acts_section);
  load("target_section.txt", t.target_section);
  load("format_verdict.txt", t.format_verdict);
  load("format_da.txt", t.format_da);
  load("format_ts.txt", t.format_ts);
  load("format_multi.txt", t.format_multi);
  return t;
}

}  // namespace whow
