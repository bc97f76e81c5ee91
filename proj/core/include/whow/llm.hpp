#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "whow/schema.hpp"

namespace whow {

enum class PromptMode { single_task, multi_task };
const char* to_string(PromptMode m);

// Editable text blocks the prompts are assembled from. The same content is
// shipped under templates/ for editing; load_dir overrides any block whose
// file exists there.
struct PromptTemplates {
  std::string scenario_debate, scenario_panel, scenario_generic;  // {topic}
  std::string task_multi;
  std::map<Dimension, std::string> task_single;
  std::string motives_section;                 // all three motives (multi-task)
  std::map<Dimension, std::string> motive_single;  // IM/CM/SM one-motive blocks
  std::string acts_section;
  std::string target_section;
  std::string format_verdict;                  // single-task motives
  std::string format_da;                       // {act_options}
  std::string format_ts;                       // {target_options}
  std::string format_multi;                    // {target_options}

  static const PromptTemplates& defaults();
  static PromptTemplates load_dir(const std::filesystem::path& dir);
};

struct PromptSpec {
  PromptMode mode = PromptMode::multi_task;
  std::optional<Dimension> dimension;  // required for single_task
  int context_before = 5;  // turns
  int context_after = 2;   // turns
  PromptTemplates templates = PromptTemplates::defaults();
};

// "N (Label)" option strings enumerating the episode's target vocabulary.
std::vector<std::string> target_options(const Episode& ep);

// Deterministic prompt for one moderator sentence: scenario header, task
// instruction, label definitions with examples, `context_before` prior turns
// rendered as "Name (role): text", the target sentence on its own, the
// following `context_after` turns, then the JSON formatting instruction.
// Context windows clamp at episode bounds. Throws std::invalid_argument when
// the key is not a moderator sentence.
std::string build_prompt(const Episode& ep, const SentenceKey& key,
                         const PromptSpec& spec);

// --- Response parsing -------------------------------------------------------

enum class ParseErrorKind { no_json, bad_motive, bad_act, bad_target, bad_verdict, missing_field };

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::no_json;
  std::string message;
  std::string raw;  // full raw text, kept for the caller's retry decision
};

struct AnnotationFragment {
  std::optional<bool> verdict;       // single-task motive
  std::optional<MotiveSet> motives;  // multi-task
  std::optional<DialogueAct> act;
  std::optional<TargetLabel> target;
  std::string rationale;
};

struct ParseResult {
  std::optional<AnnotationFragment> fragment;
  std::optional<ParseError> error;
  bool ok() const { return fragment.has_value(); }
};

// Extracts the first JSON object from raw text (markdown fences and prose
// tolerated) and maps label strings: motives "informational|social|
// coordinative motive", acts "Probing|Confronting|Supplement|Interpretation|
// Instruction|All Utility", targets by ordinal or name against the episode
// vocabulary; single-task motives read {"verdict": 0 or 1}.
ParseResult parse_response(const std::string& raw, PromptMode mode,
                           std::optional<Dimension> dimension, const Episode& ep);

// Well-formed response texts (used by stub clients and round-trip tests).
std::string render_multi_task_response(const MotiveSet& motives, DialogueAct act,
                                       const TargetLabel& target,
                                       const std::string& reason, const Episode& ep);
std::string render_verdict_response(bool verdict, const std::string& reason);
std::string render_da_response(DialogueAct act, const std::string& reason);
std::string render_ts_response(const TargetLabel& target, const std::string& reason,
                               const Episode& ep);

// --- Client and cache ---------------------------------------------------------

struct LlmRequest {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  std::string prompt;
  std::string mode_tag;      // "mt" or "st:IM" etc.
  std::string metadata_key;  // sha256(prompt, model, mode_tag)
};

struct LlmResponse {
  std::string raw_text;
  long latency_ms = 0;
};

std::string request_cache_key(const std::string& prompt, const std::string& model,
                              const std::string& mode_tag);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

// OpenAI-style chat-completions JSON over HTTP. The API key is sent as a
// bearer token; WHOW_LLM_API_KEY is read when the key argument is empty.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(std::string api_key = {});
  LlmResponse complete(const LlmRequest& request) override;

 private:
  std::string api_key_;
};

// One {metadata_key}.json file per response under a cache directory,
// holding {request, raw_response, timestamp}.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<std::string> lookup(const std::string& key) const;
  // Throws std::runtime_error on write failure (jobs abort on that).
  void store(const std::string& key, const LlmRequest& request,
             const std::string& raw_response) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// --- Batch jobs -----------------------------------------------------------------

struct AnnotationJob {
  std::vector<std::string> episode_ids;  // empty = whole corpus
  PromptMode mode = PromptMode::multi_task;
  std::string annotator_id;  // emitted on every annotation
  int concurrency = 4;
  int retry_budget = 3;
  double rate_per_min = 0;  // token bucket; 0 disables limiting
  std::filesystem::path cache_dir;
  std::string endpoint_url;
  std::string model = "gpt-4o";
  double temperature = 0.0;
  int context_before = 5;
  int context_after = 2;
  PromptTemplates templates = PromptTemplates::defaults();
};

struct JobFailure {
  SentenceKey key;
  std::string task;  // "mt" or the single-task dimension
  std::string error;
  int attempts = 0;
};

struct JobReport {
  int sentences = 0;
  int requests = 0;
  int cache_hits = 0;
  int network_calls = 0;
  std::vector<JobFailure> failures;  // gaps, never silent
};

struct JobResult {
  std::vector<Annotation> annotations;  // key order
  JobReport report;
};

// Annotates every moderator sentence in scope: one request per sentence in
// multi-task mode, five (DA, TS, IM, CM, SM) in single-task mode, merged.
// Cache hits skip the network; parse failures retry with a JSON-only
// reminder up to the retry budget; exhausted budgets become JobReport gaps.
JobResult run_job(const AnnotationJob& job, const Corpus& corpus, ChatClient& client);

}  // namespace whow
