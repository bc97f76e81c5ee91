#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "whow/llm.hpp"

namespace whow {

namespace {

// Spaces network calls out to a fixed rate; cache hits bypass it.
class RateLimiter {
 public:
  explicit RateLimiter(double per_min) {
    if (per_min > 0)
      interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(60.0 / per_min));
  }

  void acquire() {
    if (interval_.count() == 0) return;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      if (next_ < now) next_ = now;
      slot = next_;
      next_ += interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

struct Unit {
  SentenceKey key;
  const Episode* episode = nullptr;
  std::string task;  // "mt" or "st:DA" etc.
  std::optional<Dimension> dimension;
};

std::optional<Dimension> task_dimension(const std::string& task) {
  if (task == "mt") return std::nullopt;
  return dimension_from_string(task.substr(3));
}

}  // namespace

JobResult run_job(const AnnotationJob& job, const Corpus& corpus, ChatClient& client) {
  std::vector<const Episode*> scope;
  if (job.episode_ids.empty()) {
    for (const auto& ep : corpus.episodes) scope.push_back(&ep);
  } else {
    for (const auto& id : job.episode_ids) {
      const Episode* ep = corpus.find_episode(id);
      if (ep == nullptr)
        throw std::invalid_argument("annotation job: unknown episode '" + id + "'");
      scope.push_back(ep);
    }
  }

  std::vector<std::string> tasks;
  if (job.mode == PromptMode::multi_task)
    tasks = {"mt"};
  else
    tasks = {"st:DA", "st:TS", "st:IM", "st:CM", "st:SM"};

  std::vector<Unit> units;
  std::set<SentenceKey> keys;
  for (const Episode* ep : scope) {
    for (const Turn* turn : moderator_turns(*ep)) {
      for (const auto& sentence : turn->sentences) {
        SentenceKey key{ep->id, turn->index, sentence.index};
        keys.insert(key);
        for (const auto& task : tasks)
          units.push_back({key, ep, task, task_dimension(task)});
      }
    }
  }

  JobReport report;
  report.sentences = static_cast<int>(keys.size());

  std::optional<ResponseCache> cache;
  if (!job.cache_dir.empty()) cache.emplace(job.cache_dir);

  std::vector<std::optional<AnnotationFragment>> fragments(units.size());
  RateLimiter limiter(job.rate_per_min);
  std::mutex cache_mu, report_mu;
  std::atomic<size_t> cursor{0};

  auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= units.size()) return;
      const Unit& unit = units[i];
      const PromptMode mode =
          unit.task == "mt" ? PromptMode::multi_task : PromptMode::single_task;

      PromptSpec spec;
      spec.mode = mode;
      spec.dimension = unit.dimension;
      spec.context_before = job.context_before;
      spec.context_after = job.context_after;
      spec.templates = job.templates;
      const std::string base_prompt = build_prompt(*unit.episode, unit.key, spec);

      std::string prompt = base_prompt;
      std::string last_error;
      const int max_attempts = 1 + std::max(job.retry_budget, 0);
      int attempt = 0;
      for (; attempt < max_attempts; ++attempt) {
        LlmRequest request;
        request.endpoint = job.endpoint_url;
        request.model = job.model;
        request.temperature = job.temperature;
        request.prompt = prompt;
        request.mode_tag = unit.task;
        request.metadata_key = request_cache_key(prompt, job.model, unit.task);

        std::optional<std::string> raw;
        bool from_cache = false;
        try {
          if (cache) {
            if (auto hit = cache->lookup(request.metadata_key)) {
              raw = std::move(hit);
              from_cache = true;
            }
          }
          if (!raw) {
            limiter.acquire();
            raw = client.complete(request).raw_text;
            if (cache) {
              std::lock_guard<std::mutex> lock(cache_mu);
              cache->store(request.metadata_key, request, *raw);
            }
          }
        } catch (const std::exception& e) {
          last_error = e.what();
          std::lock_guard<std::mutex> lock(report_mu);
          ++report.requests;
          if (!from_cache) ++report.network_calls;
          continue;  // network failure: retry the same prompt
        }
        {
          std::lock_guard<std::mutex> lock(report_mu);
          ++report.requests;
          if (from_cache)
            ++report.cache_hits;
          else
            ++report.network_calls;
        }

        ParseResult parsed = parse_response(*raw, mode, unit.dimension, *unit.episode);
        if (parsed.ok()) {
          fragments[i] = std::move(parsed.fragment);
          break;
        }
        last_error = parsed.error->message;
        if (prompt == base_prompt) prompt = base_prompt + "\n\nRespond with JSON only.";
      }
      if (!fragments[i]) {
        std::lock_guard<std::mutex> lock(report_mu);
        report.failures.push_back({unit.key, unit.task, last_error, attempt});
      }
    }
  };

  const int thread_count = std::max(1, std::min<int>(job.concurrency,
                                                     static_cast<int>(units.size())));
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Assemble fragments per sentence; a key with any missing piece stays a gap
  // (its failure is already on the report).
  std::map<SentenceKey, std::map<std::string, const AnnotationFragment*>> by_key;
  for (size_t i = 0; i < units.size(); ++i)
    if (fragments[i]) by_key[units[i].key][units[i].task] = &*fragments[i];

  std::string annotator = job.annotator_id;
  if (annotator.empty())
    annotator = "model:" + job.model + ":" +
                (job.mode == PromptMode::multi_task ? "mt" : "st");

  JobResult result;
  result.report = std::move(report);
  for (const auto& [key, parts] : by_key) {
    Annotation a;
    a.key = key;
    a.annotator = annotator;
    if (job.mode == PromptMode::multi_task) {
      const auto it = parts.find("mt");
      if (it == parts.end()) continue;
      const AnnotationFragment& frag = *it->second;
      a.motives = frag.motives.value_or(MotiveSet{});
      a.act = frag.act.value_or(DialogueAct::util);
      if (!frag.target) continue;
      a.target = *frag.target;
      if (!frag.rationale.empty()) a.rationale = frag.rationale;
    } else {
      if (parts.size() != 5) continue;  // incomplete sentence: keep as gap
      const AnnotationFragment& da = *parts.at("st:DA");
      const AnnotationFragment& ts = *parts.at("st:TS");
      if (!da.act || !ts.target) continue;
      a.act = *da.act;
      a.target = *ts.target;
      a.motives.informational = parts.at("st:IM")->verdict.value_or(false);
      a.motives.coordinative = parts.at("st:CM")->verdict.value_or(false);
      a.motives.social = parts.at("st:SM")->verdict.value_or(false);
      if (!da.rationale.empty()) a.rationale = da.rationale;
    }
    result.annotations.push_back(std::move(a));
  }
  return result;
}

}  // namespace whow
