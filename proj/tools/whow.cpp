// whow - corpus analytics for conversational moderation.
//
// Subcommands: ingest, segment, annotate, aggregate, agree, eval, analyze,
// report. Global flags --config/--out/--seed/--quiet work anywhere on the
// command line. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "whow/aggregate.hpp"
#include "whow/analysis.hpp"
#include "whow/config.hpp"
#include "whow/corpus.hpp"
#include "whow/eval.hpp"
#include "whow/hash.hpp"
#include "whow/ingest.hpp"
#include "whow/llm.hpp"
#include "whow/report.hpp"
#include "whow/schema.hpp"
#include "whow/segment.hpp"
#include "whow/version.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Errors of this type exit with code 2 (usage), everything else with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string config_path;
  std::string out_dir;
  unsigned seed = 0;
  bool quiet = false;
  whow::RunConfig config;

  void load_config() {
    if (config_path.empty()) return;
    if (!fs::exists(config_path))
      throw UsageError("config file '" + config_path + "' not found");
    config = whow::RunConfig::load(config_path);
    const std::string ver = config.get_or("schema_version", "");
    if (ver.empty())
      throw UsageError(config_path + ": missing required key 'schema_version' (expected 1)");
    if (ver != "1")
      throw UsageError(config_path + ": unsupported schema_version '" + ver + "' (expected 1)");
  }

  fs::path require_out() const {
    if (out_dir.empty()) throw UsageError("--out is required for this command");
    return fs::path(out_dir);
  }
};

// Collects inputs/outputs while a command runs and lands them in a manifest,
// so a bundle records exactly what produced it.
class Sink {
 public:
  Sink(std::string tool, fs::path out_dir) : out_(std::move(out_dir)) {
    manifest_.tool = std::move(tool);
    manifest_.version = whow::kVersion;
  }

  const fs::path& dir() const { return out_; }

  void config(const std::string& key, const std::string& value) {
    config_[key] = value;
  }
  void config(const whow::RunConfig& cfg) {
    for (const auto& [k, v] : cfg.items()) config_[k] = v;
  }

  void input(const fs::path& p) {
    inputs_.emplace(p.string(), whow::sha256_file(p));
  }

  fs::path write(const std::string& name, const std::string& content) {
    fs::path p = out_ / name;
    whow::atomic_write(p, content);
    outputs_.push_back(p.string());
    return p;
  }

  void finish(const std::string& manifest_name) {
    manifest_.config.assign(config_.begin(), config_.end());
    manifest_.inputs.assign(inputs_.begin(), inputs_.end());
    std::sort(outputs_.begin(), outputs_.end());
    manifest_.outputs = outputs_;
    write(manifest_name, manifest_.to_json());
  }

 private:
  whow::RunManifest manifest_;
  fs::path out_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

void require_exists(const fs::path& p, const std::string& kind,
                    const std::string& producer) {
  if (fs::exists(p)) return;
  std::string msg = kind + " '" + p.string() + "' not found";
  if (!producer.empty()) msg += " (produce it with `whow " + producer + "`)";
  throw std::runtime_error(msg);
}

whow::Corpus load_corpus(const fs::path& dir, Sink& sink) {
  require_exists(dir, "corpus directory", "ingest");
  whow::Corpus corpus = whow::load_corpus_dir(dir);
  if (corpus.episodes.empty())
    throw std::runtime_error("corpus directory '" + dir.string() +
                             "' holds no *.jsonl episodes (produce them with `whow ingest`)");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) sink.input(f);
  return corpus;
}

std::vector<whow::Annotation> load_annotations(const std::vector<std::string>& files,
                                               const std::string& producer, Sink& sink) {
  std::vector<whow::Annotation> all;
  for (const auto& f : files) {
    require_exists(f, "annotations file", producer);
    sink.input(f);
    auto anns = whow::read_annotations_file(f);
    all.insert(all.end(), anns.begin(), anns.end());
  }
  return all;
}

// Source selectors: "consensus" (exact), "human" / "model:<id>" match that
// exact annotator or any annotator extending it after a ':'.
bool matches_source(const std::string& annotator, const std::string& selector) {
  if (annotator == selector) return true;
  return annotator.size() > selector.size() &&
         annotator.compare(0, selector.size(), selector) == 0 &&
         annotator[selector.size()] == ':';
}

std::vector<whow::Annotation> filter_source(const std::vector<whow::Annotation>& anns,
                                            const std::string& selector) {
  std::vector<whow::Annotation> kept;
  for (const auto& a : anns)
    if (matches_source(a.annotator, selector)) kept.push_back(a);
  if (kept.empty())
    throw std::runtime_error("no annotations match source '" + selector + "'");
  return kept;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<whow::Dimension> parse_dims(const std::string& csv) {
  std::vector<whow::Dimension> dims;
  for (auto tok : split_list(csv)) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    auto d = whow::dimension_from_string(tok);
    if (!d) throw UsageError("unknown dimension '" + tok + "' (expected DA,IM,CM,SM,TS)");
    dims.push_back(*d);
  }
  if (dims.empty()) throw UsageError("--dims must name at least one dimension");
  return dims;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '-';
  return s;
}

void echo(const Global& g, const std::string& text) {
  if (!g.quiet) std::cout << text;
}

ordered_json key_json(const whow::SentenceKey& k) {
  return ordered_json{{"episode", k.episode_id}, {"turn", k.turn_index},
                      {"sentence", k.sentence_index}};
}

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- ingest -----------------------------------------------------------------

int cmd_ingest(Global& g, const std::string& format_str, const std::string& in,
               bool keep_going) {
  whow::SourceFormat fmt;
  try {
    fmt = whow::format_from_string(format_str);
  } catch (const std::exception&) {
    throw UsageError("unknown --format '" + format_str + "' (expected whow, insq or npr)");
  }
  require_exists(in, "input path", "");
  Sink sink("whow ingest", g.require_out());
  sink.config(g.config);
  sink.config("format", whow::to_string(fmt));
  sink.config("keep_going", keep_going ? "true" : "false");

  std::vector<fs::path> files;
  if (fs::is_directory(in)) {
    const std::string want = fmt == whow::SourceFormat::whow_jsonl ? ".jsonl" : ".json";
    for (const auto& e : fs::directory_iterator(in))
      if (e.is_regular_file() && e.path().extension() == want) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw std::runtime_error("no *" + want + " files in '" + in + "'");
  } else {
    files.emplace_back(in);
  }

  int failures = 0, written = 0;
  std::set<std::string> seen_ids;
  for (const auto& f : files) {
    try {
      whow::Episode ep = whow::ingest_file(f, fmt);
      if (!seen_ids.insert(ep.id).second)
        throw whow::IngestError("duplicate episode id '" + ep.id + "'");
      sink.input(f);
      sink.write(ep.id + ".jsonl", whow::to_whow_jsonl(ep));
      ++written;
    } catch (const std::exception& e) {
      std::cerr << "error: " << f.string() << ": " << e.what() << "\n";
      ++failures;
      if (!keep_going) return 1;
    }
  }
  sink.finish("ingest_manifest.json");
  if (!g.quiet) {
    std::cout << "wrote " << written << " episode file(s) to " << sink.dir().string();
    if (failures) std::cout << " (" << failures << " input(s) failed)";
    std::cout << "\n";
  }
  return 0;
}

// --- segment ----------------------------------------------------------------

int cmd_segment(Global& g, const std::string& in) {
  std::string text;
  if (in == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    require_exists(in, "input file", "");
    text = read_text_file(in);
  }
  std::string out;
  for (const auto& s : whow::segment_text(text)) out += s.text + "\n";
  if (g.out_dir.empty()) {
    std::cout << out;
    return 0;
  }
  Sink sink("whow segment", g.require_out());
  sink.config(g.config);
  if (in != "-") sink.input(in);
  sink.write("sentences.txt", out);
  sink.finish("segment_manifest.json");
  return 0;
}

// --- annotate ---------------------------------------------------------------

struct AnnotateOpts {
  std::string corpus_dir, mode = "mt", episodes, annotator, cache_dir, endpoint,
              model, templates_dir;
  double temperature = 0.0, rate_per_min = 0.0;
  int concurrency = 4, retries = 3;
  // Which flags the user actually passed (config supplies the rest).
  const CLI::Option *mode_opt = nullptr, *cache_opt = nullptr, *endpoint_opt = nullptr,
                    *model_opt = nullptr, *temp_opt = nullptr, *conc_opt = nullptr,
                    *rate_opt = nullptr, *retries_opt = nullptr, *templates_opt = nullptr;
};

int cmd_annotate(Global& g, const AnnotateOpts& o) {
  Sink sink("whow annotate", g.require_out());
  whow::Corpus corpus = load_corpus(o.corpus_dir, sink);

  auto pick_str = [&](const CLI::Option* opt, const std::string& flag_val,
                      const std::string& key, const std::string& fallback) {
    if (opt && opt->count() > 0) return flag_val;
    return g.config.get_or(key, fallback);
  };

  whow::AnnotationJob job;
  const std::string mode = pick_str(o.mode_opt, o.mode, "mode", "mt");
  if (mode == "mt" || mode == "multi_task") {
    job.mode = whow::PromptMode::multi_task;
  } else if (mode == "st" || mode == "single_task") {
    job.mode = whow::PromptMode::single_task;
  } else {
    throw UsageError("unknown --mode '" + mode + "' (expected mt or st)");
  }
  job.endpoint_url = pick_str(o.endpoint_opt, o.endpoint, "endpoint_url", "");
  if (job.endpoint_url.empty())
    throw UsageError("no endpoint configured: pass --endpoint or set endpoint_url in --config");
  job.model = pick_str(o.model_opt, o.model, "model", "gpt-4o");
  job.temperature = (o.temp_opt && o.temp_opt->count()) ? o.temperature
                                                        : g.config.get_double("temperature", 0.0);
  job.concurrency = (o.conc_opt && o.conc_opt->count()) ? o.concurrency
                                                        : g.config.get_int("concurrency", 4);
  job.rate_per_min = (o.rate_opt && o.rate_opt->count()) ? o.rate_per_min
                                                         : g.config.get_double("rate_per_min", 0.0);
  job.retry_budget = (o.retries_opt && o.retries_opt->count()) ? o.retries
                                                               : g.config.get_int("retries", 3);
  job.context_before = g.config.get_int("context_before", 5);
  job.context_after = g.config.get_int("context_after", 2);
  job.cache_dir = pick_str(o.cache_opt, o.cache_dir, "cache_dir", "");
  job.annotator_id = o.annotator;
  if (!o.episodes.empty()) job.episode_ids = split_list(o.episodes);

  const std::string templates_dir =
      pick_str(o.templates_opt, o.templates_dir, "templates_dir", "");
  if (!templates_dir.empty()) {
    require_exists(templates_dir, "templates directory", "");
    job.templates = whow::PromptTemplates::load_dir(templates_dir);
    std::vector<fs::path> tfiles;
    for (const auto& e : fs::directory_iterator(templates_dir))
      if (e.is_regular_file()) tfiles.push_back(e.path());
    std::sort(tfiles.begin(), tfiles.end());
    for (const auto& f : tfiles) sink.input(f);
  }

  sink.config(g.config);
  sink.config("mode", mode == "st" || mode == "single_task" ? "st" : "mt");
  sink.config("endpoint_url", job.endpoint_url);
  sink.config("model", job.model);
  sink.config("temperature", whow::format_full(job.temperature));
  sink.config("concurrency", std::to_string(job.concurrency));
  sink.config("rate_per_min", whow::format_full(job.rate_per_min));
  sink.config("retries", std::to_string(job.retry_budget));
  sink.config("context_before", std::to_string(job.context_before));
  sink.config("context_after", std::to_string(job.context_after));
  sink.config("cache_dir", job.cache_dir.string());
  sink.config("templates_dir", templates_dir);
  if (!o.annotator.empty()) sink.config("annotator", o.annotator);
  if (!o.episodes.empty()) sink.config("episodes", o.episodes);

  whow::HttpChatClient client;  // reads WHOW_LLM_API_KEY
  whow::JobResult result = whow::run_job(job, corpus, client);

  std::ostringstream anns;
  whow::write_annotations_jsonl(result.annotations, anns);
  sink.write("annotations.jsonl", anns.str());

  ordered_json report{{"sentences", result.report.sentences},
                      {"requests", result.report.requests},
                      {"cache_hits", result.report.cache_hits},
                      {"network_calls", result.report.network_calls},
                      {"failures", ordered_json::array()}};
  for (const auto& f : result.report.failures)
    report["failures"].push_back(ordered_json{{"key", key_json(f.key)},
                                              {"task", f.task},
                                              {"error", f.error},
                                              {"attempts", f.attempts}});
  sink.write("job_report.json", report.dump(2) + "\n");
  sink.finish("annotate_manifest.json");

  if (!g.quiet)
    std::cout << "annotated " << result.annotations.size() << "/" << result.report.sentences
              << " sentences (" << result.report.requests << " requests, "
              << result.report.cache_hits << " cache hits, " << result.report.network_calls
              << " network calls)\n";
  if (!result.report.failures.empty()) {
    std::cerr << "error: " << result.report.failures.size()
              << " sentence task(s) failed; see job_report.json\n";
    return 1;
  }
  return 0;
}

// --- aggregate --------------------------------------------------------------

std::map<whow::SentenceKey, whow::ExternalResolution> read_resolutions(
    const fs::path& path, const whow::Corpus& corpus) {
  std::map<whow::SentenceKey, whow::ExternalResolution> out;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
    whow::SentenceKey key{j.at("episode").get<std::string>(), j.at("turn").get<int>(),
                          j.at("sentence").get<int>()};
    const whow::Episode* ep = corpus.find_episode(key.episode_id);
    if (!ep) throw std::runtime_error(where + "unknown episode '" + key.episode_id + "'");
    whow::ExternalResolution r;
    if (j.contains("im")) r.im = j.at("im").get<bool>();
    if (j.contains("cm")) r.cm = j.at("cm").get<bool>();
    if (j.contains("sm")) r.sm = j.at("sm").get<bool>();
    if (j.contains("act")) {
      auto a = whow::act_from_string(j.at("act").get<std::string>());
      if (!a) throw std::runtime_error(where + "unknown act '" +
                                       j.at("act").get<std::string>() + "'");
      r.act = *a;
    }
    if (j.contains("target")) {
      auto t = whow::canonicalize_target(j.at("target").get<std::string>(), ep);
      if (!t) throw std::runtime_error(where + "unresolvable target '" +
                                       j.at("target").get<std::string>() + "'");
      r.target = *t;
    }
    out[key] = r;
  }
  return out;
}

int cmd_aggregate(Global& g, const std::string& corpus_dir,
                  const std::vector<std::string>& ann_files,
                  const std::string& policy_str, const std::string& resolutions_file) {
  whow::TiebreakKind kind;
  if (policy_str == "priority" || policy_str == "priority_order") {
    kind = whow::TiebreakKind::priority_order;
  } else if (policy_str == "flag" || policy_str == "flag_only") {
    kind = whow::TiebreakKind::flag_only;
  } else if (policy_str == "external" || policy_str == "external_file") {
    kind = whow::TiebreakKind::external_file;
  } else {
    throw UsageError("unknown --tie-policy '" + policy_str +
                     "' (expected priority, flag or external)");
  }
  if (kind == whow::TiebreakKind::external_file && resolutions_file.empty())
    throw UsageError("--tie-policy external requires --resolutions FILE");

  Sink sink("whow aggregate", g.require_out());
  whow::Corpus corpus = load_corpus(corpus_dir, sink);
  auto anns = load_annotations(ann_files, "annotate", sink);

  std::map<whow::SentenceKey, whow::ExternalResolution> external;
  if (!resolutions_file.empty()) {
    require_exists(resolutions_file, "resolutions file", "");
    sink.input(resolutions_file);
    external = read_resolutions(resolutions_file, corpus);
  }

  auto aggregated = whow::aggregate_corpus(anns, corpus, kind,
                                           external.empty() ? nullptr : &external);

  std::vector<whow::Annotation> consensus;
  consensus.reserve(aggregated.size());
  std::string ties;
  int tied = 0;
  for (const auto& agg : aggregated) {
    consensus.push_back(whow::to_annotation(agg));
    if (agg.tie_flags.empty()) continue;
    ++tied;
    ordered_json j{{"key", key_json(agg.key)}, {"ties", ordered_json::array()}};
    for (auto d : agg.tie_flags) j["ties"].push_back(whow::to_string(d));
    ties += j.dump() + "\n";
  }
  std::ostringstream body;
  whow::write_annotations_jsonl(consensus, body);
  sink.write("consensus.jsonl", body.str());
  sink.write("ties.jsonl", ties);

  sink.config(g.config);
  sink.config("tie_policy", policy_str);
  if (!resolutions_file.empty()) sink.config("resolutions", resolutions_file);
  sink.finish("aggregate_manifest.json");

  if (!g.quiet)
    std::cout << "aggregated " << consensus.size() << " sentence label(s), " << tied
              << " with vote ties (see ties.jsonl)\n";
  return 0;
}

// --- agree ------------------------------------------------------------------

int cmd_agree(Global& g, const std::vector<std::string>& ann_files,
              const std::string& dims_str, const std::string& corpus_dir,
              const std::string& split_str) {
  Sink sink("whow agree", g.require_out());
  auto anns = load_annotations(ann_files, "annotate", sink);

  if (!split_str.empty()) {
    if (corpus_dir.empty())
      throw UsageError("--split needs --corpus to resolve episode splits");
    whow::Corpus corpus = load_corpus(corpus_dir, sink);
    std::set<whow::Split> wanted;
    for (const auto& tok : split_list(split_str)) wanted.insert(whow::split_from_string(tok));
    std::set<std::string> keep;
    for (const auto& ep : corpus.episodes)
      if (wanted.count(ep.split)) keep.insert(ep.id);
    std::erase_if(anns, [&](const whow::Annotation& a) {
      return keep.find(a.key.episode_id) == keep.end();
    });
    if (anns.empty())
      throw std::runtime_error("no annotations left after --split " + split_str);
  }

  auto dims = parse_dims(dims_str);
  whow::AlphaReport report = whow::agreement_report(anns, dims);

  const std::string md = whow::markdown_agreement(report);
  sink.write("agreement.md", md);
  sink.write("agreement.csv", whow::csv_agreement(report));
  sink.config(g.config);
  sink.config("dims", dims_str);
  if (!split_str.empty()) sink.config("split", split_str);
  sink.finish("agree_manifest.json");
  echo(g, md);
  return 0;
}

// --- eval -------------------------------------------------------------------

int cmd_eval(Global& g, const std::string& corpus_dir, const std::string& gold_file,
             const std::string& pred_file, const std::string& dims_str,
             const std::string& universe_str, const std::string& gold_source,
             const std::string& pred_source, bool baseline, bool confusion_flag) {
  whow::ClassUniverse universe;
  if (universe_str == "union") {
    universe = whow::ClassUniverse::gold_union_pred;
  } else if (universe_str == "gold" || universe_str == "gold_only") {
    universe = whow::ClassUniverse::gold_only;
  } else {
    throw UsageError("unknown --universe '" + universe_str + "' (expected union or gold)");
  }

  Sink sink("whow eval", g.require_out());
  whow::Corpus corpus = load_corpus(corpus_dir, sink);
  auto gold = load_annotations({gold_file}, "aggregate", sink);
  auto pred = load_annotations({pred_file}, "annotate", sink);
  if (!gold_source.empty()) gold = filter_source(gold, gold_source);
  if (!pred_source.empty()) pred = filter_source(pred, pred_source);

  auto dims = parse_dims(dims_str);
  whow::EvalReport report = whow::evaluate(gold, pred, dims, universe);
  const std::string eval_md = whow::markdown_eval(report);
  sink.write("eval.md", eval_md);
  sink.write("eval.csv", whow::csv_eval(report));

  whow::AlphaReport mh;
  mh.annotator_count = 2;
  {
    std::set<whow::SentenceKey> keys;
    for (const auto& a : gold) keys.insert(a.key);
    mh.unit_count = static_cast<int>(keys.size());
  }
  for (auto d : dims) mh.alpha[d] = whow::model_human_alpha(gold, pred, d);
  const std::string mh_md = whow::markdown_agreement(mh);
  sink.write("model_human_agreement.md", mh_md);
  sink.write("model_human_agreement.csv", whow::csv_agreement(mh));

  std::string baseline_md;
  if (baseline) {
    std::vector<unsigned> seeds;
    for (unsigned i = 0; i < 5; ++i) seeds.push_back(g.seed + i);
    std::string md = "| dimension | random macro-F1 |\n|---|---|\n";
    std::string csv = "dimension,random_macro_f1\n";
    for (auto d : dims) {
      const double f1 = whow::random_baseline(gold, corpus, d, seeds);
      md += std::string("| ") + whow::to_string(d) + " | " + whow::format_fixed(f1) + " |\n";
      csv += std::string(whow::to_string(d)) + "," + whow::format_full(f1) + "\n";
    }
    sink.write("random_baseline.md", md);
    sink.write("random_baseline.csv", csv);
    baseline_md = md;
  }

  if (confusion_flag) {
    for (auto d : dims) {
      whow::ConfusionMatrix m = whow::confusion(gold, pred, d);
      const std::string stem = "confusion_" + lower(whow::to_string(d));
      sink.write(stem + ".md", whow::markdown_confusion(m));
      sink.write(stem + ".csv", whow::csv_confusion(m));
    }
  }

  sink.config(g.config);
  sink.config("dims", dims_str);
  sink.config("universe", universe_str == "union" ? "union" : "gold");
  sink.config("seed", std::to_string(g.seed));
  if (!gold_source.empty()) sink.config("gold_source", gold_source);
  if (!pred_source.empty()) sink.config("pred_source", pred_source);
  sink.config("baseline", baseline ? "true" : "false");
  sink.config("confusion", confusion_flag ? "true" : "false");
  sink.finish("eval_manifest.json");

  echo(g, eval_md + "\n" + mh_md + (baseline_md.empty() ? "" : "\n" + baseline_md));
  return 0;
}

// --- analyze ----------------------------------------------------------------

int cmd_analyze(Global& g, const std::string& corpus_dir,
                const std::vector<std::string>& ann_files, const std::string& source,
                const std::vector<std::string>& compare, bool per_sentence_flag,
                bool zero_fill_flag, bool per_sentence_set, bool zero_fill_set) {
  Sink sink("whow analyze", g.require_out());
  whow::Corpus corpus = load_corpus(corpus_dir, sink);
  auto anns = load_annotations(ann_files, "aggregate", sink);

  const bool per_sentence = per_sentence_set
                                ? per_sentence_flag
                                : g.config.get_bool("per_sentence_counts", false);
  const bool zero_fill = zero_fill_set ? zero_fill_flag
                                       : g.config.get_bool("zero_fill_conditionals", false);

  sink.config(g.config);
  sink.config("per_sentence_counts", per_sentence ? "true" : "false");
  sink.config("zero_fill_conditionals", zero_fill ? "true" : "false");
  if (!source.empty()) sink.config("source", source);

  std::string shown;
  if (!compare.empty()) {
    if (compare.size() < 2)
      throw UsageError("--compare needs at least two sources, e.g. --compare consensus model:gpt-4o");
    std::string joined;
    for (size_t i = 0; i < compare.size(); ++i)
      joined += (i ? "," : "") + compare[i];
    sink.config("compare", joined);
    for (size_t i = 0; i < compare.size(); ++i) {
      for (size_t j = i + 1; j < compare.size(); ++j) {
        auto a = filter_source(anns, compare[i]);
        auto b = filter_source(anns, compare[j]);
        whow::SourceComparison cmp = whow::compare_sources(corpus, a, b, zero_fill);
        const std::string stem =
            "comparison_" + sanitize(compare[i]) + "_vs_" + sanitize(compare[j]);
        const std::string md = whow::markdown_comparison(cmp);
        sink.write(stem + ".md", md);
        sink.write(stem + ".csv", whow::csv_comparison(cmp));
        shown += md + "\n";
      }
    }
    sink.finish("analyze_manifest.json");
    echo(g, shown);
    return 0;
  }

  auto selected = source.empty() ? anns : filter_source(anns, source);

  whow::ConditionalTable cond = whow::conditional_table(corpus, selected, zero_fill);
  sink.write("conditional.md", whow::markdown_conditional(cond));
  sink.write("conditional.csv", whow::csv_conditional(cond));
  sink.write("conditional_plot.json", whow::plot_json_conditional(cond));

  std::vector<whow::SpeakerStateSequence> seqs;
  seqs.reserve(corpus.episodes.size());
  for (const auto& ep : corpus.episodes) seqs.push_back(whow::state_sequence(ep));
  whow::TransitionMatrix trans = whow::transition_matrix(seqs);
  sink.write("transitions.md", whow::markdown_transitions(trans));
  sink.write("transitions.csv", whow::csv_transitions(trans));
  sink.write("transitions_plot.json", whow::plot_json_transitions(trans));

  whow::ActTransitionReport act =
      whow::act_conditioned_transitions(corpus, selected, per_sentence);
  sink.write("act_transitions.md", whow::markdown_act_transitions(act));
  sink.write("act_transitions.csv", whow::csv_act_transitions(act));
  sink.write("act_transitions_plot.json", whow::plot_json_act_transitions(act));

  whow::WhoMetrics who = whow::who_metrics(corpus, selected);
  sink.write("who.md", whow::markdown_who(who));
  sink.write("who.csv", whow::csv_who(who));

  sink.finish("analyze_manifest.json");
  echo(g, whow::markdown_conditional(cond) + "\n" + whow::markdown_transitions(trans) + "\n" +
              whow::markdown_act_transitions(act) + "\n" + whow::markdown_who(who));
  return 0;
}

// --- report -----------------------------------------------------------------

int cmd_report(Global& g, std::vector<std::string> in_dirs, const std::string& title) {
  if (in_dirs.empty()) in_dirs.push_back(g.require_out().string());
  Sink sink("whow report", g.require_out());
  sink.config(g.config);
  sink.config("title", title);

  std::vector<fs::path> members;
  for (const auto& d : in_dirs) {
    require_exists(d, "bundle directory", "analyze");
    for (const auto& e : fs::directory_iterator(d)) {
      if (!e.is_regular_file()) continue;
      const auto name = e.path().filename().string();
      if (name == "report.md" || name == "bundle_manifest.json") continue;
      members.push_back(e.path());
    }
  }
  std::sort(members.begin(), members.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename() != b.filename() ? a.filename() < b.filename() : a < b;
            });
  if (members.empty())
    throw std::runtime_error("nothing to bundle: no artifacts under the --in directories "
                             "(produce them with `whow analyze`, `whow agree` or `whow eval`)");

  std::string report = "# " + title + "\n";
  for (const auto& p : members) {
    sink.input(p);
    if (p.extension() != ".md") continue;
    report += "\n## " + p.filename().stem().string() + "\n\n" + read_text_file(p);
  }
  sink.write("report.md", report);
  sink.finish("bundle_manifest.json");
  echo(g, "bundled " + std::to_string(members.size()) + " artifact(s) into " +
              (sink.dir() / "report.md").string() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conversational moderation corpus analytics"};
  app.set_version_flag("--version", whow::kVersion);
  app.fallthrough();
  app.require_subcommand(1);

  Global g;
  app.add_option("--config", g.config_path, "flat key=value config file (schema_version = 1)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "base random seed")->default_val(0u);
  app.add_flag("--quiet", g.quiet, "suppress tables and summaries on stdout");

  int rc = 0;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert raw transcripts to episode jsonl");
  std::string ing_format, ing_in;
  bool ing_keep = false;
  ingest->add_option("--format", ing_format, "whow | insq | npr")->required();
  ingest->add_option("--in", ing_in, "input file or directory")->required();
  ingest->add_flag("--keep-going", ing_keep, "report per-file errors but exit 0");
  ingest->callback([&] { g.load_config(); rc = cmd_ingest(g, ing_format, ing_in, ing_keep); });

  // segment
  auto* segment = app.add_subcommand("segment", "split plain text into sentences");
  std::string seg_in;
  segment->add_option("--in", seg_in, "text file, or - for stdin")->required();
  segment->callback([&] { g.load_config(); rc = cmd_segment(g, seg_in); });

  // annotate
  auto* annotate = app.add_subcommand("annotate", "label moderator sentences with an LLM");
  AnnotateOpts an;
  annotate->add_option("--corpus", an.corpus_dir, "episode jsonl directory")->required();
  an.mode_opt = annotate->add_option("--mode", an.mode, "mt (one call) or st (five calls)");
  annotate->add_option("--episodes", an.episodes, "comma-separated episode ids (default: all)");
  annotate->add_option("--annotator", an.annotator, "annotator id stamped on outputs");
  an.cache_opt = annotate->add_option("--cache", an.cache_dir, "response cache directory");
  an.endpoint_opt = annotate->add_option("--endpoint", an.endpoint, "chat-completions URL");
  an.model_opt = annotate->add_option("--model", an.model, "model name");
  an.temp_opt = annotate->add_option("--temperature", an.temperature, "sampling temperature");
  an.conc_opt = annotate->add_option("--concurrency", an.concurrency, "parallel requests");
  an.rate_opt = annotate->add_option("--rate-per-min", an.rate_per_min, "request rate limit");
  an.retries_opt = annotate->add_option("--retries", an.retries, "retry budget per sentence task");
  an.templates_opt = annotate->add_option("--templates", an.templates_dir,
                                          "prompt template directory (default: built-in)");
  annotate->callback([&] { g.load_config(); rc = cmd_annotate(g, an); });

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "majority-vote multiple annotators");
  std::string agg_corpus, agg_policy = "priority", agg_resolutions;
  std::vector<std::string> agg_files;
  aggregate->add_option("--corpus", agg_corpus, "episode jsonl directory")->required();
  aggregate->add_option("--annotations", agg_files, "annotation jsonl file(s)")
      ->required()
      ->expected(-1);
  aggregate->add_option("--tie-policy", agg_policy, "priority | flag | external");
  aggregate->add_option("--resolutions", agg_resolutions, "tie resolutions jsonl");
  aggregate->callback([&] {
    g.load_config();
    rc = cmd_aggregate(g, agg_corpus, agg_files, agg_policy, agg_resolutions);
  });

  // agree
  auto* agree = app.add_subcommand("agree", "inter-annotator agreement (Krippendorff's alpha)");
  std::string agr_dims = "DA,IM,CM,SM,TS", agr_corpus, agr_split;
  std::vector<std::string> agr_files;
  agree->add_option("--annotations", agr_files, "annotation jsonl file(s)")
      ->required()
      ->expected(-1);
  agree->add_option("--dims", agr_dims, "comma-separated: DA,IM,CM,SM,TS");
  agree->add_option("--corpus", agr_corpus, "episode jsonl directory (for --split)");
  agree->add_option("--split", agr_split, "keep only episodes in these splits");
  agree->callback([&] { g.load_config(); rc = cmd_agree(g, agr_files, agr_dims, agr_corpus, agr_split); });

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against gold labels");
  std::string ev_corpus, ev_gold, ev_pred, ev_dims = "DA,IM,CM,SM,TS",
              ev_universe = "union", ev_gold_src, ev_pred_src;
  bool ev_baseline = false, ev_confusion = false;
  eval->add_option("--corpus", ev_corpus, "episode jsonl directory")->required();
  eval->add_option("--gold", ev_gold, "gold annotation jsonl")->required();
  eval->add_option("--pred", ev_pred, "predicted annotation jsonl")->required();
  eval->add_option("--dims", ev_dims, "comma-separated: DA,IM,CM,SM,TS");
  eval->add_option("--universe", ev_universe, "macro-F1 class universe: union | gold");
  eval->add_option("--gold-source", ev_gold_src, "filter gold by annotator selector");
  eval->add_option("--pred-source", ev_pred_src, "filter predictions by annotator selector");
  eval->add_flag("--baseline", ev_baseline, "also score a seeded random baseline");
  eval->add_flag("--confusion", ev_confusion, "also write per-dimension confusion matrices");
  eval->callback([&] {
    g.load_config();
    rc = cmd_eval(g, ev_corpus, ev_gold, ev_pred, ev_dims, ev_universe, ev_gold_src,
                  ev_pred_src, ev_baseline, ev_confusion);
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "motive/act/target behavior tables");
  std::string anl_corpus, anl_source;
  std::vector<std::string> anl_files, anl_compare;
  bool anl_per_sentence = false, anl_zero_fill = false;
  analyze->add_option("--corpus", anl_corpus, "episode jsonl directory")->required();
  analyze->add_option("--annotations", anl_files, "annotation jsonl file(s)")
      ->required()
      ->expected(-1);
  analyze->add_option("--source", anl_source,
                      "annotator selector (human | model:<id> | consensus)");
  analyze->add_option("--compare", anl_compare, "two or more selectors to test pairwise")
      ->expected(-1);
  auto* ps_opt = analyze->add_flag("--per-sentence-counts", anl_per_sentence,
                                   "count acts per sentence, not per turn");
  auto* zf_opt = analyze->add_flag("--zero-fill", anl_zero_fill,
                                   "include motive-free episodes as zero rows");
  analyze->callback([&] {
    g.load_config();
    rc = cmd_analyze(g, anl_corpus, anl_files, anl_source, anl_compare, anl_per_sentence,
                     anl_zero_fill, ps_opt->count() > 0, zf_opt->count() > 0);
  });

  // report
  auto* report = app.add_subcommand("report", "bundle produced artifacts into one report");
  std::vector<std::string> rep_in;
  std::string rep_title = "Moderation analysis";
  report->add_option("--in", rep_in, "artifact directories (default: --out)")->expected(-1);
  report->add_option("--title", rep_title, "report title");
  report->callback([&] { g.load_config(); rc = cmd_report(g, rep_in, rep_title); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
