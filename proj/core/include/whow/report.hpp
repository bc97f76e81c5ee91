#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "whow/aggregate.hpp"
#include "whow/analysis.hpp"
#include "whow/eval.hpp"

namespace whow {

// Writes to a sibling temp file and renames into place, so readers never see
// a partial file and a crashed run leaves no half-written output.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string format_fixed(double x, int places = 2);  // tables meant for eyes
std::string format_full(double x);                   // CSV, round-trip precision

// What produced a set of outputs: resolved config and input hashes, no
// timestamps, so a rerun over identical inputs is byte-identical.
struct RunManifest {
  std::string tool;     // e.g. "whow analyze"
  std::string version;
  std::vector<std::pair<std::string, std::string>> config;  // resolved key/values
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> sha256
  std::vector<std::string> outputs;                         // paths written
  std::string to_json() const;
};

// Each artifact renders as a markdown table (values to 2 decimals) and as
// CSV (full precision). Markdown cells use "-" for undefined values; CSV
// leaves them empty.
std::string markdown_agreement(const AlphaReport& report);
std::string csv_agreement(const AlphaReport& report);

std::string markdown_eval(const EvalReport& report);
std::string csv_eval(const EvalReport& report);

std::string markdown_confusion(const ConfusionMatrix& m);
std::string csv_confusion(const ConfusionMatrix& m);

std::string markdown_conditional(const ConditionalTable& t);
std::string csv_conditional(const ConditionalTable& t);

std::string markdown_transitions(const TransitionMatrix& m);
std::string csv_transitions(const TransitionMatrix& m);

std::string markdown_act_transitions(const ActTransitionReport& r);
std::string csv_act_transitions(const ActTransitionReport& r);

std::string markdown_who(const WhoMetrics& m);
std::string csv_who(const WhoMetrics& m);

// Side-by-side tables with significance marks from the Welch tests.
std::string markdown_comparison(const SourceComparison& c);
std::string csv_comparison(const SourceComparison& c);

// Plot-ready JSON: row/column labels plus a values matrix. The act-transition
// variant is grouped-bar shaped: one bar group per act, one series per
// successor state.
std::string plot_json_conditional(const ConditionalTable& t);
std::string plot_json_transitions(const TransitionMatrix& m);
std::string plot_json_act_transitions(const ActTransitionReport& r);

}  // namespace whow
