#include "whow/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "whow/version.hpp"

namespace whow {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kActHeaders[] = {"prob", "conf", "inst", "inte", "supp", "util"};
constexpr const char* kMotiveHeaders[] = {"IM", "CM", "SM"};

std::string md_cell(const std::optional<double>& v) {
  return v ? format_fixed(*v) : "-";
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? format_full(*v) : "";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string star(const WelchResult& w, bool is_side_a) {
  if (!w.significant) return "";
  if (is_side_a && w.larger == LargerSide::a) return "*";
  if (!is_side_a && w.larger == LargerSide::b) return "*";
  return "";
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string format_fixed(double x, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, x);
  return buf;
}

std::string format_full(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["tool"] = tool;
  j["version"] = version.empty() ? kVersion : version;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = std::move(cfg);
  ordered_json in = ordered_json::object();
  for (const auto& [path, hash] : inputs) in[path] = hash;
  j["inputs"] = std::move(in);
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

// --- agreement -----------------------------------------------------------

std::string markdown_agreement(const AlphaReport& report) {
  std::ostringstream out;
  out << "| dimension | alpha |\n|---|---|\n";
  for (Dimension d : kAllDimensions) {
    auto it = report.alpha.find(d);
    if (it == report.alpha.end()) continue;
    out << "| " << to_string(d) << " | "
        << (it->second ? format_fixed(*it->second) : "degenerate") << " |\n";
  }
  out << "\n" << report.unit_count << " units, " << report.annotator_count
      << " annotators.\n";
  return out.str();
}

std::string csv_agreement(const AlphaReport& report) {
  std::ostringstream out;
  out << "dimension,alpha\n";
  for (Dimension d : kAllDimensions) {
    auto it = report.alpha.find(d);
    if (it == report.alpha.end()) continue;
    out << to_string(d) << "," << csv_cell(it->second) << "\n";
  }
  return out.str();
}

// --- eval ------------------------------------------------------------------

std::string markdown_eval(const EvalReport& report) {
  std::ostringstream out;
  out << "| dimension | macro-F1 |\n|---|---|\n";
  for (Dimension d : kAllDimensions) {
    auto it = report.dims.find(d);
    if (it == report.dims.end()) continue;
    out << "| " << to_string(d) << " | " << format_fixed(it->second.macro_f1) << " |\n";
  }
  for (Dimension d : kAllDimensions) {
    auto it = report.dims.find(d);
    if (it == report.dims.end()) continue;
    out << "\n### " << to_string(d)
        << "\n\n| class | precision | recall | F1 | support |\n|---|---|---|---|---|\n";
    for (const auto& c : it->second.per_class)
      out << "| " << c.label << " | " << format_fixed(c.precision) << " | "
          << format_fixed(c.recall) << " | " << format_fixed(c.f1) << " | " << c.support
          << " |\n";
  }
  return out.str();
}

std::string csv_eval(const EvalReport& report) {
  std::ostringstream out;
  out << "dimension,class,precision,recall,f1,support\n";
  for (Dimension d : kAllDimensions) {
    auto it = report.dims.find(d);
    if (it == report.dims.end()) continue;
    out << to_string(d) << ",(macro),,," << format_full(it->second.macro_f1) << ",\n";
    for (const auto& c : it->second.per_class)
      out << to_string(d) << "," << csv_field(c.label) << ","
          << format_full(c.precision) << "," << format_full(c.recall) << ","
          << format_full(c.f1) << "," << c.support << "\n";
  }
  return out.str();
}

// --- confusion -----------------------------------------------------------------

std::string markdown_confusion(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "| gold \\ pred |";
  for (const auto& l : m.labels) out << " " << l << " |";
  out << "\n|---|";
  for (size_t i = 0; i < m.labels.size(); ++i) out << "---|";
  out << "\n";
  for (size_t g = 0; g < m.labels.size(); ++g) {
    out << "| " << m.labels[g] << " |";
    for (size_t p = 0; p < m.labels.size(); ++p) out << " " << m.counts[g][p] << " |";
    out << "\n";
  }
  return out.str();
}

std::string csv_confusion(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "gold";
  for (const auto& l : m.labels) out << "," << csv_field(l);
  out << "\n";
  for (size_t g = 0; g < m.labels.size(); ++g) {
    out << csv_field(m.labels[g]);
    for (size_t p = 0; p < m.labels.size(); ++p) out << "," << m.counts[g][p];
    out << "\n";
  }
  return out.str();
}

// --- conditional table -----------------------------------------------------------

std::string markdown_conditional(const ConditionalTable& t) {
  std::ostringstream out;
  out << "| motive |";
  for (const char* act : kActHeaders) out << " " << act << " |";
  out << " p(m) |\n|---|";
  for (int i = 0; i < kDialogueActCount + 1; ++i) out << "---|";
  out << "\n";
  for (int m = 0; m < ConditionalTable::kMotives; ++m) {
    out << "| " << kMotiveHeaders[m] << " |";
    for (int d = 0; d < kDialogueActCount; ++d) out << " " << md_cell(t.cells[m][d]) << " |";
    out << " " << md_cell(t.p_motive[m]) << " |\n";
  }
  out << "| p(d) |";
  for (int d = 0; d < kDialogueActCount; ++d) out << " " << md_cell(t.p_act[d]) << " |";
  out << " |\n";
  out << "\n" << t.episode_count << " episodes, mean "
      << format_fixed(t.mean_sentences_per_episode, 1) << " annotated sentences each.\n";
  return out.str();
}

std::string csv_conditional(const ConditionalTable& t) {
  std::ostringstream out;
  out << "row";
  for (const char* act : kActHeaders) out << "," << act;
  out << ",p(m)\n";
  for (int m = 0; m < ConditionalTable::kMotives; ++m) {
    out << kMotiveHeaders[m];
    for (int d = 0; d < kDialogueActCount; ++d) out << "," << csv_cell(t.cells[m][d]);
    out << "," << csv_cell(t.p_motive[m]) << "\n";
  }
  out << "p(d)";
  for (int d = 0; d < kDialogueActCount; ++d) out << "," << csv_cell(t.p_act[d]);
  out << ",\n";
  return out.str();
}

// --- transitions --------------------------------------------------------------

namespace {
constexpr const char* kStateNames[] = {"moderation", "continuation", "rotation"};
}

std::string markdown_transitions(const TransitionMatrix& m) {
  std::ostringstream out;
  out << "| from \\ to |";
  for (const char* s : kStateNames) out << " " << s << " |";
  out << "\n|---|---|---|---|\n";
  for (int from = 0; from < kSpeakerStateCount; ++from) {
    out << "| " << kStateNames[from] << " |";
    for (int to = 0; to < kSpeakerStateCount; ++to) {
      if (!TransitionMatrix::possible(static_cast<SpeakerState>(from),
                                      static_cast<SpeakerState>(to)))
        out << " -- |";
      else
        out << " " << md_cell(m.probs[from][to]) << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string csv_transitions(const TransitionMatrix& m) {
  std::ostringstream out;
  out << "from,to,count,probability\n";
  for (int from = 0; from < kSpeakerStateCount; ++from)
    for (int to = 0; to < kSpeakerStateCount; ++to) {
      if (!TransitionMatrix::possible(static_cast<SpeakerState>(from),
                                      static_cast<SpeakerState>(to)))
        continue;
      out << kStateNames[from] << "," << kStateNames[to] << ","
          << format_full(m.counts[from][to]) << "," << csv_cell(m.probs[from][to])
          << "\n";
    }
  return out.str();
}

std::string markdown_act_transitions(const ActTransitionReport& r) {
  std::ostringstream out;
  out << "| act | p(continuation) | p(rotation) | continuation | rotation | "
         "episode-end |\n|---|---|---|---|---|---|\n";
  for (const auto& [act, row] : r.rows) {
    out << "| " << to_string(act) << " | " << md_cell(row.p_continuation) << " | "
        << md_cell(row.p_rotation) << " | " << row.to_continuation << " | "
        << row.to_rotation << " | " << row.episode_end << " |\n";
  }
  if (!r.unannotated.empty())
    out << "\n" << r.unannotated.size() << " unannotated sentences excluded.\n";
  return out.str();
}

std::string csv_act_transitions(const ActTransitionReport& r) {
  std::ostringstream out;
  out << "act,p_continuation,p_rotation,continuation,rotation,episode_end\n";
  for (const auto& [act, row] : r.rows)
    out << to_string(act) << "," << csv_cell(row.p_continuation) << ","
        << csv_cell(row.p_rotation) << "," << format_full(row.to_continuation) << ","
        << format_full(row.to_rotation) << "," << format_full(row.episode_end) << "\n";
  return out.str();
}

// --- who metrics ---------------------------------------------------------------

std::string markdown_who(const WhoMetrics& m) {
  std::ostringstream out;
  out << "| pro-activity | interactivity | specificity |\n|---|---|---|\n| "
      << format_fixed(m.pro_activity) << " | " << format_fixed(m.interactivity)
      << " | " << format_fixed(m.specificity) << " |\n\n"
      << m.moderator_turn_count << " annotated moderator turns";
  if (m.skipped_turns > 0) out << " (" << m.skipped_turns << " skipped, no labels)";
  out << ".\n";
  return out.str();
}

std::string csv_who(const WhoMetrics& m) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "pro_activity," << format_full(m.pro_activity) << "\n";
  out << "interactivity," << format_full(m.interactivity) << "\n";
  out << "specificity," << format_full(m.specificity) << "\n";
  out << "moderator_turns," << m.moderator_turn_count << "\n";
  out << "skipped_turns," << m.skipped_turns << "\n";
  return out.str();
}

// --- source comparison -----------------------------------------------------------

std::string markdown_comparison(const SourceComparison& c) {
  std::ostringstream out;
  out << "| row |";
  for (const char* act : kActHeaders) out << " " << act << " |";
  out << " p(m) |\n|---|";
  for (int i = 0; i < kDialogueActCount + 1; ++i) out << "---|";
  out << "\n";
  auto row_pair = [&](const char* name, const ConditionalTable& t, bool is_a) {
    for (int m = 0; m < ConditionalTable::kMotives; ++m) {
      if (std::string(name) != kMotiveHeaders[m]) continue;
      out << "| " << name << (is_a ? " (a)" : " (b)") << " |";
      for (int d = 0; d < kDialogueActCount; ++d)
        out << " " << md_cell(t.cells[m][d]) << star(c.tests.cells[m][d], is_a) << " |";
      out << " " << md_cell(t.p_motive[m]) << star(c.tests.p_motive[m], is_a) << " |\n";
    }
  };
  for (const char* m : kMotiveHeaders) {
    row_pair(m, c.table_a, true);
    row_pair(m, c.table_b, false);
  }
  for (int side = 0; side < 2; ++side) {
    const bool is_a = side == 0;
    const ConditionalTable& t = is_a ? c.table_a : c.table_b;
    out << "| p(d)" << (is_a ? " (a)" : " (b)") << " |";
    for (int d = 0; d < kDialogueActCount; ++d)
      out << " " << md_cell(t.p_act[d]) << star(c.tests.p_act[d], is_a) << " |";
    out << " |\n";
  }
  if (!c.only_in_a.empty() || !c.only_in_b.empty())
    out << "\nCoverage mismatch: " << c.only_in_a.size() << " sentences only in a, "
        << c.only_in_b.size() << " only in b.\n";
  return out.str();
}

std::string csv_comparison(const SourceComparison& c) {
  std::ostringstream out;
  out << "row,col,value_a,value_b,p,significant,larger\n";
  auto emit = [&](const std::string& row, const std::string& col,
                  const std::optional<double>& a, const std::optional<double>& b,
                  const WelchResult& w) {
    out << row << "," << col << "," << csv_cell(a) << "," << csv_cell(b) << ","
        << (w.p ? format_full(*w.p) : "") << "," << (w.significant ? "1" : "0") << ","
        << (w.larger == LargerSide::a ? "a" : w.larger == LargerSide::b ? "b" : "")
        << "\n";
  };
  for (int m = 0; m < ConditionalTable::kMotives; ++m) {
    for (int d = 0; d < kDialogueActCount; ++d)
      emit(kMotiveHeaders[m], kActHeaders[d], c.table_a.cells[m][d],
           c.table_b.cells[m][d], c.tests.cells[m][d]);
    emit(kMotiveHeaders[m], "p(m)", c.table_a.p_motive[m], c.table_b.p_motive[m],
         c.tests.p_motive[m]);
  }
  for (int d = 0; d < kDialogueActCount; ++d)
    emit("p(d)", kActHeaders[d], c.table_a.p_act[d], c.table_b.p_act[d],
         c.tests.p_act[d]);
  return out.str();
}

// --- plot JSON ---------------------------------------------------------------------

std::string plot_json_conditional(const ConditionalTable& t) {
  ordered_json j;
  j["rows"] = ordered_json::array({"IM", "CM", "SM", "p(d)"});
  auto cols = ordered_json::array();
  for (const char* act : kActHeaders) cols.push_back(act);
  cols.push_back("p(m)");
  j["cols"] = std::move(cols);
  auto values = ordered_json::array();
  auto cell = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  for (int m = 0; m < ConditionalTable::kMotives; ++m) {
    auto row = ordered_json::array();
    for (int d = 0; d < kDialogueActCount; ++d) row.push_back(cell(t.cells[m][d]));
    row.push_back(cell(t.p_motive[m]));
    values.push_back(std::move(row));
  }
  auto marginal = ordered_json::array();
  for (int d = 0; d < kDialogueActCount; ++d) marginal.push_back(cell(t.p_act[d]));
  marginal.push_back(nullptr);
  values.push_back(std::move(marginal));
  j["values"] = std::move(values);
  return j.dump(2) + "\n";
}

std::string plot_json_transitions(const TransitionMatrix& m) {
  ordered_json j;
  j["states"] = ordered_json::array({"moderation", "continuation", "rotation"});
  auto counts = ordered_json::array();
  auto probs = ordered_json::array();
  for (int from = 0; from < kSpeakerStateCount; ++from) {
    auto count_row = ordered_json::array();
    auto prob_row = ordered_json::array();
    for (int to = 0; to < kSpeakerStateCount; ++to) {
      count_row.push_back(m.counts[from][to]);
      prob_row.push_back(m.probs[from][to] ? ordered_json(*m.probs[from][to])
                                           : ordered_json(nullptr));
    }
    counts.push_back(std::move(count_row));
    probs.push_back(std::move(prob_row));
  }
  j["counts"] = std::move(counts);
  j["probs"] = std::move(probs);
  return j.dump(2) + "\n";
}

std::string plot_json_act_transitions(const ActTransitionReport& r) {
  ordered_json j;
  auto acts = ordered_json::array();
  auto continuation = ordered_json::array();
  auto rotation = ordered_json::array();
  auto cell = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  for (const auto& [act, row] : r.rows) {
    acts.push_back(to_string(act));
    continuation.push_back(cell(row.p_continuation));
    rotation.push_back(cell(row.p_rotation));
  }
  j["acts"] = std::move(acts);
  j["series"] = ordered_json::array({"continuation", "rotation"});
  j["values"] = ordered_json::array({std::move(continuation), std::move(rotation)});
  return j.dump(2) + "\n";
}

}  // namespace whow
