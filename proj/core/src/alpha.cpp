#include <map>
#include <set>
#include <stdexcept>

#include "whow/aggregate.hpp"

namespace whow {

double krippendorff_alpha(const std::vector<std::vector<std::optional<int>>>& units,
                          AlphaLevel level) {
  (void)level;  // binary data is two-value nominal; the metric is the same

  // Coincidence matrix: each ordered pair of values within a unit adds
  // 1/(m_u - 1), so every unit contributes m_u pairable values in total.
  std::map<int, std::map<int, double>> o;
  std::set<int> values;
  int usable_units = 0;
  for (const auto& unit : units) {
    std::vector<int> present;
    for (const auto& v : unit)
      if (v.has_value()) present.push_back(*v);
    const size_t m = present.size();
    if (m < 2) continue;
    ++usable_units;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (size_t i = 0; i < m; ++i) {
      values.insert(present[i]);
      for (size_t j = 0; j < m; ++j)
        if (i != j) o[present[i]][present[j]] += w;
    }
  }
  if (usable_units == 0)
    throw std::invalid_argument("alpha: no unit has two or more values");
  if (values.size() < 2) throw DegenerateAgreement();

  std::map<int, double> n_c;
  double n = 0;
  for (int c : values) {
    double row = 0;
    for (int k : values) row += o[c][k];
    n_c[c] = row;
    n += row;
  }

  double observed_off = 0;   // sum of o_ck over c != k
  double expected_off = 0;   // sum of n_c * n_k over c != k
  for (int c : values)
    for (int k : values) {
      if (c == k) continue;
      observed_off += o[c][k];
      expected_off += n_c[c] * n_c[k];
    }
  if (expected_off <= 0) throw DegenerateAgreement();
  return 1.0 - (n - 1.0) * observed_off / expected_off;
}

AlphaReport agreement_report(const std::vector<Annotation>& annotations,
                             const std::vector<Dimension>& dims) {
  std::set<SentenceKey> keys;
  std::set<std::string> annotators;
  for (const auto& a : annotations) {
    keys.insert(a.key);
    annotators.insert(a.annotator);
  }

  AlphaReport report;
  report.unit_count = static_cast<int>(keys.size());
  report.annotator_count = static_cast<int>(annotators.size());

  std::map<SentenceKey, int> key_index;
  std::map<std::string, int> annotator_index;
  for (const auto& k : keys) key_index.emplace(k, static_cast<int>(key_index.size()));
  for (const auto& a : annotators)
    annotator_index.emplace(a, static_cast<int>(annotator_index.size()));

  for (Dimension dim : dims) {
    std::map<std::string, int> code_of;  // TS labels -> dense codes
    auto encode = [&](const Annotation& a) -> int {
      switch (dim) {
        case Dimension::DA: return static_cast<int>(a.act);
        case Dimension::IM: return a.motives.informational ? 1 : 0;
        case Dimension::CM: return a.motives.coordinative ? 1 : 0;
        case Dimension::SM: return a.motives.social ? 1 : 0;
        case Dimension::TS: break;
      }
      auto [it, unused] = code_of.emplace(a.target.canonical(),
                                          static_cast<int>(code_of.size()));
      return it->second;
    };

    std::vector<std::vector<std::optional<int>>> units(
        keys.size(), std::vector<std::optional<int>>(annotators.size()));
    for (const auto& a : annotations)
      units[key_index.at(a.key)][annotator_index.at(a.annotator)] = encode(a);

    try {
      report.alpha[dim] = krippendorff_alpha(
          units, dim == Dimension::DA || dim == Dimension::TS ? AlphaLevel::nominal
                                                              : AlphaLevel::binary);
    } catch (const DegenerateAgreement&) {
      report.alpha[dim] = std::nullopt;
    }
  }
  return report;
}

}  // namespace whow
