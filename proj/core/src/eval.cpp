#include "whow/eval.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace whow {

namespace {

std::string label_of(const Annotation& a, Dimension dim) {
  switch (dim) {
    case Dimension::DA: return to_string(a.act);
    case Dimension::IM: return a.motives.informational ? "true" : "false";
    case Dimension::CM: return a.motives.coordinative ? "true" : "false";
    case Dimension::SM: return a.motives.social ? "true" : "false";
    case Dimension::TS: return a.target.canonical();
  }
  return {};
}

// (gold label, predicted label) per gold key, in key order.
std::vector<std::pair<std::string, std::string>> paired_labels(
    const std::vector<Annotation>& gold, const std::vector<Annotation>& pred,
    Dimension dim) {
  std::map<SentenceKey, const Annotation*> pred_index;
  for (const auto& p : pred) pred_index[p.key] = &p;
  std::map<SentenceKey, const Annotation*> gold_index;
  for (const auto& g : gold) gold_index[g.key] = &g;

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(gold_index.size());
  for (const auto& [key, g] : gold_index) {
    auto it = pred_index.find(key);
    if (it == pred_index.end())
      throw std::invalid_argument("no prediction for " + to_string(key));
    pairs.emplace_back(label_of(*g, dim), label_of(*it->second, dim));
  }
  return pairs;
}

DimensionEval eval_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                         Dimension dim, ClassUniverse universe) {
  if (pairs.empty()) throw std::invalid_argument("no gold annotations to score");

  std::set<std::string> classes;
  if (dim == Dimension::IM || dim == Dimension::CM || dim == Dimension::SM) {
    classes = {"true", "false"};  // binary task, both classes always in scope
  } else {
    for (const auto& [g, p] : pairs) {
      classes.insert(g);
      if (universe == ClassUniverse::gold_union_pred) classes.insert(p);
    }
  }

  const bool fixed_classes = dim == Dimension::IM || dim == Dimension::CM ||
                             dim == Dimension::SM;
  DimensionEval eval;
  double f1_sum = 0;
  int f1_classes = 0;
  for (const auto& cls : classes) {
    int tp = 0, fp = 0, fn = 0, support = 0;
    for (const auto& [g, p] : pairs) {
      if (g == cls) ++support;
      if (g == cls && p == cls) ++tp;
      if (g != cls && p == cls) ++fp;
      if (g == cls && p != cls) ++fn;
    }
    // The binary motive universe is fixed; gold_only only prunes the
    // open-ended DA/TS label spaces.
    if (universe == ClassUniverse::gold_only && support == 0 && !fixed_classes)
      continue;
    ClassMetrics m;
    m.label = cls;
    m.support = support;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    f1_sum += m.f1;
    ++f1_classes;
    eval.per_class.push_back(std::move(m));
  }
  eval.macro_f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
  return eval;
}

}  // namespace

double macro_f1(const std::vector<Annotation>& gold, const std::vector<Annotation>& pred,
                Dimension dimension, ClassUniverse universe) {
  return eval_pairs(paired_labels(gold, pred, dimension), dimension, universe).macro_f1;
}

DimensionEval evaluate_dimension(const std::vector<Annotation>& gold,
                                 const std::vector<Annotation>& pred,
                                 Dimension dimension, ClassUniverse universe) {
  return eval_pairs(paired_labels(gold, pred, dimension), dimension, universe);
}

EvalReport evaluate(const std::vector<Annotation>& gold,
                    const std::vector<Annotation>& pred,
                    const std::vector<Dimension>& dims, ClassUniverse universe) {
  EvalReport report;
  for (Dimension dim : dims)
    report.dims[dim] = evaluate_dimension(gold, pred, dim, universe);
  return report;
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const {
  std::vector<std::vector<double>> out(labels.size(),
                                       std::vector<double>(labels.size(), 0.0));
  for (size_t g = 0; g < labels.size(); ++g) {
    double row = 0;
    for (int c : counts[g]) row += c;
    if (row > 0)
      for (size_t p = 0; p < labels.size(); ++p) out[g][p] = counts[g][p] / row;
  }
  return out;
}

int ConfusionMatrix::total() const {
  int n = 0;
  for (const auto& row : counts)
    for (int c : row) n += c;
  return n;
}

ConfusionMatrix confusion(const std::vector<Annotation>& gold,
                          const std::vector<Annotation>& pred, Dimension dimension) {
  const auto pairs = paired_labels(gold, pred, dimension);
  ConfusionMatrix m;
  m.dimension = dimension;
  std::set<std::string> classes;
  for (const auto& [g, p] : pairs) {
    classes.insert(g);
    classes.insert(p);
  }
  m.labels.assign(classes.begin(), classes.end());
  auto index_of = [&](const std::string& label) {
    return std::distance(m.labels.begin(),
                         std::find(m.labels.begin(), m.labels.end(), label));
  };
  m.counts.assign(m.labels.size(), std::vector<int>(m.labels.size(), 0));
  for (const auto& [g, p] : pairs) ++m.counts[index_of(g)][index_of(p)];
  return m;
}

namespace {

// Uniform int in [0, n) by rejection, so the draw sequence is identical on
// every platform (std::uniform_int_distribution is not).
size_t uniform_index(std::mt19937& rng, size_t n) {
  const uint64_t span = 0x100000000ULL;
  const uint64_t bound = span - span % n;
  while (true) {
    uint64_t draw = rng();
    if (draw < bound) return static_cast<size_t>(draw % n);
  }
}

}  // namespace

double random_baseline(const std::vector<Annotation>& gold, const Corpus& corpus,
                       Dimension dimension, const std::vector<unsigned>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("random_baseline: no seeds");

  // Per-episode label spaces for TS; fixed spaces otherwise.
  std::map<std::string, std::vector<TargetLabel>> vocab;
  for (const auto& ep : corpus.episodes) vocab[ep.id] = target_vocabulary(ep);

  double sum = 0;
  for (unsigned seed : seeds) {
    std::mt19937 rng(seed);
    std::vector<Annotation> pred;
    pred.reserve(gold.size());
    // Draws follow gold key order so the sequence is deterministic.
    std::map<SentenceKey, const Annotation*> gold_index;
    for (const auto& g : gold) gold_index[g.key] = &g;
    for (const auto& [key, g] : gold_index) {
      Annotation p = *g;
      p.annotator = "random:" + std::to_string(seed);
      switch (dimension) {
        case Dimension::DA:
          p.act = static_cast<DialogueAct>(uniform_index(rng, kDialogueActCount));
          break;
        case Dimension::IM:
          p.motives.informational = uniform_index(rng, 2) == 1;
          break;
        case Dimension::CM:
          p.motives.coordinative = uniform_index(rng, 2) == 1;
          break;
        case Dimension::SM:
          p.motives.social = uniform_index(rng, 2) == 1;
          break;
        case Dimension::TS: {
          auto it = vocab.find(key.episode_id);
          if (it == vocab.end() || it->second.empty())
            throw std::invalid_argument("random_baseline: episode '" +
                                        key.episode_id + "' not in corpus");
          p.target = it->second[uniform_index(rng, it->second.size())];
          break;
        }
      }
      pred.push_back(std::move(p));
    }
    sum += macro_f1(gold, pred, dimension);
  }
  return sum / static_cast<double>(seeds.size());
}

std::optional<double> model_human_alpha(const std::vector<Annotation>& gold,
                                        const std::vector<Annotation>& pred,
                                        Dimension dimension) {
  const auto pairs = paired_labels(gold, pred, dimension);
  std::map<std::string, int> codes;
  auto encode = [&](const std::string& label) {
    auto [it, unused] = codes.emplace(label, static_cast<int>(codes.size()));
    return it->second;
  };
  std::vector<std::vector<std::optional<int>>> units;
  units.reserve(pairs.size());
  for (const auto& [g, p] : pairs)
    units.push_back({encode(g), encode(p)});
  try {
    return krippendorff_alpha(units);
  } catch (const DegenerateAgreement&) {
    return std::nullopt;
  }
}

}  // namespace whow
