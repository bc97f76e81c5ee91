#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "whow/aggregate.hpp"
#include "whow/schema.hpp"

namespace whow {

// Class universe for multiclass macro averaging. The default averages over
// every label observed in gold or predictions (zero-F1 classes included);
// gold_only restricts to labels with gold support.
enum class ClassUniverse { gold_union_pred, gold_only };

struct ClassMetrics {
  std::string label;
  double precision = 0, recall = 0, f1 = 0;
  int support = 0;  // gold count
};

struct DimensionEval {
  double macro_f1 = 0;
  std::vector<ClassMetrics> per_class;
};

struct EvalReport {
  std::map<Dimension, DimensionEval> dims;
};

// Pairs gold and predictions by sentence key. Throws std::invalid_argument
// when a gold key has no prediction. Motives are scored as binary
// {true,false}; TS classes are canonical label strings.
double macro_f1(const std::vector<Annotation>& gold,
                const std::vector<Annotation>& pred, Dimension dimension,
                ClassUniverse universe = ClassUniverse::gold_union_pred);

DimensionEval evaluate_dimension(const std::vector<Annotation>& gold,
                                 const std::vector<Annotation>& pred,
                                 Dimension dimension,
                                 ClassUniverse universe = ClassUniverse::gold_union_pred);

EvalReport evaluate(const std::vector<Annotation>& gold,
                    const std::vector<Annotation>& pred,
                    const std::vector<Dimension>& dims,
                    ClassUniverse universe = ClassUniverse::gold_union_pred);

struct ConfusionMatrix {
  Dimension dimension = Dimension::DA;
  std::vector<std::string> labels;            // gold == pred axis
  std::vector<std::vector<int>> counts;       // [gold][pred]
  std::vector<std::vector<double>> row_normalized() const;
  int total() const;
};

ConfusionMatrix confusion(const std::vector<Annotation>& gold,
                          const std::vector<Annotation>& pred, Dimension dimension);

// Mean macro-F1 of uniform-random predictions over the dimension's label
// space (TS: the episode's target vocabulary), one draw sequence per seed.
// Uses std::mt19937 with rejection sampling, so results are bit-reproducible.
double random_baseline(const std::vector<Annotation>& gold, const Corpus& corpus,
                       Dimension dimension,
                       const std::vector<unsigned>& seeds = {0, 1, 2, 3, 4});

// Krippendorff's alpha treating {gold, model} as two annotators.
// Returns nullopt when agreement is degenerate (all values identical).
std::optional<double> model_human_alpha(const std::vector<Annotation>& gold,
                                        const std::vector<Annotation>& pred,
                                        Dimension dimension);

}  // namespace whow
