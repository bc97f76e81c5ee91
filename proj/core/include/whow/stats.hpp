#pragma once

#include <optional>
#include <vector>

namespace whow {

// Two-sided p-value for |T| >= |t| with T ~ Student's t on df degrees of
// freedom, via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double df);

enum class LargerSide { neither, a, b };
enum class TestStatus { ok, exact_separation, not_testable };

struct WelchResult {
  TestStatus status = TestStatus::ok;
  std::optional<double> p;  // empty iff not_testable
  double t = 0.0;
  double df = 0.0;
  LargerSide larger = LargerSide::neither;
  bool significant = false;  // p <= alpha, flag on the larger-mean side
};

// Welch's two-sample t-test (unequal variances, Welch-Satterthwaite df),
// two-sided. Degenerate handling: both samples zero-variance with equal
// means -> p = 1; with different means -> exact separation, p = 0 and the
// larger side is flagged. Fewer than 2 values on either side -> not_testable.
WelchResult cross_corpus_test(const std::vector<double>& samples_a,
                              const std::vector<double>& samples_b,
                              double alpha = 0.05);

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

}  // namespace whow
