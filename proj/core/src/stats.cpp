#include "whow/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace whow {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs two values");
  const double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

namespace {

// Continued-fraction evaluation of the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) throw std::invalid_argument("t distribution needs df > 0");
  const double x = df / (df + t * t);
  return reg_inc_beta(df / 2.0, 0.5, x);
}

WelchResult cross_corpus_test(const std::vector<double>& samples_a,
                              const std::vector<double>& samples_b, double alpha) {
  WelchResult r;
  if (samples_a.size() < 2 || samples_b.size() < 2) {
    r.status = TestStatus::not_testable;
    return r;
  }
  const double na = static_cast<double>(samples_a.size());
  const double nb = static_cast<double>(samples_b.size());
  const double ma = mean(samples_a), mb = mean(samples_b);
  const double va = sample_variance(samples_a), vb = sample_variance(samples_b);

  if (ma > mb) r.larger = LargerSide::a;
  if (mb > ma) r.larger = LargerSide::b;

  // Detect constant samples by comparing elements, not via the computed
  // variance: summing three identical doubles can round to a nonzero
  // variance on the order of 1e-32.
  auto constant_value = [](const std::vector<double>& xs) -> std::optional<double> {
    for (double x : xs)
      if (x != xs.front()) return std::nullopt;
    return xs.front();
  };
  const auto ca = constant_value(samples_a);
  const auto cb = constant_value(samples_b);
  if (ca && cb) {
    if (*ca == *cb) {
      r.larger = LargerSide::neither;
      r.p = 1.0;
      return r;
    }
    // No within-group spread at all: the difference is exact.
    r.status = TestStatus::exact_separation;
    r.larger = *ca > *cb ? LargerSide::a : LargerSide::b;
    r.p = 0.0;
    r.significant = true;
    return r;
  }

  const double sea = va / na, seb = vb / nb;
  r.t = (ma - mb) / std::sqrt(sea + seb);
  r.df = (sea + seb) * (sea + seb) /
         (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
  r.p = student_t_two_sided_p(r.t, r.df);
  r.significant = *r.p <= alpha && r.larger != LargerSide::neither;
  return r;
}

}  // namespace whow
