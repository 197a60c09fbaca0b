#include <algorithm>
#include <cmath>
#include <limits>

#include "botsift/error.hpp"
#include "botsift/evaluation.hpp"

namespace botsift {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionViolation("series must have the same length");
}

// Stirling series remainder of lgamma, for x >= 10.
double lgamma_correction(double x) {
  const double r = 1.0 / (x * x);
  return (1.0 / 12 - r * (1.0 / 360 - r * (1.0 / 1260 - r * (1.0 / 1680)))) / x;
}

// -log B(a, b). lgamma differences cancel badly once one shape is large
// (the t distribution at high df), so that case goes through Stirling.
double log_inverse_beta(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  if (big < 10) return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double ratio = (big - 0.5) * std::log1p(small / big) + small * std::log(big + small) - small +
                       lgamma_correction(big + small) - lgamma_correction(big);
  return ratio - std::lgamma(small);
}

// I_x(a, b) with y = 1 - x supplied separately so neither loses digits.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0) return 0.0;
  if (y <= 0) return 1.0;
  const double log_x = x < 0.5 ? std::log(x) : std::log1p(-y);
  const double log_y = y < 0.5 ? std::log(y) : std::log1p(-x);
  const double log_front = a * log_x + b * log_y + log_inverse_beta(a, b);
  // The direct fraction cancels when x is within a few 1/a of 1, which is
  // where the t tail lives at high df; the complement is well conditioned there.
  const bool direct = x < (a + 1.0) / (a + b + 2.0) && !(a > 100 && y * a < 4 * (b + 1));
  if (direct) return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw PreconditionViolation("incomplete beta needs positive shape parameters");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw PreconditionViolation("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double p = incomplete_beta(df / 2.0, 0.5, x, y);
  return std::min(1.0, std::max(0.0, p));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  const std::size_t n = a.size();
  if (n < 2) throw DegenerateInput("paired t-test needs at least two pairs");

  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (a[i] - b[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0) throw DegenerateInput("differences are constant; the t statistic is undefined");

  TTestResult r;
  r.degrees_of_freedom = static_cast<int>(n - 1);
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_value = student_t_two_sided_p(r.t, r.degrees_of_freedom);
  r.cohens_d = mean / sd;
  return r;
}

PearsonResult pearson(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  const std::size_t n = a.size();
  if (n < 3) throw DegenerateInput("correlation test needs at least three points");

  double ma = 0;
  double mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0;
  double saa = 0;
  double sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) throw DegenerateInput("correlation of a constant series is undefined");

  PearsonResult r;
  r.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  if (std::fabs(r.r) == 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = r.r * std::sqrt(df / (1.0 - r.r * r.r));
    r.p_value = student_t_two_sided_p(t, df);
  }
  return r;
}

StatResult compare_series(std::span<const double> a, std::span<const double> b) {
  return {paired_t_test(a, b), pearson(a, b)};
}

}  // namespace botsift
