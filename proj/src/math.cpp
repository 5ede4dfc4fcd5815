#include "ssm/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ssm::math {

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_log_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic Mills-ratio expansion; relative error < 2e-10 here.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return normal_log_pdf(x) - std::log(-x) + std::log(series);
}

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  return Rule::integrate(f, a, b, 15, rel_tol);
}

double integrate_geometric(const std::function<double(double)>& f, double a, double b,
                           double first_width, double rel_tol) {
  double total = 0.0;
  double lo = a;
  double width = first_width;
  while (lo < b) {
    if (std::isinf(b) && width > 1e3) return total + integrate(f, lo, b, rel_tol);
    const double hi = std::min(b, lo + width);
    total += integrate(f, lo, hi, rel_tol);
    lo = hi;
    width *= 2.0;
  }
  return total;
}

}  // namespace ssm::math
