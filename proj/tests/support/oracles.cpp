#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double left_fold_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) return left_fold_sum(v);
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double upper_exit_probability(double nu, double alpha, double z) {
  if (nu == 0.0) return z;
  const long double a = -2.0L * nu * alpha;
  return static_cast<double>(std::expm1(a * z) / std::expm1(a));
}

CdfTable::CdfTable(const std::function<double(double)>& cdf, double lo, double hi, std::size_t n)
    : lo_(lo), step_((hi - lo) / static_cast<double>(n - 1)), values_(n) {
  for (std::size_t i = 0; i < n; ++i) values_[i] = cdf(lo + step_ * static_cast<double>(i));
}

double CdfTable::operator()(double t) const {
  if (t <= lo_) return 0.0;
  const double u = (t - lo_) / step_;
  const auto i = static_cast<std::size_t>(u);
  if (i + 1 >= values_.size()) return values_.back();
  const double frac = u - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

FluxCurves wiener_boundary_flux(double nu, double alpha, double z, double s_max, std::size_t nx,
                                double ds, double s0) {
  const double h = alpha / static_cast<double>(nx);
  std::vector<double> p(nx + 1, 0.0);
  const double mean = z * alpha + nu * s0;
  for (std::size_t i = 1; i < nx; ++i) {
    const double x = h * static_cast<double>(i);
    p[i] = std::exp(-(x - mean) * (x - mean) / (2 * s0)) / std::sqrt(2 * std::numbers::pi * s0);
  }

  // Interior operator L p_i = a p_{i-1} + b p_i + c p_{i+1}.
  const double a = 0.5 / (h * h) + nu / (2 * h);
  const double b = -1.0 / (h * h);
  const double c = 0.5 / (h * h) - nu / (2 * h);
  const double r = 0.5 * ds;

  // (I - r L) on the interior, factored once (Thomas algorithm).
  const std::size_t m = nx - 1;
  std::vector<double> cprime(m), denom(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double diag = 1.0 - r * b;
    const double lower = -r * a;
    const double upper = -r * c;
    denom[i] = i == 0 ? diag : diag - lower * cprime[i - 1];
    cprime[i] = upper / denom[i];
  }

  FluxCurves out;
  std::vector<double> rhs(m), next(nx + 1, 0.0);
  const auto record = [&](double s) {
    out.s.push_back(s);
    out.lower.push_back(0.5 * (4 * p[1] - p[2]) / (2 * h));
    out.upper.push_back(0.5 * (4 * p[nx - 1] - p[nx - 2]) / (2 * h));
  };
  double s = s0;
  record(s);
  const auto steps = static_cast<std::size_t>(std::ceil((s_max - s0) / ds));
  for (std::size_t n = 0; n < steps; ++n) {
    for (std::size_t i = 1; i < nx; ++i) {
      rhs[i - 1] = p[i] + r * (a * p[i - 1] + b * p[i] + c * p[i + 1]);
    }
    // Forward sweep then back substitution.
    const double lower = -r * a;
    rhs[0] /= denom[0];
    for (std::size_t i = 1; i < m; ++i) rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom[i];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= cprime[i] * rhs[i + 1];
    for (std::size_t i = 1; i < nx; ++i) next[i] = rhs[i - 1];
    p.swap(next);
    s += ds;
    record(s);
  }
  return out;
}

double interpolate(std::span<const double> x, std::span<const double> y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return total;
}

}  // namespace oracle
