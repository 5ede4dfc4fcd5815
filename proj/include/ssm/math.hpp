// Scalar helpers for the standard normal and log-space arithmetic.
#pragma once

#include <functional>
#include <numbers>

namespace ssm::math {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398613974736378;

double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);
/// log Phi(x), accurate far into the lower tail.
double normal_log_cdf(double x);
double normal_quantile(double p);

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

/// Adaptive Gauss-Kronrod integral of f over [a, b]; b may be +inf.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

/// integrate() over [a, b] split at a + w, a + 2w, a + 4w, ...; suited to
/// densities concentrated near a on long (or infinite) ranges.
double integrate_geometric(const std::function<double(double)>& f, double a, double b,
                           double first_width, double rel_tol = 1e-10);

}  // namespace ssm::math
