#include "ssm/ddm.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ssm/math.hpp"
#include "ssm/rng.hpp"

namespace ssm {

namespace ddm_series {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double small_time_terms(double u, double eps) {
  const double bound = 2.0 * std::sqrt(2.0 * kPi * u) * eps;
  if (bound < 1.0) {
    return std::max(2.0 + std::sqrt(-2.0 * u * std::log(bound)), std::sqrt(u) + 1.0);
  }
  return 2.0;
}

double large_time_terms(double u, double eps) {
  const double floor_terms = 1.0 / (kPi * std::sqrt(u));
  const double bound = kPi * u * eps;
  if (bound < 1.0) {
    return std::max(std::sqrt(-2.0 * std::log(bound) / (kPi * kPi * u)), floor_terms);
  }
  return floor_terms;
}

double log_small_time(double u, double w, double eps) {
  const double terms = std::ceil(small_time_terms(u, eps));
  const int k_lo = -static_cast<int>(std::floor((terms - 1.0) / 2.0));
  const int k_hi = static_cast<int>(std::ceil((terms - 1.0) / 2.0));
  // Every term carries exp(-w^2 / 2u); the k = 0 term is the largest.
  double sum = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double x = w + 2.0 * k;
    sum += x * std::exp(-2.0 * k * (w + k) / u);
  }
  if (!(sum > 0.0)) return kNegInf;
  return -0.5 * std::log(2.0 * kPi) - 1.5 * std::log(u) - w * w / (2.0 * u) + std::log(sum);
}

double log_large_time(double u, double w, double eps) {
  const int terms = static_cast<int>(std::ceil(large_time_terms(u, eps)));
  // Factor out the k = 1 decay exp(-pi^2 u / 2).
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    sum += k * std::exp(-(static_cast<double>(k) * k - 1.0) * kPi * kPi * u / 2.0) *
           std::sin(k * kPi * w);
  }
  if (!(sum > 0.0)) return kNegInf;
  return std::log(kPi) - kPi * kPi * u / 2.0 + std::log(sum);
}

double log_standard_density(double u, double w, double eps) {
  const bool small_first = small_time_terms(u, eps) <= large_time_terms(u, eps);
  double value = small_first ? log_small_time(u, w, eps) : log_large_time(u, w, eps);
  if (value == kNegInf) {
    value = small_first ? log_large_time(u, w, eps) : log_small_time(u, w, eps);
  }
  return value;
}

}  // namespace ddm_series

namespace {

void require_ddm(const DDMParams& p, int choice) {
  require_valid(p);
  if (choice != 1 && choice != 2) {
    throw DomainError("DDM choice must be 1 (upper) or 2 (lower), got " + std::to_string(choice));
  }
}

// First exit of (0, alpha) starting at x. Returns elapsed time and boundary.
struct Exit {
  double time;
  int choice;
};

Exit simulate_exit(const DDMParams& p, double dt, Rng& rng, std::size_t max_steps) {
  const double drift_step = p.nu * dt;
  const double noise_scale = std::sqrt(dt);
  double x = p.z * p.alpha;
  for (std::size_t i = 0; i < max_steps; ++i) {
    const double next = x + drift_step + noise_scale * rng.normal();
    if (next >= p.alpha) return {(i + (p.alpha - x) / (next - x)) * dt, 1};
    if (next <= 0.0) return {(i + x / (x - next)) * dt, 2};
    x = next;
  }
  throw NumericError("DDM path did not reach a boundary within " + std::to_string(max_steps) +
                     " steps");
}

}  // namespace

Dataset ddm_sample(const DDMParams& p, std::size_t n, std::uint64_t seed, double dt,
                   unsigned threads) {
  require_valid(p);
  if (!(dt > 0.0)) throw DomainError("time step dt must be positive");
  Dataset ds;
  ds.trials.resize(n);
  ds.meta.seed = seed;
  ds.meta.generator = ModelSpec{p};
  const std::size_t n_blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_blocks(n_blocks, threads, [&](std::size_t block) {
    Rng rng = substream(seed, block);
    const std::size_t end = std::min(n, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      const auto exit = simulate_exit(p, dt, rng, kDefaultMaxSteps);
      ds.trials[i] = {exit.choice, p.tau + exit.time};
    }
  });
  return ds;
}

double ddm_logpdf(const DDMParams& p, int choice, double t) {
  require_ddm(p, choice);
  const double s = t - p.tau;
  if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
  if (std::isinf(s)) return -std::numeric_limits<double>::infinity();
  // The upper-boundary density is the lower-boundary density of the
  // reflected process (nu -> -nu, z -> 1 - z).
  const double v = choice == 2 ? p.nu : -p.nu;
  const double w = choice == 2 ? p.z : 1.0 - p.z;
  const double u = s / (p.alpha * p.alpha);
  return -2.0 * std::log(p.alpha) - v * p.alpha * w - v * v * s / 2.0 +
         ddm_series::log_standard_density(u, w, kDdmSeriesTolerance);
}

double ddm_pdf(const DDMParams& p, int choice, double t) {
  return std::exp(ddm_logpdf(p, choice, t));
}

double ddm_cdf(const DDMParams& p, int choice, double t) {
  require_ddm(p, choice);
  if (!(t > p.tau)) return 0.0;
  const auto density = [&](double x) { return ddm_pdf(p, choice, x); };
  const double value =
      math::integrate_geometric(density, p.tau, t, 0.05 * p.alpha * p.alpha, 1e-11);
  return std::min(value, ddm_choice_prob(p, choice));
}

double ddm_choice_prob(const DDMParams& p, int choice) {
  require_ddm(p, choice);
  // Lower-boundary probability of the (possibly reflected) process, so the
  // complement is never formed by subtraction:
  //   P(lower) = 1 - (1 - e^{-x w}) / (1 - e^{-x}),  x = 2 v alpha.
  const double v = choice == 2 ? p.nu : -p.nu;
  const double w = choice == 2 ? p.z : 1.0 - p.z;
  const double x = 2.0 * v * p.alpha;
  if (x == 0.0) return 1.0 - w;
  if (x > 0.0) {
    // e^{-x w} (1 - e^{-x(1-w)}) / (1 - e^{-x})
    return std::exp(-x * w) * (-std::expm1(-x * (1.0 - w))) / (-std::expm1(-x));
  }
  // x < 0: (1 - e^{-y(1-w)}) / (1 - e^{-y}) with y = -x.
  const double y = -x;
  return std::expm1(-y * (1.0 - w)) / std::expm1(-y);
}

Trace ddm_trace(const DDMParams& p, double dt, std::uint64_t seed, std::size_t max_steps) {
  require_valid(p);
  if (!(dt > 0.0)) throw DomainError("time step dt must be positive");
  Rng rng = seeded_rng(seed);
  Trace trace;
  trace.thresholds = {p.alpha, 0.0};
  trace.paths.resize(1);
  auto& path = trace.paths[0];
  double x = p.z * p.alpha;
  trace.t.push_back(p.tau);
  path.push_back(x);
  const double noise_scale = std::sqrt(dt);
  for (std::size_t i = 0; i < max_steps; ++i) {
    const double next = x + p.nu * dt + noise_scale * rng.normal();
    if (next >= p.alpha || next <= 0.0) {
      const double boundary = next >= p.alpha ? p.alpha : 0.0;
      const double frac = (boundary - x) / (next - x);
      trace.winner = next >= p.alpha ? 1 : 2;
      trace.crossing_time = p.tau + (i + frac) * dt;
      if (trace.crossing_time > trace.t.back()) {
        trace.t.push_back(trace.crossing_time);
        path.push_back(boundary);
      } else {
        path.back() = boundary;
      }
      return trace;
    }
    x = next;
    trace.t.push_back(p.tau + (i + 1) * dt);
    path.push_back(x);
  }
  throw NumericError("DDM trace did not reach a boundary within " + std::to_string(max_steps) +
                     " steps");
}

}  // namespace ssm
