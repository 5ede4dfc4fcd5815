#include "ssm/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssm/math.hpp"

namespace ssm {

namespace {

constexpr double kMinDecisionTime = 1e-12;
constexpr double kPointStartRatio = 1e-6;

void require_rdm(const RDMParams& p, int choice) {
  require_valid(p);
  if (choice < 1 || static_cast<std::size_t>(choice) > p.nu.size()) {
    throw DomainError("choice " + std::to_string(choice) + " out of range 1.." +
                      std::to_string(p.nu.size()));
  }
}

bool point_start(const RDMParams& p) { return p.A < kPointStartRatio * p.threshold(); }

// exp(2 v d) * Phi(-(v s + d) / sqrt(s)), the reflected term of the Wald CDF.
double reflected_term(double d, double v, double s) {
  const double arg = -(v * s + d) / std::sqrt(s);
  return std::exp(2.0 * v * d + math::normal_log_cdf(arg));
}

// Antiderivative in distance d of the Wald CDF.
double wald_cdf_antiderivative(double d, double v, double s) {
  const double root = std::sqrt(s);
  const double y = (d - v * s) / root;
  return root * (y * math::normal_cdf(-y) - math::normal_pdf(y)) +
         (reflected_term(d, v, s) + math::normal_cdf(y)) / (2.0 * v);
}

}  // namespace

double wald_pdf(double d, double v, double s) {
  if (s <= kMinDecisionTime) return 0.0;
  const double gap = d - v * s;
  return d / std::sqrt(2.0 * std::numbers::pi * s * s * s) * std::exp(-gap * gap / (2.0 * s));
}

double wald_cdf(double d, double v, double s) {
  if (s <= kMinDecisionTime) return 0.0;
  const double value = math::normal_cdf((v * s - d) / std::sqrt(s)) + reflected_term(d, v, s);
  return std::clamp(value, 0.0, 1.0);
}

double rdm_accumulator_pdf(const RDMParams& p, double drift, double s) {
  if (s <= kMinDecisionTime) return 0.0;
  if (point_start(p)) return wald_pdf(p.threshold(), drift, s);
  const double root = std::sqrt(s);
  const double near = (p.k - drift * s) / root;
  const double far = (p.threshold() - drift * s) / root;
  const double value = (drift * (math::normal_cdf(far) - math::normal_cdf(near)) -
                        (math::normal_pdf(far) - math::normal_pdf(near)) / root) /
                       p.A;
  return std::max(value, 0.0);
}

double rdm_accumulator_cdf(const RDMParams& p, double drift, double s) {
  if (s <= kMinDecisionTime) return 0.0;
  if (point_start(p)) return wald_cdf(p.threshold(), drift, s);
  const double value = (wald_cdf_antiderivative(p.threshold(), drift, s) -
                        wald_cdf_antiderivative(p.k, drift, s)) /
                       p.A;
  return std::clamp(value, 0.0, 1.0);
}

double rdm_logpdf(const RDMParams& p, int choice, double t) {
  require_rdm(p, choice);
  const double s = t - p.tau;
  const double g = rdm_accumulator_pdf(p, p.nu[choice - 1], s);
  if (!(g > 0.0)) return -std::numeric_limits<double>::infinity();
  double log_density = std::log(g);
  for (std::size_t j = 0; j < p.nu.size(); ++j) {
    if (static_cast<int>(j) == choice - 1) continue;
    log_density += std::log(1.0 - rdm_accumulator_cdf(p, p.nu[j], s));
  }
  return log_density;
}

double rdm_pdf(const RDMParams& p, int choice, double t) {
  return std::exp(rdm_logpdf(p, choice, t));
}

double sample_inverse_gaussian(double mu, double lambda, Rng& rng) {
  const double n = rng.normal();
  const double my = mu * n * n;
  // mu + mu^2 y / (2 lambda) - mu / (2 lambda) sqrt(4 mu lambda y + mu^2 y^2),
  // rearranged to avoid cancellation when mu y >> lambda.
  const double x = mu * (1.0 - 2.0 * my / (my + std::sqrt(my * (4.0 * lambda + my))));
  if (rng.uniform() <= mu / (mu + x)) return x;
  return mu * mu / x;
}

Dataset rdm_sample(const RDMParams& p, std::size_t n, std::uint64_t seed, unsigned threads) {
  require_valid(p);
  Dataset ds;
  ds.trials.resize(n);
  ds.meta.seed = seed;
  ds.meta.generator = ModelSpec{p};
  const double b = p.threshold();
  const std::size_t n_blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_blocks(n_blocks, threads, [&](std::size_t block) {
    Rng rng = substream(seed, block);
    const std::size_t end = std::min(n, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int winner = 1;
      for (std::size_t j = 0; j < p.nu.size(); ++j) {
        const double distance = b - rng.uniform(0.0, p.A);
        const double finish = sample_inverse_gaussian(distance / p.nu[j], distance * distance, rng);
        if (finish < best) {
          best = finish;
          winner = static_cast<int>(j) + 1;
        }
      }
      ds.trials[i] = {winner, p.tau + best};
    }
  });
  return ds;
}

Trace rdm_trace(const RDMParams& p, double dt, std::uint64_t seed, std::size_t max_steps) {
  require_valid(p);
  if (!(dt > 0.0)) throw DomainError("time step dt must be positive");
  Rng rng = seeded_rng(seed);
  const std::size_t n_acc = p.nu.size();
  const double b = p.threshold();
  const double noise_scale = std::sqrt(dt);

  Trace trace;
  trace.thresholds.assign(n_acc, b);
  trace.paths.resize(n_acc);
  std::vector<double> x(n_acc), next(n_acc);
  for (std::size_t i = 0; i < n_acc; ++i) {
    x[i] = rng.uniform(0.0, p.A);
    trace.paths[i].push_back(x[i]);
  }
  trace.t.push_back(p.tau);

  for (std::size_t step = 0; step < max_steps; ++step) {
    double first = std::numeric_limits<double>::infinity();
    int winner = 0;
    for (std::size_t i = 0; i < n_acc; ++i) {
      next[i] = x[i] + p.nu[i] * dt + noise_scale * rng.normal();
      if (next[i] >= b) {
        const double frac = (b - x[i]) / (next[i] - x[i]);
        if (frac < first) {
          first = frac;
          winner = static_cast<int>(i) + 1;
        }
      }
    }
    if (winner != 0) {
      trace.winner = winner;
      trace.crossing_time = p.tau + (step + first) * dt;
      trace.t.push_back(trace.crossing_time);
      for (std::size_t i = 0; i < n_acc; ++i) {
        trace.paths[i].push_back(x[i] + first * (next[i] - x[i]));
      }
      trace.paths[winner - 1].back() = b;
      return trace;
    }
    x.swap(next);
    trace.t.push_back(p.tau + (step + 1) * dt);
    for (std::size_t i = 0; i < n_acc; ++i) trace.paths[i].push_back(x[i]);
  }
  throw NumericError("RDM trace did not reach the threshold within " +
                     std::to_string(max_steps) + " steps");
}

}  // namespace ssm
