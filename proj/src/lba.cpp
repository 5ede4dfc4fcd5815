#include "ssm/lba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssm/math.hpp"
#include "ssm/rng.hpp"

namespace ssm {

namespace {

constexpr double kMinDecisionTime = 1e-12;
constexpr int kMaxResamples = 1000;
constexpr double kNegativeMassWarning = 1e-4;

void require_lba(const LBAParams& p, int choice) {
  require_valid(p);
  if (choice < 1 || static_cast<std::size_t>(choice) > p.nu.size()) {
    throw DomainError("choice " + std::to_string(choice) + " out of range 1.." +
                      std::to_string(p.nu.size()));
  }
}

double survival(const LBAParams& p, double drift, double s) {
  return std::clamp(1.0 - lba_accumulator_cdf(p, drift, s), 0.0, 1.0);
}

}  // namespace

double lba_accumulator_pdf(const LBAParams& p, double drift, double s) {
  if (s <= kMinDecisionTime) return 0.0;
  const double b = p.threshold();
  const double scale = s * p.sigma;
  const double z_lo = (b - p.A - s * drift) / scale;
  const double z_hi = (b - s * drift) / scale;
  const double value = (-drift * math::normal_cdf(z_lo) + p.sigma * math::normal_pdf(z_lo) +
                        drift * math::normal_cdf(z_hi) - p.sigma * math::normal_pdf(z_hi)) /
                       p.A;
  return std::max(value, 0.0);
}

double lba_accumulator_cdf(const LBAParams& p, double drift, double s) {
  if (s <= kMinDecisionTime) return 0.0;
  const double b = p.threshold();
  const double scale = s * p.sigma;
  const double gap_lo = b - p.A - s * drift;
  const double gap_hi = b - s * drift;
  const double z_lo = gap_lo / scale;
  const double z_hi = gap_hi / scale;
  const double value = 1.0 + (gap_lo * math::normal_cdf(z_lo) - gap_hi * math::normal_cdf(z_hi) +
                              scale * (math::normal_pdf(z_lo) - math::normal_pdf(z_hi))) /
                                 p.A;
  return std::clamp(value, 0.0, 1.0);
}

double lba_logpdf(const LBAParams& p, int choice, double t) {
  require_lba(p, choice);
  const double s = t - p.tau;
  const double f = lba_accumulator_pdf(p, p.nu[choice - 1], s);
  if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
  double log_density = std::log(f);
  for (std::size_t j = 0; j < p.nu.size(); ++j) {
    if (static_cast<int>(j) == choice - 1) continue;
    log_density += std::log(survival(p, p.nu[j], s));
  }
  return log_density;
}

double lba_pdf(const LBAParams& p, int choice, double t) {
  return std::exp(lba_logpdf(p, choice, t));
}

double lba_all_negative_mass(const LBAParams& p) {
  double log_mass = 0.0;
  for (double v : p.nu) log_mass += math::normal_log_cdf(-v / p.sigma);
  return std::exp(log_mass);
}

namespace {

struct Race {
  std::vector<double> starts;
  std::vector<double> drifts;
  int winner = 0;
  double decision_time = 0.0;
};

void draw_race(const LBAParams& p, Rng& rng, Race& race) {
  const std::size_t n_acc = p.nu.size();
  race.starts.resize(n_acc);
  race.drifts.resize(n_acc);
  const double b = p.threshold();
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    double best = std::numeric_limits<double>::infinity();
    int winner = 0;
    for (std::size_t i = 0; i < n_acc; ++i) {
      race.starts[i] = rng.uniform(0.0, p.A);
      race.drifts[i] = rng.normal(p.nu[i], p.sigma);
      if (race.drifts[i] > 0.0) {
        const double finish = (b - race.starts[i]) / race.drifts[i];
        if (finish < best) {
          best = finish;
          winner = static_cast<int>(i) + 1;
        }
      }
    }
    if (winner != 0) {
      race.winner = winner;
      race.decision_time = best;
      return;
    }
  }
  throw NumericError("LBA sampler: " + std::to_string(kMaxResamples) +
                     " consecutive trials with every drift <= 0");
}

}  // namespace

Dataset lba_sample(const LBAParams& p, std::size_t n, std::uint64_t seed, unsigned threads) {
  require_valid(p);
  Dataset ds;
  ds.trials.resize(n);
  ds.meta.seed = seed;
  ds.meta.generator = ModelSpec{p};
  if (const double mass = lba_all_negative_mass(p); mass > kNegativeMassWarning) {
    ds.meta.warnings.push_back("LBA: probability that all drifts are <= 0 is " +
                               std::to_string(mass) +
                               "; sampler resamples these trials, density does not");
  }
  const std::size_t n_blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_blocks(n_blocks, threads, [&](std::size_t block) {
    Rng rng = substream(seed, block);
    Race race;
    const std::size_t end = std::min(n, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      draw_race(p, rng, race);
      ds.trials[i] = {race.winner, p.tau + race.decision_time};
    }
  });
  return ds;
}

Trace lba_trace(const LBAParams& p, std::uint64_t seed, std::size_t grid_points) {
  require_valid(p);
  if (grid_points < 2) throw DomainError("trace needs at least two grid points");
  Rng rng = seeded_rng(seed);
  Race race;
  draw_race(p, rng, race);

  Trace trace;
  trace.winner = race.winner;
  trace.crossing_time = p.tau + race.decision_time;
  trace.thresholds.assign(p.nu.size(), p.threshold());
  trace.t.resize(grid_points);
  const double step = race.decision_time / static_cast<double>(grid_points - 1);
  for (std::size_t g = 0; g < grid_points; ++g) trace.t[g] = p.tau + step * g;
  trace.t.back() = trace.crossing_time;
  trace.paths.assign(p.nu.size(), std::vector<double>(grid_points));
  for (std::size_t i = 0; i < p.nu.size(); ++i) {
    for (std::size_t g = 0; g < grid_points; ++g) {
      trace.paths[i][g] = race.starts[i] + race.drifts[i] * (trace.t[g] - p.tau);
    }
  }
  // The winner ends exactly on the threshold.
  trace.paths[race.winner - 1].back() = p.threshold();
  return trace;
}

}  // namespace ssm
