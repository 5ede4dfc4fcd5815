#include "ssm/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssm/core.hpp"

namespace ssm {

namespace {

constexpr double kRegularization = 1e-3;
constexpr double kInitialVariance = 0.01;

// Lower Cholesky factor of a symmetric positive-definite matrix; returns
// false if the matrix is not numerically positive definite.
bool cholesky(const std::vector<double>& a, std::size_t d, std::vector<double>& l) {
  l.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) sum -= l[i * d + k] * l[j * d + k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        l[i * d + i] = std::sqrt(sum);
      } else {
        l[i * d + j] = sum / l[j * d + j];
      }
    }
  }
  return true;
}

struct Window {
  std::size_t begin;
  std::size_t end;
};

std::vector<Window> slow_windows(std::size_t warmup) {
  std::vector<Window> windows;
  if (warmup < 20) return windows;
  const std::size_t init_buffer = warmup * 15 / 100;
  const std::size_t term_buffer = warmup / 10;
  const std::size_t slow_end = warmup - term_buffer;
  std::size_t begin = init_buffer;
  std::size_t size = 25;
  while (begin < slow_end) {
    std::size_t end = begin + size;
    // Fold a short remainder into the current window.
    if (end + 2 * size > slow_end) end = slow_end;
    windows.push_back({begin, std::min(end, slow_end)});
    begin = end;
    size *= 2;
  }
  return windows;
}

std::vector<double> window_covariance(const std::vector<double>& draws, std::size_t d,
                                      Window w, bool diagonal) {
  const std::size_t n = w.end - w.begin;
  std::vector<double> mean(d, 0.0), cov(d * d, 0.0);
  for (std::size_t it = w.begin; it < w.end; ++it) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += draws[it * d + j] / n;
  }
  for (std::size_t it = w.begin; it < w.end; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      const double di = draws[it * d + i] - mean[i];
      for (std::size_t j = 0; j < d; ++j) {
        if (diagonal && i != j) continue;
        cov[i * d + j] += di * (draws[it * d + j] - mean[j]) / (n - 1);
      }
    }
  }
  const double shrink = static_cast<double>(n) / (n + 5.0);
  for (auto& c : cov) c *= shrink;
  for (std::size_t i = 0; i < d; ++i) cov[i * d + i] += kRegularization * 5.0 / (n + 5.0);
  return cov;
}

}  // namespace

MetropolisRun adaptive_metropolis(const LogDensity& log_density, std::vector<double> init,
                                  const MetropolisOptions& options, Rng& rng) {
  const std::size_t d = init.size();
  if (d == 0) throw DomainError("adaptive_metropolis: empty parameter vector");
  double current_lp = log_density(init);
  if (!std::isfinite(current_lp)) {
    throw NumericError("adaptive_metropolis: initial point has non-finite log density");
  }

  const std::size_t total = options.warmup + options.samples;
  MetropolisRun run;
  run.dim = d;
  run.draws.resize(total * d);
  run.log_density.resize(total);

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) cov[i * d + i] = kInitialVariance;
  std::vector<double> chol;
  cholesky(cov, d, chol);
  const double base_log_scale = std::log(2.38 / std::sqrt(static_cast<double>(d)));
  double log_scale = base_log_scale;
  std::size_t adapt_count = 0;

  const auto windows = slow_windows(options.warmup);
  std::size_t next_window = 0;

  std::vector<double> current = std::move(init), proposal(d), noise(d);
  std::size_t warmup_accepts = 0, sampling_accepts = 0;

  const std::size_t thin = std::max<std::size_t>(1, options.thin);
  for (std::size_t it = 0; it < total; ++it) {
    const bool warming = it < options.warmup;
    for (std::size_t move = 0; move < thin; ++move) {
      const double scale = std::exp(log_scale);
      for (auto& z : noise) z = rng.normal();
      for (std::size_t i = 0; i < d; ++i) {
        double step = 0.0;
        for (std::size_t j = 0; j <= i; ++j) step += chol[i * d + j] * noise[j];
        proposal[i] = current[i] + scale * step;
      }
      const double proposal_lp = log_density(proposal);
      double accept_prob = 0.0;
      if (std::isfinite(proposal_lp)) {
        const double log_ratio = proposal_lp - current_lp;
        accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
        if (std::log(rng.uniform()) < log_ratio) {
          current.swap(proposal);
          current_lp = proposal_lp;
          (warming ? warmup_accepts : sampling_accepts)++;
        }
      }
      if (warming) {
        ++adapt_count;
        log_scale += std::pow(adapt_count + 1.0, -0.6) * (accept_prob - options.target_accept);
      }
    }
    std::copy(current.begin(), current.end(), run.draws.begin() + it * d);
    run.log_density[it] = current_lp;

    if (warming) {
      if (next_window < windows.size() && it + 1 == windows[next_window].end) {
        const Window w = windows[next_window];
        if (w.end - w.begin > d + 1) {
          auto updated = window_covariance(run.draws, d, w, next_window == 0);
          std::vector<double> updated_chol;
          if (cholesky(updated, d, updated_chol)) {
            cov = std::move(updated);
            chol = std::move(updated_chol);
            log_scale = base_log_scale;
            adapt_count = 0;
          }
        }
        ++next_window;
      }
    }
  }

  run.warmup_accept_rate =
      options.warmup ? static_cast<double>(warmup_accepts) / (options.warmup * thin) : 0.0;
  run.sampling_accept_rate =
      options.samples ? static_cast<double>(sampling_accepts) / (options.samples * thin) : 0.0;
  run.proposal_scale = std::exp(log_scale);
  run.proposal_covariance = cov;
  return run;
}

}  // namespace ssm
