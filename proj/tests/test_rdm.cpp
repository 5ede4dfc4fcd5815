#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sample_stats.hpp"
#include "ssm/math.hpp"
#include "ssm/model.hpp"
#include "ssm/rdm.hpp"

using namespace ssm;

namespace {

const RDMParams kBlock2{{2.0, 1.0}, 0.5, 1.0, 0.3};

const Dataset& block2_sample() {
  static const Dataset ds = rdm_sample(kBlock2, 4'000'000, 2);
  return ds;
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Wald first-passage CDF and density for distance d and drift v, written
// out from the textbook forms.
double wald_cdf_ref(double d, double v, double s) {
  const double r = std::sqrt(s);
  return phi((v * s - d) / r) + std::exp(2 * v * d) * phi(-(v * s + d) / r);
}

double wald_pdf_ref(double d, double v, double s) {
  return d / std::sqrt(2 * M_PI * s * s * s) * std::exp(-(d - v * s) * (d - v * s) / (2 * s));
}

// Start-point mixture by direct quadrature over u ~ U(0, A).
double mixture_cdf(const RDMParams& p, double v, double s) {
  const double b = p.threshold();
  return math::integrate([&](double u) { return wald_cdf_ref(b - u, v, s); }, 0.0, p.A, 1e-13) / p.A;
}

double mixture_pdf(const RDMParams& p, double v, double s) {
  const double b = p.threshold();
  return math::integrate([&](double u) { return wald_pdf_ref(b - u, v, s); }, 0.0, p.A, 1e-13) / p.A;
}

}  // namespace

TEST_SUITE("rdm") {

TEST_CASE("sampler: reference parameters and exchangeable racers") {
  const auto ds = rdm_sample(kBlock2, 10'000, 104);
  CHECK(ds.size() == 10'000);
  for (const auto& trial : ds.trials) CHECK(trial.rt > kBlock2.tau);

  const auto even = rdm_sample({{1.5, 1.5}, 0.5, 1.0, 0.3}, 100'000, 6);
  CHECK(std::abs(oracle::choice_fraction(even, 1) - 0.5) < 0.005);
}

TEST_CASE("sampler: choice fraction matches integrated density") {
  const auto& ds = block2_sample();
  Dataset first;
  first.trials.assign(ds.trials.begin(), ds.trials.begin() + 1'000'000);
  CHECK(std::abs(oracle::choice_fraction(first, 1) - model_choice_prob(ModelSpec{kBlock2}, 1)) < 0.003);
}

TEST_CASE("total probability") {
  const double mass = math::integrate_geometric(
      [](double t) { return rdm_pdf(kBlock2, 1, t) + rdm_pdf(kBlock2, 2, t); }, 0.3, 30.3, 0.05);
  CHECK(std::abs(mass - 1.0) < 1e-3);
}

TEST_CASE("density is zero up to tau") {
  CHECK(rdm_pdf(kBlock2, 1, 0.3) == 0.0);
  CHECK(rdm_pdf(kBlock2, 2, 0.1) == 0.0);
}

TEST_CASE("density matches simulation at 0.8 s") {
  const auto& ds = block2_sample();
  for (int c : {1, 2}) {
    CHECK(oracle::window_density(ds, c, 0.8, 0.005) == doctest::Approx(rdm_pdf(kBlock2, c, 0.8)).epsilon(0.02));
  }
}

TEST_CASE("sampler: conditional rt distribution (KS)") {
  const auto ds = rdm_sample(kBlock2, 100'000, 55);
  const ModelSpec spec = kBlock2;
  for (int c : {1, 2}) {
    const auto rts = oracle::rts_for(ds, c);
    const double mass = model_choice_prob(spec, c);
    const double hi = *std::max_element(rts.begin(), rts.end());
    const oracle::CdfTable table([&](double t) { return model_cdf(spec, c, t) / mass; }, kBlock2.tau, hi,
                                 3000);
    CHECK(oracle::ks_distance(rts, table) <= 0.01);
  }
}

TEST_CASE("single-racer mixture against start-point quadrature") {
  const RDMParams p{{1.0, 1.0}, 0.4, 0.9, 0.1};
  for (double v : {0.3, 1.0, 3.5}) {
    double prev = 0.0;
    for (double s = 0.01; s < 8.0; s *= 1.25) {
      const double g = rdm_accumulator_pdf(p, v, s);
      const double big_g = rdm_accumulator_cdf(p, v, s);
      CHECK(g == doctest::Approx(mixture_pdf(p, v, s)).epsilon(1e-8));
      CHECK(big_g == doctest::Approx(mixture_cdf(p, v, s)).epsilon(1e-8));
      CHECK(g >= 0.0);
      CHECK(big_g >= prev);
      CHECK(big_g <= 1.0);
      prev = big_g;
    }
  }
  CHECK(wald_pdf(0.7, 1.3, 0.4) == doctest::Approx(wald_pdf_ref(0.7, 1.3, 0.4)).epsilon(1e-12));
  CHECK(wald_cdf(0.7, 1.3, 0.4) == doctest::Approx(wald_cdf_ref(0.7, 1.3, 0.4)).epsilon(1e-12));
}

TEST_CASE("vanishing start-point range approaches the fixed-start race") {
  for (double A : {1e-6, 1e-8}) {
    const RDMParams p{{2.0, 1.0}, 0.5, A, 0.3};
    const double b = p.threshold();
    for (double s = 0.05; s < 5.0; s += 0.05) {
      const double race1 = wald_pdf_ref(b, 2.0, s) * (1 - wald_cdf_ref(b, 1.0, s));
      const double race2 = wald_pdf_ref(b, 1.0, s) * (1 - wald_cdf_ref(b, 2.0, s));
      CHECK(rdm_pdf(p, 1, p.tau + s) == doctest::Approx(race1).epsilon(1e-4));
      CHECK(rdm_pdf(p, 2, p.tau + s) == doctest::Approx(race2).epsilon(1e-4));
    }
  }
}

TEST_CASE("permutation equivariance") {
  Rng rng(13);
  std::vector<int> perm{0, 1, 2};
  for (int i = 0; i < 100; ++i) {
    RDMParams p{{rng.uniform(0.2, 4), rng.uniform(0.2, 4), rng.uniform(0.2, 4)}, rng.uniform(0.05, 1.0),
                rng.uniform(0.05, 1.5), rng.uniform(0, 0.5)};
    std::next_permutation(perm.begin(), perm.end());
    RDMParams q = p;
    for (int j = 0; j < 3; ++j) q.nu[perm[j]] = p.nu[j];
    for (int j = 0; j < 50; ++j) {
      const double t = p.tau + rng.uniform(1e-3, 3.0);
      for (int c = 0; c < 3; ++c) {
        const double a = rdm_pdf(p, c + 1, t);
        const double b = rdm_pdf(q, perm[c] + 1, t);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST_CASE("logpdf is log of pdf") {
  for (double t = 0.31; t < 4.0; t += 0.05) {
    for (int c : {1, 2}) {
      CHECK(rdm_logpdf(kBlock2, c, t) == doctest::Approx(std::log(rdm_pdf(kBlock2, c, t))).epsilon(1e-10));
    }
  }
}

TEST_CASE("inverse-Gaussian variates") {
  Rng rng(21);
  const double mu = 0.7, lambda = 2.0;
  const int n = 400'000;
  std::vector<double> x(n);
  double mean = 0.0;
  for (auto& v : x) {
    v = sample_inverse_gaussian(mu, lambda, rng);
    mean += v / n;
  }
  const double sd = std::sqrt(mu * mu * mu / lambda);
  CHECK(std::abs(mean - mu) < 4 * sd / std::sqrt(n));
  // Wald with distance d and drift v has mean d / v and shape d^2.
  const double d = std::sqrt(lambda), v = d / mu;
  CHECK(oracle::ks_distance(x, [&](double s) { return wald_cdf_ref(d, v, s); }) < 1.63 / std::sqrt(n));
}

TEST_CASE("trace semantics") {
  const double b = kBlock2.threshold();
  std::size_t first = 0;
  const std::size_t n = 10'000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto tr = rdm_trace(kBlock2, 1e-3, 300 + i);
    REQUIRE(tr.paths.size() == 2);
    CHECK((tr.winner == 1 || tr.winner == 2));
    CHECK(tr.paths[tr.winner - 1].back() >= b);
    CHECK(tr.paths[2 - tr.winner].back() < b);
    if (i < 100) {
      CHECK(tr.t.front() == kBlock2.tau);
      CHECK(tr.crossing_time == tr.t.back());
      CHECK(tr.thresholds == std::vector<double>{b, b});
      for (const auto& path : tr.paths) {
        CHECK(path.front() >= 0.0);
        CHECK(path.front() <= kBlock2.A);
        REQUIRE(path.size() == tr.t.size());
        for (std::size_t g = 0; g + 1 < path.size(); ++g) CHECK(path[g] < b);
      }
    }
    first += tr.winner == 1;
  }
  CHECK(std::abs(static_cast<double>(first) / n - model_choice_prob(ModelSpec{kBlock2}, 1)) < 0.02);
}

TEST_CASE("validation") {
  CHECK_THROWS_WITH_AS(rdm_pdf({{2.0, 0.0}, 0.5, 1.0, 0.3}, 1, 1.0), "drift must be positive", DomainError);
  CHECK_THROWS_AS(rdm_sample({{2.0, -1.0}, 0.5, 1.0, 0.3}, 10, 1), DomainError);
  CHECK_THROWS_AS(rdm_trace({{0.01, 0.01}, 5.0, 1.0, 0.3}, 1e-3, 1, 50), NumericError);
}

}  // TEST_SUITE
