#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "ssm/ddm.hpp"
#include "ssm/diagnostics.hpp"
#include "ssm/inference.hpp"
#include "ssm/lba.hpp"
#include "ssm/mcmc.hpp"
#include "ssm/model.hpp"
#include "ssm/rdm.hpp"

using namespace ssm;

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const DDMParams kBlock1{1.0, 0.8, 0.3, 0.5};
const LBAParams kBlock3{{3.0, 2.0}, 0.8, 0.2, 0.3, 1.0};

// Independent univariate log densities.
double normal_logpdf_ref(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2 * M_PI);
}

double truncated_logpdf_ref(double x, double mu, double sigma, double lo) {
  // Truncated on (lo, inf): renormalise by P(X > lo).
  const double tail = 0.5 * std::erfc((lo - mu) / (sigma * std::sqrt(2.0)));
  return normal_logpdf_ref(x, mu, sigma) - std::log(tail);
}

Dataset slice(const Dataset& ds, std::size_t begin, std::size_t end) {
  Dataset out;
  out.trials.assign(ds.trials.begin() + begin, ds.trials.begin() + end);
  return out;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("loglik: empty, single trial and pointwise") {
  const ModelSpec spec = kBlock1;
  CHECK(dataset_loglik(spec, Dataset{}) == 0.0);
  CHECK(pointwise_loglik(spec, Dataset{}).empty());

  Dataset one;
  one.trials.push_back({2, 0.61});
  CHECK(dataset_loglik(spec, one) == ddm_logpdf(kBlock1, 2, 0.61));

  one.trials.push_back({1, 0.25});
  CHECK(dataset_loglik(spec, one) == -kInf);

  one.trials.push_back({3, 0.5});
  CHECK_THROWS_AS(dataset_loglik(spec, one), DomainError);
}

TEST_CASE("loglik: summation order on simulated DDM data") {
  const ModelSpec spec = kBlock1;
  const auto ds = ddm_sample(kBlock1, 10'000, 104);
  const auto values = pointwise_loglik(spec, ds);
  REQUIRE(values.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(values[i] == ddm_logpdf(kBlock1, ds.trials[i].choice, ds.trials[i].rt));
  }
  const double total = dataset_loglik(spec, ds);
  CHECK(std::isfinite(total));
  CHECK(total == doctest::Approx(oracle::left_fold_sum(values)).epsilon(1e-9));
  CHECK(total == doctest::Approx(oracle::pairwise_sum(values)).epsilon(1e-9));

  double naive = 0.0;
  for (const auto& trial : ds.trials) naive += model_logpdf(spec, trial.choice, trial.rt);
  CHECK(total == doctest::Approx(naive).epsilon(1e-9));

  CHECK(dataset_loglik(spec, ds, 4) == total);
  CHECK(pointwise_loglik(spec, ds, 3) == values);
}

TEST_CASE("loglik: additivity over concatenation") {
  const ModelSpec specs[] = {kBlock1, kBlock3, RDMParams{{2, 1}, 0.5, 1.0, 0.3}};
  for (const auto& spec : specs) {
    const auto ds = model_sample(spec, 5000, 9, {1e-3, 1});
    const double whole = dataset_loglik(spec, ds);
    const double parts = dataset_loglik(spec, slice(ds, 0, 1777)) + dataset_loglik(spec, slice(ds, 1777, 5000));
    CHECK(whole == doctest::Approx(parts).epsilon(1e-9));
  }
}

TEST_CASE("transforms round-trip") {
  Rng rng(3);
  const ParameterLayout layouts[] = {ParameterLayout::of(kBlock1), ParameterLayout::of(kBlock3),
                                     ParameterLayout::of(RDMParams{{2, 1, 3}, 0.5, 1.0, 0.3})};
  for (const auto& layout : layouts) {
    const ParameterTransform transform(layout, 0.42);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(layout.size());
      for (std::size_t j = 0; j < x.size(); ++j) {
        switch (transform.maps()[j].kind) {
          case Bijection::Kind::identity: x[j] = rng.uniform(-5, 5); break;
          case Bijection::Kind::log: x[j] = std::exp(rng.uniform(-4, 2)); break;
          case Bijection::Kind::logit: {
            const auto& m = transform.maps()[j];
            x[j] = m.lo + (m.hi - m.lo) * rng.uniform(0.001, 0.999);
            break;
          }
        }
      }
      const auto y = transform.unconstrain(x);
      const auto back = transform.constrain(y);
      for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(back[j] - x[j]) <= 1e-12 * std::max(1.0, std::abs(x[j])));
      const auto again = transform.unconstrain(transform.constrain(y));
      for (std::size_t j = 0; j < y.size(); ++j) CHECK(std::abs(again[j] - y[j]) <= 1e-12 * std::max(1.0, std::abs(y[j])));
    }
  }
}

TEST_CASE("transform maps follow the model domains") {
  using K = Bijection::Kind;
  const ParameterTransform ddm(ParameterLayout::of(kBlock1), 0.42);
  CHECK(ddm.maps()[0].kind == K::identity);
  CHECK(ddm.maps()[1].kind == K::log);
  CHECK(ddm.maps()[2].kind == K::logit);
  CHECK(ddm.maps()[2].hi == 0.42);
  CHECK(ddm.maps()[3].kind == K::logit);
  const ParameterTransform rdm(ParameterLayout::of(RDMParams{{2, 1}, 0.5, 1.0, 0.3}), 0.42);
  CHECK(rdm.maps()[0].kind == K::log);
  const ParameterTransform lba(ParameterLayout::of(kBlock3), 0.42);
  CHECK(lba.maps()[0].kind == K::identity);
}

TEST_CASE("log-Jacobian matches a numerical derivative") {
  const ParameterTransform transform(ParameterLayout::of(kBlock1), 0.42);
  for (const auto& map : transform.maps()) {
    for (double y : {-2.0, -0.3, 0.0, 0.7, 2.5}) {
      const double h = 1e-6;
      const double slope = (map.constrain(y + h) - map.constrain(y - h)) / (2 * h);
      CHECK(map.log_jacobian(y) == doctest::Approx(std::log(std::abs(slope))).epsilon(1e-7));
    }
  }
}

TEST_CASE("default LBA priors") {
  Dataset ds;
  ds.trials = {{1, 0.55}, {2, 0.42}, {1, 0.9}};
  const auto priors = default_priors(ModelKind::lba, ds);
  REQUIRE(priors.priors.size() == 5);
  CHECK(priors.names == std::vector<std::string>{"nu[1]", "nu[2]", "A", "k", "tau"});
  for (int i = 0; i < 2; ++i) {
    CHECK(priors.priors[i].family == Prior::Family::normal);
    CHECK(priors.priors[i].mu == 0.0);
    CHECK(priors.priors[i].sigma == 1.0);
  }
  const auto& a = priors.priors[2];
  CHECK(a.family == Prior::Family::truncated_normal);
  CHECK(a.mu == 0.8);
  CHECK(a.sigma == 0.4);
  CHECK(a.lo == 0.0);
  CHECK(a.hi == kInf);
  const auto& k = priors.priors[3];
  CHECK(k.family == Prior::Family::truncated_normal);
  CHECK(k.mu == 0.2);
  CHECK(k.sigma == 0.2);
  CHECK(k.lo == 0.0);
  const auto& tau = priors.priors[4];
  CHECK(tau.family == Prior::Family::uniform);
  CHECK(tau.lo == 0.0);
  CHECK(tau.hi == 0.42);

  const std::vector<double> x{0.0, 0.0, 0.8, 0.2, 0.21};
  const double expected = normal_logpdf_ref(0, 0, 1) * 2 + truncated_logpdf_ref(0.8, 0.8, 0.4, 0.0) +
                          truncated_logpdf_ref(0.2, 0.2, 0.2, 0.0) - std::log(0.42);
  CHECK(priors.logpdf(x) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(priors.logpdf(std::vector<double>{0, 0, -0.1, 0.2, 0.21}) == -kInf);
  CHECK(priors.logpdf(std::vector<double>{0, 0, 0.8, 0.2, 0.5}) == -kInf);
}

TEST_CASE("default priors for the DDM and RDM") {
  Dataset ds;
  ds.trials = {{1, 0.5}, {2, 0.7}};
  const auto ddm = default_priors(ModelKind::ddm, ds);
  REQUIRE(ddm.priors.size() == 4);
  CHECK(ddm.priors[0].family == Prior::Family::normal);
  CHECK(ddm.priors[0].sigma == 2.0);
  CHECK(ddm.priors[1].family == Prior::Family::truncated_normal);
  CHECK(ddm.priors[1].mu == 1.0);
  CHECK(ddm.priors[1].sigma == 1.0);
  CHECK(ddm.priors[2].hi == 0.5);
  CHECK(ddm.priors[3].family == Prior::Family::uniform);
  CHECK(ddm.priors[3].lo == 0.1);
  CHECK(ddm.priors[3].hi == 0.9);

  ds.trials.push_back({3, 0.6});
  const auto rdm = default_priors(ModelKind::rdm, ds);
  REQUIRE(rdm.priors.size() == 6);
  CHECK(rdm.priors[0].family == Prior::Family::truncated_normal);
  CHECK(rdm.priors[0].mu == 1.0);
  CHECK(rdm.priors[0].sigma == 2.0);
  CHECK(rdm.priors[0].lo == 0.0);
  CHECK(rdm.priors[3].mu == 0.8);
  CHECK(rdm.priors[5].hi == 0.5);

  CHECK_THROWS_AS(default_priors(ModelKind::lba, Dataset{}), DomainError);
}

TEST_CASE("prior JSON round trip and sampling support") {
  Dataset ds;
  ds.trials = {{1, 0.42}};
  const auto priors = default_priors(ModelKind::lba, ds);
  const auto back = PriorSpec::from_json(priors.to_json());
  CHECK(back.to_json() == priors.to_json());
  CHECK(back.priors[2].hi == kInf);

  Rng rng(4);
  for (const auto& prior : priors.priors) {
    for (int i = 0; i < 2000; ++i) {
      const double x = prior.sample(rng);
      CHECK(std::isfinite(prior.logpdf(x)));
    }
  }
  // Truncated-normal draws have the truncated mean.
  const auto tn = Prior::truncated_normal(0.2, 0.2, 0.0, kInf);
  double mean = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) mean += tn.sample(rng) / n;
  const double alpha = -1.0;  // (lo - mu) / sigma
  const double lambda = std::exp(-0.5 * alpha * alpha) / std::sqrt(2 * M_PI) / (0.5 * std::erfc(alpha / std::sqrt(2.0)));
  CHECK(std::abs(mean - (0.2 + 0.2 * lambda)) < 4 * 0.2 / std::sqrt(n));
}

TEST_CASE("MLE: DDM recovery from 50,000 trials") {
  const auto ds = ddm_sample(kBlock1, 50'000, 104);
  const auto fit = fit_mle(DDMParams{0.5, 1.2, 0.1, 0.4}, ds);
  CHECK(fit.converged);
  REQUIRE(fit.values.size() == 4);
  CHECK(std::abs(fit.values[0] - 1.0) < 0.05);
  CHECK(std::abs(fit.values[1] - 0.8) < 0.05);
  CHECK(std::abs(fit.values[2] - 0.3) < 0.05);
  CHECK(std::abs(fit.values[3] - 0.5) < 0.05);
  CHECK(std::isfinite(fit.loglik));
  CHECK(validate(fit.estimate).ok);
  CHECK(fit.loglik == doctest::Approx(dataset_loglik(fit.estimate, ds)).epsilon(1e-12));
}

TEST_CASE("MLE: cannot end below its start, and simplex size does not matter") {
  const auto ds = ddm_sample(kBlock1, 3000, 7);
  const double truth = dataset_loglik(kBlock1, ds);
  MleOptions small, large;
  small.initial_step = 0.25;
  large.initial_step = 1.0;
  const auto a = fit_mle(kBlock1, ds, small);
  const auto b = fit_mle(kBlock1, ds, large);
  CHECK(a.loglik >= truth - 1e-6);
  CHECK(b.loglik >= truth - 1e-6);
  CHECK(std::abs(a.loglik - b.loglik) <= 1e-6);
}

TEST_CASE("MLE: LBA drift recovery from 10,000 trials") {
  const auto ds = lba_sample(kBlock3, 10'000, 31);
  const auto fit = fit_mle(LBAParams{{2.0, 2.0}, 0.5, 0.5, 0.2, 1.0}, ds);
  CHECK(fit.converged);
  CHECK(std::abs(fit.values[0] - 3.0) < 0.15);
  CHECK(std::abs(fit.values[1] - 2.0) < 0.15);
}

TEST_CASE("MLE: infeasible start") {
  Dataset ds;
  ds.trials = {{1, 0.35}, {2, 0.5}};
  CHECK_THROWS_AS(fit_mle(DDMParams{1, 1, 0.4, 0.5}, ds), NumericError);
  CHECK_THROWS_AS(fit_mle(DDMParams{1, 1, 0.2, 0.5}, Dataset{}), DomainError);
}

TEST_CASE("FitResult JSON") {
  const auto ds = ddm_sample(kBlock1, 500, 1);
  const auto fit = fit_mle(kBlock1, ds);
  const auto j = fit.to_json();
  CHECK(j.at("model") == "ddm");
  CHECK(j.at("converged").get<bool>() == fit.converged);
  CHECK(j.at("loglik").get<double>() == fit.loglik);
  CHECK(j.at("estimates").at("alpha").get<double>() == fit.values[1]);
}

TEST_CASE("Metropolis: conjugate normal model") {
  // y_i ~ N(theta, 1), theta ~ N(0, 2^2).
  Rng data_rng(8);
  std::vector<double> y(20);
  for (auto& v : y) v = data_rng.normal(1.5, 1.0);
  const double n = static_cast<double>(y.size());
  const double sum = std::accumulate(y.begin(), y.end(), 0.0);
  const double post_var = 1.0 / (n + 0.25);
  const double post_mean = post_var * sum;

  const LogDensity target = [&](std::span<const double> x) {
    double lp = -0.5 * x[0] * x[0] / 4.0;
    for (double v : y) lp -= 0.5 * (v - x[0]) * (v - x[0]);
    return lp;
  };
  std::vector<std::vector<double>> draws;
  for (std::uint64_t c = 0; c < 4; ++c) {
    Rng rng = substream(42, c);
    const auto run = adaptive_metropolis(target, {rng.normal(0, 2)}, {1000, 2000, 1, 0.234}, rng);
    draws.emplace_back(run.draws.begin() + 1000, run.draws.end());
  }
  std::vector<double> pooled, squares;
  for (const auto& chain : draws) {
    pooled.insert(pooled.end(), chain.begin(), chain.end());
  }
  const double m = std::accumulate(pooled.begin(), pooled.end(), 0.0) / pooled.size();
  for (double v : pooled) squares.push_back((v - m) * (v - m));
  const double var = std::accumulate(squares.begin(), squares.end(), 0.0) / (pooled.size() - 1);

  const double ess = ess_mean(draws);
  const double se_mean = std::sqrt(var / ess);
  const double se_var = var * std::sqrt(2.0 / ess);
  CHECK(std::abs(m - post_mean) < 3 * se_mean);
  CHECK(std::abs(var - post_var) < 3 * se_var);
  CHECK(split_rhat(draws) < 1.01);
}

TEST_CASE("Metropolis: a constant target accepts every proposal") {
  Rng rng(1);
  const auto run = adaptive_metropolis([](std::span<const double>) { return 0.0; }, {0.0, 0.0, 0.0},
                                       {200, 300, 2, 0.234}, rng);
  CHECK(run.warmup_accept_rate == 1.0);
  CHECK(run.sampling_accept_rate == 1.0);
}

TEST_CASE("Metropolis: bad start and empty state") {
  Rng rng(1);
  const LogDensity never = [](std::span<const double>) { return -kInf; };
  CHECK_THROWS_AS(adaptive_metropolis(never, {0.0}, {}, rng), NumericError);
  CHECK_THROWS_AS(adaptive_metropolis(never, {}, {}, rng), DomainError);
}

TEST_CASE("posterior: determinism and thread independence") {
  const auto ds = lba_sample(kBlock3, 60, 5);
  const auto priors = default_priors(ModelKind::lba, ds);
  PosteriorOptions options;
  options.warmup = 200;
  options.samples = 100;
  options.thin = 2;
  options.seed = 11;
  const auto a = sample_posterior(ModelKind::lba, ds, priors, options);
  const auto b = sample_posterior(ModelKind::lba, ds, priors, options);
  options.threads = 4;
  const auto c = sample_posterior(ModelKind::lba, ds, priors, options);
  CHECK(a.draws == b.draws);
  CHECK(a.draws == c.draws);
  CHECK(a.acceptance_rate == c.acceptance_rate);
  options.seed = 12;
  CHECK(sample_posterior(ModelKind::lba, ds, priors, options).draws != a.draws);

  // Every stored draw is a valid parameter set with tau below the smallest rt.
  const auto layout = ParameterLayout::of(kBlock3);
  for (std::size_t ch = 0; ch < a.n_chains; ++ch) {
    for (std::size_t it = 0; it < a.n_iterations; ++it) {
      std::vector<double> x(a.n_params());
      for (std::size_t p = 0; p < x.size(); ++p) x[p] = a.at(ch, it, p);
      CHECK(validate(layout.to_spec(x)).ok);
      CHECK(x[4] < ds.min_rt());
    }
  }
}

TEST_CASE("posterior: no data gives back the prior") {
  PriorSpec priors;
  priors.names = {"nu", "alpha", "tau", "z"};
  priors.priors = {Prior::normal(0.5, 1.0), Prior::truncated_normal(1.0, 0.5, 0.0, kInf),
                   Prior::uniform(0.1, 0.5), Prior::uniform(0.2, 0.8)};
  PosteriorOptions options;
  options.seed = 3;
  const auto chains = sample_posterior(ModelKind::ddm, Dataset{}, priors, options);
  const auto rows = summarystats(chains);

  Rng rng(99);
  const int n = 100'000;
  for (std::size_t p = 0; p < 4; ++p) {
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = priors.priors[p].sample(rng);
      m += x / n;
      m2 += x * x / n;
    }
    const double prior_se = std::sqrt((m2 - m * m) / n);
    const double se = std::hypot(rows[p].mcse, prior_se);
    CHECK(std::abs(rows[p].mean - m) < 3 * se);
    CHECK(rows[p].sd == doctest::Approx(std::sqrt(m2 - m * m)).epsilon(0.1));
  }
}

TEST_CASE("posterior: initialisation failure") {
  Dataset ds;
  ds.trials = {{1, 0.4}, {2, 0.45}};
  PriorSpec priors;
  priors.names = {"nu", "alpha", "tau", "z"};
  priors.priors = {Prior::normal(0, 1), Prior::truncated_normal(1, 1, 0, kInf), Prior::uniform(0.5, 0.6),
                   Prior::uniform(0.1, 0.9)};
  PosteriorOptions options;
  options.warmup = 10;
  options.samples = 10;
  CHECK_THROWS_AS(sample_posterior(ModelKind::ddm, ds, priors, options), NumericError);

  priors.priors.pop_back();
  CHECK_THROWS_AS(sample_posterior(ModelKind::ddm, ds, priors, options), DomainError);
}

TEST_CASE("chains CSV and sidecar round trip") {
  const auto ds = rdm_sample({{2, 1}, 0.5, 1.0, 0.3}, 50, 2);
  PosteriorOptions options;
  options.warmup = 50;
  options.samples = 30;
  options.n_chains = 2;
  options.seed = 8;
  const auto chains = sample_posterior(ModelKind::rdm, ds, default_priors(ModelKind::rdm, ds), options);

  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = dir / "ssm_test_chains.csv";
  const auto json = dir / "ssm_test_chains.json";
  write_chains(chains, csv, json);
  const auto back = read_chains(csv, json);
  CHECK(back.draws == chains.draws);
  CHECK(back.param_names == chains.param_names);
  CHECK(back.warmup == 50);
  CHECK(back.seed == 8);
  CHECK(back.thin == chains.thin);
  CHECK(back.model == "rdm");
  CHECK(back.priors.to_json() == chains.priors.to_json());
  std::filesystem::remove(csv);
  std::filesystem::remove(json);
}

}  // TEST_SUITE
