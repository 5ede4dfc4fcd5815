#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ssm/diagnostics.hpp"
#include "ssm/rng.hpp"

using namespace ssm;

namespace {

Chains make_chains(std::size_t n_chains, std::size_t warmup, std::size_t samples,
                   const std::function<double(std::size_t, std::size_t, std::size_t)>& value,
                   std::size_t n_params = 1) {
  Chains chains;
  chains.model = "ddm";
  for (std::size_t p = 0; p < n_params; ++p) chains.param_names.push_back("p" + std::to_string(p));
  chains.n_chains = n_chains;
  chains.n_iterations = warmup + samples;
  chains.warmup = warmup;
  chains.draws.resize(n_chains * chains.n_iterations * n_params);
  for (std::size_t c = 0; c < n_chains; ++c) {
    for (std::size_t it = 0; it < chains.n_iterations; ++it) {
      for (std::size_t p = 0; p < n_params; ++p) {
        chains.draws[(c * chains.n_iterations + it) * n_params + p] = value(c, it, p);
      }
    }
  }
  return chains;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("independent normal draws") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    Rng rng(seed);
    const auto chains = make_chains(4, 0, 1000, [&](auto, auto, auto) { return rng.normal(); });
    const auto rows = summarystats(chains);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].rhat >= 0.999);
    CHECK(rows[0].rhat <= 1.01);
    CHECK(rows[0].ess >= 3000);
    CHECK(rows[0].mcse == doctest::Approx(rows[0].sd / std::sqrt(4000.0)).epsilon(0.2));
  }
}

TEST_CASE("constant but different chains") {
  const auto chains = make_chains(2, 0, 100, [](auto c, auto, auto) { return c == 0 ? 1.0 : 2.0; });
  CHECK(summarystats(chains)[0].rhat > 1.1);

  // Nearly constant chains with a tiny jitter, separated means.
  Rng rng(2);
  const auto jitter = make_chains(4, 0, 500, [&](auto c, auto, auto) { return c + 1e-3 * rng.normal(); });
  CHECK(summarystats(jitter)[0].rhat > 1.1);
}

TEST_CASE("mean and sd are the plain post-warmup moments") {
  Rng rng(9);
  const auto chains = make_chains(3, 7, 50, [&](auto, auto it, auto p) { return it < 7 ? 1e6 : rng.normal(p, 1.0 + p); }, 2);
  const auto rows = summarystats(chains);
  REQUIRE(rows.size() == 2);
  for (std::size_t p = 0; p < 2; ++p) {
    std::vector<double> all;
    for (const auto& chain : chains.post_warmup(p)) all.insert(all.end(), chain.begin(), chain.end());
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / all.size();
    double ss = 0.0;
    for (double v : all) ss += (v - mean) * (v - mean);
    CHECK(std::abs(rows[p].mean - mean) <= 1e-12 * std::max(1.0, std::abs(mean)));
    CHECK(std::abs(rows[p].sd - std::sqrt(ss / (all.size() - 1))) <= 1e-12);
    CHECK(rows[p].name == "p" + std::to_string(p));
  }
}

TEST_CASE("autocorrelated draws lower the ESS") {
  Rng rng(6);
  std::vector<double> state(4, 0.0);
  const double rho = 0.9;
  const auto chains = make_chains(4, 0, 2000, [&](auto c, auto, auto) {
    state[c] = rho * state[c] + std::sqrt(1 - rho * rho) * rng.normal();
    return state[c];
  });
  // AR(1): ESS ~ N (1 - rho) / (1 + rho).
  const double expected = 8000 * (1 - rho) / (1 + rho);
  CHECK(summarystats(chains)[0].ess == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("too few draws") {
  const auto chains = make_chains(4, 10, 3, [](auto, auto it, auto) { return double(it); });
  CHECK_THROWS_AS(summarystats(chains), DomainError);
}

TEST_CASE("table and JSON") {
  Rng rng(3);
  const auto chains = make_chains(2, 0, 100, [&](auto, auto, auto) { return rng.normal(); }, 3);
  const auto rows = summarystats(chains);
  const auto table = format_summary_table(rows);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
  CHECK(table.find("rhat") != std::string::npos);
  const auto j = summary_to_json(rows);
  REQUIRE(j.size() == 3);
  CHECK(j[1].at("name") == "p1");
  CHECK(j[1].at("mean").get<double>() == rows[1].mean);
}

}  // TEST_SUITE
