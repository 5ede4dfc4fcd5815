#include "ssm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssm {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

class Search {
 public:
  Search(const Objective& f, const NelderMeadOptions& options) : f_(f), options_(options) {}

  double eval(const std::vector<double>& x) {
    ++n_evals_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }

  bool budget_left() const { return n_evals_ < options_.max_evals; }
  std::size_t n_evals() const { return n_evals_; }

  // One simplex run from x0. Returns true on convergence.
  bool run(Vertex& best) {
    const std::size_t d = best.x.size();
    std::vector<Vertex> simplex;
    simplex.push_back(best);
    for (std::size_t i = 0; i < d; ++i) {
      Vertex v{best.x, 0.0};
      v.x[i] += options_.initial_step;
      v.f = eval(v.x);
      simplex.push_back(std::move(v));
    }
    const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::vector<double> centroid(d), trial(d);
    const auto point = [&](double coef) {
      for (std::size_t j = 0; j < d; ++j) {
        trial[j] = centroid[j] + coef * (simplex.back().x[j] - centroid[j]);
      }
      return trial;
    };

    while (true) {
      std::sort(simplex.begin(), simplex.end(), by_value);
      if (simplex.back().f - simplex.front().f < options_.f_tol) {
        best = simplex.front();
        return true;
      }
      if (!budget_left()) {
        best = simplex.front();
        return false;
      }
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i].x[j] / d;
      }
      Vertex& worst = simplex.back();
      const double second_worst = simplex[d - 1].f;

      Vertex reflected{point(-1.0), 0.0};
      reflected.f = eval(reflected.x);
      if (reflected.f < simplex.front().f) {
        Vertex expanded{point(-2.0), 0.0};
        expanded.f = eval(expanded.x);
        worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
        continue;
      }
      if (reflected.f < second_worst) {
        worst = std::move(reflected);
        continue;
      }
      const bool outside = reflected.f < worst.f;
      Vertex contracted{point(outside ? -0.5 : 0.5), 0.0};
      contracted.f = eval(contracted.x);
      if (contracted.f < (outside ? reflected.f : worst.f)) {
        worst = std::move(contracted);
        continue;
      }
      for (std::size_t i = 1; i <= d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
        }
        simplex[i].f = eval(simplex[i].x);
      }
    }
  }

 private:
  const Objective& f_;
  const NelderMeadOptions& options_;
  std::size_t n_evals_ = 0;
};

}  // namespace

NelderMeadResult nelder_mead_minimize(const Objective& f, std::vector<double> x0,
                                      const NelderMeadOptions& options) {
  Search search(f, options);
  Vertex best{std::move(x0), 0.0};
  best.f = search.eval(best.x);
  bool converged = search.run(best);
  for (int restart = 0; converged && restart < options.max_restarts; ++restart) {
    const double before = best.f;
    converged = search.run(best);
    if (converged && before - best.f <= options.f_tol) break;
  }
  return {best.x, best.f, converged, search.n_evals()};
}

}  // namespace ssm
