#include "ssm/model.hpp"

#include <cmath>
#include <limits>

#include "ssm/ddm.hpp"
#include "ssm/lba.hpp"
#include "ssm/math.hpp"
#include "ssm/rdm.hpp"

namespace ssm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Rough decision-time scale, used to place quadrature breakpoints.
double time_scale(const ModelSpec& spec) {
  return std::visit(overloaded{
                        [](const DDMParams& p) { return p.alpha * p.alpha; },
                        [](const LBAParams& p) { return p.threshold(); },
                        [](const RDMParams& p) { return p.threshold(); },
                    },
                    spec);
}

}  // namespace

double model_logpdf(const ModelSpec& spec, int choice, double t) {
  return std::visit(overloaded{
                        [&](const DDMParams& p) { return ddm_logpdf(p, choice, t); },
                        [&](const LBAParams& p) { return lba_logpdf(p, choice, t); },
                        [&](const RDMParams& p) { return rdm_logpdf(p, choice, t); },
                    },
                    spec);
}

double model_pdf(const ModelSpec& spec, int choice, double t) {
  return std::visit(overloaded{
                        [&](const DDMParams& p) { return ddm_pdf(p, choice, t); },
                        [&](const LBAParams& p) { return lba_pdf(p, choice, t); },
                        [&](const RDMParams& p) { return rdm_pdf(p, choice, t); },
                    },
                    spec);
}

double model_cdf(const ModelSpec& spec, int choice, double t) {
  if (const auto* ddm = std::get_if<DDMParams>(&spec)) return ddm_cdf(*ddm, choice, t);
  require_valid(spec);
  require_choice(spec, choice);
  const double tau = non_decision_time(spec);
  if (!(t > tau)) return 0.0;
  const auto density = [&](double x) { return model_pdf(spec, choice, x); };
  return math::integrate_geometric(density, tau, t, 0.05 * time_scale(spec), 1e-11);
}

double model_choice_prob(const ModelSpec& spec, int choice) {
  if (const auto* ddm = std::get_if<DDMParams>(&spec)) return ddm_choice_prob(*ddm, choice);
  return model_cdf(spec, choice, std::numeric_limits<double>::infinity());
}

Dataset model_sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed,
                     const SampleOptions& options) {
  return std::visit(
      overloaded{
          [&](const DDMParams& p) { return ddm_sample(p, n, seed, options.dt, options.threads); },
          [&](const LBAParams& p) { return lba_sample(p, n, seed, options.threads); },
          [&](const RDMParams& p) { return rdm_sample(p, n, seed, options.threads); },
      },
      spec);
}

Trace model_trace(const ModelSpec& spec, double dt, std::uint64_t seed) {
  return std::visit(overloaded{
                        [&](const DDMParams& p) { return ddm_trace(p, dt, seed); },
                        [&](const LBAParams& p) { return lba_trace(p, seed); },
                        [&](const RDMParams& p) { return rdm_trace(p, dt, seed); },
                    },
                    spec);
}

}  // namespace ssm
