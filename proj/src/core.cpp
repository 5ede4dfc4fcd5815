#include "ssm/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace ssm {

namespace {

struct Validator {
  std::string first_error;

  void check(bool condition, const char* message) {
    if (!condition && first_error.empty()) first_error = message;
  }

  Validation operator()(const DDMParams& p) {
    check(std::isfinite(p.nu), "drift must be finite");
    check(std::isfinite(p.alpha) && p.alpha > 0, "boundary separation alpha must be positive");
    check(std::isfinite(p.tau) && p.tau >= 0, "non-decision time tau must be non-negative");
    check(std::isfinite(p.z) && p.z > 0 && p.z < 1, "relative start z must lie in (0, 1)");
    return result();
  }

  Validation operator()(const LBAParams& p) {
    check(p.nu.size() >= 2, "at least two accumulators are required");
    check(std::all_of(p.nu.begin(), p.nu.end(), [](double v) { return std::isfinite(v); }),
          "drift must be finite");
    check(std::isfinite(p.A) && p.A > 0, "start-point range A must be positive");
    check(std::isfinite(p.k) && p.k > 0, "threshold gap k must be positive");
    check(std::isfinite(p.tau) && p.tau >= 0, "non-decision time tau must be non-negative");
    check(std::isfinite(p.sigma) && p.sigma > 0, "drift sd sigma must be positive");
    return result();
  }

  Validation operator()(const RDMParams& p) {
    check(p.nu.size() >= 2, "at least two accumulators are required");
    check(std::all_of(p.nu.begin(), p.nu.end(), [](double v) { return std::isfinite(v) && v > 0; }),
          "drift must be positive");
    check(std::isfinite(p.k) && p.k > 0, "threshold gap k must be positive");
    check(std::isfinite(p.A) && p.A > 0, "start-point range A must be positive");
    check(std::isfinite(p.tau) && p.tau >= 0, "non-decision time tau must be non-negative");
    return result();
  }

  Validation result() const {
    return first_error.empty() ? Validation{} : Validation{false, first_error};
  }
};

}  // namespace

ModelKind kind_of(const ModelSpec& spec) {
  return static_cast<ModelKind>(spec.index());
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ddm: return "ddm";
    case ModelKind::lba: return "lba";
    case ModelKind::rdm: return "rdm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ddm") return ModelKind::ddm;
  if (lower == "lba") return ModelKind::lba;
  if (lower == "rdm") return ModelKind::rdm;
  throw DomainError("unknown model '" + std::string(name) + "' (expected ddm, lba or rdm)");
}

std::size_t choice_count(const ModelSpec& spec) {
  if (const auto* lba = std::get_if<LBAParams>(&spec)) return lba->nu.size();
  if (const auto* rdm = std::get_if<RDMParams>(&spec)) return rdm->nu.size();
  return 2;
}

double non_decision_time(const ModelSpec& spec) {
  return std::visit([](const auto& p) { return p.tau; }, spec);
}

double Dataset::min_rt() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& trial : trials) lo = std::min(lo, trial.rt);
  return lo;
}

int Dataset::max_choice() const {
  int hi = 0;
  for (const auto& trial : trials) hi = std::max(hi, trial.choice);
  return hi;
}

Validation validate(const ModelSpec& spec) noexcept {
  try {
    Validator v;
    return std::visit(v, spec);
  } catch (...) {
    return {false, "validation failed unexpectedly"};
  }
}

Validation validate(const DDMParams& p) noexcept { return Validator{}(p); }
Validation validate(const LBAParams& p) noexcept { return Validator{}(p); }
Validation validate(const RDMParams& p) noexcept { return Validator{}(p); }

void require_valid(const ModelSpec& spec) {
  if (auto v = validate(spec); !v) throw DomainError(v.message);
}
void require_valid(const DDMParams& p) {
  if (auto v = validate(p); !v) throw DomainError(v.message);
}
void require_valid(const LBAParams& p) {
  if (auto v = validate(p); !v) throw DomainError(v.message);
}
void require_valid(const RDMParams& p) {
  if (auto v = validate(p); !v) throw DomainError(v.message);
}

void require_choice(const ModelSpec& spec, int choice) {
  const auto n = choice_count(spec);
  if (choice < 1 || static_cast<std::size_t>(choice) > n) {
    throw DomainError("choice " + std::to_string(choice) + " out of range 1.." + std::to_string(n));
  }
}

}  // namespace ssm
