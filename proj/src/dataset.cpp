#include "ssm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

ChoiceRT parse_row(std::string_view line, std::size_t line_no) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos) {
    throw ParseError("line " + std::to_string(line_no) + ": expected 'choice,rt'", line_no);
  }
  const auto choice_text = trim(line.substr(0, comma));
  const auto rt_text = trim(line.substr(comma + 1));

  ChoiceRT trial;
  auto [cp, cec] = std::from_chars(choice_text.data(), choice_text.data() + choice_text.size(),
                                   trial.choice);
  if (cec != std::errc{} || cp != choice_text.data() + choice_text.size() || trial.choice < 1) {
    throw ParseError("line " + std::to_string(line_no) + ": choice must be a positive integer",
                     line_no);
  }
  auto [rp, rec] = std::from_chars(rt_text.data(), rt_text.data() + rt_text.size(), trial.rt);
  if (rec != std::errc{} || rp != rt_text.data() + rt_text.size() || !std::isfinite(trial.rt) ||
      trial.rt <= 0.0) {
    throw ParseError("line " + std::to_string(line_no) + ": rt must be a positive number",
                     line_no);
  }
  return trial;
}

double number_field(const nlohmann::json& params, const char* name) {
  if (!params.contains(name)) throw ParseError(std::string("model params missing '") + name + "'");
  const auto& v = params.at(name);
  if (!v.is_number()) throw ParseError(std::string("model param '") + name + "' must be a number");
  return v.get<double>();
}

std::vector<double> array_field(const nlohmann::json& params, const char* name) {
  if (!params.contains(name)) throw ParseError(std::string("model params missing '") + name + "'");
  const auto& v = params.at(name);
  if (!v.is_array()) throw ParseError(std::string("model param '") + name + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ParseError(std::string("model param '") + name + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Dataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset file", 0);
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (trim(line) != "choice,rt") throw ParseError("line 1: header must be 'choice,rt'", 1);

  Dataset ds;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ds.trials.push_back(parse_row(line, line_no));
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in);
}

void format_dataset(const Dataset& ds, std::ostream& out) {
  out << "choice,rt\n";
  for (const auto& t : ds.trials) out << t.choice << ',' << format_double(t.rt) << '\n';
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write dataset '" + path.string() + "'");
  format_dataset(ds, out);
  if (!out) throw ParseError("error writing dataset '" + path.string() + "'");
}

nlohmann::json model_to_json(const ModelSpec& spec) {
  nlohmann::json params;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DDMParams>) {
          params = {{"nu", p.nu}, {"alpha", p.alpha}, {"tau", p.tau}, {"z", p.z}};
        } else if constexpr (std::is_same_v<T, LBAParams>) {
          params = {{"nu", p.nu}, {"A", p.A}, {"k", p.k}, {"tau", p.tau}, {"sigma", p.sigma}};
        } else {
          params = {{"nu", p.nu}, {"k", p.k}, {"A", p.A}, {"tau", p.tau}};
        }
      },
      spec);
  return {{"model", std::string(to_string(kind_of(spec)))}, {"params", params}};
}

ModelSpec model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("model") || !j.at("model").is_string()) {
    throw ParseError("model JSON needs a string field 'model'");
  }
  if (!j.contains("params") || !j.at("params").is_object()) {
    throw ParseError("model JSON needs an object field 'params'");
  }
  const auto& params = j.at("params");
  ModelSpec spec;
  switch (parse_model_kind(j.at("model").get<std::string>())) {
    case ModelKind::ddm:
      spec = DDMParams{number_field(params, "nu"), number_field(params, "alpha"),
                       number_field(params, "tau"), number_field(params, "z")};
      break;
    case ModelKind::lba: {
      LBAParams p;
      p.nu = array_field(params, "nu");
      p.A = number_field(params, "A");
      p.k = number_field(params, "k");
      p.tau = number_field(params, "tau");
      if (params.contains("sigma")) p.sigma = number_field(params, "sigma");
      spec = p;
      break;
    }
    case ModelKind::rdm: {
      RDMParams p;
      p.nu = array_field(params, "nu");
      p.k = number_field(params, "k");
      p.A = number_field(params, "A");
      p.tau = number_field(params, "tau");
      spec = p;
      break;
    }
  }
  require_valid(spec);
  return spec;
}

ModelSpec read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

void write_model(const ModelSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write model file '" + path.string() + "'");
  out << model_to_json(spec).dump(2) << '\n';
}

}  // namespace ssm
