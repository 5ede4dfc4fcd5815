#include <fstream>
#include <sstream>

#include "ssm/dataset.hpp"
#include "ssm/inference.hpp"

namespace ssm {

void write_chains(const Chains& chains, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw ParseError("cannot write chains '" + csv_path.string() + "'");
  csv << "chain,iteration";
  for (const auto& name : chains.param_names) csv << ',' << name;
  csv << '\n';
  for (std::size_t c = 0; c < chains.n_chains; ++c) {
    for (std::size_t it = 0; it < chains.n_iterations; ++it) {
      csv << c + 1 << ',' << it + 1;
      for (std::size_t p = 0; p < chains.n_params(); ++p) csv << ',' << format_double(chains.at(c, it, p));
      csv << '\n';
    }
  }

  nlohmann::json meta = {
      {"model", chains.model},
      {"seed", chains.seed},
      {"n_chains", chains.n_chains},
      {"n_iterations", chains.n_iterations},
      {"warmup", chains.warmup},
      {"thin", chains.thin},
      {"param_names", chains.param_names},
      {"acceptance_rate", chains.acceptance_rate},
      {"priors", chains.priors.to_json()},
  };
  std::ofstream js(json_path);
  if (!js) throw ParseError("cannot write chains sidecar '" + json_path.string() + "'");
  js << meta.dump(2) << '\n';
}

Chains read_chains(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  Chains chains;
  {
    std::ifstream js(json_path);
    if (!js) throw ParseError("cannot open chains sidecar '" + json_path.string() + "'");
    try {
      nlohmann::json meta;
      js >> meta;
      chains.model = meta.value("model", "");
      chains.seed = meta.at("seed").get<std::uint64_t>();
      chains.n_chains = meta.at("n_chains").get<std::size_t>();
      chains.n_iterations = meta.at("n_iterations").get<std::size_t>();
      chains.warmup = meta.at("warmup").get<std::size_t>();
      chains.thin = meta.value("thin", std::size_t{1});
      chains.param_names = meta.at("param_names").get<std::vector<std::string>>();
      chains.acceptance_rate = meta.value("acceptance_rate", std::vector<double>{});
      if (meta.contains("priors")) chains.priors = PriorSpec::from_json(meta.at("priors"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("chains sidecar '" + json_path.string() + "': " + e.what());
    }
  }

  std::ifstream csv(csv_path, std::ios::binary);
  if (!csv) throw ParseError("cannot open chains '" + csv_path.string() + "'");
  const std::size_t d = chains.n_params();
  chains.draws.assign(chains.n_chains * chains.n_iterations * d, 0.0);
  std::string line;
  std::getline(csv, line);
  std::size_t line_no = 1, rows = 0;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("chains line " + std::to_string(line_no) + ": bad number", line_no);
      }
    }
    if (cells.size() != d + 2) {
      throw ParseError("chains line " + std::to_string(line_no) + ": wrong column count", line_no);
    }
    const auto c = static_cast<std::size_t>(cells[0]) - 1;
    const auto it = static_cast<std::size_t>(cells[1]) - 1;
    if (c >= chains.n_chains || it >= chains.n_iterations) {
      throw ParseError("chains line " + std::to_string(line_no) + ": index out of range", line_no);
    }
    std::copy(cells.begin() + 2, cells.end(), chains.draws.begin() + (c * chains.n_iterations + it) * d);
    ++rows;
  }
  if (rows != chains.n_chains * chains.n_iterations) {
    throw ParseError("chains file has " + std::to_string(rows) + " rows, sidecar promises " +
                     std::to_string(chains.n_chains * chains.n_iterations));
  }
  return chains;
}

}  // namespace ssm
