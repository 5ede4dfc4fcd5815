// Dataset CSV and model-spec JSON files.
//
// Dataset CSV: header `choice,rt`, one trial per line. LF or CRLF on read,
// LF on write; rt written with 17 significant digits so every double
// round-trips exactly.
//
// Model JSON: {"model": "ddm"|"lba"|"rdm", "params": {...}} with field
// names nu, alpha, tau, z, A, k, sigma (nu scalar for the DDM, array
// otherwise).
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ssm/core.hpp"

namespace ssm {

Dataset parse_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);
void format_dataset(const Dataset& ds, std::ostream& out);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

nlohmann::json model_to_json(const ModelSpec& spec);
/// Parses and validates. Throws ParseError for missing/mistyped fields and
/// DomainError for invariant violations.
ModelSpec model_from_json(const nlohmann::json& j);
ModelSpec read_model(const std::filesystem::path& path);
void write_model(const ModelSpec& spec, const std::filesystem::path& path);

/// Shortest "%.17g"-style text for a double.
std::string format_double(double x);

}  // namespace ssm
