#pragma once

// Machine-readable output: JSON reports and CSV profiles. Every float is
// written with 17 significant digits; non-finite values become null.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "plap/criteria.hpp"
#include "plap/problem_file.hpp"
#include "plap/solver.hpp"
#include "plap/verify.hpp"

namespace plap::io {

inline constexpr const char* kVersion = "plap " PLAP_VERSION;

Json to_json(const solver::SolveReport& report);
Json to_json(const criteria::Verdict& verdict);
Json to_json(const criteria::CriteriaReport& report);
Json to_json(const verify::ResidualReport& report);
Json to_json(const verify::GrowthReport& report);

/// Serializes with 17 significant digits per float, two-space indent.
std::string dump(const Json& value);

/// "%.17g"
std::string format_double(double value);

/// Header "r,u1,...,um", one row per node.
void write_profiles_csv(std::ostream& out, const solver::ProfileSet& profiles);
void write_profiles_csv(const std::filesystem::path& path, const solver::ProfileSet& profiles);

/// Reads a CSV produced by write_profiles_csv; the r column becomes the grid.
/// Throws SchemaError on malformed input.
solver::ProfileSet read_profiles_csv(const std::filesystem::path& path, std::size_t m);

}  // namespace plap::io
