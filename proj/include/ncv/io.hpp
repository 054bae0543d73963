#pragma once

#include "ncv/growth.hpp"
#include "ncv/oracle_dp.hpp"
#include "ncv/problem.hpp"
#include "ncv/recovery.hpp"
#include "ncv/relaxed.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ncv {

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // lines starting with '#', without it

  /// Column index by name; throws InvalidInput when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

using CsvRow = std::vector<std::string>;

CsvRow csv_row(const std::vector<double>& values);

/// Writes an optional `# comment` line, the header and the rows.
void write_csv(const std::filesystem::path& path, const std::string& comment,
               const std::vector<std::string>& header, const std::vector<CsvRow>& rows);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& value);

/// "key=value" pairs of every numerics field, space separated.
std::string numerics_comment(const Numerics& numerics);
nlohmann::ordered_json numerics_json(const Numerics& numerics);
nlohmann::ordered_json report_json(const SolveReport& report);
nlohmann::ordered_json growth_json(const GrowthProfile& profile);

/// t, u..., v... with the last row repeating the final v.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::string& comment);
/// s, B..., v... at the quadrature nodes.
void write_relaxed_csv(const std::filesystem::path& path, const AccumulatedTerm& acc,
                       const RelaxedSolution& rel, const std::string& comment);
/// radius, g_max, verdict; one row per shell, g_max "nan" for empty shells.
void write_growth_csv(const std::filesystem::path& path, const GrowthProfile& profile,
                      const std::string& comment);
/// envelope.csv (grid values of f and f**), breakpoints.csv (f**) and
/// conjugate.csv (f*) in `dir`.
void write_envelope_csvs(const std::filesystem::path& dir, const SampledFunction& f,
                         const DualModel& model, const std::string& comment);

}  // namespace ncv
