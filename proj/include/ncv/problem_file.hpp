#pragma once

#include "ncv/problem.hpp"

#include <filesystem>
#include <string>

namespace ncv {

/// A parsed problem document (YAML):
///
///   function:     box, step, and one of expression | values | table (+ table_column);
///                 optional tail (closed form used beyond the box)
///   linear_term:  expression (list for m = 2) or samples; optional, default 0
///   horizon, u0, u1
///   numerics:     nodes, chatter, tol, shells, threshold, min_decrease_shells,
///                 tol_detach, tol_cert, tol_gap, dp_time_steps, dp_velocity_levels
///   outputs:      dir
///
/// Unknown keys are rejected. Errors are InvalidInput naming the file, line
/// and field.
struct ProblemFile {
  ProblemSpec spec;
  Numerics numerics;
  std::string output_dir = ".";
};

ProblemFile load_problem_file(const std::filesystem::path& path);

/// Parses a document; relative table paths resolve against `base_dir`.
ProblemFile parse_problem(const std::string& text, const std::filesystem::path& base_dir,
                          const std::string& name = "<input>");

}  // namespace ncv
