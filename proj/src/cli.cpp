#include "ncv/cli.hpp"

#include "ncv/convex_analysis.hpp"
#include "ncv/error.hpp"
#include "ncv/io.hpp"
#include "ncv/oracle_dp.hpp"
#include "ncv/problem_file.hpp"
#include "ncv/solver.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <sstream>

namespace ncv {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Flags {
  std::string file;
  std::optional<int> nodes;
  std::optional<int> chatter;
  std::optional<double> tol;
  std::string shells;
  std::string out;
  bool relaxed_only = false;
};

std::vector<double> parse_radii(const std::string& text) {
  std::vector<double> r;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0' || !std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidInput, "--shells: '" + cell + "' is not a number");
    }
    if (!r.empty() && !(v > r.back())) throw Error(ErrorKind::kInvalidInput, "--shells: radii must increase strictly");
    r.push_back(v);
  }
  return r;
}

ProblemFile load(const Flags& flags) {
  ProblemFile pf = load_problem_file(flags.file);
  if (flags.nodes) {
    if (*flags.nodes < 2) throw Error(ErrorKind::kInvalidInput, "--nodes must be >= 2");
    pf.numerics.nodes = *flags.nodes;
  }
  if (flags.chatter) {
    if (*flags.chatter < 1) throw Error(ErrorKind::kInvalidInput, "--chatter must be >= 1");
    pf.numerics.n_chatter = *flags.chatter;
  }
  if (flags.tol) {
    if (!(*flags.tol > 0.0)) throw Error(ErrorKind::kInvalidInput, "--tol must be > 0");
    pf.numerics.tol = *flags.tol;
  }
  if (!flags.shells.empty()) pf.numerics.shells = parse_radii(flags.shells);
  if (!flags.out.empty()) pf.output_dir = flags.out;
  return pf;
}

ordered_json problem_json(const ProblemFile& pf) {
  ordered_json j;
  j["dim"] = pf.spec.dim();
  j["horizon"] = pf.spec.horizon;
  j["u0"] = std::vector<double>(pf.spec.u0.data(), pf.spec.u0.data() + pf.spec.u0.size());
  j["u1"] = std::vector<double>(pf.spec.u1.data(), pf.spec.u1.data() + pf.spec.u1.size());
  return j;
}

std::optional<GrowthProfile> try_growth(const ProblemFile& pf) {
  try {
    return check_growth(pf.spec, convex_envelope(pf.spec.f), pf.numerics);
  } catch (const Error&) {
    return std::nullopt;
  }
}

int cmd_solve(const Flags& flags, std::ostream& out, std::ostream& err) {
  const ProblemFile pf = load(flags);
  const fs::path dir = pf.output_dir;
  const std::string comment = numerics_comment(pf.numerics);
  ordered_json j;
  try {
    if (flags.relaxed_only) {
      const RelaxedStage st = solve_relaxed(pf.spec, pf.numerics);
      write_relaxed_csv(dir / "relaxed.csv", st.acc, st.relaxed, comment);
      j["status"] = "ok";
      j["c"] = std::vector<double>(st.relaxed.c.data(), st.relaxed.c.data() + st.relaxed.c.size());
      j["relaxed_cost"] = st.relaxed.relaxed_cost;
      j["dual_value"] = st.relaxed.dual_value;
      j["gap"] = st.relaxed.duality_gap();
      j["theta"] = st.relaxed.theta;
      j["constraint_residual"] = st.relaxed.constraint_residual;
      ordered_json segs = ordered_json::array();
      for (const auto& s : st.relaxed.multivalued_segments) {
        ordered_json face = ordered_json::array();
        for (const auto& v : s.face.vertices) face.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        segs.push_back({{"t0", s.t0}, {"t1", s.t1}, {"face", face}});
      }
      j["multivalued_segments"] = segs;
      j["growth"] = growth_json(st.growth);
      j["problem"] = problem_json(pf);
      j["numerics"] = numerics_json(pf.numerics);
      write_json(dir / "relaxed_summary.json", j);
      out << "relaxed_cost " << format_double(st.relaxed.relaxed_cost) << " dual_value "
          << format_double(st.relaxed.dual_value) << "\n";
      return kExitOk;
    }
    const SolveResult res = solve(pf.spec, pf.numerics);
    write_trajectory_csv(dir / "trajectory.csv", res.trajectory, comment);
    j["status"] = "ok";
    j["report"] = report_json(res.report);
    j["growth"] = growth_json(res.stage.growth);
    j["problem"] = problem_json(pf);
    j["numerics"] = numerics_json(pf.numerics);
    write_json(dir / "report.json", j);
    out << "cost_f " << format_double(res.report.cost_f) << " relaxed_cost "
        << format_double(res.report.relaxed_cost) << " is_minimizer true\n";
    return kExitOk;
  } catch (const CertificateError& e) {
    j["status"] = "certificate_failure";
    j["message"] = e.detail();
    j["report"] = report_json(e.report());
    j["problem"] = problem_json(pf);
    j["numerics"] = numerics_json(pf.numerics);
    write_json(dir / (flags.relaxed_only ? "relaxed_summary.json" : "report.json"), j);
    err << "error: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNoMinimizer) throw;
    j["status"] = "no_minimizer";
    j["message"] = e.detail();
    if (const auto g = try_growth(pf)) j["growth"] = growth_json(*g);
    j["problem"] = problem_json(pf);
    j["numerics"] = numerics_json(pf.numerics);
    write_json(dir / (flags.relaxed_only ? "relaxed_summary.json" : "report.json"), j);
    err << "error: " << e.what() << "\n";
    return kExitNoMinimizer;
  }
}

int cmd_growth(const Flags& flags, std::ostream& out) {
  const ProblemFile pf = load(flags);
  const GrowthProfile g = check_growth(pf.spec, convex_envelope(pf.spec.f), pf.numerics);
  write_growth_csv(fs::path(pf.output_dir) / "growth.csv", g, numerics_comment(pf.numerics));
  out << "verdict " << to_string(g.verdict) << "\n";
  return kExitOk;
}

int cmd_envelope(const Flags& flags, std::ostream& out) {
  const ProblemFile pf = load(flags);
  const DualModel model = DualModel::from_envelope(convex_envelope(pf.spec.f));
  write_envelope_csvs(pf.output_dir, pf.spec.f, model, numerics_comment(pf.numerics));
  out << "envelope written to " << pf.output_dir << "\n";
  return kExitOk;
}

int cmd_oracle(const Flags& flags, std::ostream& out) {
  const ProblemFile pf = load(flags);
  DPGrid grid;
  grid.time_steps = pf.numerics.dp_time_steps;
  grid.velocity_levels = pf.numerics.dp_velocity_levels;
  const DPResult r = dp_minimize(pf.spec, grid);
  const fs::path dir = pf.output_dir;
  write_trajectory_csv(dir / "oracle_trajectory.csv", r.trajectory, numerics_comment(pf.numerics));
  ordered_json j;
  j["status"] = "ok";
  j["cost"] = r.cost;
  j["allowance"] = r.allowance;
  j["displacement"] = r.displacement;
  j["cell"] = r.cell;
  j["time_steps"] = grid.time_steps;
  j["velocity_levels"] = grid.velocity_levels;
  j["problem"] = problem_json(pf);
  j["numerics"] = numerics_json(pf.numerics);
  write_json(dir / "oracle_report.json", j);
  out << "oracle_cost " << format_double(r.cost) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver for min int a(t).u + f(u') dt with fixed endpoints", "ncvsolve"};
  app.require_subcommand(1);
  Flags flags;
  auto common = [&flags](CLI::App* sub) {
    sub->add_option("file", flags.file, "problem file (YAML)")->required();
    sub->add_option("--out", flags.out, "output directory (overrides outputs.dir)");
    sub->add_option("--nodes", flags.nodes, "quadrature nodes");
    sub->add_option("--chatter", flags.chatter, "chattering pieces per detachment interval");
    sub->add_option("--tol", flags.tol, "detachment tolerance scale");
    sub->add_option("--shells", flags.shells, "growth shell radii r1,r2,...");
  };
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve and certify a minimizer");
  common(solve_cmd);
  solve_cmd->add_flag("--relaxed-only", flags.relaxed_only, "stop after the relaxed solve");
  CLI::App* growth_cmd = app.add_subcommand("check-growth", "growth profile of the envelope");
  common(growth_cmd);
  CLI::App* env_cmd = app.add_subcommand("envelope", "envelope and conjugate breakpoints");
  common(env_cmd);
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "dynamic-programming reference solve");
  common(oracle_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(flags, out, err);
    if (growth_cmd->parsed()) return cmd_growth(flags, out);
    if (env_cmd->parsed()) return cmd_envelope(flags, out);
    return cmd_oracle(flags, out);
  } catch (const CertificateError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kNoMinimizer ? kExitNoMinimizer : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace ncv
