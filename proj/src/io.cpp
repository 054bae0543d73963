#include "ncv/io.hpp"

#include "ncv/convex_analysis.hpp"
#include "ncv/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ncv {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw Error(ErrorKind::kInvalidInput, "CSV has no column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kInvalidInput, "cannot write " + path.string());
  return os;
}

std::vector<std::string> axis_names(const std::string& base, int m) {
  if (m == 1) return {base};
  return {base + "_x", base + "_y"};
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kInvalidInput, "cannot read " + path.string());
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.substr(1));
      continue;
    }
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorKind::kInvalidInput, path.string() + ":" + std::to_string(lineno) +
                                                ": expected " + std::to_string(t.header.size()) +
                                                " cells");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') {
        throw Error(ErrorKind::kInvalidInput, path.string() + ":" + std::to_string(lineno) +
                                                  ": '" + c + "' is not a number");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(ErrorKind::kInvalidInput, path.string() + ": empty CSV");
  return t;
}

CsvRow csv_row(const std::vector<double>& values) {
  CsvRow row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_double(v));
  return row;
}

void write_csv(const fs::path& path, const std::string& comment,
               const std::vector<std::string>& header, const std::vector<CsvRow>& rows) {
  auto os = open_out(path);
  if (!comment.empty()) os << "# " << comment << '\n';
  auto put = [&os](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
    os << '\n';
  };
  put(header);
  for (const auto& r : rows) put(r);
  if (!os) throw Error(ErrorKind::kInvalidInput, "failed writing " + path.string());
}

void write_json(const fs::path& path, const ordered_json& value) {
  auto os = open_out(path);
  os << value.dump(2) << '\n';
  if (!os) throw Error(ErrorKind::kInvalidInput, "failed writing " + path.string());
}

std::string numerics_comment(const Numerics& n) {
  std::ostringstream os;
  os << "nodes=" << n.nodes << " chatter=" << n.n_chatter << " tol=" << format_double(n.tol)
     << " shells=";
  if (n.shells.empty()) os << "default";
  for (std::size_t k = 0; k < n.shells.size(); ++k) os << (k ? ";" : "") << format_double(n.shells[k]);
  os << " threshold=" << (n.threshold ? format_double(*n.threshold) : "default")
     << " min_decrease_shells=" << n.min_decrease_shells
     << " tol_detach=" << (n.tol_detach ? format_double(*n.tol_detach) : "default")
     << " tol_cert=" << (n.tol_cert ? format_double(*n.tol_cert) : "default")
     << " tol_gap=" << (n.tol_gap ? format_double(*n.tol_gap) : "default")
     << " dp_time_steps=" << n.dp_time_steps << " dp_velocity_levels=" << n.dp_velocity_levels;
  return os.str();
}

namespace {

ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

ordered_json optional_number(const std::optional<double>& x) {
  return x ? number(*x) : ordered_json(nullptr);
}

ordered_json vec_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(number(v[k]));
  return a;
}

}  // namespace

ordered_json numerics_json(const Numerics& n) {
  ordered_json j;
  j["nodes"] = n.nodes;
  j["chatter"] = n.n_chatter;
  j["tol"] = n.tol;
  j["shells"] = n.shells;
  j["threshold"] = optional_number(n.threshold);
  j["min_decrease_shells"] = n.min_decrease_shells;
  j["tol_detach"] = optional_number(n.tol_detach);
  j["tol_cert"] = optional_number(n.tol_cert);
  j["tol_gap"] = optional_number(n.tol_gap);
  j["dp_time_steps"] = n.dp_time_steps;
  j["dp_velocity_levels"] = n.dp_velocity_levels;
  return j;
}

ordered_json report_json(const SolveReport& r) {
  ordered_json j;
  j["c"] = vec_json(r.c);
  j["relaxed_cost"] = number(r.relaxed_cost);
  j["dual_value"] = number(r.dual_value);
  j["cost_f"] = number(r.cost_f);
  j["cost_env"] = number(r.cost_env);
  j["gap"] = number(r.gap);
  j["duality_gap"] = number(r.duality_gap);
  j["endpoint_residual"] = number(r.endpoint_residual);
  j["tol_cert"] = number(r.tol_cert);
  j["tol_gap"] = number(r.tol_gap);
  j["theta"] = number(r.theta);
  j["detachment_intervals"] = r.detachment_intervals;
  j["sup_deviation"] = number(r.sup_deviation);
  j["growth_verdict"] = std::string(to_string(r.verdict));
  j["is_minimizer"] = r.is_minimizer;
  return j;
}

ordered_json growth_json(const GrowthProfile& p) {
  ordered_json j;
  j["verdict"] = std::string(to_string(p.verdict));
  j["divergence_slope"] = number(p.divergence_slope);
  j["max_cross_check_error"] = number(p.max_cross_check_error);
  j["envelope_range"] = number(p.envelope_range);
  return j;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const std::string& comment) {
  const int m = static_cast<int>(traj.u.front().size());
  std::vector<std::string> header{"t"};
  for (const auto& h : axis_names("u", m)) header.push_back(h);
  for (const auto& h : axis_names("v", m)) header.push_back(h);
  std::vector<CsvRow> rows;
  rows.reserve(traj.t.size());
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const Vec& v = traj.v[std::min(k, traj.v.size() - 1)];
    std::vector<double> r{traj.t[k]};
    for (int a = 0; a < m; ++a) r.push_back(traj.u[k][a]);
    for (int a = 0; a < m; ++a) r.push_back(v[a]);
    rows.push_back(csv_row(r));
  }
  write_csv(path, comment, header, rows);
}

void write_relaxed_csv(const fs::path& path, const AccumulatedTerm& acc,
                       const RelaxedSolution& rel, const std::string& comment) {
  const int m = static_cast<int>(rel.c.size());
  std::vector<std::string> header{"s"};
  for (const auto& h : axis_names("B", m)) header.push_back(h);
  for (const auto& h : axis_names("v", m)) header.push_back(h);
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    std::vector<double> r{acc.s[i]};
    for (int a = 0; a < m; ++a) r.push_back(acc.B[i][a]);
    for (int a = 0; a < m; ++a) r.push_back(rel.v[i][a]);
    rows.push_back(csv_row(r));
  }
  write_csv(path, comment, header, rows);
}

void write_growth_csv(const fs::path& path, const GrowthProfile& profile,
                      const std::string& comment) {
  std::vector<CsvRow> rows;
  const std::string verdict(to_string(profile.verdict));
  for (const auto& s : profile.shells) {
    rows.push_back({format_double(s.radius), format_double(s.g_max), verdict});
  }
  write_csv(path, comment, {"radius", "g_max", "verdict"}, rows);
}

void write_envelope_csvs(const fs::path& dir, const SampledFunction& f, const DualModel& model,
                         const std::string& comment) {
  const int m = f.dim();
  std::vector<std::string> header = m == 1 ? std::vector<std::string>{"x"}
                                           : std::vector<std::string>{"x", "y"};
  header.push_back("f");
  header.push_back("f_env");
  std::vector<CsvRow> rows;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Vec x = f.node(k);
    std::vector<double> r(x.data(), x.data() + x.size());
    r.push_back(f.value(k));
    r.push_back(model.envelope(x));
    rows.push_back(csv_row(r));
  }
  write_csv(dir / "envelope.csv", comment, header, rows);

  std::vector<CsvRow> bp;
  std::vector<CsvRow> cj;
  if (m == 1) {
    const auto& g = model.envelope.one();
    for (std::size_t k = 0; k < g.breakpoints().size(); ++k) {
      bp.push_back(csv_row({g.breakpoints()[k], g.values()[k]}));
    }
    const auto& h = model.conjugate.one();
    for (std::size_t k = 0; k < h.breakpoints().size(); ++k) {
      cj.push_back(csv_row({h.breakpoints()[k], h.values()[k]}));
    }
    write_csv(dir / "breakpoints.csv", comment, {"x", "f_env"}, bp);
    write_csv(dir / "conjugate.csv", comment, {"p", "f_conj"}, cj);
    return;
  }
  for (const auto& v : model.envelope.two().vertices()) bp.push_back(csv_row({v.x(), v.y(), v.z()}));
  for (const auto& v : model.conjugate.two().vertices()) cj.push_back(csv_row({v.x(), v.y(), v.z()}));
  write_csv(dir / "breakpoints.csv", comment, {"x", "y", "f_env"}, bp);
  write_csv(dir / "conjugate.csv", comment, {"p_x", "p_y", "f_conj"}, cj);
}

}  // namespace ncv
