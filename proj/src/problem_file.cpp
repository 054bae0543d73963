#include "ncv/problem_file.hpp"

#include "ncv/error.hpp"
#include "ncv/expression.hpp"
#include "ncv/io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace ncv {

namespace fs = std::filesystem;

namespace {

class Reader {
 public:
  explicit Reader(std::string name) : name_(std::move(name)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field,
                         const std::string& what) const {
    std::ostringstream os;
    os << name_;
    if (at.IsDefined() && at.Mark().line >= 0) os << ":" << at.Mark().line + 1;
    os << ": " << field << ": " << what;
    throw Error(ErrorKind::kInvalidInput, os.str());
  }

  void only(const YAML::Node& map, const std::string& where, std::set<std::string> allowed) const {
    if (!map.IsMap()) fail(map, where, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, where.empty() ? key : where + "." + key, "unknown key");
    }
  }

  YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& where) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, where.empty() ? key : where + "." + key, "required field is missing");
    return n;
  }

  double number(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    const std::string s = n.Scalar();
    if (s == "inf" || s == "+inf" || s == ".inf" || s == "+.inf" || s == "Inf") return kInf;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || std::isnan(v)) fail(n, field, "'" + s + "' is not a number");
    return v;
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    const double v = number(n, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(n, field, "expected an integer");
    return static_cast<int>(v);
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& field) const {
    std::vector<double> out;
    if (n.IsScalar()) {
      out.push_back(number(n, field));
      return out;
    }
    if (!n.IsSequence()) fail(n, field, "expected a number or a list of numbers");
    for (std::size_t k = 0; k < n.size(); ++k) out.push_back(number(n[k], field));
    return out;
  }

  Vec vector(const YAML::Node& n, const std::string& field) const {
    const auto v = numbers(n, field);
    if (v.empty() || v.size() > 2) fail(n, field, "expected 1 or 2 components");
    for (double x : v) {
      if (!std::isfinite(x)) fail(n, field, "components must be finite");
    }
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[k];
    return out;
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

Box parse_box(const Reader& r, const YAML::Node& n) {
  if (!n.IsSequence() || n.size() == 0) r.fail(n, "function.box", "expected [lo, hi] or [[lo, hi], [lo, hi]]");
  Box box;
  if (n[0].IsScalar()) {
    const auto v = r.numbers(n, "function.box");
    if (v.size() != 2) r.fail(n, "function.box", "expected [lo, hi]");
    box.push_back({v[0], v[1]});
  } else {
    if (n.size() > 2) r.fail(n, "function.box", "at most 2 dimensions");
    for (std::size_t k = 0; k < n.size(); ++k) {
      const auto v = r.numbers(n[k], "function.box");
      if (v.size() != 2) r.fail(n[k], "function.box", "expected [lo, hi]");
      box.push_back({v[0], v[1]});
    }
  }
  for (const auto& i : box) {
    if (!std::isfinite(i.lo) || !std::isfinite(i.hi) || !(i.lo < i.hi)) {
      r.fail(n, "function.box", "need finite lo < hi");
    }
  }
  return box;
}

std::vector<std::string> variables(int m) {
  return m == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
}

Expression expression(const Reader& r, const YAML::Node& n, const std::string& field,
                      const std::vector<std::string>& vars) {
  try {
    return Expression::parse(r.text(n, field), vars);
  } catch (const Error& e) {
    r.fail(n, field, e.detail());
  }
}

SampledFunction parse_function(const Reader& r, const YAML::Node& fn, const fs::path& base,
                               std::function<double(const Vec&)>* tail) {
  r.only(fn, "function", {"box", "step", "expression", "values", "table", "table_column", "tail"});
  const Box box = parse_box(r, r.require(fn, "box", "function"));
  const int m = static_cast<int>(box.size());
  const YAML::Node step_node = r.require(fn, "step", "function");
  std::vector<double> step = r.numbers(step_node, "function.step");
  if (step.size() == 1 && m == 2) step.push_back(step[0]);
  if (static_cast<int>(step.size()) != m) r.fail(step_node, "function.step", "one step per box axis");

  const int sources = (fn["expression"] ? 1 : 0) + (fn["values"] ? 1 : 0) + (fn["table"] ? 1 : 0);
  if (sources != 1) r.fail(fn, "function", "exactly one of expression, values, table is required");
  if (fn["table_column"] && !fn["table"]) r.fail(fn["table_column"], "function.table_column", "only valid with table");

  if (fn["tail"]) {
    const Expression e = expression(r, fn["tail"], "function.tail", variables(m));
    *tail = [e](const Vec& x) { return e(std::vector<double>(x.data(), x.data() + x.size())); };
  }

  try {
    if (fn["expression"]) {
      const Expression e = expression(r, fn["expression"], "function.expression", variables(m));
      return SampledFunction::sample(box, step, [&e](const Vec& x) {
        return e(std::vector<double>(x.data(), x.data() + x.size()));
      });
    }
    if (fn["values"]) {
      const auto values = r.numbers(fn["values"], "function.values");
      return SampledFunction(box, step, values);
    }
    const YAML::Node table = fn["table"];
    fs::path path = r.text(table, "function.table");
    if (path.is_relative()) path = base / path;
    const std::string column =
        fn["table_column"] ? r.text(fn["table_column"], "function.table_column") : "f";
    CsvTable csv;
    std::size_t value_col = 0;
    std::vector<std::size_t> coord_cols;
    try {
      csv = read_csv(path);
      value_col = csv.column(column);
      coord_cols.push_back(csv.column("x"));
      if (m == 2) coord_cols.push_back(csv.column("y"));
    } catch (const Error& e) {
      r.fail(table, "function.table", e.detail());
    }
    std::vector<double> values;
    values.reserve(csv.rows.size());
    for (const auto& row : csv.rows) values.push_back(row[value_col]);
    SampledFunction f(box, step, values);
    for (std::size_t k = 0; k < csv.rows.size(); ++k) {
      const Vec x = f.node(k);
      for (int a = 0; a < m; ++a) {
        const double got = csv.rows[k][coord_cols[static_cast<std::size_t>(a)]];
        if (std::abs(got - x[a]) > 1e-9 * step[static_cast<std::size_t>(a)]) {
          r.fail(table, "function.table", "row " + std::to_string(k + 1) +
                                              " is not on the declared grid (x-fastest order)");
        }
      }
    }
    return f;
  } catch (const Error& e) {
    if (e.detail().rfind(r.name(), 0) == 0) throw;
    r.fail(fn, "function", e.detail());
  }
}

LinearTerm parse_linear(const Reader& r, const YAML::Node& n, int m, double horizon) {
  if (!n) return LinearTerm::zero(m);
  r.only(n, "linear_term", {"expression", "samples"});
  if (!!n["expression"] == !!n["samples"]) {
    r.fail(n, "linear_term", "exactly one of expression, samples is required");
  }
  if (n["expression"]) {
    const YAML::Node e = n["expression"];
    std::vector<Expression> parts;
    if (e.IsSequence()) {
      for (std::size_t k = 0; k < e.size(); ++k) parts.push_back(expression(r, e[k], "linear_term.expression", {"t"}));
    } else {
      parts.push_back(expression(r, e, "linear_term.expression", {"t"}));
    }
    if (static_cast<int>(parts.size()) != m) {
      r.fail(e, "linear_term.expression", "need " + std::to_string(m) + " component(s)");
    }
    return LinearTerm::closed_form(m, [parts](double t) {
      Vec out(static_cast<Eigen::Index>(parts.size()));
      for (std::size_t k = 0; k < parts.size(); ++k) out[static_cast<Eigen::Index>(k)] = parts[k](t);
      return out;
    });
  }
  const YAML::Node s = n["samples"];
  std::vector<std::vector<double>> comps;
  if (s.IsSequence() && s.size() > 0 && s[0].IsSequence()) {
    for (std::size_t k = 0; k < s.size(); ++k) comps.push_back(r.numbers(s[k], "linear_term.samples"));
  } else {
    comps.push_back(r.numbers(s, "linear_term.samples"));
  }
  if (static_cast<int>(comps.size()) != m) r.fail(s, "linear_term.samples", "need " + std::to_string(m) + " component(s)");
  try {
    return LinearTerm::sampled(horizon, comps);
  } catch (const Error& e) {
    r.fail(s, "linear_term.samples", e.detail());
  }
}

Numerics parse_numerics(const Reader& r, const YAML::Node& n) {
  Numerics out;
  if (!n) return out;
  r.only(n, "numerics", {"nodes", "chatter", "tol", "shells", "threshold", "min_decrease_shells",
                         "tol_detach", "tol_cert", "tol_gap", "dp_time_steps", "dp_velocity_levels"});
  if (n["nodes"]) out.nodes = r.integer(n["nodes"], "numerics.nodes");
  if (n["chatter"]) out.n_chatter = r.integer(n["chatter"], "numerics.chatter");
  if (n["tol"]) out.tol = r.number(n["tol"], "numerics.tol");
  if (n["shells"]) out.shells = r.numbers(n["shells"], "numerics.shells");
  if (n["threshold"]) out.threshold = r.number(n["threshold"], "numerics.threshold");
  if (n["min_decrease_shells"]) {
    out.min_decrease_shells = r.integer(n["min_decrease_shells"], "numerics.min_decrease_shells");
  }
  if (n["tol_detach"]) out.tol_detach = r.number(n["tol_detach"], "numerics.tol_detach");
  if (n["tol_cert"]) out.tol_cert = r.number(n["tol_cert"], "numerics.tol_cert");
  if (n["tol_gap"]) out.tol_gap = r.number(n["tol_gap"], "numerics.tol_gap");
  if (n["dp_time_steps"]) out.dp_time_steps = r.integer(n["dp_time_steps"], "numerics.dp_time_steps");
  if (n["dp_velocity_levels"]) {
    out.dp_velocity_levels = r.integer(n["dp_velocity_levels"], "numerics.dp_velocity_levels");
  }
  if (out.nodes < 2) r.fail(n["nodes"], "numerics.nodes", "must be >= 2");
  if (out.n_chatter < 1) r.fail(n["chatter"], "numerics.chatter", "must be >= 1");
  if (!(out.tol > 0.0)) r.fail(n["tol"], "numerics.tol", "must be > 0");
  if (out.min_decrease_shells < 1) r.fail(n["min_decrease_shells"], "numerics.min_decrease_shells", "must be >= 1");
  for (std::size_t k = 1; k < out.shells.size(); ++k) {
    if (!(out.shells[k] > out.shells[k - 1])) r.fail(n["shells"], "numerics.shells", "radii must increase strictly");
  }
  return out;
}

}  // namespace

ProblemFile parse_problem(const std::string& text, const fs::path& base_dir, const std::string& name) {
  const Reader r(name);
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << name << ":" << e.mark.line + 1 << ": " << e.msg;
    throw Error(ErrorKind::kInvalidInput, os.str());
  }
  if (!doc || !doc.IsMap()) throw Error(ErrorKind::kInvalidInput, name + ": expected a mapping at the top level");
  r.only(doc, "", {"function", "linear_term", "horizon", "u0", "u1", "numerics", "outputs"});

  std::function<double(const Vec&)> tail;
  SampledFunction f = parse_function(r, r.require(doc, "function", ""), base_dir, &tail);
  const int m = f.dim();
  const YAML::Node h = r.require(doc, "horizon", "");
  const double horizon = r.number(h, "horizon");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) r.fail(h, "horizon", "must be a positive number");
  const YAML::Node u0n = r.require(doc, "u0", "");
  const YAML::Node u1n = r.require(doc, "u1", "");
  Vec u0 = r.vector(u0n, "u0");
  Vec u1 = r.vector(u1n, "u1");
  if (u0.size() != m) r.fail(u0n, "u0", "dimension must match function.box");
  if (u1.size() != m) r.fail(u1n, "u1", "dimension must match function.box");
  LinearTerm a = parse_linear(r, doc["linear_term"], m, horizon);

  ProblemFile pf{ProblemSpec{horizon, u0, u1, std::move(a), std::move(f), std::move(tail)},
                 parse_numerics(r, doc["numerics"]), "."};
  if (const YAML::Node out = doc["outputs"]) {
    r.only(out, "outputs", {"dir"});
    if (out["dir"]) pf.output_dir = r.text(out["dir"], "outputs.dir");
  }
  return pf;
}

ProblemFile load_problem_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kInvalidInput, "cannot read problem file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_problem(ss.str(), path.parent_path(), path.string());
}

}  // namespace ncv
