#include "ncv/error.hpp"
#include "ncv/problem_file.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace ncv;
namespace fs = std::filesystem;

namespace {

std::string invalid_message(const std::string& text, const fs::path& base = ".") {
  try {
    (void)parse_problem(text, base, "p.yaml");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidInput);
    return e.detail();
  }
  FAIL("expected InvalidInput");
  return {};
}

const char* kBase = R"(function:
  box: [-2, 2]
  step: 0.5
  expression: "(x^2 - 1)^2"
horizon: 2
u0: 0.25
u1: -0.25
)";

}  // namespace

TEST_CASE("minimal document with defaults") {
  const auto pf = parse_problem(kBase, ".", "p.yaml");
  CHECK(pf.spec.horizon == 2.0);
  CHECK(pf.spec.dim() == 1);
  CHECK(pf.spec.f.size() == 9);
  CHECK(pf.spec.f.value(4) == 1.0);
  CHECK(pf.spec.delta()[0] == -0.5);
  CHECK(pf.spec.a.is_zero());
  CHECK(pf.numerics.nodes == 1001);
  CHECK(pf.numerics.n_chatter == 16);
  CHECK(pf.numerics.tol == 1e-6);
  CHECK(pf.output_dir == ".");
}

TEST_CASE("numerics, linear term and outputs") {
  const std::string text = std::string(kBase) + R"(linear_term:
  expression: "2*t - 1"
numerics:
  nodes: 51
  chatter: 4
  shells: [0, 1, 1.5]
  threshold: -3
  tol_cert: 0.001
outputs:
  dir: out
)";
  const auto pf = parse_problem(text, ".", "p.yaml");
  CHECK(pf.spec.a(0.5)[0] == 0.0);
  CHECK(pf.spec.a(2.0)[0] == 3.0);
  CHECK(pf.numerics.nodes == 51);
  CHECK(pf.numerics.n_chatter == 4);
  CHECK(pf.numerics.shells == std::vector<double>{0, 1, 1.5});
  CHECK(pf.numerics.threshold.value() == -3.0);
  CHECK(pf.numerics.tol_cert.value() == 0.001);
  CHECK_FALSE(pf.numerics.tol_gap.has_value());
  CHECK(pf.output_dir == "out");

  const auto sampled = parse_problem(std::string(kBase) + "linear_term:\n  samples: [0, 1, 0]\n", ".", "p.yaml");
  CHECK(sampled.spec.a(0.5)[0] == doctest::Approx(0.5));
  CHECK(sampled.spec.a(1.0)[0] == doctest::Approx(1.0));
}

TEST_CASE("validation errors name the file, line and field") {
  const std::string unknown = std::string(kBase) + "colour: red\n";
  const auto msg = invalid_message(unknown);
  CHECK(msg.find("p.yaml:8") == 0);
  CHECK(msg.find("colour") != std::string::npos);

  CHECK(invalid_message(std::string(kBase) + "numerics:\n  node: 5\n").find("node") != std::string::npos);
  const auto missing = invalid_message("function:\n  box: [-2, 2]\n  step: 0.5\n  expression: \"x\"\nhorizon: 1\nu0: 0\n");
  CHECK(missing.find("u1") != std::string::npos);
  CHECK(invalid_message("function:\n  box: [2, -2]\n  step: 0.5\n  expression: \"x\"\nhorizon: 1\nu0: 0\nu1: 0\n")
            .find("function.box") != std::string::npos);
  CHECK(invalid_message("function:\n  box: [-2, 2]\n  step: 0.5\n  expression: \"x +\"\nhorizon: 1\nu0: 0\nu1: 0\n")
            .find("function.expression") != std::string::npos);
  CHECK(invalid_message("function:\n  box: [-2, 2]\n  step: 0.5\n  expression: \"x\"\nhorizon: 0\nu0: 0\nu1: 0\n")
            .find("horizon") != std::string::npos);
  CHECK(invalid_message(std::string(kBase) + "numerics:\n  nodes: 1\n").find("numerics.nodes") != std::string::npos);
}

TEST_CASE("tabulated and listed integrands") {
  const fs::path dir = fs::temp_directory_path() / "ncv_problem_file_test";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "f.csv");
    out << "# sampled well\nx,g\n-1,0\n-0.5,0.5625\n0,1\n0.5,0.5625\n1,inf\n";
  }
  const std::string text = R"(function:
  box: [-1, 1]
  step: 0.5
  table: f.csv
  table_column: g
horizon: 1
u0: 0
u1: 0
)";
  const auto pf = parse_problem(text, dir, "p.yaml");
  CHECK(pf.spec.f.value(1) == 0.5625);
  CHECK(std::isinf(pf.spec.f.value(4)));

  {
    std::ofstream out(dir / "bad.csv");
    out << "x,f\n-1,0\n0,1\n-0.5,0.5625\n0.5,0.5625\n1,0\n";
  }
  std::string bad = text;
  bad.replace(bad.find("f.csv"), 5, "bad.csv");
  bad.replace(bad.find("  table_column: g\n"), 18, "");
  CHECK(invalid_message(bad, dir).find("not on the declared grid") != std::string::npos);

  const auto listed = parse_problem(
      "function:\n  box: [[0, 1], [0, 1]]\n  step: [1, 1]\n  values: [0, 1, 2, 3]\nhorizon: 1\nu0: [0, 0]\nu1: [0.5, 0]\n",
      ".", "p.yaml");
  CHECK(listed.spec.dim() == 2);
  CHECK(listed.spec.f.value(2) == 2.0);
  CHECK(listed.spec.f.node(2)[1] == 1.0);
  fs::remove_all(dir);
}

TEST_CASE("fixture files load") {
  const fs::path data = NCV_TEST_DATA;
  CHECK_NOTHROW(load_problem_file(data / "double_well.yaml"));
  CHECK_NOTHROW(load_problem_file(data / "quadratic_drift.yaml"));
  CHECK_THROWS_AS(load_problem_file(data / "missing_u1.yaml"), Error);
  CHECK_THROWS_AS(load_problem_file(data / "no_such_file.yaml"), Error);
}
