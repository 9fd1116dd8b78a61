#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "magpauli/cli.hpp"
#include "magpauli/errors.hpp"

using namespace magpauli;
using namespace magpauli::cli;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = MAGPAULI_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("magpauli_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

ErrorCode parse_error_code(const std::string& text, bool lenient = false) {
  try {
    parse_config(text, lenient);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

int shell(const std::string& cmd) {
  const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* kExample2Spectral =
    R"("spectral": {"k": [[0,0],[5,0],[0,-10],[-5,0],[0,10]], "p": [[0,0],[5,0],[0,10],[-5,0],[0,-10]],
                    "divisor": [[2,0],[0,1],[-2,0],[0,-1]]})";

}  // namespace

TEST_CASE("parse the shipped configs") {
  const auto cfg = load_config(kConfigs + "/example2.json");
  CHECK(cfg.mode == Mode::Genus0);
  REQUIRE(cfg.spectral);
  CHECK(cfg.spectral->k_points.size() == 5);
  for (const auto& e : fs::directory_iterator(kConfigs)) CHECK_NOTHROW(load_config(e.path().string()));
}

TEST_CASE("parse errors carry a position") {
  CHECK(parse_error_code("") == ErrorCode::ParseError);
  try {
    parse_config("{\n  \"mode\": \"genus0\",\n  \"grid\": {,}\n}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("schema errors name the key") {
  const std::string repeated = std::string("{\"mode\": \"polygon\", ") +
                               R"("spectral": {"k": [[0,0],[5,0],[5,0]], "p": [[0,0],[1,0],[2,0]], "divisor": [[1,0],[2,0]]}})";
  CHECK(parse_error_code(repeated) == ErrorCode::SchemaError);

  try {
    parse_config(std::string("{\"mode\": \"genus0\", ") + kExample2Spectral + "}");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("grid") != std::string::npos);
  }
  CHECK(parse_error_code(R"({"mode": "polygon", "terms": [{"kappa": [1], "alpha_beta": [0, 1]}]})") == ErrorCode::SchemaError);
  CHECK(parse_error_code(R"({"mode": "nonsense"})") == ErrorCode::SchemaError);
  CHECK(parse_error_code(R"({"mode": "verify", "suite": "everything"})") == ErrorCode::SchemaError);
  CHECK(parse_error_code(R"({"mode": "flux-scan", "terms": [{"kappa": [1,0], "alpha_beta": [0,1]}], "flux": {"radii": [-1]}})") ==
        ErrorCode::SchemaError);
  CHECK(parse_error_code(R"({"mode": "bloch", "lattice": {"omega2": [0.2, 1]}})") == ErrorCode::SchemaError);
}

TEST_CASE("unknown keys: strict and lenient") {
  const std::string text = R"({"mode": "verify", "colour": "blue", "flags": {"field_sign": 1, "extra": 0}})";
  try {
    parse_config(text);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
  const auto cfg = parse_config(text, true);
  CHECK(cfg.warnings.size() == 2);
  CHECK(cfg.field_sign == 1.0);
}

TEST_CASE("genus0 run on example 2") {
  const auto dir = scratch("ex2");
  const auto res = run(load_config(kConfigs + "/example2.json"), {dir.string(), 1, nullptr});
  CHECK(res.exit_code == 0);
  const auto rows = read_csv(dir / "example2_field.csv");
  REQUIRE(rows.size() == 32 * 64);
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[0][1] == 0.0);
  CHECK(rows[0][2] == doctest::Approx(1.0).epsilon(1e-14));
  // Δc(0) = -(100·546 + 400·2574)/3125 and c_z(0) = 0
  CHECK(rows[0][3] == doctest::Approx(-2.0 * (-1084200.0 / 3125.0) / 4.0).epsilon(1e-10));
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("c_terms.csv round trip") {
  const auto dir = scratch("rt");
  const auto cfg = load_config(kConfigs + "/example3_field.json");
  REQUIRE(run(cfg, {dir.string(), 2, nullptr}).exit_code == 0);
  const auto back = read_terms_csv((dir / "example3_c_terms.csv").string());
  const auto dir2 = scratch("ex2rt");
  REQUIRE(run(load_config(kConfigs + "/example2.json"), {dir2.string(), 1, nullptr}).exit_code == 0);
  const auto ex2 = read_terms_csv((dir2 / "example2_c_terms.csv").string());
  const auto ref = build_exponential_sum(*load_config(kConfigs + "/example2.json").spectral);
  for (Point p : {Point{0.1, 0.2}, Point{-1.3, 0.7}, Point{2.0, -0.4}}) {
    CHECK(std::abs(eval_c(back, p) - eval_c(*cfg.terms, p)) <= 1e-15 * std::abs(eval_c(*cfg.terms, p)));
    CHECK(std::abs(eval_c(ex2, p) - eval_c(ref, p)) <= 1e-15 * std::max(1.0, std::abs(eval_c(ref, p))));
  }
  // and the config can point at it directly
  const std::string text = R"({"mode": "polygon", "terms_csv": "example3_c_terms.csv"})";
  CHECK(parse_config(text, false, dir.string()).terms->size() == 3);
}

TEST_CASE("deterministic output across runs and thread counts") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto cfg = load_config(kConfigs + "/example3_field.json");
  REQUIRE(run(cfg, {a.string(), 1, nullptr}).exit_code == 0);
  REQUIRE(run(cfg, {b.string(), 4, nullptr}).exit_code == 0);
  for (const char* f : {"example3_field.csv", "example3_c_terms.csv"}) {
    const auto x = slurp(a / f);
    CHECK(!x.empty());
    CHECK(x == slurp(b / f));
    CHECK(x.find('\r') == std::string::npos);
  }
}

TEST_CASE("polygon run on example 1") {
  const auto dir = scratch("poly");
  REQUIRE(run(load_config(kConfigs + "/example1_polygon.json"), {dir.string(), 1, nullptr}).exit_code == 0);
  auto rows = read_csv(dir / "example1_polygon.csv");
  REQUIRE(rows.size() == 2);
  std::sort(rows.begin(), rows.end());
  CHECK(rows[0] == std::vector<double>{0.0, -1.0});
  CHECK(rows[1] == std::vector<double>{0.0, 0.0});
}

TEST_CASE("flux scan on example 3") {
  const auto dir = scratch("flux");
  REQUIRE(run(load_config(kConfigs + "/example3_fluxscan.json"), {dir.string(), 3, nullptr}).exit_code == 0);
  const auto rows = read_csv(dir / "example3_flux.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(rows[i][2]) < std::abs(rows[i - 1][2]));
}

TEST_CASE("genus-one modes") {
  const auto dir = scratch("g1");
  const RunOptions opt{dir.string(), 2, nullptr};
  auto res = run(load_config(kConfigs + "/genus1_positive.json"), opt);
  CHECK(res.exit_code == 0);
  CHECK(res.report.find("1 quanta") != std::string::npos);
  CHECK(run(load_config(kConfigs + "/genus1_data.json"), opt).exit_code == 0);
  res = run(load_config(kConfigs + "/periodicity.json"), opt);
  CHECK(res.exit_code == 0);
  CHECK(read_csv(dir / "periodicity.csv").size() >= 1);
  CHECK(run(load_config(kConfigs + "/bloch.json"), opt).exit_code == 0);
  const auto rows = read_csv(dir / "multipliers.csv");
  REQUIRE(rows.size() == 400);
  for (const auto& r : rows) {
    CHECK(std::abs(r[2] - 1.0) < 1e-10);
    CHECK(std::abs(r[4] - 1.0) < 1e-10);
  }
}

TEST_CASE("module errors become exit codes") {
  const auto dir = scratch("err");
  // the closing example needs a gauge shift before its regularized flux is defined
  auto cfg = load_config(kConfigs + "/closing_fluxscan.json");
  cfg.shift.reset();
  CHECK(run(cfg, {dir.string(), 1, nullptr}).exit_code == exit_code(ErrorCode::UnstableClass));
  CHECK(run(load_config(kConfigs + "/closing_fluxscan.json"), {dir.string(), 1, nullptr}).exit_code == 0);
}

TEST_CASE("verify suite") {
  for (const char* s : {"genus0", "genus1", "flux"}) {
    const auto lines = verify_suite(s);
    CHECK(!lines.empty());
    for (const auto& l : lines) CHECK_MESSAGE(l.pass, l.name);
  }
}

TEST_CASE("thread count resolution") {
  ::setenv("MAGPAULI_THREADS", "3", 1);
  CHECK(resolve_threads(std::nullopt) == 3);
  CHECK(resolve_threads(5) == 5);
  ::setenv("MAGPAULI_THREADS", "lots", 1);
  CHECK(resolve_threads(std::nullopt) == 1);
  ::unsetenv("MAGPAULI_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
}

TEST_CASE("format and atomic write") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const auto dir = scratch("atomic");
  write_atomic((dir / "sub" / "x.csv").string(), "a\n");
  CHECK(slurp(dir / "sub" / "x.csv") == "a\n");
  CHECK_FALSE(fs::exists(dir / "sub" / "x.csv.tmp"));
}

TEST_CASE("command line binary") {
  const std::string bin = MAGPAULI_BIN;
  const auto dir = scratch("bin");
  CHECK(shell(bin + " --help") == 0);
  CHECK(shell(bin) == kExitUsage);
  CHECK(shell(bin + " run " + kConfigs + "/example1_polygon.json --out-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "example1_polygon.csv"));
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"mode\": \"genus0\"}";
  CHECK(shell(bin + " run " + bad.string()) == exit_code(ErrorCode::SchemaError));
  std::ofstream(dir / "empty.json").close();
  CHECK(shell(bin + " run " + (dir / "empty.json").string()) == exit_code(ErrorCode::ParseError));
  CHECK(shell(bin + " run " + (dir / "missing.json").string()) == exit_code(ErrorCode::IoError));
  CHECK(shell(bin + " verify --suite flux") == 0);
  CHECK(shell(bin + " run " + bad.string() + " --threads 0") == kExitUsage);
}
