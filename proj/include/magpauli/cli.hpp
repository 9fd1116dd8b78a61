#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "magpauli/errors.hpp"
#include "magpauli/expsum.hpp"
#include "magpauli/genus1.hpp"
#include "magpauli/growth.hpp"

namespace magpauli::cli {

enum class Mode { Genus0, Genus1, FluxScan, Polygon, Verify, Periodicity, Bloch };

const char* to_string(Mode m);

struct Tolerances {
  double cancellation = kDefaultCancellation;
  double quad = 1e-12;
  double flux = 1e-13;
  double compatibility = 1e-9;
  double periodicity = 1e-10;
  double field_periodicity = 1e-6;
  double unitarity = 1e-10;
};

// Genus-one input comes either as spectral data (Q, R, D', P) or as explicit
// canonical terms; "positive" asks for the built-in positive periodic sum.
struct Genus1Block {
  std::vector<cplx> Q, R, Pprime;
  std::optional<cplx> P;
  bool canonical_divisor = false;
  std::vector<CanonicalTerm> canonical;
  bool positive = false;
  std::optional<cplx> lambda;
  cplx beta = 0.05;
};

struct RunConfig {
  Mode mode = Mode::Genus0;
  std::optional<SpectralDataG0> spectral;
  std::optional<ExponentialSum> terms;
  std::optional<Grid2D> grid;
  cplx omega2{0.0, 1.0};
  Genus1Block genus1;

  std::vector<double> radii;
  int series_order = 1;
  std::optional<RealLinearForm> shift;

  int n = 0, m = 0, seed_grid = 8;

  cplx bloch_P = 0.0;
  std::optional<Grid2D> p_grid;
  bool unitarize = false;

  std::string suite = "all";
  std::optional<RealLinearForm> w;
  Sector sector = Sector::Minus;
  double field_sign = -1.0;

  std::map<std::string, std::string> outputs;
  Tolerances tol;
  std::vector<std::string> warnings;

  std::string output(const std::string& key) const;
};

/// Throws Error(ParseError) with line/column, or Error(SchemaError) naming the key.
/// Relative paths inside the config (terms_csv) resolve against base_dir.
RunConfig parse_config(const std::string& text, bool lenient = false, const std::string& base_dir = "");
RunConfig load_config(const std::string& path, bool lenient = false);

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
  std::ostream* log = nullptr;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> written;
  std::string report;
};

RunResult run(const RunConfig& cfg, const RunOptions& opt);

struct VerifyLine {
  std::string name;
  double value;
  double limit;
  bool pass;
};

std::vector<VerifyLine> verify_suite(const std::string& suite, const Tolerances& tol = {});
std::string format_report(const std::vector<VerifyLine>& lines);

std::string format_double(double v);
void write_atomic(const std::string& path, const std::string& content);
ExponentialSum read_terms_csv(const std::string& path);
std::string terms_csv(const ExponentialSum& c);

/// --threads wins, then MAGPAULI_THREADS, then 1.
int resolve_threads(std::optional<int> flag);

inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitUsage = 2;
int exit_code(ErrorCode code);
std::string exit_code_table();

}  // namespace magpauli::cli
