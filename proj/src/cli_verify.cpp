#include <cmath>
#include <cstdio>
#include <numbers>

#include "magpauli/cli.hpp"
#include "magpauli/flux.hpp"

namespace magpauli::cli {

namespace {

using std::numbers::pi;

SpectralDataG0 example2() {
  const cplx i{0, 1};
  return {{0.0, 5.0, -10.0 * i, -5.0, 10.0 * i}, {0.0, 5.0, 10.0 * i, -5.0, -10.0 * i}, {2.0, i, -2.0, -i}};
}

ExponentialSum example3() { return real_exponential_sum({{1, 1, 0}, {1, 0, 1}, {1, -1, -1}}); }

double max_interior(const std::vector<cplx>& v, const Grid2D& g) {
  double m = 0.0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) m = std::max(m, std::abs(v[g.index(i, j)]));
  return m;
}

void genus0_checks(std::vector<VerifyLine>& out, const Tolerances&) {
  const auto c = build_exponential_sum(example2());
  out.push_back({"genus0: example 2 value at origin", std::abs(eval_c(c, {0, 0}) - 1.0), 1e-12, false});
  const auto rep = classify_reality(c);
  out.push_back({"genus0: example 2 is a real trigonometric sum", rep.real ? 0.0 : 1.0, 0.5, false});
  out.push_back({"genus0: example 2 residue conditions", check_residues(example2()).worst, 1e-10, false});

  auto phi = [](double, double y) { return 0.5 * std::log1p(std::exp(y)); };
  auto psi = [](double, double y) { return cplx(1.0 / std::sqrt(1.0 + std::exp(y))); };
  const Grid2D g1{-1, -1, 0.02, 0.02, 101, 101}, g2{-1, -1, 0.01, 0.01, 201, 201};
  const double ratio = max_interior(fd_apply_pauli(phi, psi, Sector::Minus, g1), g1) /
                       max_interior(fd_apply_pauli(phi, psi, Sector::Minus, g2), g2);
  out.push_back({"genus0: zero-mode residual ratio minus 4 (1 + e^y)", std::abs(ratio - 4.0), 0.5, false});

  const auto prof = polygon_T(real_parts(example3()));
  out.push_back({"genus0: example 3 polygon is a triangle", std::abs(double(prof.polygon_T.vertices.size()) - 3.0), 0.5, false});
}

void genus1_checks(std::vector<VerifyLine>& out, const Tolerances& tol) {
  const WeierstrassContext ctx{Lattice(cplx(0, 1.3))};
  const GenusOneData d{ctx, {cplx(0.3, 0.4), cplx(-0.5, 0.7)}, {cplx(0.2, -0.3), cplx(0.6, 0.1)},
                       {cplx(0.1, 0.2), cplx(0.4, -0.6)}, cplx(0.25, 0.35)};
  out.push_back({"genus1: compatibility residual", compatibility_residual(d, cplx(0.37, 0.21)), tol.compatibility, false});
  out.push_back({"genus1: canonical fit residual", fit_canonical(with_canonical_divisor(d)).fit_residual, 1e-9, false});

  const auto roots = periodicity_scan(ctx, 0, 1, 6);
  double eq = roots.empty() ? 1.0 : roots[0].equation_residual;
  double fr = roots.empty() ? 1.0 : std::max(roots[0].field_residual[0], roots[0].field_residual[1]);
  out.push_back({"genus1: periodicity equation residual (0, 1)", eq, tol.periodicity, false});
  out.push_back({"genus1: field periodicity residual (0, 1)", fr, tol.field_periodicity, false});

  const auto pos = build_canonical(ctx, positive_periodic_terms(ctx, roots.empty() ? std::nullopt : std::optional(roots[0].lambda), 0.05));
  out.push_back({"genus1: flux quanta per cell minus 1", std::abs(cell_flux(pos, 0.0).quanta - 1.0), 1e-6, false});

  const BlochSetting b{pos, cplx(0.2, 0.1)};
  const auto u = unitarize(b, cplx(0.3, 0.5));
  out.push_back({"genus1: unitarised multiplier modulus", std::max(std::abs(std::abs(u.kx) - 1.0), std::abs(std::abs(u.ky) - 1.0)),
                 tol.unitarity, false});
}

void flux_checks(std::vector<VerifyLine>& out, const Tolerances& tol) {
  const auto c = example3();
  const double d40 = regularized_flux(c, 40, tol.flux) - flux_asymptotic(c, 40, 1);
  const double d80 = regularized_flux(c, 80, tol.flux) - flux_asymptotic(c, 80, 1);
  // leading correction is O(R^-3) here, so doubling R must shrink it by well over 4
  out.push_back({"flux: example 3 first-order remainder shrink factor below 4", std::max(0.0, 4.0 - std::abs(d40 / d80)), 1e-12, false});
  const double ring = -0.5 * 40 * indicator_integral(real_parts(c));
  out.push_back({"flux: example 3 disk flux over -R/2 times indicator integral, minus 1",
                 std::abs(disk_flux(c, 40, tol.quad) / ring - 1.0), 1e-3, false});
}

}  // namespace

std::vector<VerifyLine> verify_suite(const std::string& suite, const Tolerances& tol) {
  std::vector<VerifyLine> out;
  if (suite == "all" || suite == "genus0") genus0_checks(out, tol);
  if (suite == "all" || suite == "genus1") genus1_checks(out, tol);
  if (suite == "all" || suite == "flux") flux_checks(out, tol);
  for (auto& l : out) l.pass = std::isfinite(l.value) && l.value <= l.limit;
  return out;
}

std::string format_report(const std::vector<VerifyLine>& lines) {
  std::string s;
  char buf[256];
  for (const auto& l : lines) {
    std::snprintf(buf, sizeof buf, "%s  %-72s %.3e (limit %.1e)\n", l.pass ? "PASS" : "FAIL", l.name.c_str(), l.value, l.limit);
    s += buf;
  }
  return s;
}

}  // namespace magpauli::cli
