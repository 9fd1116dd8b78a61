#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magpauli/errors.hpp"
#include "magpauli/expsum.hpp"

using namespace magpauli;
using std::numbers::pi;

namespace {

const cplx I{0, 1};

SpectralDataG0 example2() {
  return {{0.0, 5.0, -10.0 * I, -5.0, 10.0 * I}, {0.0, 5.0, 10.0 * I, -5.0, -10.0 * I}, {2.0, I, -2.0, -I}};
}

SpectralDataG0 random_spectral(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-2, 2);
  SpectralDataG0 d;
  for (int j = 0; j <= n; ++j) {
    d.k_points.emplace_back(u(rng), u(rng));
    d.p_points.emplace_back(u(rng), u(rng));
  }
  for (int i = 0; i < n; ++i) d.divisor.emplace_back(u(rng), u(rng));
  return d;
}

double fd_field(const ExponentialSum& c, Point p, double h) {
  auto l = [&](double x, double y) { return std::log(std::abs(eval_c(c, {x, y}))); };
  const double lap = (l(p.x + h, p.y) + l(p.x - h, p.y) + l(p.x, p.y + h) + l(p.x, p.y - h) - 4 * l(p.x, p.y)) / (h * h);
  return -0.5 * lap;
}

}  // namespace

TEST_CASE("single intersection point") {
  const SpectralDataG0 d{{0.7 - 0.2 * I}, {1.1 + 0.4 * I}, {}};
  const auto c = build_exponential_sum(d);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c.terms[0].coefficient - 1.0) < 1e-15);
  CHECK(c.terms[0].form.p == d.p_points[0]);
  CHECK(c.terms[0].form.k == d.k_points[0]);
  const Point pt{0.3, -0.8};
  const cplx z = to_complex(pt), kk = 0.4 + 0.1 * I;
  CHECK(std::abs(eval_psi_g0(d, kk, pt) - std::exp(kk * std::conj(z)) * std::exp(d.p_points[0] * z - d.k_points[0] * std::conj(z))) < 1e-13);
}

TEST_CASE("Example-2 coefficients") {
  BuildDiagnostics diag;
  const auto c = build_exponential_sum(example2(), &diag);
  CHECK(diag.crosscheck_residual < 1e-12);
  REQUIRE(c.size() == 5);
  const double expected[5] = {1.0 / 625, 546.0 / 6250, 2574.0 / 6250, 546.0 / 6250, 2574.0 / 6250};
  for (int j = 0; j < 5; ++j) CHECK(std::abs(c.terms[j].coefficient - expected[j]) < 1e-15);
  // c = 1/625 + (546/3125)cos 10y + (2574/3125)cos 20x.
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 50; ++t) {
    const Point p{u(rng), u(rng)};
    const double ref = 1.0 / 625 + 546.0 / 3125 * std::cos(10 * p.y) + 2574.0 / 3125 * std::cos(20 * p.x);
    CHECK(std::abs(eval_c(c, p) - ref) < 1e-13);
  }
  // The coefficients sum to one: c(0,0) = 1, which is forced by Ψ(k,0,0) = 1.
  CHECK(std::abs(eval_c(c, {0, 0}) - 1.0) < 1e-14);
  // The true sum has zeros, e.g. cos 20x = −1, cos 10y = 1 gives 1/625 + 546/3125 − 2574/3125 < 0.
  CHECK(eval_c(c, {pi / 20, 0}).real() < 0);
}

TEST_CASE("closed form matches dense solve on random data") {
  std::mt19937 rng(42);
  for (int n = 1; n <= 6; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      BuildDiagnostics diag;
      const auto d = random_spectral(rng, n);
      build_exponential_sum(d, &diag);
      if (!diag.ill_conditioned) CHECK(diag.crosscheck_residual < 1e-9);
    }
}

TEST_CASE("degenerate data") {
  CHECK_THROWS_AS(build_exponential_sum({{1.0, 1.0}, {0.0, 2.0}, {3.0}}), Error);
  CHECK_THROWS_AS(build_exponential_sum({{1.0, 2.0}, {0.0, 2.0}, {2.0}}), Error);
  CHECK_THROWS_AS(build_exponential_sum({{1.0, 2.0}, {0.0}, {3.0}}), Error);
}

TEST_CASE("Psi interpolation and normalization") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& d : {example2(), random_spectral(rng, 3), random_spectral(rng, 5)}) {
    for (int t = 0; t < 100; ++t) {
      const Point p{u(rng), u(rng)};
      for (std::size_t j = 0; j < d.k_points.size(); ++j) {
        const cplx ref = std::exp(d.p_points[j] * to_complex(p));
        CHECK(std::abs(eval_psi_g0(d, d.k_points[j], p) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
      }
    }
    for (int t = 0; t < 20; ++t) CHECK(std::abs(eval_psi_g0(d, cplx(3 * u(rng), 3 * u(rng)), {0, 0}) - 1.0) < 1e-9);
    CHECK_THROWS_AS(eval_psi_g0(d, d.divisor.empty() ? 0.0 : d.divisor[0], {0, 0}), Error);
  }
}

TEST_CASE("eval_c on c = 1 + e^y") {
  const auto c = real_exponential_sum({{1, 0, 0}, {1, 0, 1}});
  CHECK(std::abs(eval_c(c, {0, 0}) - 2.0) < 1e-15);
  CHECK(std::abs(eval_c(c, {1.5, -50}) - (1.0 + std::exp(-50.0))) < 1e-15);
}

TEST_CASE("magnetic field") {
  const auto one = real_exponential_sum({{2.5, 0.3, -1.2}});
  CHECK(std::abs(magnetic_field(one, {0.4, 0.9})) < 1e-15);

  const auto c1 = real_exponential_sum({{1, 0, 0}, {1, 0, 1}});
  CHECK(magnetic_field(c1, {0, 0}) == doctest::Approx(-0.125).epsilon(1e-14));
  for (double y : {-2.0, 0.5, 3.0}) {
    const double e = std::exp(y);
    CHECK(magnetic_field(c1, {0.7, y}) == doctest::Approx(-0.5 * e / ((1 + e) * (1 + e))).epsilon(1e-13));
  }

  const auto c3 = real_exponential_sum({{1, 1, 0}, {1, 0, 1}, {1, -1, -1}});
  for (Point p : {Point{0.2, -0.3}, Point{1.5, 0.5}}) {
    const double b = magnetic_field(c3, p);
    const double e1 = std::abs(fd_field(c3, p, 0.02) - b), e2 = std::abs(fd_field(c3, p, 0.01) - b);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  // Gauge invariance under c → a·e^{W}c.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const ComplexLinearForm g{cplx(0.3, -0.2), cplx(-0.1, 0.5)};
  ExponentialSum shifted = c3;
  for (auto& t : shifted.terms) {
    t.coefficient *= 2.7;
    t.form = t.form + ComplexLinearForm::from_real(g.alpha(), g.beta());
  }
  for (int t = 0; t < 20; ++t) {
    const Point p{3 * u(rng), 3 * u(rng)};
    CHECK(std::abs(magnetic_field(shifted, p) - magnetic_field(c3, p)) < 1e-10);
  }

  // The smooth periodic case: 1 − A cos 10y − B cos 20x with A + B < 1.
  const double A = 546.0 / 3125, B = 2574.0 / 3125;
  ExponentialSum trig;
  trig.terms = {{1.0, {}}, {-A / 2, {5.0, 5.0}}, {-A / 2, {-5.0, -5.0}}, {-B / 2, {10.0 * I, -10.0 * I}}, {-B / 2, {-10.0 * I, 10.0 * I}}};
  const Point p{0.013, -0.21};
  const double b = magnetic_field(trig, p);
  CHECK(std::isfinite(b));
  CHECK(std::abs(magnetic_field(trig, {p.x + pi / 10, p.y + pi / 5}) - b) < 1e-9 * std::max(1.0, std::abs(b)));

  const auto zero = real_exponential_sum({{1, 1, 0}, {-1, -1, 0}});
  CHECK_THROWS_AS(magnetic_field(zero, {0, 0}), Error);
}

TEST_CASE("reality classification") {
  const auto c1 = real_exponential_sum({{1, 0, 0}, {1, 0, 1}});
  auto r = classify_reality(c1);
  CHECK(r.real);
  CHECK(r.kinds[0] == TermKind::Exponential);
  CHECK(r.kinds[1] == TermKind::Exponential);
  CHECK(r.signs == SignProfile::AllPositive);
  CHECK(r.has_constant);

  const cplx kap{0.4, 0.7};
  const ComplexLinearForm w{cplx(1.0, 0.5), cplx(-0.3, 0.2)};
  ExponentialSum mixed;
  mixed.terms = {{kap, w}, {std::conj(kap), {-std::conj(w.k), -std::conj(w.p)}}};
  r = classify_reality(mixed);
  CHECK(r.real);
  CHECK(r.kinds[0] == TermKind::MixedPair);
  CHECK(r.partner[0] == 1);
  for (Point p : {Point{0.3, 0.2}, Point{-1, 2}}) CHECK(std::abs(eval_c(mixed, p).imag()) < 1e-13);

  r = classify_reality(build_exponential_sum(example2()));
  CHECK(r.real);
  CHECK(r.kinds[1] == TermKind::Trigonometric);
  CHECK(r.kinds[2] == TermKind::Trigonometric);
  CHECK(r.has_constant);
  CHECK(r.reduced_count == 3);
  CHECK(r.odd_term_count);

  ExponentialSum bad;
  bad.terms = {{1.0, {cplx(1, 1), 0.0}}};
  CHECK_FALSE(classify_reality(bad).real);
}

TEST_CASE("residue conditions") {
  auto r = check_residues(example2(), cplx(-1.0));
  CHECK(r.matched);
  r = check_residues(example2());
  CHECK(r.matched);
  CHECK(std::abs(r.s + 1.0) < 1e-12);

  r = check_residues({{0.3 + 0.1 * I}, {1.2 - 0.5 * I}, {}});
  CHECK(r.matched);
  CHECK(std::abs(r.s + 1.0) < 1e-12);

  // Residues compared against contour quadrature on small circles.
  std::mt19937 rng(17);
  const auto d = random_spectral(rng, 2);
  r = check_residues(d, cplx(0.6, 0.2));
  CHECK_FALSE(r.matched);
  auto omega1 = [&](cplx k) {
    cplx num = 1.0, den = 1.0;
    for (cplx a : d.divisor) num *= k - a;
    for (cplx kj : d.k_points) den *= k - kj;
    return num / den;
  };
  for (std::size_t j = 0; j < d.k_points.size(); ++j) {
    const double rad = 1e-3;
    auto f = [&](double t) {
      const cplx e = std::exp(I * t);
      return omega1(d.k_points[j] + rad * e) * I * rad * e;
    };
    const cplx res = quad_adaptive_1d_complex(f, 0, 2 * pi, 1e-13).value / (2 * pi * I);
    CHECK(std::abs(res - r.residue_k[j]) < 1e-8 * std::max(1.0, std::abs(res)));
  }
}
