#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magpauli/errors.hpp"
#include "magpauli/flux.hpp"

using namespace magpauli;
using std::numbers::pi;

namespace {

ExponentialSum ex1() { return real_exponential_sum({{1, 0, 0}, {1, 0, 1}}); }
ExponentialSum ex3() { return real_exponential_sum({{1, 1, 0}, {1, 0, 1}, {1, -1, -1}}); }
ExponentialSum closing() { return real_exponential_sum({{1, 0, 1}, {1, -2, 1}, {1, -2, -1}}); }
ExponentialSum skewed() { return real_exponential_sum({{2.0, 1.5, 0.2}, {0.5, -0.3, 1.1}, {1.3, -0.9, -1.4}, {0.7, 0.8, -1.0}}); }

double fd_potential(const ExponentialSum& c, double R, double phi) {
  const double h = 1e-5;
  auto Phi = [&](double x, double y) { return 0.5 * logsum_eval(c.terms, {x, y}).log_magnitude; };
  const double x = R * std::cos(phi), y = R * std::sin(phi);
  const double phx = (Phi(x + h, y) - Phi(x - h, y)) / (2 * h), phy = (Phi(x, y + h) - Phi(x, y - h)) / (2 * h);
  // A(∂_φ) with dx = −R sin φ dφ, dy = R cos φ dφ
  return phy * (-R * std::sin(phi)) - phx * (R * std::cos(phi));
}

}  // namespace

TEST_CASE("vector potential on circles") {
  const auto one = real_exponential_sum({{3, 0, 0}});
  CHECK(vector_potential_circle(one, 5, 0.7) == 0.0);
  const auto single = real_exponential_sum({{1, 0.4, -0.9}});
  for (double phi : {0.0, 1.0, 3.0})
    CHECK(vector_potential_circle(single, 7, phi) == doctest::Approx(-3.5 * (0.4 * std::cos(phi) - 0.9 * std::sin(phi))));
  for (double phi : {pi / 4, 0.3, 4.0}) {
    CHECK(vector_potential_circle(ex3(), 20, phi) == doctest::Approx(fd_potential(ex3(), 20, phi)).epsilon(1e-6));
  }
  const double a = vector_potential_circle(ex3(), 20, pi / 4);
  CHECK(a == doctest::Approx(-10 * std::cos(pi / 4)).epsilon(1e-6));
}

TEST_CASE("disk flux matches area quadrature") {
  CHECK(std::abs(disk_flux(real_exponential_sum({{1, 0, 0}}), 3)) < 1e-15);
  for (const auto& c : {ex1(), ex3(), skewed()})
    for (double R : {2.0, 5.0}) {
      const double ring = disk_flux(c, R);
      auto f = [&](double r, double phi) { return r * magnetic_field(c, {r * std::cos(phi), r * std::sin(phi)}); };
      const double area = quad_2d(f, 0, R, 0, 2 * pi, 1e-10).value;
      CHECK(std::abs(ring - area) < 1e-6);
    }
  const double R = 10;
  auto f = [&](double r, double phi) { return r * magnetic_field(ex1(), {r * std::cos(phi), r * std::sin(phi)}); };
  CHECK(disk_flux(ex1(), R) == doctest::Approx(quad_2d(f, 0, R, 0, 2 * pi, 1e-10).value).epsilon(1e-8));
}

TEST_CASE("indicator integral") {
  CHECK(indicator_integral(std::vector<RealLinearForm>{{0, 1}}) == doctest::Approx(2.0));
  CHECK(indicator_integral(std::vector<RealLinearForm>{{0, 1}, {0, -1}}) == doctest::Approx(4.0));
  for (const auto& c : {ex1(), ex3(), closing(), skewed()}) {
    const auto f = real_parts(c);
    const double quad = quad_adaptive_1d([&](double phi) { return indicator_set(f, phi); }, 0, 2 * pi, 1e-13, 20000).value;
    CHECK(indicator_integral(f) == doctest::Approx(quad).epsilon(1e-10));
  }
  // For 0 inside the hull, ∮ max_j v_j·u dφ is the hull perimeter.
  CHECK(indicator_integral(real_parts(ex3())) == doctest::Approx(std::sqrt(2.0) + 2 * std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("regularized flux") {
  CHECK(regularized_flux(real_exponential_sum({{2, 0, 0}}), 30) == 0.0);
  // one non-constant form: no field, and the clipped indicator integrates to 2|v|
  CHECK(regularized_flux(real_exponential_sum({{1, 0.6, -0.8}}), 30) == doctest::Approx(30.0).epsilon(1e-12));
  for (double R : {20.0, 40.0}) {
    const double r1 = regularized_flux(ex3(), R), r2 = regularized_flux(ex3(), 2 * R);
    CHECK(std::abs(r2) <= 0.7 * std::abs(r1));
    CHECK(r1 == doctest::Approx(disk_flux(ex3(), R) + 0.5 * R * indicator_integral(real_parts(ex3()))).epsilon(1e-8));
  }
  for (double R : {20.0, 40.0, 60.0, 80.0}) {
    CHECK(R * std::abs(regularized_flux(ex3(), R)) < 2.0);
    CHECK(R * std::abs(regularized_flux(skewed(), R)) < 5.0);
  }
  CHECK_THROWS_AS(regularized_flux(closing(), 20), Error);
  const auto shifted = gauge_shift(closing(), {4.0 / 3, -1.0 / 3}).shifted;
  CHECK(std::abs(regularized_flux(shifted, 80)) <= 0.7 * std::abs(regularized_flux(shifted, 40)));
  // B is gauge invariant, so the disk flux is the same for both representatives.
  CHECK(disk_flux(shifted, 15) == doctest::Approx(disk_flux(closing(), 15)).epsilon(1e-10));
  CHECK_THROWS_AS(regularized_flux(real_exponential_sum({{1, 0, 0}, {-0.5, 0, 1}}), 10), Error);
}

TEST_CASE("Q integrals") {
  for (double a : {0.1, 1.0, 10.0}) CHECK(std::abs(q_integral(0, a) - std::log1p(a)) < 1e-10);
  CHECK(q_integral(1, 1.0) == doctest::Approx(pi * pi / 12).epsilon(1e-12));
  double fact = 1;
  for (int k = 0; k <= 8; ++k) {
    if (k > 0) fact *= k;
    CHECK(q_integral(k, 1e-6) / 1e-6 == doctest::Approx(fact).epsilon(0.01));
    CHECK(q_integral(k, 0.01) < 0.01 * fact);
    CHECK(q_integral(k, 0.5) < q_integral(k, 0.6));
  }
  CHECK_THROWS_AS(q_integral(1, 0.0), Error);
}

TEST_CASE("inverse series") {
  auto lam = inverse_series_lambda({2.0}, 3);
  CHECK(lam[0] == doctest::Approx(0.5));
  CHECK(lam[1] == 0.0);
  CHECK(lam[2] == 0.0);
  // t = sin z ⇒ dz/dt = (1 − t²)^{−1/2} = 1 + t²/2 + …
  lam = inverse_series_lambda({1.0, 0.0, -1.0 / 6, 0.0}, 3);
  CHECK(lam[0] == doctest::Approx(1.0));
  CHECK(lam[1] == doctest::Approx(0.0));
  CHECK(lam[2] == doctest::Approx(0.5));
  CHECK(std::abs(lam[3]) < 1e-15);
  // Generic series: compose and compare with a numeric inverse.
  const std::vector<double> c{1.3, 0.4, -0.2, 0.1};
  lam = inverse_series_lambda(c, 3);
  auto t_of = [&](double z) { return c[0] * z + c[1] * z * z + c[2] * z * z * z + c[3] * z * z * z * z; };
  const double z0 = 0.01;
  const double t = t_of(z0);
  const double zr = lam[0] * t + lam[1] * t * t / 2 + lam[2] * t * t * t / 3 + lam[3] * t * t * t * t / 4;
  CHECK(std::abs(zr - z0) < 1e-9);
  CHECK_THROWS_AS(inverse_series_lambda({0.0, 1.0}, 2), Error);
}

TEST_CASE("corner coefficients") {
  const auto ess = essential_terms(ex3());
  CHECK(ess.size() == 3);
  bool found = false;
  for (int j = 0; j < 3; ++j) {
    const auto cd = corner_coefficients(ex3(), j);
    const auto f = real_parts(ex3());
    const double ea = f[cd.term_to].alpha - f[cd.term_from].alpha, eb = f[cd.term_to].beta - f[cd.term_from].beta;
    auto t = [&](double z) { return ea * std::cos(cd.phi0 + z) + eb * std::sin(cd.phi0 + z); };
    CHECK(std::abs(t(0)) < 1e-14);
    const double h = 1e-6;
    CHECK(cd.lambda[0] == doctest::Approx(2 * h / (t(h) - t(-h))).epsilon(1e-8));
    CHECK(cd.a == doctest::Approx(1.0));
    if (std::abs(cd.phi0 - pi / 4) < 1e-12) {
      found = true;
      CHECK(cd.lambda[0] == doctest::Approx(1 / std::sqrt(2.0)));
    }
  }
  CHECK(found);
  const auto deg = real_exponential_sum({{1, 1, 0}, {1, 0, 1}, {1, -1, -1}, {1, 0.5, 0.5}});
  CHECK_THROWS_AS(flux_asymptotic(deg, 20), Error);
}

TEST_CASE("flux asymptotics") {
  const double lead = (pi * pi / 12) * (1 / std::sqrt(2.0) + 2 / std::sqrt(5.0));
  CHECK(flux_asymptotic(ex3(), 1.0) == doctest::Approx(lead).epsilon(1e-10));
  CHECK(flux_asymptotic(real_exponential_sum({{1, 0, 0}}), 10) == 0.0);
  CHECK_THROWS_AS(flux_asymptotic(real_exponential_sum({{1, 0, 1}, {1, 0, -1}}), 10), Error);

  for (const auto& c : {ex3(), skewed(), gauge_shift(closing(), {4.0 / 3, -1.0 / 3}).shifted}) {
    const double d40 = std::abs(regularized_flux(c, 40) - flux_asymptotic(c, 40));
    const double d80 = std::abs(regularized_flux(c, 80) - flux_asymptotic(c, 80));
    CHECK(d40 / d80 >= 3.0);
    CHECK(std::abs(regularized_flux(c, 40) - flux_asymptotic(c, 40)) < 0.25 * std::abs(regularized_flux(c, 40)));
    const double e40 = std::abs(regularized_flux(c, 40) - flux_asymptotic(c, 40, 3));
    CHECK(e40 < d40);
  }
  // The alternate pairing cancels at first order whenever a = 1.
  CHECK(flux_asymptotic_alt_pairing(ex3(), 40) == 0.0);
}
