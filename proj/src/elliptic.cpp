#include "magpauli/elliptic.hpp"

#include <cmath>
#include <numbers>

#include "magpauli/errors.hpp"

namespace magpauli {

using std::numbers::pi;

Lattice::Lattice(cplx w2) : omega2(w2) {
  if (!(w2.imag() > 0.0) || w2.real() != 0.0 || !std::isfinite(w2.imag()))
    throw Error(ErrorCode::InvalidLattice, "omega2 must be purely imaginary with positive imaginary part");
}

WeierstrassContext::WeierstrassContext(Lattice lattice, double tolerance, int max_terms)
    : lattice_(lattice), tol_(tolerance), max_terms_(max_terms) {
  q_ = std::exp(cplx(0.0, pi) * lattice_.omega2);

  // θ1′(0) and θ1‴(0) from the series directly.
  cplx d1 = 0.0, d3 = 0.0;
  for (int n = 0; n < max_terms_; ++n) {
    const double k = 2.0 * n + 1.0;
    const cplx c = (n % 2 ? -2.0 : 2.0) * std::pow(q_, (n + 0.5) * (n + 0.5));
    d1 += c * k;
    d3 -= c * k * k * k;
    if (std::abs(c * k * k * k) <= tol_ * std::abs(d3)) break;
  }
  theta1_prime0_ = d1;
  eta1_ = -(pi * pi / 12.0) * d3 / d1;
  // Evaluated directly at the half-period: reduce() would fold it onto −ω2 and need η2 itself.
  const cplx v2 = pi * lattice_.omega2 / (2.0 * lattice_.omega1);
  const auto th = theta1(v2, 1);
  eta2_ = eta1_ * lattice_.omega2 / lattice_.omega1 + (pi / (2.0 * lattice_.omega1)) * th.t1 / th.t0;
  if (legendre_residual() > 1e-9)
    throw Error(ErrorCode::SelfCheckFailed, "Legendre relation residual " + std::to_string(legendre_residual()));
}

double WeierstrassContext::legendre_residual() const {
  return std::abs(eta1_ * lattice_.omega2 - eta2_ * lattice_.omega1 - cplx(0.0, pi / 2.0));
}

WeierstrassContext::Theta WeierstrassContext::theta1(cplx v, int derivs) const {
  Theta th{0.0, 0.0, 0.0};
  for (int n = 0; n < max_terms_; ++n) {
    const double k = 2.0 * n + 1.0;
    const cplx c = (n % 2 ? -2.0 : 2.0) * std::pow(q_, (n + 0.5) * (n + 0.5));
    const cplx s = c * std::sin(k * v);
    th.t0 += s;
    if (derivs >= 1) th.t1 += c * k * std::cos(k * v);
    if (derivs >= 2) th.t2 -= k * k * s;
    const double scale = std::max(std::abs(th.t0), derivs >= 1 ? std::abs(th.t1) : 0.0);
    if (n > 0 && std::abs(c) * std::cosh(k * std::abs(v.imag())) * k * k <= tol_ * scale) break;
  }
  return th;
}

CellReduction WeierstrassContext::reduce(cplx w) const {
  const double t = lattice_.tau();
  const long n = std::lround(w.imag() / (2.0 * t));
  const cplx shifted = w - 2.0 * static_cast<double>(n) * lattice_.omega2;
  const long m = std::lround(shifted.real() / (2.0 * lattice_.omega1));
  return {shifted - 2.0 * static_cast<double>(m) * lattice_.omega1, m, n};
}

// log of the multiplier in σ(w0 + Ω) = ± e^{H(w0 + Ω/2)} σ(w0), Ω = 2mω1 + 2nω2.
cplx WeierstrassContext::quasi_exponent(cplx w0, long m, long n) const {
  const cplx omega = 2.0 * static_cast<double>(m) * lattice_.omega1 + 2.0 * static_cast<double>(n) * lattice_.omega2;
  const cplx h = 2.0 * static_cast<double>(m) * eta1_ + 2.0 * static_cast<double>(n) * eta2_;
  const long parity = (m + n + m * n) & 1L;
  return h * (w0 + omega / 2.0) + (parity ? cplx(0.0, pi) : cplx(0.0));
}

cplx WeierstrassContext::log_sigma(cplx w) const {
  const auto r = reduce(w);
  const cplx v = pi * r.w0 / (2.0 * lattice_.omega1);
  const cplx base = std::log(2.0 * lattice_.omega1 / pi) + eta1_ * r.w0 * r.w0 / (2.0 * lattice_.omega1) +
                    std::log(theta1(v, 0).t0 / theta1_prime0_);
  return base + quasi_exponent(r.w0, r.m, r.n);
}

cplx WeierstrassContext::sigma(cplx w) const {
  const auto r = reduce(w);
  const cplx v = pi * r.w0 / (2.0 * lattice_.omega1);
  const cplx s0 = (2.0 * lattice_.omega1 / pi) * std::exp(eta1_ * r.w0 * r.w0 / (2.0 * lattice_.omega1)) *
                  theta1(v, 0).t0 / theta1_prime0_;
  if (r.m == 0 && r.n == 0) return s0;
  return s0 * std::exp(quasi_exponent(r.w0, r.m, r.n));
}

SigmaJet WeierstrassContext::sigma_jet(cplx w) const {
  const auto r = reduce(w);
  const cplx v = pi * r.w0 / (2.0 * lattice_.omega1);
  const auto th = theta1(v, 1);
  const cplx h = 2.0 * static_cast<double>(r.m) * eta1_ + 2.0 * static_cast<double>(r.n) * eta2_;
  SigmaJet j;
  j.log_scale = std::log(2.0 * lattice_.omega1 / (pi * theta1_prime0_)) + eta1_ * r.w0 * r.w0 / (2.0 * lattice_.omega1) +
                quasi_exponent(r.w0, r.m, r.n);
  j.value = th.t0;
  j.deriv = (eta1_ * r.w0 / lattice_.omega1 + h) * th.t0 + (pi / (2.0 * lattice_.omega1)) * th.t1;
  return j;
}

cplx WeierstrassContext::zeta(cplx w) const {
  const auto r = reduce(w);
  if (std::abs(r.w0) < 1e-12) throw Error(ErrorCode::PoleHit, "zeta evaluated at a lattice point");
  const cplx v = pi * r.w0 / (2.0 * lattice_.omega1);
  const auto th = theta1(v, 1);
  const cplx z0 = eta1_ * r.w0 / lattice_.omega1 + (pi / (2.0 * lattice_.omega1)) * th.t1 / th.t0;
  return z0 + 2.0 * static_cast<double>(r.m) * eta1_ + 2.0 * static_cast<double>(r.n) * eta2_;
}

cplx WeierstrassContext::zeta_prime(cplx w) const {
  const auto r = reduce(w);
  if (std::abs(r.w0) < 1e-12) throw Error(ErrorCode::PoleHit, "zeta_prime evaluated at a lattice point");
  const cplx v = pi * r.w0 / (2.0 * lattice_.omega1);
  const auto th = theta1(v, 2);
  const cplx l1 = th.t1 / th.t0;
  const double s = pi / (2.0 * lattice_.omega1);
  return eta1_ / lattice_.omega1 + s * s * (th.t2 / th.t0 - l1 * l1);
}

}  // namespace magpauli
