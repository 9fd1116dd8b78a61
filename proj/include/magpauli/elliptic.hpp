#pragma once

#include "magpauli/numerics.hpp"

namespace magpauli {

/// Lattice {2m·ω1 + 2n·ω2} with ω1 = 1 and ω2 purely imaginary.
struct Lattice {
  double omega1 = 1.0;
  cplx omega2{0.0, 1.0};

  Lattice() = default;
  explicit Lattice(cplx omega2);
  double tau() const { return omega2.imag(); }
};

/// Result of reducing w to the fundamental cell: w = w0 + 2m·ω1 + 2n·ω2.
struct CellReduction {
  cplx w0;
  long m = 0;
  long n = 0;
};

/// σ(w) = e^{log_scale}·value and σ′(w) = e^{log_scale}·deriv; finite at lattice points.
struct SigmaJet {
  cplx log_scale;
  cplx value;
  cplx deriv;
};

class WeierstrassContext {
 public:
  explicit WeierstrassContext(Lattice lattice, double tolerance = 1e-14, int max_terms = 400);

  const Lattice& lattice() const { return lattice_; }
  cplx eta1() const { return eta1_; }
  cplx eta2() const { return eta2_; }
  cplx omega1() const { return lattice_.omega1; }
  cplx omega2() const { return lattice_.omega2; }
  double legendre_residual() const;

  CellReduction reduce(cplx w) const;

  cplx sigma(cplx w) const;
  // log σ on some branch; safe where σ itself would overflow.
  cplx log_sigma(cplx w) const;
  SigmaJet sigma_jet(cplx w) const;
  cplx zeta(cplx w) const;
  // ζ′ = −℘.
  cplx zeta_prime(cplx w) const;

 private:
  struct Theta {
    cplx t0, t1, t2;  // θ1 and its first two v-derivatives
  };
  Theta theta1(cplx v, int derivs) const;
  cplx quasi_exponent(cplx w0, long m, long n) const;

  Lattice lattice_;
  double tol_;
  int max_terms_;
  cplx q_;
  cplx theta1_prime0_;
  cplx eta1_, eta2_;
};

}  // namespace magpauli
