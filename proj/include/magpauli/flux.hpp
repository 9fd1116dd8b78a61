#pragma once

#include <vector>

#include "magpauli/growth.hpp"

namespace magpauli {

/// dφ-component of A = Φ_y dx − Φ_x dy on the circle of radius R.
double vector_potential_circle(const ExponentialSum& c, double R, double phi);

/// ∬_{|z|<R} B via the circulation of A.
double disk_flux(const ExponentialSum& c, double R, double tol = 1e-12);

/// ∮ I_{{W_j}} dφ, exact.
double indicator_integral(std::span<const RealLinearForm> forms);

/// disk_flux + ½R·∮I. Requires a strictly positive indicator (gauge-shift into
/// the interior of T first); a class with a single form is evaluated directly.
double regularized_flux(const ExponentialSum& c, double R, double tol = 1e-13);

/// Q_k(a) = ∫_0^∞ w^k / (e^w/a + 1) dw; tol is relative.
double q_integral(int k, double a, double tol = 1e-12);

struct CornerData {
  int j = 0;                // hull position; the corner sits between vertex j and j+1
  int term_from = 0;        // term dominating just before φ0
  int term_to = 0;          // term dominating just after φ0
  double phi0 = 0.0;
  double a = 1.0;           // κ_to / κ_from
  std::vector<double> lambda;  // dz/dt = Σ_k λ^{(k)} t^k
};

// Essential hull vertices in counter-clockwise order (term indices).
std::vector<int> essential_terms(const ExponentialSum& c);

CornerData corner_coefficients(const ExponentialSum& c, int j, int order = 3);

// Series reversion of t(z) = Σ_{n≥1} c_n z^n; returns λ^{(0..order)}.
std::vector<double> inverse_series_lambda(const std::vector<double>& c, int order);

/// Σ_{s≤order} R^{−s} Σ_corners ½λ^{(s−1)}[Q_s(1/a) + (−1)^{s−1}Q_s(a)].
double flux_asymptotic(const ExponentialSum& c, double R, int order = 1);

/// The same series with λ^{(s)} and {Q_s(a) + (−1)^s Q_s(1/a)} per corner, kept for comparison.
double flux_asymptotic_alt_pairing(const ExponentialSum& c, double R, int order = 1);

}  // namespace magpauli
