#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "magpauli/elliptic.hpp"

namespace magpauli {

/// Q_s on Γ′, R_s on Γ″ (s = 0..n), divisor P_1..P_{n+1} on Γ′ and P on Γ″.
struct GenusOneData {
  WeierstrassContext ctx;
  std::vector<cplx> Q, R, Pprime;
  cplx P;

  void validate() const;
  std::size_t size() const { return Q.size(); }
  cplx q_sum() const;
  cplx p_sum() const;
  cplx A(std::size_t s) const { return q_sum() - Q[s] + p_sum(); }
};

/// ψ″(p, z) = e^{−zζ(p)} σ(p+z+P) σ(P) / (σ(z+P) σ(p+P)), so that ψ″(p, 0) = 1.
cplx psi_second(const GenusOneData& d, cplx p, cplx z);

/// f_0..f_n at (z, z̄).
std::vector<cplx> compatibility_coeffs(const GenusOneData& d, cplx z);

/// ψ′(k, z, z̄) built from the compatibility coefficients.
cplx psi_prime(const GenusOneData& d, cplx k, cplx z);

/// max_s |ψ′(Q_s) − ψ″(R_s)| relative to |ψ″(R_s)|.
double compatibility_residual(const GenusOneData& d, cplx z);

/// coef · e^{ez·z + ezb·z̄} σ(z + hz) σ(z̄ + hzb)
struct ThetaTerm {
  cplx coef;
  cplx ez, ezb;
  cplx hz, hzb;
};

/// c̃ and its z-derivatives, all divided by the common factor e^{scale}.
struct ThetaJet {
  double scale = 0.0;
  cplx c, cz, czb, czzb;
};

class ThetaSum {
 public:
  ThetaSum(WeierstrassContext ctx, std::vector<ThetaTerm> terms);

  const WeierstrassContext& ctx() const { return ctx_; }
  const std::vector<ThetaTerm>& terms() const { return terms_; }

  ThetaJet jet(cplx z) const;
  cplx operator()(cplx z) const;
  // ∇ ln|c̃| = (∂x, ∂y).
  Vec2 grad_log(cplx z) const;
  /// sign · ½Δ ln c̃; sign = −1 matches B = −½Δ ln c.
  double field(cplx z, double sign = -1.0) const;

 private:
  WeierstrassContext ctx_;
  std::vector<ThetaTerm> terms_;
};

ThetaSum c_tilde_sum(const GenusOneData& d);
cplx c_tilde(const GenusOneData& d, cplx z);
cplx c_genus1(const GenusOneData& d, cplx z);

/// α exp{−zζ(R) + z̄ζ(Q)} σ(z + R) σ(z̄ − Q)
struct CanonicalTerm {
  cplx alpha;
  cplx R, Q;
};

ThetaSum build_canonical(const WeierstrassContext& ctx, const std::vector<CanonicalTerm>& terms);

enum class CanonicalKind { Type1, Type2, NonReal };

struct CanonicalReality {
  std::vector<CanonicalKind> kinds;
  std::vector<int> partner;
  std::size_t type1 = 0, type2 = 0;
  bool real = false;
};

CanonicalReality classify_canonical(const std::vector<CanonicalTerm>& terms, double tol = 1e-10);

struct GridStats {
  double min_re = 0.0, max_re = 0.0;
  double max_im_rel = 0.0;  // max |Im| / max |c̃|
};

/// Samples c̃ on an n×n grid over the cell with corner `origin`.
GridStats scan_cell(const ThetaSum& c, int n, cplx origin = 0.0);

struct CanonicalFit {
  std::vector<CanonicalTerm> terms;
  std::vector<cplx> alpha_closed;  // from the divisor constants
  double fit_residual = 0.0;       // at the fit samples
};

/// Requires ΣQ + ΣP_i = P̄, under which c̃(z − P) is a canonical sum with the same Q_s, R_s.
CanonicalFit fit_canonical(const GenusOneData& d);

// Choose P_{n+1} so that the canonical-equivalence condition holds.
GenusOneData with_canonical_divisor(GenusOneData d);

// ---------------------------------------------------------------------------
// Periodic fields

/// Im(λη1 − ζ(λ)) + πn/2 and Im(λη2 − ω2ζ(λ)) + πm/2.
Vec2 periodicity_equations(const WeierstrassContext& ctx, int n, int m, cplx lambda);

std::vector<CanonicalTerm> lambda_pair_terms(const WeierstrassContext& ctx, cplx lambda, double alpha, cplx beta);

/// Type-1 terms at the three half-periods plus, optionally, the pair of lambda_pair_terms.
/// Strictly positive when |beta| is small.
std::vector<CanonicalTerm> positive_periodic_terms(const WeierstrassContext& ctx,
                                                   std::optional<cplx> lambda = std::nullopt,
                                                   cplx beta = 0.0);

/// max over samples of |B̃(z + 2ω_s) − B̃(z)| relative to max |B̃|, for s = 1, 2.
Vec2 periodicity_residual(const ThetaSum& c, int samples = 64, unsigned seed = 1, double sign = -1.0);

struct PeriodicitySolution {
  cplx lambda;
  double equation_residual = 0.0;
  int iterations = 0;
  Vec2 field_residual{0, 0};  // of B̃ from positive_periodic_terms with this λ
};

PeriodicitySolution periodicity_search(const WeierstrassContext& ctx, int n, int m, cplx seed);

/// Roots from a seed grid over the cell, skipping degenerate λ (2λ ∈ Λ, λ ≡ ±ω1).
std::vector<PeriodicitySolution> periodicity_scan(const WeierstrassContext& ctx, int n, int m, int grid = 8);

// ---------------------------------------------------------------------------
// Bloch functions

/// c = c̃ / |σ(z + P)|², with c̃ normalized so its translation multipliers are
/// e^{2η1(z + z̄ + 2)} and e^{2η2(z − z̄ + 2ω2)}.
struct BlochSetting {
  ThetaSum ctilde;
  cplx P;
};

cplx psi_norm(const BlochSetting& b, cplx p, cplx z);

struct BlochMultipliers {
  cplx kx, ky;                 // ratio evaluation
  cplx kx_closed, ky_closed;   // from the σ shift law
  cplx kx_alt, ky_alt;
  double z_deviation = 0.0;
};

BlochMultipliers bloch_multipliers(const BlochSetting& b, cplx p, int samples = 5);

/// p with |κ_x| = |κ_y| = 1 near the seed.
cplx unitarity_locus(const BlochSetting& b, cplx seed);

struct Unitarized {
  cplx u;
  cplx kx, ky;
  cplx kx_alt, ky_alt;
};

Unitarized unitarize(const BlochSetting& b, cplx p);

/// ψ̃ = N e^{(u − ζ(p))z} σ(z + p + P) / √c̃ with ψ̃(p, 0) > 0.
cplx dn_gauge(const BlochSetting& b, cplx p, cplx z);

/// Phase of σ(z + P + Ω)/σ(z + P): the magnetic-translation factor relating ψ̃ to ψ_norm.
cplx magnetic_phase(const BlochSetting& b, cplx z, cplx omega);

struct CellFlux {
  double flux = 0.0;
  double quanta = 0.0;  // |flux| / 2π
  bool shifted = false;
};

/// sign · ½∮ ∂_n ln c̃ ds over the cell with corner `origin`.
CellFlux cell_flux(const ThetaSum& c, cplx origin = 0.0, double sign = -1.0);
CellFlux cell_flux(const std::function<Vec2(cplx)>& grad_log, const std::function<double(cplx)>& value,
                   const WeierstrassContext& ctx, cplx origin = 0.0, double sign = -1.0);

}  // namespace magpauli
