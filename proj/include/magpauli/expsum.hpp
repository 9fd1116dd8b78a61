#pragma once

#include <optional>
#include <vector>

#include "magpauli/numerics.hpp"

namespace magpauli {

/// Genus-0 spectral data: n+1 points k_j on one component, n+1 points p_j on the
/// other, and the n-point pole divisor a_i of Ψ.
struct SpectralDataG0 {
  std::vector<cplx> k_points;
  std::vector<cplx> p_points;
  std::vector<cplx> divisor;

  void validate() const;
};

inline constexpr double kDistinctTolerance = 1e-9;

struct ExponentialSum {
  std::vector<ExpTerm> terms;

  void validate() const;
  std::size_t size() const { return terms.size(); }
};

// Convenience for purely real exponents alpha·x + beta·y.
ExponentialSum real_exponential_sum(const std::vector<std::array<double, 3>>& kappa_alpha_beta);

struct BuildDiagnostics {
  double condition_estimate = 0.0;
  double crosscheck_residual = 0.0;
  bool ill_conditioned = false;
};

ExponentialSum build_exponential_sum(const SpectralDataG0& data, BuildDiagnostics* diag = nullptr);

cplx eval_c(const ExponentialSum& c, Point pt);
LogValue eval_c_log(const ExponentialSum& c, Point pt);

cplx eval_psi_g0(const SpectralDataG0& data, cplx k, Point pt);

/// c and its z-derivatives, all divided by a common factor e^{scale}.
struct CDerivatives {
  double scale = 0.0;
  cplx c, cz, czb, czzb;
};
CDerivatives c_derivatives(const ExponentialSum& c, Point pt);

double magnetic_field(const ExponentialSum& c, Point pt);

enum class TermKind { Exponential, MixedPair, Trigonometric, NonReal };
enum class SignProfile { AllPositive, AllNegative, Mixed, None };

struct RealityReport {
  std::vector<TermKind> kinds;
  std::vector<int> partner;  // -1 when unpaired
  bool real = false;
  SignProfile signs = SignProfile::None;
  bool has_constant = false;
  // Terms after pairing conjugates; for trigonometric sums even/odd decides the form.
  std::size_t reduced_count = 0;
  bool odd_term_count = false;
};

RealityReport classify_reality(const ExponentialSum& c, double tol = 1e-10);

struct ResidueReport {
  cplx s;
  std::vector<cplx> residue_k;  // Res_{k_j} Ω1
  std::vector<cplx> residue_p;  // Res_{p_j} Ω2
  std::vector<cplx> sums;
  double worst = 0.0;
  bool matched = false;
};

ResidueReport check_residues(const SpectralDataG0& data, std::optional<cplx> s = std::nullopt);

}  // namespace magpauli
