#pragma once

#include <span>
#include <string>
#include <vector>

#include "magpauli/expsum.hpp"

namespace magpauli {

struct RealLinearForm {
  double alpha = 0.0;
  double beta = 0.0;

  double eval(Point p) const { return alpha * p.x + beta * p.y; }
  bool operator==(const RealLinearForm&) const = default;
};

double indicator(const RealLinearForm& w, double phi);
double indicator_set(std::span<const RealLinearForm> forms, double phi);

// Re W_j of every term.
std::vector<RealLinearForm> real_parts(const ExponentialSum& c);

enum class ZeroSetKind { Empty, IsolatedPoints, Arc, Everywhere };

struct ZeroSet {
  ZeroSetKind kind = ZeroSetKind::Empty;
  std::vector<double> angles;  // isolated zeros in [0, 2π)
  double arc_begin = 0.0;      // arc runs counter-clockwise from begin to end
  double arc_end = 0.0;
};

ZeroSet classify_zero_set(std::span<const RealLinearForm> forms, double tol = 1e-12);

enum class Membership { Interior, Boundary, Exterior };

struct ConvexPolygon {
  std::vector<Vec2> vertices;  // counter-clockwise, no collinear points
  int dimension() const { return vertices.size() >= 3 ? 2 : static_cast<int>(vertices.size()) - 1; }
  Membership classify(Vec2 p, double tol = 1e-12) const;
  Vec2 centroid() const;
};

ConvexPolygon convex_hull(std::vector<Vec2> pts);

struct GrowthProfile {
  std::vector<RealLinearForm> forms;
  ConvexPolygon polygon_T;
  ZeroSet zero_set;
  bool stable = false;

  Membership classify(const RealLinearForm& w, double tol = 1e-12) const {
    return polygon_T.classify({w.alpha, w.beta}, tol);
  }
};

GrowthProfile polygon_T(std::span<const RealLinearForm> forms);

RealLinearForm minimal_zero_representative(std::span<const RealLinearForm> forms);

struct GaugeShift {
  ExponentialSum shifted;
  RealLinearForm w;
  // Ψ′ = e^{iχ}Ψ relates the two operators.
  double chi(Point p) const { return 0.5 * (w.alpha * p.y - w.beta * p.x); }
};

GaugeShift gauge_shift(const ExponentialSum& c, const RealLinearForm& w);

enum class PhaseConvention {
  Gauge,         // e^{i(αy − βx)/2}
  Conjugate,       // e^{−i(αx − βy)/2}
  ConjugateSwap,   // e^{−i(αy − βx)/2}
};
const char* to_string(PhaseConvention p);
double phase_angle(PhaseConvention conv, const RealLinearForm& w, Point p);

struct PhaseSelection {
  PhaseConvention convention;
  std::vector<double> residual_ratio;  // per candidate, h = 0.02 over h = 0.01
  std::vector<double> residual_fine;
};
// Runs the residual test once and caches the winner.
const PhaseSelection& selected_phase_convention();

class GroundState {
 public:
  GroundState(ExponentialSum c, RealLinearForm w, Sector sector, std::optional<PhaseConvention> conv = std::nullopt);

  cplx operator()(double x, double y) const;
  // Φ = ½ ln c of the original field.
  double phi(double x, double y) const;

  PhaseConvention convention() const { return conv_; }
  Membership membership() const { return membership_; }
  Sector sector() const { return sector_; }
  const RealLinearForm& gauge() const { return w_; }

 private:
  ExponentialSum c_;
  RealLinearForm w_;
  Sector sector_;
  PhaseConvention conv_;
  Membership membership_;
};

GroundState ground_state(const ExponentialSum& c, const RealLinearForm& w, Sector sector = Sector::Minus);

struct CurrentField {
  Grid2D grid;
  std::vector<Vec2> j;     // NaN at masked points
  std::vector<bool> mask;  // true where |Ψ| fell below the threshold
  std::size_t masked = 0;
};

/// j = Im(Ψ̄ DΨ) with D = (∂x − iΦ_y, ∂y + iΦ_x), centered differences.
CurrentField current_density(const ComplexField& psi, const RealField& phi, const Grid2D& grid,
                             double zero_threshold = 1e-300);

Vec2 total_current(const CurrentField& f);

struct AdmissibilityReport {
  ConvexPolygon positive_T;
  std::vector<RealLinearForm> checked;
  std::vector<bool> admissible;
  bool all_admissible = false;
  std::size_t zeros_found = 0;
  std::vector<Point> zero_locations;
};

/// Envelopes of all terms other than positive exponentials are checked against the
/// positive part; a scan grid, when given, is searched for sign changes of c.
AdmissibilityReport mixed_class_admissibility(const ExponentialSum& c,
                                              std::span<const RealLinearForm> extra_envelopes = {},
                                              const Grid2D* scan = nullptr);

}  // namespace magpauli
