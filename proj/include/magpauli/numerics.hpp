#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace magpauli {

using cplx = std::complex<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline cplx to_complex(Point pt) { return {pt.x, pt.y}; }

/// W(z, z̄) = p·z − k·z̄ evaluated at z = x + iy.
struct ComplexLinearForm {
  cplx p;
  cplx k;

  cplx eval(Point pt) const {
    const cplx z = to_complex(pt);
    return p * z - k * std::conj(z);
  }
  // Re W = alpha·x + beta·y.
  double alpha() const { return (p - k).real(); }
  double beta() const { return -(p + k).imag(); }

  /// The purely real exponent alpha·x + beta·y (k = −p̄).
  static ComplexLinearForm from_real(double alpha, double beta) {
    const cplx p{alpha / 2.0, -beta / 2.0};
    return {p, -std::conj(p)};
  }

  ComplexLinearForm operator+(const ComplexLinearForm& o) const { return {p + o.p, k + o.k}; }
  bool operator==(const ComplexLinearForm&) const = default;
};

struct Grid2D {
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 1.0;
  double hy = 1.0;
  int nx = 1;
  int ny = 1;

  Point at(int i, int j) const { return {x0 + i * hx, y0 + j * hy}; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Exponential sums in log-domain

struct ExpTerm {
  cplx coefficient;
  ComplexLinearForm form;
};

inline constexpr double kDefaultCancellation = 1e12 * std::numeric_limits<double>::epsilon();

/// c = Σ coefficient·e^{W} carried as exp(log_magnitude)·phase.
struct LogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  cplx phase{1.0, 0.0};
  std::optional<cplx> value;
  // |c| fell below the cancellation threshold relative to the dominant term.
  bool cancelled = false;
};

LogValue logsum_eval(std::span<const ExpTerm> terms, Point pt,
                     double cancellation_threshold = kDefaultCancellation);

// ---------------------------------------------------------------------------
// Finite differences

enum class Sector { Plus, Minus };
enum class FdOrder { Second, Fourth };

using RealField = std::function<double(double, double)>;
using ComplexField = std::function<cplx(double, double)>;

/// (L_± ψ) on the grid for L_± = −(∂x − iΦ_y)² − (∂y + iΦ_x)² ± ΔΦ.
/// All derivatives, including those of Φ, are taken by centered differences.
std::vector<cplx> fd_apply_pauli(const RealField& phi, const ComplexField& psi, Sector sector,
                                 const Grid2D& grid, FdOrder order = FdOrder::Second);

// ---------------------------------------------------------------------------
// Quadrature (adaptive Gauss–Kronrod 7/15)

template <typename T>
struct QuadResultT {
  T value{};
  double error = 0.0;
  int evaluations = 0;
};
using QuadResult = QuadResultT<double>;

inline constexpr int kDefaultMaxSubdivisions = 4000;

QuadResult quad_adaptive_1d(const std::function<double(double)>& f, double a, double b, double tol,
                            int max_subdivisions = kDefaultMaxSubdivisions);

QuadResultT<cplx> quad_adaptive_1d_complex(const std::function<cplx(double)>& f, double a, double b,
                                           double tol,
                                           int max_subdivisions = kDefaultMaxSubdivisions);

/// ∫_a^∞ f, mapped by w = a + t/(1−t) onto [0, 1).
QuadResult quad_semi_infinite(const std::function<double(double)>& f, double a, double tol,
                              int max_subdivisions = kDefaultMaxSubdivisions);

/// ∬ f over [x0, x1] × [y0, y1] by nested adaptive quadrature.
QuadResult quad_2d(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                   double y1, double tol);

/// Adaptive integration over [a, b] with forced breakpoints (sorted, inside (a, b)).
QuadResult quad_with_breaks(const std::function<double(double)>& f, std::span<const double> breaks,
                            double a, double b, double tol,
                            int max_subdivisions = kDefaultMaxSubdivisions);

// ---------------------------------------------------------------------------
// Root finding

using Vec2 = std::array<double, 2>;
using Map2 = std::function<Vec2(const Vec2&)>;

struct NewtonResult {
  Vec2 x{};
  double residual = 0.0;
  int iterations = 0;
};

NewtonResult newton_solve(const Map2& F, Vec2 x0, double tol, int max_iter);

}  // namespace magpauli
