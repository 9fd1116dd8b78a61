#include "magpauli/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "magpauli/errors.hpp"

namespace magpauli {

void Grid2D::validate() const {
  if (nx < 5 || ny < 5) {
    throw Error(ErrorCode::GridTooSmall, "grid needs at least 5 points per axis");
  }
  if (!(hx > 0.0) || !(hy > 0.0)) {
    throw Error(ErrorCode::GridTooSmall, "grid spacings must be positive");
  }
}

LogValue logsum_eval(std::span<const ExpTerm> terms, Point pt, double cancellation_threshold) {
  if (terms.empty()) throw Error(ErrorCode::EmptySum, "exponential sum has no terms");

  // Shift by the largest real exponent so nothing overflows.
  std::vector<cplx> exponents;
  exponents.reserve(terms.size());
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    exponents.push_back(t.form.eval(pt));
    if (t.coefficient != 0.0) shift = std::max(shift, exponents.back().real());
  }
  LogValue out;
  if (!std::isfinite(shift)) {
    out.value = cplx{0.0, 0.0};
    out.cancelled = true;
    return out;
  }

  cplx sum{0.0, 0.0};
  double dominant = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].coefficient == 0.0) continue;
    const cplx w = terms[j].coefficient * std::exp(exponents[j] - shift);
    dominant = std::max(dominant, std::abs(w));
    sum += w;
  }
  const double mag = std::abs(sum);
  out.cancelled = mag < cancellation_threshold * dominant;
  if (mag == 0.0) {
    out.value = cplx{0.0, 0.0};
    return out;
  }
  out.log_magnitude = shift + std::log(mag);
  out.phase = sum / mag;
  constexpr double kLogMax = 709.0;
  constexpr double kLogMin = -707.0;
  if (out.log_magnitude < kLogMax && out.log_magnitude > kLogMin) {
    out.value = sum * std::exp(shift);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Stencil {
  // Offsets and weights for d/dx and d²/dx² (to be divided by h and h²).
  std::vector<int> offsets;
  std::vector<double> d1;
  std::vector<double> d2;
};

Stencil make_stencil(FdOrder order) {
  if (order == FdOrder::Second) {
    return {{-1, 0, 1}, {-0.5, 0.0, 0.5}, {1.0, -2.0, 1.0}};
  }
  return {{-2, -1, 0, 1, 2},
          {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12},
          {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}};
}

}  // namespace

std::vector<cplx> fd_apply_pauli(const RealField& phi, const ComplexField& psi, Sector sector,
                                 const Grid2D& grid, FdOrder order) {
  grid.validate();
  const Stencil st = make_stencil(order);
  const double hx = grid.hx;
  const double hy = grid.hy;
  const double sign = sector == Sector::Plus ? 1.0 : -1.0;
  const cplx I{0.0, 1.0};

  std::vector<cplx> out(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point c = grid.at(i, j);
      double phx = 0, phy = 0, phxx = 0, phyy = 0;
      cplx px = 0, py = 0, pxx = 0, pyy = 0;
      cplx p0 = psi(c.x, c.y);
      for (std::size_t s = 0; s < st.offsets.size(); ++s) {
        const double dx = st.offsets[s] * hx;
        const double dy = st.offsets[s] * hy;
        const double fx = phi(c.x + dx, c.y);
        const double fy = phi(c.x, c.y + dy);
        const cplx gx = st.offsets[s] == 0 ? p0 : psi(c.x + dx, c.y);
        const cplx gy = st.offsets[s] == 0 ? p0 : psi(c.x, c.y + dy);
        phx += st.d1[s] * fx;
        phy += st.d1[s] * fy;
        phxx += st.d2[s] * fx;
        phyy += st.d2[s] * fy;
        px += st.d1[s] * gx;
        py += st.d1[s] * gy;
        pxx += st.d2[s] * gx;
        pyy += st.d2[s] * gy;
      }
      phx /= hx;
      phy /= hy;
      px /= hx;
      py /= hy;
      const double lap_phi = phxx / (hx * hx) + phyy / (hy * hy);
      const cplx lap_psi = pxx / (hx * hx) + pyy / (hy * hy);
      // Expanded form of −(∂x − iΦ_y)²ψ − (∂y + iΦ_x)²ψ ± ΔΦ ψ.
      out[grid.index(i, j)] = -lap_psi + 2.0 * I * phy * px - 2.0 * I * phx * py +
                              (phx * phx + phy * phy + sign * lap_phi) * p0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename T, typename F>
Segment<T> gk15(const F& f, double a, double b, int& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = kWgk[7] * fc;
  T gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
  }
  evals += 15;
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

template <typename T, typename F>
QuadResultT<T> adaptive(const F& f, std::span<const double> cuts, double tol, int max_sub) {
  if (!(tol > 0.0)) throw Error(ErrorCode::MaxSubdivisions, "tolerance must be positive");
  QuadResultT<T> res;
  std::priority_queue<Segment<T>> heap;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) heap.push(gk15<T>(f, cuts[i], cuts[i + 1], res.evaluations));
  }
  auto totals = [&heap]() {
    auto copy = heap;
    T v{};
    double e = 0.0;
    double absv = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      absv += std::abs(copy.top().value);
      copy.pop();
    }
    return std::tuple{v, e, absv};
  };
  T value{};
  double err = 0.0;
  double absv = 0.0;
  std::tie(value, err, absv) = totals();
  int subdivisions = 0;
  // Sum of errors maintained incrementally; recomputed only when the loop ends.
  while (err > tol && err > 50.0 * std::numeric_limits<double>::epsilon() * absv) {
    if (subdivisions++ >= max_sub) {
      throw Error(ErrorCode::MaxSubdivisions,
                  "refinement budget exhausted (error " + std::to_string(err) + " > tol " +
                      std::to_string(tol) + ")");
    }
    const Segment<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = gk15<T>(f, worst.a, mid, res.evaluations);
    const auto right = gk15<T>(f, mid, worst.b, res.evaluations);
    value += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    absv += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
    heap.push(left);
    heap.push(right);
    if (err < 0.0) std::tie(value, err, absv) = totals();
  }
  std::tie(value, err, absv) = totals();
  res.value = value;
  res.error = err;
  return res;
}

}  // namespace

QuadResult quad_adaptive_1d(const std::function<double(double)>& f, double a, double b, double tol,
                            int max_subdivisions) {
  const std::array<double, 2> cuts{a, b};
  return adaptive<double>(f, cuts, tol, max_subdivisions);
}

QuadResultT<cplx> quad_adaptive_1d_complex(const std::function<cplx(double)>& f, double a, double b,
                                           double tol, int max_subdivisions) {
  const std::array<double, 2> cuts{a, b};
  return adaptive<cplx>(f, cuts, tol, max_subdivisions);
}

QuadResult quad_with_breaks(const std::function<double(double)>& f, std::span<const double> breaks,
                            double a, double b, double tol, int max_subdivisions) {
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  return adaptive<double>(f, cuts, tol, max_subdivisions);
}

QuadResult quad_semi_infinite(const std::function<double(double)>& f, double a, double tol,
                              int max_subdivisions) {
  auto mapped = [&f, a](double t) {
    if (t >= 1.0) return 0.0;
    const double one_minus = 1.0 - t;
    const double w = a + t / one_minus;
    const double v = f(w);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  const std::array<double, 2> cuts{0.0, 1.0};
  return adaptive<double>(mapped, cuts, tol, max_subdivisions);
}

QuadResult quad_2d(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                   double y1, double tol) {
  const double width = std::max(x1 - x0, 1e-300);
  const double inner_tol = 0.5 * tol / width;
  double inner_error = 0.0;
  int evals = 0;
  auto inner = [&](double x) {
    const auto r = quad_adaptive_1d([&](double y) { return f(x, y); }, y0, y1, inner_tol);
    inner_error = std::max(inner_error, r.error);
    evals += r.evaluations;
    return r.value;
  };
  auto outer = quad_adaptive_1d(inner, x0, x1, 0.5 * tol);
  outer.error += inner_error * width;
  outer.evaluations = evals;
  return outer;
}

// ---------------------------------------------------------------------------

namespace {

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

}  // namespace

NewtonResult newton_solve(const Map2& F, Vec2 x0, double tol, int max_iter) {
  Vec2 x = x0;
  Vec2 fx = F(x);
  double r = norm2(fx);
  for (int it = 0; it < max_iter; ++it) {
    if (r <= tol) return {x, r, it};
    // Central-difference Jacobian.
    std::array<Vec2, 2> cols{};
    for (int c = 0; c < 2; ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
      Vec2 xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const Vec2 fp = F(xp);
      const Vec2 fm = F(xm);
      cols[c] = {(fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)};
    }
    const double a = cols[0][0], b = cols[1][0], c = cols[0][1], d = cols[1][1];
    const double det = a * d - b * c;
    const double scale = a * a + b * b + c * c + d * d;
    if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(det)) {
      throw Error(ErrorCode::SingularJacobian, "numerical Jacobian is rank-deficient");
    }
    const Vec2 step{(d * fx[0] - b * fx[1]) / det, (-c * fx[0] + a * fx[1]) / det};
    // Backtrack until the residual decreases.
    double lambda = 1.0;
    Vec2 xn{};
    Vec2 fn{};
    double rn = 0.0;
    for (int k = 0; k < 30; ++k) {
      xn = {x[0] - lambda * step[0], x[1] - lambda * step[1]};
      fn = F(xn);
      rn = norm2(fn);
      if (std::isfinite(rn) && rn < r) break;
      lambda *= 0.5;
    }
    if (!(rn < r)) {
      if (r <= tol) return {x, r, it};
      throw Error(ErrorCode::NoConvergence, "line search failed to reduce the residual");
    }
    x = xn;
    fx = fn;
    r = rn;
  }
  if (r <= tol) return {x, r, max_iter};
  throw Error(ErrorCode::NoConvergence,
              "no convergence after " + std::to_string(max_iter) + " iterations");
}

}  // namespace magpauli
