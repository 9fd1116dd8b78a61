#include "magpauli/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magpauli/errors.hpp"

namespace magpauli {

using std::numbers::pi;

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); }

double wrap(double a) {
  a = std::fmod(a, 2 * pi);
  return a < 0 ? a + 2 * pi : a;
}

double seg_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

}  // namespace

double indicator(const RealLinearForm& w, double phi) {
  return std::max(w.alpha * std::cos(phi) + w.beta * std::sin(phi), 0.0);
}

double indicator_set(std::span<const RealLinearForm> forms, double phi) {
  double m = 0.0;
  for (const auto& w : forms) m = std::max(m, indicator(w, phi));
  return m;
}

std::vector<RealLinearForm> real_parts(const ExponentialSum& c) {
  std::vector<RealLinearForm> out;
  for (const auto& t : c.terms) out.push_back({t.form.alpha(), t.form.beta()});
  return out;
}

ZeroSet classify_zero_set(std::span<const RealLinearForm> forms, double tol) {
  ZeroSet z;
  std::vector<double> cand;
  for (const auto& w : forms) {
    if (std::hypot(w.alpha, w.beta) == 0.0) continue;
    const double th = std::atan2(w.beta, w.alpha);
    cand.push_back(wrap(th + pi / 2));
    cand.push_back(wrap(th - pi / 2));
  }
  if (cand.empty()) {
    z.kind = ZeroSetKind::Everywhere;
    return z;
  }
  auto in = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    for (const auto& w : forms)
      if (w.alpha * c + w.beta * s > tol * std::hypot(w.alpha, w.beta)) return false;
    return true;
  };
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(), [](double a, double b) { return b - a < 1e-15; }), cand.end());
  const std::size_t n = cand.size();
  std::vector<bool> pt(n), gap(n);  // gap[i]: open arc from cand[i] to cand[i+1]
  for (std::size_t i = 0; i < n; ++i) {
    pt[i] = in(cand[i]);
    const double next = i + 1 < n ? cand[i + 1] : cand[0] + 2 * pi;
    gap[i] = in(0.5 * (cand[i] + next));
  }
  // Arcs have length at most π, so at most one gap run is present.
  for (std::size_t i = 0; i < n; ++i) {
    if (!gap[i]) continue;
    const std::size_t prev = (i + n - 1) % n;
    if (gap[prev] && n > 1) continue;
    std::size_t j = i;
    while (gap[(j + 1) % n] && (j + 1) % n != i) j = (j + 1) % n;
    z.kind = ZeroSetKind::Arc;
    z.arc_begin = cand[i];
    z.arc_end = (j + 1 < n) ? cand[j + 1] : cand[0];
    return z;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (pt[i]) z.angles.push_back(cand[i]);
  z.kind = z.angles.empty() ? ZeroSetKind::Empty : ZeroSetKind::IsolatedPoints;
  return z;
}

ConvexPolygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  ConvexPolygon poly;
  if (pts.size() <= 2) {
    poly.vertices = pts;
    return poly;
  }
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  poly.vertices = h;
  return poly;
}

Membership ConvexPolygon::classify(Vec2 p, double tol) const {
  const auto& v = vertices;
  if (v.empty()) return Membership::Exterior;
  if (v.size() == 1) return std::hypot(p[0] - v[0][0], p[1] - v[0][1]) <= tol ? Membership::Boundary : Membership::Exterior;
  if (v.size() == 2) return seg_distance(p, v[0], v[1]) <= tol ? Membership::Boundary : Membership::Exterior;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    dmin = std::min(dmin, cross(a, b, p) / std::hypot(b[0] - a[0], b[1] - a[1]));
  }
  if (dmin < -tol) return Membership::Exterior;
  return dmin <= tol ? Membership::Boundary : Membership::Interior;
}

Vec2 ConvexPolygon::centroid() const {
  Vec2 c{0, 0};
  for (const auto& p : vertices) {
    c[0] += p[0];
    c[1] += p[1];
  }
  const double n = static_cast<double>(vertices.size());
  return {c[0] / n, c[1] / n};
}

GrowthProfile polygon_T(std::span<const RealLinearForm> forms) {
  if (forms.empty()) throw Error(ErrorCode::EmptySum, "no forms");
  GrowthProfile g;
  g.forms.assign(forms.begin(), forms.end());
  std::vector<Vec2> pts;
  for (const auto& w : forms) pts.push_back({-w.alpha, -w.beta});
  g.polygon_T = convex_hull(pts);
  g.zero_set = classify_zero_set(forms);
  g.stable = g.polygon_T.dimension() == 2;
  return g;
}

RealLinearForm minimal_zero_representative(std::span<const RealLinearForm> forms) {
  const auto c = polygon_T(forms).polygon_T.centroid();
  return {c[0], c[1]};
}

GaugeShift gauge_shift(const ExponentialSum& c, const RealLinearForm& w) {
  GaugeShift g{c, w};
  const auto dw = ComplexLinearForm::from_real(w.alpha, w.beta);
  for (auto& t : g.shifted.terms) t.form = t.form + dw;
  return g;
}

const char* to_string(PhaseConvention p) {
  switch (p) {
    case PhaseConvention::Gauge: return "gauge";
    case PhaseConvention::Conjugate: return "conjugate";
    case PhaseConvention::ConjugateSwap: return "conjugate-swap";
  }
  return "?";
}

double phase_angle(PhaseConvention conv, const RealLinearForm& w, Point p) {
  switch (conv) {
    case PhaseConvention::Gauge: return 0.5 * (w.alpha * p.y - w.beta * p.x);
    case PhaseConvention::Conjugate: return -0.5 * (w.alpha * p.x - w.beta * p.y);
    case PhaseConvention::ConjugateSwap: return -0.5 * (w.alpha * p.y - w.beta * p.x);
  }
  return 0.0;
}

namespace {

void require_positive(const ExponentialSum& c) {
  const auto r = classify_reality(c);
  if (!r.real) throw Error(ErrorCode::NotReal, "c is not real");
  for (auto k : r.kinds)
    if (k != TermKind::Exponential) throw Error(ErrorCode::NotPositive, "c has oscillating terms");
  if (r.signs != SignProfile::AllPositive) throw Error(ErrorCode::NotPositive, "c has non-positive coefficients");
}

double residual_sup(const GroundState& gs, double h) {
  const int n = static_cast<int>(std::lround(2.0 / h)) + 1;
  const Grid2D g{-1.0, -1.0, h, h, n, n};
  const auto r = fd_apply_pauli([&](double x, double y) { return gs.phi(x, y); },
                                [&](double x, double y) { return gs(x, y); }, gs.sector(), g);
  double m = 0.0;
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i) m = std::max(m, std::abs(r[g.index(i, j)]));
  return m;
}

PhaseSelection run_phase_selection() {
  const auto c = real_exponential_sum({{1, 1, 0}, {1, 0, 1}, {1, -1, -1}});
  const RealLinearForm w{0.3, -0.1};
  PhaseSelection sel{PhaseConvention::Gauge, {}, {}};
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (auto conv : {PhaseConvention::Gauge, PhaseConvention::Conjugate, PhaseConvention::ConjugateSwap}) {
    const GroundState gs(c, w, Sector::Minus, conv);
    const double coarse = residual_sup(gs, 0.02), fine = residual_sup(gs, 0.01);
    sel.residual_ratio.push_back(coarse / fine);
    sel.residual_fine.push_back(fine);
    if (coarse / fine > 3.5 && coarse / fine < 4.5 && fine < best) {
      best = fine;
      sel.convention = conv;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::SelfCheckFailed, "no phase convention annihilates the test state");
  return sel;
}

}  // namespace

const PhaseSelection& selected_phase_convention() {
  static const PhaseSelection sel = run_phase_selection();
  return sel;
}

GroundState::GroundState(ExponentialSum c, RealLinearForm w, Sector sector, std::optional<PhaseConvention> conv)
    : c_(std::move(c)), w_(w), sector_(sector) {
  require_positive(c_);
  conv_ = conv ? *conv : selected_phase_convention().convention;
  membership_ = polygon_T(real_parts(c_)).classify(w_);
}

double GroundState::phi(double x, double y) const { return 0.5 * logsum_eval(c_.terms, {x, y}).log_magnitude; }

cplx GroundState::operator()(double x, double y) const {
  const double lc = w_.eval({x, y}) + logsum_eval(c_.terms, {x, y}).log_magnitude;
  const double amp = sector_ == Sector::Minus ? -0.5 * lc : 0.5 * lc;
  return std::exp(cplx(amp, phase_angle(conv_, w_, {x, y})));
}

GroundState ground_state(const ExponentialSum& c, const RealLinearForm& w, Sector sector) {
  return GroundState(c, w, sector);
}

CurrentField current_density(const ComplexField& psi, const RealField& phi, const Grid2D& grid, double zero_threshold) {
  grid.validate();
  CurrentField f{grid, std::vector<Vec2>(grid.size()), std::vector<bool>(grid.size(), false), 0};
  const double hx = grid.hx, hy = grid.hy;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Point p = grid.at(i, j);
      const auto idx = grid.index(i, j);
      const cplx v = psi(p.x, p.y);
      if (std::abs(v) < zero_threshold) {
        f.mask[idx] = true;
        f.j[idx] = {nan, nan};
        ++f.masked;
        continue;
      }
      const cplx dx = (psi(p.x + hx, p.y) - psi(p.x - hx, p.y)) / (2 * hx);
      const cplx dy = (psi(p.x, p.y + hy) - psi(p.x, p.y - hy)) / (2 * hy);
      const double phx = (phi(p.x + hx, p.y) - phi(p.x - hx, p.y)) / (2 * hx);
      const double phy = (phi(p.x, p.y + hy) - phi(p.x, p.y - hy)) / (2 * hy);
      const cplx I{0, 1};
      f.j[idx] = {(std::conj(v) * (dx - I * phy * v)).imag(), (std::conj(v) * (dy + I * phx * v)).imag()};
    }
  if (f.masked == grid.size()) throw Error(ErrorCode::ZeroOfPsi, "psi vanishes on the whole grid");
  return f;
}

Vec2 total_current(const CurrentField& f) {
  Vec2 s{0, 0};
  const auto& g = f.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto idx = g.index(i, j);
      if (f.mask[idx]) continue;
      const double w = (i == 0 || i == g.nx - 1 ? 0.5 : 1.0) * (j == 0 || j == g.ny - 1 ? 0.5 : 1.0) * g.hx * g.hy;
      s[0] += w * f.j[idx][0];
      s[1] += w * f.j[idx][1];
    }
  return s;
}

AdmissibilityReport mixed_class_admissibility(const ExponentialSum& c, std::span<const RealLinearForm> extra,
                                              const Grid2D* scan) {
  c.validate();
  const auto rep = classify_reality(c);
  std::vector<Vec2> pos{{0.0, 0.0}};
  AdmissibilityReport r;
  std::vector<Vec2> plain;
  for (std::size_t q = 0; q < c.terms.size(); ++q) {
    const auto& t = c.terms[q];
    const RealLinearForm w{t.form.alpha(), t.form.beta()};
    if (rep.kinds[q] == TermKind::Exponential && t.coefficient.real() > 0) {
      pos.push_back({w.alpha, w.beta});
      plain.push_back({w.alpha, w.beta});
    } else {
      r.checked.push_back(w);
    }
  }
  if (plain.empty()) throw Error(ErrorCode::EmptyPositivePart, "no positive exponential terms");
  r.checked.insert(r.checked.end(), extra.begin(), extra.end());
  std::vector<Vec2> neg;
  for (auto p : plain) neg.push_back({-p[0], -p[1]});
  r.positive_T = convex_hull(neg);
  // I_v ≤ I_{set} everywhere exactly when v lies in conv({0} ∪ {v_j}).
  const auto dom = convex_hull(pos);
  r.all_admissible = true;
  for (const auto& w : r.checked) {
    const bool ok = dom.classify({w.alpha, w.beta}, 1e-12) != Membership::Exterior;
    r.admissible.push_back(ok);
    r.all_admissible = r.all_admissible && ok;
  }
  if (scan) {
    scan->validate();
    auto val = [&](int i, int j) { return eval_c(c, scan->at(i, j)).real(); };
    for (int j = 0; j < scan->ny; ++j)
      for (int i = 0; i < scan->nx; ++i) {
        const double v = val(i, j);
        const bool right = i + 1 < scan->nx && v * val(i + 1, j) <= 0;
        const bool up = j + 1 < scan->ny && v * val(i, j + 1) <= 0;
        if (right || up) {
          ++r.zeros_found;
          if (r.zero_locations.size() < 16) r.zero_locations.push_back(scan->at(i, j));
        }
      }
  }
  return r;
}

}  // namespace magpauli
