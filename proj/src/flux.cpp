#include "magpauli/flux.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magpauli/errors.hpp"

namespace magpauli {

using std::numbers::pi;

namespace {

double wrap(double a) {
  a = std::fmod(a, 2 * pi);
  return a < 0 ? a + 2 * pi : a;
}

// Angles where two forms tie or one changes sign.
std::vector<double> breakpoints(std::span<const RealLinearForm> f, bool zeros) {
  std::vector<double> b;
  auto add_null = [&](double a, double bb) {
    if (a == 0 && bb == 0) return;
    const double th = std::atan2(bb, a);
    b.push_back(wrap(th + pi / 2));
    b.push_back(wrap(th - pi / 2));
  };
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (zeros) add_null(f[i].alpha, f[i].beta);
    for (std::size_t j = i + 1; j < f.size(); ++j) add_null(f[i].alpha - f[j].alpha, f[i].beta - f[j].beta);
  }
  std::sort(b.begin(), b.end());
  return b;
}

void require_positive_exponential(const ExponentialSum& c) {
  c.validate();
  const auto r = classify_reality(c);
  for (auto k : r.kinds)
    if (k != TermKind::Exponential) throw Error(ErrorCode::NotPositive, "flux routines need real exponents");
  if (r.signs != SignProfile::AllPositive) throw Error(ErrorCode::NotPositive, "flux routines need positive coefficients");
}

}  // namespace

double vector_potential_circle(const ExponentialSum& c, double R, double phi) {
  const Point pt{R * std::cos(phi), R * std::sin(phi)};
  if (logsum_eval(c.terms, pt).cancelled) throw Error(ErrorCode::ZeroOfC, "c vanishes on the circle");
  const auto d = c_derivatives(c, pt);
  const double phx = 0.5 * ((d.cz + d.czb) / d.c).real();
  const double phy = 0.5 * (cplx(0, 1) * (d.cz - d.czb) / d.c).real();
  return -R * (phy * std::sin(phi) + phx * std::cos(phi));
}

double disk_flux(const ExponentialSum& c, double R, double tol) {
  const auto forms = real_parts(c);
  const auto br = breakpoints(forms, false);
  return quad_with_breaks([&](double phi) { return vector_potential_circle(c, R, phi); }, br, 0.0, 2 * pi,
                          tol * std::max(1.0, R))
      .value;
}

double indicator_integral(std::span<const RealLinearForm> forms) {
  auto br = breakpoints(forms, true);
  br.insert(br.begin(), 0.0);
  br.push_back(2 * pi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i], b = br[i + 1];
    if (b - a <= 0) continue;
    const double mid = 0.5 * (a + b);
    int best = -1;
    double bv = 0.0;
    for (std::size_t j = 0; j < forms.size(); ++j) {
      const double v = forms[j].alpha * std::cos(mid) + forms[j].beta * std::sin(mid);
      if (v > bv) {
        bv = v;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) continue;
    const auto& w = forms[best];
    total += w.alpha * (std::sin(b) - std::sin(a)) - w.beta * (std::cos(b) - std::cos(a));
  }
  return total;
}

double regularized_flux(const ExponentialSum& c, double R, double tol) {
  require_positive_exponential(c);
  const auto forms = real_parts(c);
  const auto g = polygon_T(forms);
  if (g.polygon_T.dimension() == 0) return disk_flux(c, R, tol) + 0.5 * R * indicator_integral(forms);
  if (g.zero_set.kind != ZeroSetKind::Empty)
    throw Error(ErrorCode::UnstableClass, "indicator has zeros; shift the gauge into the interior of T");
  // ½R ∮ Σ_j w_j (max − v_j·u): the O(R) parts cancel inside the integrand.
  const std::size_t n = forms.size();
  std::vector<double> logk(n);
  for (std::size_t j = 0; j < n; ++j) logk[j] = std::log(c.terms[j].coefficient.real());
  auto integrand = [&](double phi) {
    const double cs = std::cos(phi), sn = std::sin(phi);
    double mx = -std::numeric_limits<double>::infinity(), ex = mx;
    std::vector<double> d(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = forms[j].alpha * cs + forms[j].beta * sn;
      e[j] = logk[j] + R * d[j];
      mx = std::max(mx, d[j]);
      ex = std::max(ex, e[j]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::exp(e[j] - ex);
      num += w * (mx - d[j]);
      den += w;
    }
    return 0.5 * R * num / den;
  };
  const auto br = breakpoints(forms, false);
  return quad_with_breaks(integrand, br, 0.0, 2 * pi, tol).value;
}

double q_integral(int k, double a, double tol) {
  if (!(a > 0)) throw Error(ErrorCode::DegenerateData, "Q_k needs a > 0");
  const double la = std::log(a);
  auto f = [&](double w) {
    const double x = w - la;  // e^w/a = e^x
    const double frac = x > 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
    return (k == 0 ? 1.0 : std::pow(w, k)) * frac;
  };
  const double scale = std::min(a, 1.0 + std::pow(std::max(la, 0.0), k + 1)) * std::tgamma(k + 1.0);
  return quad_semi_infinite(f, 0.0, tol * scale).value;
}

std::vector<int> essential_terms(const ExponentialSum& c) {
  const auto forms = real_parts(c);
  std::vector<Vec2> pts;
  for (const auto& w : forms) pts.push_back({w.alpha, w.beta});
  const auto hull = convex_hull(pts);
  std::vector<int> out;
  for (const auto& v : hull.vertices)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (pts[j] == v) {
        out.push_back(static_cast<int>(j));
        break;
      }
  return out;
}

std::vector<double> inverse_series_lambda(const std::vector<double>& cc, int order) {
  // cc[n-1] = c_n. Reversion z = Σ d_n t^n up to n = 4, then λ^{(k)} = (k+1) d_{k+1}.
  if (order > 3) throw Error(ErrorCode::DegenerateData, "inverse series order is capped at 3");
  auto c = [&](int n) { return n <= static_cast<int>(cc.size()) ? cc[n - 1] : 0.0; };
  const double c1 = c(1), c2 = c(2), c3 = c(3), c4 = c(4);
  if (std::abs(c1) < 1e-14) throw Error(ErrorCode::DegenerateCorner, "tangential crossing");
  const double d[4] = {1.0 / c1, -c2 / std::pow(c1, 3), (2 * c2 * c2 - c1 * c3) / std::pow(c1, 5),
                       (5 * c1 * c2 * c3 - c1 * c1 * c4 - 5 * c2 * c2 * c2) / std::pow(c1, 7)};
  std::vector<double> lam;
  for (int k = 0; k <= order; ++k) lam.push_back((k + 1) * d[k]);
  return lam;
}

CornerData corner_coefficients(const ExponentialSum& c, int j, int order) {
  require_positive_exponential(c);
  const auto forms = real_parts(c);
  const auto ess = essential_terms(c);
  if (ess.size() < 2) throw Error(ErrorCode::DegenerateCorner, "fewer than two essential forms");
  const int n = static_cast<int>(ess.size());
  if (j < 0 || j >= n) throw Error(ErrorCode::DegenerateCorner, "corner index out of range");
  CornerData cd;
  cd.j = j;
  cd.term_from = ess[j];
  cd.term_to = ess[(j + 1) % n];
  const auto& f0 = forms[cd.term_from];
  const auto& f1 = forms[cd.term_to];
  const double ea = f1.alpha - f0.alpha, eb = f1.beta - f0.beta;
  // Outward normal of the hull edge from v_from to v_to.
  cd.phi0 = wrap(std::atan2(-ea, eb));
  // Another form tying at φ0 would make this a multiple corner.
  const double c0 = std::cos(cd.phi0), s0 = std::sin(cd.phi0);
  const double top = f0.alpha * c0 + f0.beta * s0;
  for (std::size_t q = 0; q < forms.size(); ++q) {
    if (static_cast<int>(q) == cd.term_from || static_cast<int>(q) == cd.term_to) continue;
    if (forms[q].alpha * c0 + forms[q].beta * s0 >= top - 1e-12 * (1 + std::abs(top)))
      throw Error(ErrorCode::DegenerateCorner, "three forms meet at one corner");
  }
  // t(z) = ea cos(φ0+z) + eb sin(φ0+z) = Σ c_n z^n.
  const double A = ea * c0 + eb * s0, B = -ea * s0 + eb * c0;
  const std::vector<double> coeffs{B, -A / 2, -B / 6, A / 24};
  cd.lambda = inverse_series_lambda(coeffs, order);
  cd.a = c.terms[cd.term_to].coefficient.real() / c.terms[cd.term_from].coefficient.real();
  return cd;
}

namespace {

double asymptotic(const ExponentialSum& c, double R, int order, bool alt) {
  require_positive_exponential(c);
  const auto forms = real_parts(c);
  const auto g = polygon_T(forms);
  if (g.polygon_T.dimension() == 0) return 0.0;
  if (g.zero_set.kind != ZeroSetKind::Empty)
    throw Error(ErrorCode::UnstableClass, "indicator has zeros; shift the gauge into the interior of T");
  const int n = static_cast<int>(essential_terms(c).size());
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto cd = corner_coefficients(c, j, order);
    for (int s = 1; s <= order; ++s) {
      double term;
      if (alt) {
        term = cd.lambda[s] * (q_integral(s, cd.a) + (s % 2 ? -1.0 : 1.0) * q_integral(s, 1.0 / cd.a));
      } else {
        term = 0.5 * cd.lambda[s - 1] * (q_integral(s, 1.0 / cd.a) + (s % 2 ? 1.0 : -1.0) * q_integral(s, cd.a));
      }
      total += term * std::pow(R, -s);
    }
  }
  return total;
}

}  // namespace

double flux_asymptotic(const ExponentialSum& c, double R, int order) {
  if (order < 1 || order > 3) throw Error(ErrorCode::DegenerateData, "order must be within 1..3");
  return asymptotic(c, R, order, false);
}

double flux_asymptotic_alt_pairing(const ExponentialSum& c, double R, int order) {
  if (order < 1 || order > 3) throw Error(ErrorCode::DegenerateData, "order must be within 1..3");
  return asymptotic(c, R, order, true);
}

}  // namespace magpauli
