#include "magpauli/expsum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "magpauli/errors.hpp"

namespace magpauli {

namespace {

void require_distinct(const std::vector<cplx>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (std::abs(v[i] - v[j]) <= kDistinctTolerance)
        throw Error(ErrorCode::DegenerateData, std::string(what) + " are not distinct");
}

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a) + std::abs(b)); }

cplx theta(const SpectralDataG0& d, cplx k) {
  cplx t = 1.0;
  for (cplx a : d.divisor) t *= k - a;
  return t;
}

}  // namespace

void SpectralDataG0::validate() const {
  if (k_points.empty()) throw Error(ErrorCode::DegenerateData, "no intersection points");
  if (p_points.size() != k_points.size())
    throw Error(ErrorCode::DegenerateData, "k_points and p_points differ in length");
  if (divisor.size() + 1 != k_points.size())
    throw Error(ErrorCode::DegenerateData, "divisor must have n points for n+1 intersection points");
  require_distinct(k_points, "k_points");
  require_distinct(p_points, "p_points");
  for (cplx a : divisor)
    for (cplx k : k_points)
      if (std::abs(a - k) <= kDistinctTolerance)
        throw Error(ErrorCode::DegenerateData, "divisor point coincides with an intersection point");
}

void ExponentialSum::validate() const {
  if (terms.empty()) throw Error(ErrorCode::EmptySum, "exponential sum has no terms");
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      if (terms[i].form == terms[j].form) throw Error(ErrorCode::DegenerateData, "repeated exponent");
}

ExponentialSum real_exponential_sum(const std::vector<std::array<double, 3>>& kab) {
  ExponentialSum c;
  for (const auto& t : kab) c.terms.push_back({t[0], ComplexLinearForm::from_real(t[1], t[2])});
  c.validate();
  return c;
}

ExponentialSum build_exponential_sum(const SpectralDataG0& data, BuildDiagnostics* diag) {
  data.validate();
  const auto n1 = static_cast<int>(data.k_points.size());
  const auto& k = data.k_points;

  ExponentialSum c;
  std::vector<cplx> kappa(n1);
  for (int j = 0; j < n1; ++j) {
    cplx den = 1.0;
    for (int i = 0; i < n1; ++i)
      if (i != j) den *= k[j] - k[i];
    kappa[j] = theta(data, k[j]) / den;
    c.terms.push_back({kappa[j], {data.p_points[j], k[j]}});
  }

  // Dense solve of the interpolation system: row j reads Σ_m u_m k_j^{n−m} = θ_j e^{W_j}.
  // With unit right-hand sides per column, the u_0 row gives the coefficient of each e^{W_j}.
  Eigen::MatrixXcd V(n1, n1);
  for (int j = 0; j < n1; ++j)
    for (int m = 0; m < n1; ++m) V(j, m) = std::pow(k[j], n1 - 1 - m);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n1, n1);
  for (int j = 0; j < n1; ++j) rhs(j, j) = theta(data, k[j]);
  const Eigen::MatrixXcd U = V.fullPivLu().solve(rhs);

  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(V).singularValues();
  const double cond = sv(0) / sv(n1 - 1);
  double resid = 0.0;
  for (int j = 0; j < n1; ++j)
    resid = std::max(resid, std::abs(U(0, j) - kappa[j]) / std::max(std::abs(kappa[j]), 1e-300));
  const bool ill = !(cond <= 1e12);
  if (diag) *diag = {cond, resid, ill};
  if (!ill && resid > 1e-10)
    throw Error(ErrorCode::SelfCheckFailed, "closed-form coefficients disagree with dense solve");
  return c;
}

LogValue eval_c_log(const ExponentialSum& c, Point pt) { return logsum_eval(c.terms, pt); }

cplx eval_c(const ExponentialSum& c, Point pt) {
  const auto v = logsum_eval(c.terms, pt);
  if (v.value) return *v.value;
  return std::exp(v.log_magnitude) * v.phase;
}

cplx eval_psi_g0(const SpectralDataG0& data, cplx kk, Point pt) {
  data.validate();
  for (cplx a : data.divisor)
    if (std::abs(kk - a) <= 1e-12) throw Error(ErrorCode::PoleHit, "k on the divisor");
  const auto& k = data.k_points;
  const std::size_t n1 = k.size();
  const cplx z = to_complex(pt), zb = std::conj(z);
  // Lagrange form of the interpolating polynomial, each term carrying its own exponential.
  cplx poly = 0.0;
  for (std::size_t j = 0; j < n1; ++j) {
    cplx basis = 1.0;
    for (std::size_t i = 0; i < n1; ++i)
      if (i != j) basis *= (kk - k[i]) / (k[j] - k[i]);
    poly += basis * theta(data, k[j]) * std::exp(data.p_points[j] * z - k[j] * zb + kk * zb);
  }
  return poly / theta(data, kk);
}

CDerivatives c_derivatives(const ExponentialSum& c, Point pt) {
  c.validate();
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& t : c.terms) m = std::max(m, t.form.eval(pt).real());
  CDerivatives d{m, 0.0, 0.0, 0.0, 0.0};
  for (const auto& t : c.terms) {
    const cplx w = t.coefficient * std::exp(t.form.eval(pt) - m);
    d.c += w;
    d.cz += w * t.form.p;
    d.czb -= w * t.form.k;
    d.czzb -= w * t.form.p * t.form.k;
  }
  return d;
}

double magnetic_field(const ExponentialSum& c, Point pt) {
  const auto v = logsum_eval(c.terms, pt);
  if (v.cancelled) throw Error(ErrorCode::ZeroOfC, "c vanishes; field is singular");
  const auto d = c_derivatives(c, pt);
  // B = −½Δ ln c with Δ = 4∂∂̄.
  const cplx b = -2.0 * (d.c * d.czzb - d.cz * d.czb) / (d.c * d.c);
  if (std::abs(b.imag()) > 1e-8 * std::max(1.0, std::abs(b.real())))
    throw Error(ErrorCode::NotReal, "magnetic field is not real; c fails the reality conditions");
  return b.real();
}

RealityReport classify_reality(const ExponentialSum& c, double tol) {
  c.validate();
  const std::size_t n = c.terms.size();
  RealityReport r;
  r.kinds.assign(n, TermKind::NonReal);
  r.partner.assign(n, -1);
  std::vector<bool> done(n, false);
  bool pos = false, neg = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (done[j]) continue;
    const auto& tj = c.terms[j];
    const cplx p = tj.form.p, k = tj.form.k;
    if (close(std::conj(p), -k, tol) && std::abs(tj.coefficient.imag()) <= tol * std::abs(tj.coefficient)) {
      r.kinds[j] = TermKind::Exponential;
      done[j] = true;
      ++r.reduced_count;
      (tj.coefficient.real() > 0 ? pos : neg) = true;
      if (std::abs(p) <= tol && std::abs(k) <= tol) r.has_constant = true;
      continue;
    }
    for (std::size_t l = j + 1; l < n; ++l) {
      if (done[l]) continue;
      const auto& tl = c.terms[l];
      if (close(tl.form.p, -std::conj(k), tol) && close(tl.form.k, -std::conj(p), tol) &&
          close(tl.coefficient, std::conj(tj.coefficient), tol)) {
        const auto kind = close(k, std::conj(p), tol) ? TermKind::Trigonometric : TermKind::MixedPair;
        r.kinds[j] = r.kinds[l] = kind;
        r.partner[j] = static_cast<int>(l);
        r.partner[l] = static_cast<int>(j);
        done[j] = done[l] = true;
        ++r.reduced_count;
        break;
      }
    }
  }
  r.real = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  r.signs = pos && neg ? SignProfile::Mixed : pos ? SignProfile::AllPositive : neg ? SignProfile::AllNegative : SignProfile::None;
  r.odd_term_count = n % 2 == 1;
  return r;
}

ResidueReport check_residues(const SpectralDataG0& data, std::optional<cplx> s) {
  data.validate();
  const auto& k = data.k_points;
  const auto& p = data.p_points;
  const std::size_t n1 = k.size();
  ResidueReport r;
  for (std::size_t j = 0; j < n1; ++j) {
    cplx dk = 1.0, dp = 1.0, np = 1.0;
    for (std::size_t i = 0; i < n1; ++i)
      if (i != j) {
        dk *= k[j] - k[i];
        dp *= p[j] - p[i];
      }
    for (cplx a : data.divisor) np *= p[j] + std::conj(a);
    r.residue_k.push_back(theta(data, k[j]) / dk);
    r.residue_p.push_back(np / dp);  // without the factor s
  }
  if (s) {
    r.s = *s;
  } else {
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n1; ++j) {
      num += std::conj(r.residue_p[j]) * r.residue_k[j];
      den += std::norm(r.residue_p[j]);
    }
    r.s = den > 0 ? -num / den : cplx(0.0);
  }
  double scale = 0.0;
  for (std::size_t j = 0; j < n1; ++j) {
    r.residue_p[j] *= r.s;
    r.sums.push_back(r.residue_k[j] + r.residue_p[j]);
    r.worst = std::max(r.worst, std::abs(r.sums.back()));
    scale = std::max(scale, std::abs(r.residue_k[j]));
  }
  r.matched = r.worst <= 1e-10 * std::max(1.0, scale);
  return r;
}

}  // namespace magpauli
