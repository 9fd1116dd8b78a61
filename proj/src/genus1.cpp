#include "magpauli/genus1.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "magpauli/errors.hpp"

namespace magpauli {

using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};

bool on_lattice(const WeierstrassContext& ctx, cplx w, double tol = 1e-12) {
  return std::abs(ctx.reduce(w).w0) < tol;
}

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a) + std::abs(b)); }

cplx psi_second_raw(const WeierstrassContext& ctx, cplx P, cplx p, cplx z) {
  if (on_lattice(ctx, p)) throw Error(ErrorCode::PoleHit, "p on the lattice");
  if (on_lattice(ctx, z + P)) throw Error(ErrorCode::PoleHit, "z + P on the lattice");
  if (on_lattice(ctx, p + P)) throw Error(ErrorCode::PoleHit, "p + P on the lattice");
  return std::exp(-z * ctx.zeta(p) + ctx.log_sigma(p + z + P) + ctx.log_sigma(P) - ctx.log_sigma(z + P) -
                  ctx.log_sigma(p + P));
}

cplx log_ctilde(const ThetaSum& c, cplx z) {
  const auto j = c.jet(z);
  return j.scale + std::log(j.c);
}

std::vector<cplx> s_constants(const GenusOneData& d) {
  const auto& ctx = d.ctx;
  std::vector<cplx> S;
  for (std::size_t s = 0; s < d.size(); ++s) {
    cplx num = ctx.sigma(d.P), den = ctx.sigma(d.R[s] + d.P);
    for (cplx Pi : d.Pprime) num *= ctx.sigma(d.Q[s] + Pi);
    for (std::size_t t = 0; t < d.size(); ++t)
      if (t != s) den *= ctx.sigma(d.Q[s] - d.Q[t]);
    if (std::abs(den) == 0.0) throw Error(ErrorCode::PoleHit, "vanishing S denominator");
    S.push_back(num / den);
  }
  return S;
}

}  // namespace

void GenusOneData::validate() const {
  if (Q.empty()) throw Error(ErrorCode::DegenerateData, "no intersection points");
  if (R.size() != Q.size()) throw Error(ErrorCode::DegenerateData, "Q and R differ in length");
  if (Pprime.size() != Q.size()) throw Error(ErrorCode::DegenerateData, "D' needs one point per Q_s");
  for (cplx q : Q)
    if (on_lattice(ctx, q)) throw Error(ErrorCode::DegenerateData, "Q_s at the marked infinity");
  for (cplx p : Pprime)
    if (on_lattice(ctx, p)) throw Error(ErrorCode::DegenerateData, "divisor point at the marked infinity");
  for (std::size_t s = 0; s < Q.size(); ++s)
    for (std::size_t t = s + 1; t < Q.size(); ++t)
      if (on_lattice(ctx, Q[s] - Q[t], 1e-9)) throw Error(ErrorCode::DegenerateData, "Q_s congruent mod lattice");
}

cplx GenusOneData::q_sum() const {
  cplx s = 0.0;
  for (cplx q : Q) s += q;
  return s;
}

cplx GenusOneData::p_sum() const {
  cplx s = 0.0;
  for (cplx p : Pprime) s += p;
  return s;
}

cplx psi_second(const GenusOneData& d, cplx p, cplx z) { return psi_second_raw(d.ctx, d.P, p, z); }

std::vector<cplx> compatibility_coeffs(const GenusOneData& d, cplx z) {
  d.validate();
  const auto& ctx = d.ctx;
  const cplx zb = std::conj(z);
  const cplx den = ctx.sigma(zb + d.q_sum() + d.p_sum()) * ctx.sigma(z + d.P);
  if (std::abs(den) == 0.0) throw Error(ErrorCode::PoleHit, "common denominator vanishes");
  const auto S = s_constants(d);
  std::vector<cplx> f;
  for (std::size_t s = 0; s < d.size(); ++s)
    f.push_back(std::exp(-z * ctx.zeta(d.R[s]) + zb * ctx.zeta(d.Q[s])) * ctx.sigma(d.R[s] + z + d.P) / den * S[s]);
  return f;
}

cplx psi_prime(const GenusOneData& d, cplx k, cplx z) {
  const auto& ctx = d.ctx;
  const auto f = compatibility_coeffs(d, z);
  const cplx zb = std::conj(z);
  cplx den = 1.0;
  for (cplx Pi : d.Pprime) den *= ctx.sigma(k + Pi);
  if (std::abs(den) == 0.0) throw Error(ErrorCode::PoleHit, "k on −D'");
  cplx sum = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    cplx num = ctx.sigma(k + zb + d.A(s));
    for (std::size_t t = 0; t < d.size(); ++t)
      if (t != s) num *= ctx.sigma(k - d.Q[t]);
    sum += num / den * f[s];
  }
  return std::exp(-zb * ctx.zeta(k)) * sum;
}

double compatibility_residual(const GenusOneData& d, cplx z) {
  double worst = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    const cplx ref = psi_second(d, d.R[s], z);
    worst = std::max(worst, std::abs(psi_prime(d, d.Q[s], z) - ref) / std::max(std::abs(ref), 1e-300));
  }
  return worst;
}

ThetaSum::ThetaSum(WeierstrassContext ctx, std::vector<ThetaTerm> terms) : ctx_(std::move(ctx)), terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorCode::EmptySum, "theta sum has no terms");
}

ThetaJet ThetaSum::jet(cplx z) const {
  const cplx zb = std::conj(z);
  const std::size_t n = terms_.size();
  std::vector<cplx> L(n);
  std::vector<SigmaJet> a(n), b(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < n; ++q) {
    const auto& t = terms_[q];
    a[q] = ctx_.sigma_jet(z + t.hz);
    b[q] = ctx_.sigma_jet(zb + t.hzb);
    L[q] = std::log(t.coef) + t.ez * z + t.ezb * zb + a[q].log_scale + b[q].log_scale;
    m = std::max(m, L[q].real());
  }
  ThetaJet j{m, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t q = 0; q < n; ++q) {
    const auto& t = terms_[q];
    const cplx w = std::exp(L[q] - m);
    const cplx f = a[q].value, df = t.ez * a[q].value + a[q].deriv;
    const cplx g = b[q].value, dg = t.ezb * b[q].value + b[q].deriv;
    j.c += w * f * g;
    j.cz += w * df * g;
    j.czb += w * f * dg;
    j.czzb += w * df * dg;
  }
  return j;
}

cplx ThetaSum::operator()(cplx z) const {
  const auto j = jet(z);
  return std::exp(j.scale) * j.c;
}

Vec2 ThetaSum::grad_log(cplx z) const {
  const auto j = jet(z);
  if (std::abs(j.c) == 0.0) throw Error(ErrorCode::ZeroOfC, "c̃ vanishes");
  return {((j.cz + j.czb) / j.c).real(), (I * (j.cz - j.czb) / j.c).real()};
}

double ThetaSum::field(cplx z, double sign) const {
  const auto j = jet(z);
  if (std::abs(j.c) == 0.0) throw Error(ErrorCode::ZeroOfC, "c̃ vanishes");
  return sign * 2.0 * ((j.c * j.czzb - j.cz * j.czb) / (j.c * j.c)).real();
}

ThetaSum c_tilde_sum(const GenusOneData& d) {
  d.validate();
  const auto& ctx = d.ctx;
  const auto S = s_constants(d);
  cplx pden = 1.0;
  for (cplx Pi : d.Pprime) pden *= ctx.sigma(Pi);
  std::vector<ThetaTerm> terms;
  for (std::size_t s = 0; s < d.size(); ++s) {
    cplx k = S[s] / pden;
    for (std::size_t t = 0; t < d.size(); ++t)
      if (t != s) k *= ctx.sigma(-d.Q[t]);
    terms.push_back({k, -ctx.zeta(d.R[s]), ctx.zeta(d.Q[s]), d.R[s] + d.P, d.A(s)});
  }
  return ThetaSum(ctx, std::move(terms));
}

cplx c_tilde(const GenusOneData& d, cplx z) { return c_tilde_sum(d)(z); }

cplx c_genus1(const GenusOneData& d, cplx z) {
  const auto& ctx = d.ctx;
  const cplx den = ctx.sigma(std::conj(z) + d.q_sum() + d.p_sum()) * ctx.sigma(z + d.P);
  if (std::abs(den) < 1e-12) throw Error(ErrorCode::PoleHit, "c has a pole here");
  return c_tilde(d, z) / den;
}

ThetaSum build_canonical(const WeierstrassContext& ctx, const std::vector<CanonicalTerm>& terms) {
  std::vector<ThetaTerm> out;
  for (const auto& t : terms) out.push_back({t.alpha, -ctx.zeta(t.R), ctx.zeta(t.Q), t.R, -t.Q});
  return ThetaSum(ctx, std::move(out));
}

CanonicalReality classify_canonical(const std::vector<CanonicalTerm>& terms, double tol) {
  const std::size_t n = terms.size();
  CanonicalReality r;
  r.kinds.assign(n, CanonicalKind::NonReal);
  r.partner.assign(n, -1);
  std::vector<bool> done(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (done[j]) continue;
    const auto& a = terms[j];
    if (std::abs(a.alpha.imag()) <= tol * std::abs(a.alpha) && near(a.R, -std::conj(a.Q), tol)) {
      r.kinds[j] = CanonicalKind::Type1;
      done[j] = true;
      ++r.type1;
      continue;
    }
    for (std::size_t l = j + 1; l < n; ++l) {
      if (done[l]) continue;
      const auto& b = terms[l];
      if (near(a.alpha, std::conj(b.alpha), tol) && near(a.R, -std::conj(b.Q), tol) &&
          near(b.R, -std::conj(a.Q), tol)) {
        r.kinds[j] = r.kinds[l] = CanonicalKind::Type2;
        r.partner[j] = static_cast<int>(l);
        r.partner[l] = static_cast<int>(j);
        done[j] = done[l] = true;
        ++r.type2;
        break;
      }
    }
  }
  r.real = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  return r;
}

GridStats scan_cell(const ThetaSum& c, int n, cplx origin) {
  const cplx w1 = 2.0 * c.ctx().omega1(), w2 = 2.0 * c.ctx().omega2();
  GridStats g{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  double maxabs = 0.0, maxim = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx z = origin + (i / double(n - 1)) * w1 + (j / double(n - 1)) * w2;
      const cplx v = c(z);
      g.min_re = std::min(g.min_re, v.real());
      g.max_re = std::max(g.max_re, v.real());
      maxabs = std::max(maxabs, std::abs(v));
      maxim = std::max(maxim, std::abs(v.imag()));
    }
  g.max_im_rel = maxabs > 0 ? maxim / maxabs : 0.0;
  return g;
}

GenusOneData with_canonical_divisor(GenusOneData d) {
  if (d.Pprime.empty()) throw Error(ErrorCode::DegenerateData, "empty divisor");
  const cplx rest = d.p_sum() - d.Pprime.back();
  d.Pprime.back() = std::conj(d.P) - d.q_sum() - rest;
  return d;
}

CanonicalFit fit_canonical(const GenusOneData& d) {
  d.validate();
  if (std::abs(d.q_sum() + d.p_sum() - std::conj(d.P)) > 1e-12 * (1.0 + std::abs(d.P)))
    throw Error(ErrorCode::DegenerateData, "divisor does not satisfy ΣQ + ΣP_i = P̄");
  const auto& ctx = d.ctx;
  const auto ct = c_tilde_sum(d);
  const std::size_t n = d.size();
  CanonicalFit fit;
  for (std::size_t s = 0; s < n; ++s) {
    fit.alpha_closed.push_back(ct.terms()[s].coef * std::exp(d.P * ctx.zeta(d.R[s]) - std::conj(d.P) * ctx.zeta(d.Q[s])));
  }
  std::vector<ThetaSum> unit;
  for (std::size_t s = 0; s < n; ++s) unit.push_back(build_canonical(ctx, {{1.0, d.R[s], d.Q[s]}}));
  const int rows = static_cast<int>(4 * n + 4);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ux(0.05, 1.95), uy(0.05, 1.95);
  Eigen::MatrixXcd M(rows, n);
  Eigen::VectorXcd b(rows);
  for (int r = 0; r < rows; ++r) {
    const cplx z = ux(rng) * ctx.omega1() + uy(rng) * ctx.omega2();
    for (std::size_t s = 0; s < n; ++s) M(r, s) = unit[s](z);
    b(r) = ct(z - d.P);
  }
  const Eigen::VectorXcd a = M.colPivHouseholderQr().solve(b);
  fit.fit_residual = (M * a - b).norm() / b.norm();
  for (std::size_t s = 0; s < n; ++s) fit.terms.push_back({a(s), d.R[s], d.Q[s]});
  return fit;
}

// ---------------------------------------------------------------------------

Vec2 periodicity_equations(const WeierstrassContext& ctx, int n, int m, cplx lambda) {
  const cplx z = ctx.zeta(lambda);
  const cplx U = lambda * ctx.eta1() - ctx.omega1() * z;
  const cplx V = lambda * ctx.eta2() - ctx.omega2() * z;
  return {U.imag() + pi * n / 2.0, V.imag() + pi * m / 2.0};
}

std::vector<CanonicalTerm> lambda_pair_terms(const WeierstrassContext& ctx, cplx lambda, double alpha, cplx beta) {
  const cplx w = ctx.omega1();
  return {{alpha, -w, w}, {beta, std::conj(lambda), lambda}, {std::conj(beta), -std::conj(lambda), -lambda}};
}

std::vector<CanonicalTerm> positive_periodic_terms(const WeierstrassContext& ctx, std::optional<cplx> lambda, cplx beta) {
  std::vector<CanonicalTerm> t;
  for (cplx q : {ctx.omega1(), ctx.omega2(), ctx.omega1() + ctx.omega2()}) t.push_back({1.0, -std::conj(q), q});
  if (lambda) {
    t.push_back({beta, std::conj(*lambda), *lambda});
    t.push_back({std::conj(beta), -std::conj(*lambda), -*lambda});
  }
  return t;
}

Vec2 periodicity_residual(const ThetaSum& c, int samples, unsigned seed, double sign) {
  const auto& ctx = c.ctx();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  double d1 = 0.0, d2 = 0.0, scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    const cplx z = u(rng) * ctx.omega1() + u(rng) * ctx.omega2();
    const double b = c.field(z, sign);
    scale = std::max(scale, std::abs(b));
    d1 = std::max(d1, std::abs(c.field(z + 2.0 * ctx.omega1(), sign) - b));
    d2 = std::max(d2, std::abs(c.field(z + 2.0 * ctx.omega2(), sign) - b));
  }
  scale = std::max(scale, 1.0);
  return {d1 / scale, d2 / scale};
}

PeriodicitySolution periodicity_search(const WeierstrassContext& ctx, int n, int m, cplx seed) {
  if (on_lattice(ctx, seed)) throw Error(ErrorCode::DegenerateData, "seed on the lattice");
  auto F = [&](const Vec2& v) {
    const cplx l(v[0], v[1]);
    if (on_lattice(ctx, l, 1e-9)) return Vec2{1e6, 1e6};
    return periodicity_equations(ctx, n, m, l);
  };
  const auto res = newton_solve(F, {seed.real(), seed.imag()}, 1e-13, 100);
  PeriodicitySolution sol;
  sol.lambda = {res.x[0], res.x[1]};
  const auto e = periodicity_equations(ctx, n, m, sol.lambda);
  sol.equation_residual = std::max(std::abs(e[0]), std::abs(e[1]));
  sol.iterations = res.iterations;
  const auto c = build_canonical(ctx, positive_periodic_terms(ctx, sol.lambda, 0.05));
  sol.field_residual = periodicity_residual(c);
  if (std::max(sol.field_residual[0], sol.field_residual[1]) > 1e-6)
    throw Error(ErrorCode::ValidationFailed, "field built from λ is not periodic");
  return sol;
}

std::vector<PeriodicitySolution> periodicity_scan(const WeierstrassContext& ctx, int n, int m, int grid) {
  const double tau = ctx.lattice().tau();
  const cplx centre(m, -tau * n);
  std::vector<PeriodicitySolution> out;
  auto degenerate = [&](cplx l) {
    return on_lattice(ctx, 2.0 * l, 1e-6) || on_lattice(ctx, l - ctx.omega1(), 1e-6) ||
           on_lattice(ctx, l + ctx.omega1(), 1e-6);
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const cplx seed = centre + cplx(-1.0 + (i + 0.5) * 2.0 / grid, tau * (-1.0 + (j + 0.5) * 2.0 / grid));
      try {
        auto s = periodicity_search(ctx, n, m, seed);
        if (s.equation_residual > 1e-10 || degenerate(s.lambda)) continue;
        bool dup = false;
        for (const auto& o : out) dup = dup || std::abs(o.lambda - s.lambda) < 1e-8;
        if (!dup) out.push_back(s);
      } catch (const Error&) {
      }
    }
  return out;
}

// ---------------------------------------------------------------------------

cplx psi_norm(const BlochSetting& b, cplx p, cplx z) {
  const auto& ctx = b.ctilde.ctx();
  const cplx lc = log_ctilde(b.ctilde, z) - 2.0 * ctx.log_sigma(z + b.P).real();
  return psi_second_raw(ctx, b.P, p, z) * std::exp(-0.5 * lc);
}

BlochMultipliers bloch_multipliers(const BlochSetting& b, cplx p, int samples) {
  const auto& ctx = b.ctilde.ctx();
  const cplx w1 = 2.0 * ctx.omega1(), w2 = 2.0 * ctx.omega2();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 1.9);
  BlochMultipliers m;
  for (int i = 0; i < samples; ++i) {
    const cplx z = u(rng) * ctx.omega1() + u(rng) * ctx.omega2();
    const cplx base = psi_norm(b, p, z);
    const cplx kx = psi_norm(b, p, z + w1) / base, ky = psi_norm(b, p, z + w2) / base;
    if (i == 0) {
      m.kx = kx;
      m.ky = ky;
    } else {
      m.z_deviation = std::max({m.z_deviation, std::abs(kx - m.kx) / std::abs(m.kx), std::abs(ky - m.ky) / std::abs(m.ky)});
    }
  }
  if (m.z_deviation > 1e-9) throw Error(ErrorCode::NotZIndependent, "multiplier depends on z");
  const cplx zp = ctx.zeta(p), e1 = ctx.eta1(), e2 = ctx.eta2();
  m.kx_closed = std::exp(-2.0 * zp + 2.0 * e1 * p + 2.0 * e1 * b.P.real());
  m.ky_closed = std::exp(-w2 * zp + 2.0 * e2 * p + 2.0 * I * e2 * b.P.imag());
  m.kx_alt = std::exp(-2.0 * zp - 2.0 * e1 * p);
  m.ky_alt = std::exp(-w2 * zp - 2.0 * e2 * p);
  return m;
}

cplx unitarity_locus(const BlochSetting& b, cplx seed) {
  const auto& ctx = b.ctilde.ctx();
  auto F = [&](const Vec2& v) {
    const cplx p(v[0], v[1]);
    if (on_lattice(ctx, p, 1e-9)) return Vec2{1e6, 1e6};
    const cplx zp = ctx.zeta(p);
    const cplx lx = -2.0 * zp + 2.0 * ctx.eta1() * p + 2.0 * ctx.eta1() * b.P.real();
    const cplx ly = -2.0 * ctx.omega2() * zp + 2.0 * ctx.eta2() * p + 2.0 * I * ctx.eta2() * b.P.imag();
    return Vec2{lx.real(), ly.real()};
  };
  std::vector<cplx> seeds{seed};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) seeds.push_back(((i + 0.5) / 3.0) * ctx.omega1() + ((j + 0.5) / 3.0) * ctx.omega2());
  for (cplx s : seeds) {
    try {
      const auto r = newton_solve(F, {s.real(), s.imag()}, 1e-13, 100);
      return {r.x[0], r.x[1]};
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::NoConvergence, "no point of the unitarity locus found");
}

Unitarized unitarize(const BlochSetting& b, cplx p) {
  const auto& ctx = b.ctilde.ctx();
  const double tau = ctx.lattice().tau();
  const auto m = bloch_multipliers(b, p);
  Unitarized r;
  r.u = {-std::log(std::abs(m.kx)) / 2.0, std::log(std::abs(m.ky)) / (2.0 * tau)};
  r.kx = m.kx * std::exp(2.0 * r.u * ctx.omega1());
  r.ky = m.ky * std::exp(2.0 * r.u * ctx.omega2());
  const double e1 = ctx.eta1().real(), h = ctx.eta2().imag();  // η′ = η2/i
  r.kx_alt = std::exp(2.0 * I * p.imag() * (h - e1 * tau) / tau);
  r.ky_alt = std::exp(2.0 * I * p.real() * (e1 * tau - h));
  return r;
}

cplx dn_gauge(const BlochSetting& b, cplx p, cplx z) {
  const auto& ctx = b.ctilde.ctx();
  const cplx u = unitarize(b, p).u;
  const cplx zp = ctx.zeta(p);
  auto raw = [&](cplx w) {
    return std::exp((u - zp) * w + ctx.log_sigma(w + p + b.P) - 0.5 * log_ctilde(b.ctilde, w));
  };
  const cplx r0 = raw(0.0);
  const cplx norm = std::abs(r0) > 0 ? std::abs(r0) / r0 : cplx(1.0);
  return norm * raw(z);
}

cplx magnetic_phase(const BlochSetting& b, cplx z, cplx omega) {
  const auto& ctx = b.ctilde.ctx();
  const cplx r = std::exp(ctx.log_sigma(z + b.P + omega) - ctx.log_sigma(z + b.P));
  return r / std::abs(r);
}

CellFlux cell_flux(const std::function<Vec2(cplx)>& grad_log, const std::function<double(cplx)>& value,
                   const WeierstrassContext& ctx, cplx origin, double sign) {
  const cplx w1 = 2.0 * ctx.omega1(), w2 = 2.0 * ctx.omega2();
  auto clear = [&](cplx o) {
    const cplx corners[5] = {o, o + w1, o + w1 + w2, o + w2, o};
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (int e = 0; e < 4; ++e)
      for (int i = 0; i < 256; ++i) {
        const double v = value(corners[e] + (i / 256.0) * (corners[e + 1] - corners[e]));
        mn = std::min(mn, v);
        mx = std::max(mx, std::abs(v));
      }
    return mn > 1e-8 * mx;
  };
  CellFlux out;
  if (!clear(origin)) {
    origin += 0.137 * w1 + 0.291 * w2;
    out.shifted = true;
    if (!clear(origin)) throw Error(ErrorCode::ZeroOnBoundary, "c̃ vanishes on the cell boundary");
  }
  const cplx corners[5] = {origin, origin + w1, origin + w1 + w2, origin + w2, origin};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e], d = corners[e + 1] - corners[e];
    // outward normal of a counter-clockwise edge: (d_y, −d_x)/|d|, times ds = |d| dt
    auto f = [&](double t) {
      const Vec2 g = grad_log(a + t * d);
      return g[0] * d.imag() - g[1] * d.real();
    };
    total += quad_adaptive_1d(f, 0.0, 1.0, 1e-12, 20000).value;
  }
  out.flux = sign * 0.5 * total;
  out.quanta = std::abs(out.flux) / (2 * pi);
  return out;
}

CellFlux cell_flux(const ThetaSum& c, cplx origin, double sign) {
  return cell_flux([&](cplx z) { return c.grad_log(z); }, [&](cplx z) { return c(z).real(); }, c.ctx(), origin, sign);
}

}  // namespace magpauli
