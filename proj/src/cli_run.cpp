#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "magpauli/cli.hpp"
#include "magpauli/errors.hpp"
#include "magpauli/flux.hpp"

namespace magpauli::cli {

using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

template <typename F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::string join(std::initializer_list<double> v) {
  std::string s;
  for (double d : v) {
    if (!s.empty()) s += ',';
    s += format_double(d);
  }
  return s;
}

struct Emitter {
  const RunOptions& opt;
  RunResult& res;
  std::ostringstream report;

  void file(const std::string& name, const std::string& content) {
    const std::string path = (fs::path(opt.out_dir) / name).string();
    write_atomic(path, content);
    res.written.push_back(path);
  }
  template <typename... A>
  void line(const char* fmt, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, a...);
    report << buf << '\n';
  }
};

ExponentialSum genus0_sum(const RunConfig& cfg, Emitter& e) {
  if (cfg.terms) return *cfg.terms;
  BuildDiagnostics diag;
  auto c = build_exponential_sum(*cfg.spectral, &diag);
  e.line("condition estimate %.3e, cross-check residual %.3e%s", diag.condition_estimate, diag.crosscheck_residual,
         diag.ill_conditioned ? " (ill-conditioned)" : "");
  return c;
}

ThetaSum genus1_sum(const RunConfig& cfg, const WeierstrassContext& ctx, Emitter& e, bool& ok) {
  const auto& b = cfg.genus1;
  if (b.positive) return build_canonical(ctx, positive_periodic_terms(ctx, b.lambda, b.beta));
  if (!b.canonical.empty()) {
    const auto rep = classify_canonical(b.canonical);
    e.line("canonical terms: %zu, type 1: %zu, type 2 pairs: %zu, real: %s", b.canonical.size(), rep.type1, rep.type2,
           rep.real ? "yes" : "no");
    return build_canonical(ctx, b.canonical);
  }
  GenusOneData d{ctx, b.Q, b.R, b.Pprime, *b.P};
  if (b.canonical_divisor) d = with_canonical_divisor(d);
  double worst = 0.0;
  for (cplx z : {cplx(0.31, 0.17), cplx(-0.42, 0.55), cplx(1.1, -0.7)}) worst = std::max(worst, compatibility_residual(d, z));
  const bool pass = worst <= cfg.tol.compatibility;
  ok = ok && pass;
  e.line("compatibility residual %.3e (limit %.1e) %s", worst, cfg.tol.compatibility, pass ? "PASS" : "FAIL");
  return c_tilde_sum(d);
}

void run_genus0(const RunConfig& cfg, const RunOptions& opt, Emitter& e, bool& ok) {
  const auto c = genus0_sum(cfg, e);
  e.file(cfg.output("c_terms"), terms_csv(c));
  const auto rep = classify_reality(c);
  e.line("terms: %zu, real: %s", c.size(), rep.real ? "yes" : "no");
  std::optional<GroundState> gs;
  if (cfg.w) gs.emplace(c, *cfg.w, cfg.sector);
  const Grid2D& g = *cfg.grid;
  std::vector<std::string> rows(g.ny);
  std::atomic<int> bad{0};
  parallel_for(g.ny, opt.threads, [&](int j) {
    std::string s;
    for (int i = 0; i < g.nx; ++i) {
      const Point p = g.at(i, j);
      const double cv = eval_c(c, p).real();
      double B;
      try {
        B = magnetic_field(c, p);
      } catch (const Error&) {
        B = std::nan("");
        ++bad;
      }
      s += join({p.x, p.y, cv, B});
      if (gs) s += ',' + format_double(std::norm((*gs)(p.x, p.y)));
      s += '\n';
    }
    rows[j] = std::move(s);
  });
  std::string out = gs ? "x,y,c,B,psi2\n" : "x,y,c,B\n";
  for (auto& r : rows) out += r;
  e.file(cfg.output("field"), out);
  e.line("field samples: %zu, undefined: %d", g.size(), bad.load());
  if (gs) e.line("ground state W = (%g, %g): %s of T", cfg.w->alpha, cfg.w->beta,
                 gs->membership() == Membership::Interior   ? "interior"
                 : gs->membership() == Membership::Boundary ? "boundary"
                                                            : "exterior");
  ok = ok && rep.real && bad == 0;
}

void run_polygon(const RunConfig& cfg, Emitter& e) {
  const ExponentialSum c = genus0_sum(cfg, e);
  const auto forms = real_parts(c);
  const auto prof = polygon_T(forms);
  std::string out = "alpha,beta\n";
  for (const auto& v : prof.polygon_T.vertices) out += join({v[0], v[1]}) + '\n';
  e.file(cfg.output("polygon"), out);
  static const char* kinds[] = {"empty", "isolated points", "arc", "everywhere"};
  e.line("polygon dimension: %d, vertices: %zu", prof.polygon_T.dimension(), prof.polygon_T.vertices.size());
  e.line("zero set of the indicator: %s, stable: %s", kinds[int(prof.zero_set.kind)], prof.stable ? "yes" : "no");
  if (cfg.w) {
    const auto m = prof.classify(*cfg.w);
    e.line("W = (%g, %g): %s", cfg.w->alpha, cfg.w->beta,
           m == Membership::Interior ? "interior" : m == Membership::Boundary ? "boundary" : "exterior");
  }
}

void run_flux(const RunConfig& cfg, const RunOptions& opt, Emitter& e, bool& ok) {
  ExponentialSum c = genus0_sum(cfg, e);
  if (cfg.shift) c = gauge_shift(c, *cfg.shift).shifted;
  const int n = static_cast<int>(cfg.radii.size());
  std::vector<std::array<double, 4>> rows(n);
  parallel_for(n, opt.threads, [&](int i) {
    const double R = cfg.radii[i];
    rows[i] = {R, disk_flux(c, R, cfg.tol.quad), regularized_flux(c, R, cfg.tol.flux),
               flux_asymptotic(c, R, cfg.series_order)};
  });
  std::string out = "R,disk_flux,regularized,asymptotic_o" + std::to_string(cfg.series_order) + "\n";
  for (const auto& r : rows) out += join({r[0], r[1], r[2], r[3]}) + '\n';
  e.file(cfg.output("flux"), out);
  for (const auto& r : rows) {
    e.line("R = %g: regularized %.12g, asymptotic %.12g", r[0], r[2], r[3]);
    ok = ok && std::isfinite(r[2]);
  }
}

void run_genus1(const RunConfig& cfg, const RunOptions& opt, Emitter& e, bool& ok) {
  const WeierstrassContext ctx{Lattice(cfg.omega2)};
  const auto c = genus1_sum(cfg, ctx, e, ok);
  const Grid2D& g = *cfg.grid;
  std::vector<std::string> rows(g.ny);
  std::atomic<int> bad{0};
  parallel_for(g.ny, opt.threads, [&](int j) {
    std::string s;
    for (int i = 0; i < g.nx; ++i) {
      const Point p = g.at(i, j);
      const cplx z = to_complex(p);
      const cplx v = c(z);
      double B;
      try {
        B = c.field(z, cfg.field_sign);
      } catch (const Error&) {
        B = std::nan("");
        ++bad;
      }
      s += join({p.x, p.y, v.real(), v.imag(), B}) + '\n';
    }
    rows[j] = std::move(s);
  });
  std::string out = "x,y,c_re,c_im,B\n";
  for (auto& r : rows) out += r;
  e.file(cfg.output("field"), out);
  const auto stats = scan_cell(c, 41, 0.0);
  e.line("cell scan: min Re c %.6g, max Re c %.6g, max |Im c|/|c| %.3e", stats.min_re, stats.max_re, stats.max_im_rel);
  if (stats.min_re > 0 && stats.max_im_rel < 1e-10) {
    const auto r = periodicity_residual(c, 64, 1, cfg.field_sign);
    e.line("field periodicity residual (%.3e, %.3e)", r[0], r[1]);
    if (std::max(r[0], r[1]) <= cfg.tol.field_periodicity) {
      const auto f = cell_flux(c, 0.0, cfg.field_sign);
      e.line("flux per cell %.12g = %.12g quanta", f.flux, f.quanta);
    }
  }
  ok = ok && bad == 0;
}

void run_periodicity(const RunConfig& cfg, Emitter& e, bool& ok) {
  const WeierstrassContext ctx{Lattice(cfg.omega2)};
  const auto roots = periodicity_scan(ctx, cfg.n, cfg.m, cfg.seed_grid);
  std::string out = "n,m,lambda_re,lambda_im,equation_residual,field_residual_x,field_residual_y\n";
  int good = 0;
  for (const auto& r : roots) {
    out += std::to_string(cfg.n) + ',' + std::to_string(cfg.m) + ',' +
           join({r.lambda.real(), r.lambda.imag(), r.equation_residual, r.field_residual[0], r.field_residual[1]}) + '\n';
    const bool pass = r.equation_residual <= cfg.tol.periodicity &&
                      std::max(r.field_residual[0], r.field_residual[1]) <= cfg.tol.field_periodicity;
    good += pass;
    e.line("lambda = %.15g %+.15gi: equation residual %.3e, field residual %.3e %s", r.lambda.real(), r.lambda.imag(),
           r.equation_residual, std::max(r.field_residual[0], r.field_residual[1]), pass ? "PASS" : "FAIL");
  }
  e.file(cfg.output("periodicity"), out);
  e.line("(n, m) = (%d, %d): %zu non-degenerate roots", cfg.n, cfg.m, roots.size());
  ok = ok && good > 0;
}

void run_bloch(const RunConfig& cfg, const RunOptions& opt, Emitter& e, bool& ok) {
  const WeierstrassContext ctx{Lattice(cfg.omega2)};
  const BlochSetting b{genus1_sum(cfg, ctx, e, ok), cfg.bloch_P};
  const Grid2D& g = *cfg.p_grid;
  std::vector<std::array<double, 6>> rows(g.size());
  std::atomic<int> bad{0};
  double worst = 0.0;
  std::mutex mu;
  parallel_for(static_cast<int>(g.size()), opt.threads, [&](int idx) {
    const Point p = g.at(idx % g.nx, idx / g.nx);
    const cplx pc = to_complex(p);
    cplx kx, ky;
    try {
      if (cfg.unitarize) {
        const auto u = unitarize(b, pc);
        kx = u.kx;
        ky = u.ky;
        std::lock_guard lock(mu);
        worst = std::max({worst, std::abs(std::abs(kx) - 1.0), std::abs(std::abs(ky) - 1.0)});
      } else {
        const auto m = bloch_multipliers(b, pc);
        kx = m.kx;
        ky = m.ky;
      }
    } catch (const Error&) {
      kx = ky = std::nan("");
      ++bad;
    }
    rows[idx] = {p.x, p.y, std::abs(kx), std::arg(kx), std::abs(ky), std::arg(ky)};
  });
  std::string out = "p_re,p_im,abs_kx,arg_kx,abs_ky,arg_ky\n";
  for (const auto& r : rows) out += join({r[0], r[1], r[2], r[3], r[4], r[5]}) + '\n';
  e.file(cfg.output("multipliers"), out);
  e.line("p samples: %zu, undefined: %d", g.size(), bad.load());
  if (cfg.unitarize) {
    const bool pass = worst <= cfg.tol.unitarity;
    e.line("max ||kappa| - 1| %.3e (limit %.1e) %s", worst, cfg.tol.unitarity, pass ? "PASS" : "FAIL");
    ok = ok && pass;
  }
  ok = ok && bad == 0;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + path + ": " + ec.message());
}

std::string terms_csv(const ExponentialSum& c) {
  std::string out = "kappa_re,kappa_im,p_re,p_im,k_re,k_im\n";
  for (const auto& t : c.terms)
    out += join({t.coefficient.real(), t.coefficient.imag(), t.form.p.real(), t.form.p.imag(), t.form.k.real(),
                 t.form.k.imag()}) +
           '\n';
  return out;
}

ExponentialSum read_terms_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "kappa_re,kappa_im,p_re,p_im,k_re,k_im")
    throw Error(ErrorCode::SchemaError, path + ": unexpected header");
  ExponentialSum c;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[6];
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    for (int i = 0; i < 6; ++i) {
      if (!(ss >> v[i])) throw Error(ErrorCode::ParseError, path + ": line " + std::to_string(lineno));
      if (i < 5 && ss.get() != ',') throw Error(ErrorCode::ParseError, path + ": line " + std::to_string(lineno));
    }
    c.terms.push_back({{v[0], v[1]}, {{v[2], v[3]}, {v[4], v[5]}}});
  }
  c.validate();
  return c;
}

int resolve_threads(std::optional<int> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("MAGPAULI_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return 1;
}

int exit_code(ErrorCode code) { return static_cast<int>(code); }

std::string exit_code_table() {
  std::string s = "Exit codes:\n  0   all requested checks passed\n  1   a check failed\n  2   usage error\n";
  for (int c : {10, 11, 12, 13, 14, 20, 21, 22, 23, 24, 25, 26, 30, 31, 40, 41, 42, 43, 44, 45, 50, 51, 52}) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %-3d %s\n", c, to_string(static_cast<ErrorCode>(c)));
    s += buf;
  }
  return s;
}

RunResult run(const RunConfig& cfg, const RunOptions& opt) {
  RunResult res;
  Emitter e{opt, res, {}};
  for (const auto& w : cfg.warnings) e.line("warning: %s", w.c_str());
  bool ok = true;
  try {
    switch (cfg.mode) {
      case Mode::Genus0: run_genus0(cfg, opt, e, ok); break;
      case Mode::Polygon: run_polygon(cfg, e); break;
      case Mode::FluxScan: run_flux(cfg, opt, e, ok); break;
      case Mode::Genus1: run_genus1(cfg, opt, e, ok); break;
      case Mode::Periodicity: run_periodicity(cfg, e, ok); break;
      case Mode::Bloch: run_bloch(cfg, opt, e, ok); break;
      case Mode::Verify: {
        const auto lines = verify_suite(cfg.suite, cfg.tol);
        const std::string text = format_report(lines);
        e.file(cfg.output("report"), text);
        e.report << text;
        for (const auto& l : lines) ok = ok && l.pass;
        break;
      }
    }
  } catch (const Error& err) {
    e.line("error: %s", err.what());
    res.report = e.report.str();
    res.exit_code = exit_code(err.code());
    return res;
  }
  res.report = e.report.str();
  res.exit_code = ok ? 0 : kExitChecksFailed;
  return res;
}

}  // namespace magpauli::cli
