#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "magpauli/cli.hpp"
#include "magpauli/errors.hpp"

namespace magpauli::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, key + ": " + msg);
}

struct Reader {
  bool lenient;
  std::vector<std::string>& warnings;

  void keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
    if (!obj.is_object()) schema(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (allowed.count(k)) continue;
      const std::string full = path.empty() ? k : path + "." + k;
      if (!lenient) schema(full, "unknown key");
      warnings.push_back("ignoring unknown key " + full);
    }
  }
};

double number(const json& v, const std::string& key) {
  if (!v.is_number()) schema(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(key, "not finite");
  return d;
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) schema(key, "expected an integer");
  return v.get<int>();
}

cplx complex(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) schema(key, "complex numbers are [re, im] pairs");
  return {number(v[0], key + "[0]"), number(v[1], key + "[1]")};
}

std::vector<cplx> complex_list(const json& v, const std::string& key) {
  if (!v.is_array()) schema(key, "expected an array of [re, im] pairs");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

RealLinearForm real_form(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) schema(key, "expected [alpha, beta]");
  return {number(v[0], key + "[0]"), number(v[1], key + "[1]")};
}

Grid2D grid(Reader& r, const json& v, const std::string& key) {
  r.keys(v, key, {"x0", "y0", "hx", "hy", "nx", "ny"});
  for (const char* k : {"x0", "y0", "hx", "hy", "nx", "ny"})
    if (!v.contains(k)) schema(key + "." + k, "missing");
  Grid2D g{number(v["x0"], key + ".x0"), number(v["y0"], key + ".y0"), number(v["hx"], key + ".hx"),
           number(v["hy"], key + ".hy"), integer(v["nx"], key + ".nx"), integer(v["ny"], key + ".ny")};
  if (g.nx < 1 || g.ny < 1) schema(key, "nx and ny must be positive");
  if (!(g.hx > 0) || !(g.hy > 0)) schema(key, "hx and hy must be positive");
  return g;
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Mode parse_mode(const json& v) {
  if (!v.is_string()) schema("mode", "expected a string");
  const std::string s = v.get<std::string>();
  static const std::map<std::string, Mode> table{{"genus0", Mode::Genus0},         {"genus1", Mode::Genus1},
                                                 {"flux-scan", Mode::FluxScan},    {"polygon", Mode::Polygon},
                                                 {"verify", Mode::Verify},         {"periodicity", Mode::Periodicity},
                                                 {"bloch", Mode::Bloch}};
  const auto it = table.find(s);
  if (it == table.end()) schema("mode", "unknown mode '" + s + "'");
  return it->second;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Genus0: return "genus0";
    case Mode::Genus1: return "genus1";
    case Mode::FluxScan: return "flux-scan";
    case Mode::Polygon: return "polygon";
    case Mode::Verify: return "verify";
    case Mode::Periodicity: return "periodicity";
    case Mode::Bloch: return "bloch";
  }
  return "?";
}

std::string RunConfig::output(const std::string& key) const {
  const auto it = outputs.find(key);
  return it != outputs.end() ? it->second : key + (key == "report" ? ".txt" : ".csv");
}

RunConfig parse_config(const std::string& text, bool lenient, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, location(text, e.byte) + ": " + e.what());
  }
  RunConfig cfg;
  Reader r{lenient, cfg.warnings};
  r.keys(root, "", {"mode", "spectral", "terms", "terms_csv", "grid", "lattice", "genus1", "flux", "periodicity",
                    "bloch", "suite", "ground_state", "flags", "outputs", "tolerances"});
  if (!root.contains("mode")) schema("mode", "missing");
  cfg.mode = parse_mode(root["mode"]);

  if (root.contains("spectral")) {
    const auto& s = root["spectral"];
    r.keys(s, "spectral", {"k", "p", "divisor"});
    for (const char* k : {"k", "p", "divisor"})
      if (!s.contains(k)) schema(std::string("spectral.") + k, "missing");
    SpectralDataG0 d{complex_list(s["k"], "spectral.k"), complex_list(s["p"], "spectral.p"),
                     complex_list(s["divisor"], "spectral.divisor")};
    try {
      d.validate();
    } catch (const Error& e) {
      schema("spectral", e.what());
    }
    cfg.spectral = d;
  }
  if (root.contains("terms") && root.contains("terms_csv")) schema("terms_csv", "conflicts with terms");
  if (root.contains("terms")) {
    const auto& t = root["terms"];
    if (!t.is_array() || t.empty()) schema("terms", "expected a non-empty array");
    ExponentialSum c;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string key = "terms[" + std::to_string(i) + "]";
      r.keys(t[i], key, {"kappa", "p", "k", "alpha_beta"});
      if (!t[i].contains("kappa")) schema(key + ".kappa", "missing");
      const cplx kappa = complex(t[i]["kappa"], key + ".kappa");
      if (t[i].contains("alpha_beta")) {
        if (t[i].contains("p") || t[i].contains("k")) schema(key, "alpha_beta conflicts with p/k");
        const auto w = real_form(t[i]["alpha_beta"], key + ".alpha_beta");
        c.terms.push_back({kappa, ComplexLinearForm::from_real(w.alpha, w.beta)});
      } else {
        if (!t[i].contains("p") || !t[i].contains("k")) schema(key, "needs p and k, or alpha_beta");
        c.terms.push_back({kappa, {complex(t[i]["p"], key + ".p"), complex(t[i]["k"], key + ".k")}});
      }
    }
    cfg.terms = c;
  }
  if (root.contains("terms_csv")) {
    if (!root["terms_csv"].is_string()) schema("terms_csv", "expected a path");
    std::filesystem::path p = root["terms_csv"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    cfg.terms = read_terms_csv(p.string());
  }
  if (cfg.spectral && cfg.terms) schema("terms", "give either spectral or terms, not both");
  if (root.contains("grid")) cfg.grid = grid(r, root["grid"], "grid");

  if (root.contains("lattice")) {
    const auto& l = root["lattice"];
    r.keys(l, "lattice", {"omega2"});
    if (!l.contains("omega2")) schema("lattice.omega2", "missing");
    cfg.omega2 = complex(l["omega2"], "lattice.omega2");
    if (cfg.omega2.real() != 0.0 || !(cfg.omega2.imag() > 0)) schema("lattice.omega2", "must be i·τ with τ > 0");
  }
  if (root.contains("genus1")) {
    const auto& g = root["genus1"];
    r.keys(g, "genus1", {"Q", "R", "Pprime", "P", "canonical_divisor", "canonical", "construction", "lambda", "beta"});
    auto& b = cfg.genus1;
    if (g.contains("Q")) b.Q = complex_list(g["Q"], "genus1.Q");
    if (g.contains("R")) b.R = complex_list(g["R"], "genus1.R");
    if (g.contains("Pprime")) b.Pprime = complex_list(g["Pprime"], "genus1.Pprime");
    if (g.contains("P")) b.P = complex(g["P"], "genus1.P");
    if (g.contains("canonical_divisor")) {
      if (!g["canonical_divisor"].is_boolean()) schema("genus1.canonical_divisor", "expected a boolean");
      b.canonical_divisor = g["canonical_divisor"].get<bool>();
    }
    if (g.contains("canonical")) {
      const auto& c = g["canonical"];
      if (!c.is_array() || c.empty()) schema("genus1.canonical", "expected a non-empty array");
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string key = "genus1.canonical[" + std::to_string(i) + "]";
        r.keys(c[i], key, {"alpha", "R", "Q"});
        for (const char* k : {"alpha", "R", "Q"})
          if (!c[i].contains(k)) schema(key + "." + k, "missing");
        b.canonical.push_back({complex(c[i]["alpha"], key + ".alpha"), complex(c[i]["R"], key + ".R"),
                               complex(c[i]["Q"], key + ".Q")});
      }
    }
    if (g.contains("construction")) {
      if (g["construction"] != "positive") schema("genus1.construction", "only \"positive\" is known");
      b.positive = true;
    }
    if (g.contains("lambda")) b.lambda = complex(g["lambda"], "genus1.lambda");
    if (g.contains("beta")) b.beta = complex(g["beta"], "genus1.beta");
    const int sources = (!b.Q.empty()) + (!b.canonical.empty()) + b.positive;
    if (sources != 1) schema("genus1", "give exactly one of Q/R/Pprime/P, canonical, construction");
    if (!b.Q.empty()) {
      if (!b.P) schema("genus1.P", "missing");
      if (b.R.size() != b.Q.size()) schema("genus1.R", "must match Q in length");
      if (b.Pprime.size() != b.Q.size()) schema("genus1.Pprime", "must match Q in length");
    }
  }
  if (root.contains("flux")) {
    const auto& f = root["flux"];
    r.keys(f, "flux", {"radii", "series_order", "gauge_shift"});
    if (!f.contains("radii") || !f["radii"].is_array() || f["radii"].empty()) schema("flux.radii", "expected a non-empty array");
    for (std::size_t i = 0; i < f["radii"].size(); ++i) {
      const double R = number(f["radii"][i], "flux.radii[" + std::to_string(i) + "]");
      if (!(R > 0)) schema("flux.radii", "radii must be positive");
      cfg.radii.push_back(R);
    }
    if (f.contains("series_order")) {
      cfg.series_order = integer(f["series_order"], "flux.series_order");
      if (cfg.series_order < 1 || cfg.series_order > 3) schema("flux.series_order", "must be 1, 2 or 3");
    }
    if (f.contains("gauge_shift")) cfg.shift = real_form(f["gauge_shift"], "flux.gauge_shift");
  }
  if (root.contains("periodicity")) {
    const auto& p = root["periodicity"];
    r.keys(p, "periodicity", {"n", "m", "seed_grid"});
    if (p.contains("n")) cfg.n = integer(p["n"], "periodicity.n");
    if (p.contains("m")) cfg.m = integer(p["m"], "periodicity.m");
    if (p.contains("seed_grid")) cfg.seed_grid = integer(p["seed_grid"], "periodicity.seed_grid");
    if (cfg.seed_grid < 1) schema("periodicity.seed_grid", "must be positive");
  }
  if (root.contains("bloch")) {
    const auto& b = root["bloch"];
    r.keys(b, "bloch", {"P", "p_grid", "unitarize"});
    if (b.contains("P")) cfg.bloch_P = complex(b["P"], "bloch.P");
    if (b.contains("p_grid")) cfg.p_grid = grid(r, b["p_grid"], "bloch.p_grid");
    if (b.contains("unitarize")) {
      if (!b["unitarize"].is_boolean()) schema("bloch.unitarize", "expected a boolean");
      cfg.unitarize = b["unitarize"].get<bool>();
    }
  }
  if (root.contains("suite")) {
    if (!root["suite"].is_string()) schema("suite", "expected a string");
    cfg.suite = root["suite"].get<std::string>();
    if (cfg.suite != "all" && cfg.suite != "genus0" && cfg.suite != "genus1" && cfg.suite != "flux")
      schema("suite", "one of all, genus0, genus1, flux");
  }
  if (root.contains("ground_state")) {
    const auto& g = root["ground_state"];
    r.keys(g, "ground_state", {"w", "sector"});
    if (g.contains("w")) cfg.w = real_form(g["w"], "ground_state.w");
    if (g.contains("sector")) {
      if (g["sector"] == "minus") cfg.sector = Sector::Minus;
      else if (g["sector"] == "plus") cfg.sector = Sector::Plus;
      else schema("ground_state.sector", "plus or minus");
    }
  }
  if (root.contains("flags")) {
    const auto& f = root["flags"];
    r.keys(f, "flags", {"field_sign"});
    if (f.contains("field_sign")) {
      cfg.field_sign = number(f["field_sign"], "flags.field_sign");
      if (cfg.field_sign != 1.0 && cfg.field_sign != -1.0) schema("flags.field_sign", "must be +1 or -1");
    }
  }
  if (root.contains("outputs")) {
    const auto& o = root["outputs"];
    r.keys(o, "outputs", {"c_terms", "field", "polygon", "flux", "periodicity", "multipliers", "report"});
    for (const auto& [k, v] : o.items()) {
      if (!v.is_string() || v.get<std::string>().empty()) schema("outputs." + k, "expected a file name");
      cfg.outputs[k] = v.get<std::string>();
    }
  }
  if (root.contains("tolerances")) {
    const auto& t = root["tolerances"];
    r.keys(t, "tolerances", {"cancellation", "quad", "flux", "compatibility", "periodicity", "field_periodicity", "unitarity"});
    auto set = [&](const char* k, double& dst) {
      if (!t.contains(k)) return;
      dst = number(t[k], std::string("tolerances.") + k);
      if (!(dst > 0)) schema(std::string("tolerances.") + k, "must be positive");
    };
    set("cancellation", cfg.tol.cancellation);
    set("quad", cfg.tol.quad);
    set("flux", cfg.tol.flux);
    set("compatibility", cfg.tol.compatibility);
    set("periodicity", cfg.tol.periodicity);
    set("field_periodicity", cfg.tol.field_periodicity);
    set("unitarity", cfg.tol.unitarity);
  }

  // required blocks per mode
  const bool has_c = cfg.spectral || cfg.terms;
  const bool has_g1 = !cfg.genus1.Q.empty() || !cfg.genus1.canonical.empty() || cfg.genus1.positive;
  switch (cfg.mode) {
    case Mode::Genus0:
      if (!has_c) schema("spectral", "genus0 needs spectral or terms");
      if (!cfg.grid) schema("grid", "genus0 needs a grid");
      break;
    case Mode::Genus1:
      if (!has_g1) schema("genus1", "genus1 needs a genus1 block");
      if (!cfg.grid) schema("grid", "genus1 needs a grid");
      break;
    case Mode::FluxScan:
      if (!has_c) schema("spectral", "flux-scan needs spectral or terms");
      if (cfg.radii.empty()) schema("flux", "flux-scan needs flux.radii");
      break;
    case Mode::Polygon:
      if (!has_c) schema("spectral", "polygon needs spectral or terms");
      break;
    case Mode::Verify:
    case Mode::Periodicity:
      break;
    case Mode::Bloch:
      if (!has_g1) schema("genus1", "bloch needs a genus1 block");
      if (!cfg.genus1.Q.empty()) schema("genus1", "bloch needs canonical terms or the positive construction");
      if (!cfg.p_grid) schema("bloch.p_grid", "missing");
      break;
  }
  return cfg;
}

RunConfig load_config(const std::string& path, bool lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), lenient, std::filesystem::path(path).parent_path().string());
}

}  // namespace magpauli::cli
