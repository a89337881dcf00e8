#include "fc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fc {

std::string to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::cauchy1: return "cauchy1";
    case ProblemKind::cauchy2: return "cauchy2";
    case ProblemKind::cauchy3: return "cauchy3";
  }
  return "?";
}

ProblemKind problem_from_string(const std::string& s) {
  if (s == "cauchy1" || s == "1") return ProblemKind::cauchy1;
  if (s == "cauchy2" || s == "2") return ProblemKind::cauchy2;
  if (s == "cauchy3" || s == "3") return ProblemKind::cauchy3;
  throw ConfigError("unknown problem '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double num(const std::string& s) {
  std::string t = trim(s);
  size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (pos != t.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

int integer(const std::string& s) {
  double v = num(s);
  if (v != std::floor(v) || std::fabs(v) > 2e9) throw ConfigError("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

bool boolean(const std::string& s) {
  std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

void set_lateral_kind(LateralBC& b, const std::string& v) {
  try {
    b.kind = lateral_kind_from_string(trim(v));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (b.kind == LateralBC::Kind::robin && !(b.robin_coeff > 0.0)) b.robin_coeff = 1.0;
}

std::vector<InterfaceBC::Kind> parse_cases(const std::string& v) {
  std::vector<InterfaceBC::Kind> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(interface_kind_from_string(item));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("empty case list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"run.problem", [](auto& c, auto& v) { c.problem = problem_from_string(trim(v)); }},
      {"run.noise", [](auto& c, auto& v) { c.noise = parse_list(v); }},
      {"run.seed",
       [](auto& c, auto& v) {
         double s = num(v);
         if (s < 0 || s != std::floor(s)) throw ConfigError("seed must be a nonnegative integer");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"run.out", [](auto& c, auto& v) { c.out = trim(v); }},
      {"run.jobs", [](auto& c, auto& v) { c.jobs = integer(v); }},
      {"run.dump_curves", [](auto& c, auto& v) { c.dump_curves = boolean(v); }},

      {"mesh.N", [](auto& c, auto& v) { c.N = integer(v); }},
      {"mesh.M", [](auto& c, auto& v) { c.M = integer(v); }},
      {"mesh.synth_factor", [](auto& c, auto& v) { c.synth_factor = integer(v); }},
      {"mesh.inverse_crime", [](auto& c, auto& v) { c.inverse_crime = boolean(v); }},

      {"continuation.scheme",
       [](auto& c, auto& v) {
         try {
           c.scheme = scheme_kind_from_string(trim(v));
         } catch (const std::exception& e) {
           throw ConfigError(e.what());
         }
       }},
      {"continuation.alpha", [](auto& c, auto& v) { c.alpha = num(v); }},
      {"continuation.tau", [](auto& c, auto& v) { c.tau = num(v); }},
      {"continuation.alpha_grid", [](auto& c, auto& v) { c.alpha_grid = parse_list(v); }},
      {"continuation.modes", [](auto& c, auto& v) { c.modes = integer(v); }},
      {"continuation.slices", [](auto& c, auto& v) { c.slices = integer(v); }},

      {"cauchy1.L", [](auto& c, auto& v) { c.p1_L = num(v); }},
      {"cauchy1.height", [](auto& c, auto& v) { c.p1_height = num(v); }},
      {"cauchy1.lateral", [](auto& c, auto& v) { set_lateral_kind(c.p1_lateral, v); }},
      {"cauchy1.robin_coeff", [](auto& c, auto& v) { c.p1_lateral.robin_coeff = num(v); }},
      {"cauchy1.modes", [](auto& c, auto& v) { c.p1_modes = integer(v); }},
      {"cauchy1.slices", [](auto& c, auto& v) { c.p1_slices = integer(v); }},
      {"cauchy1.P", [](auto& c, auto& v) { c.p1_P = parse_list(v); }},
      {"cauchy1.Q", [](auto& c, auto& v) { c.p1_Q = parse_list(v); }},
      {"cauchy1.dc_alpha", [](auto& c, auto& v) { c.p1_dc_alpha = num(v); }},

      {"geometry.L", [](auto& c, auto& v) { c.L = num(v); }},
      {"geometry.olell", [](auto& c, auto& v) { c.olell = num(v); }},
      {"geometry.truth_mean", [](auto& c, auto& v) { c.truth_mean = num(v); }},
      {"geometry.truth_amp", [](auto& c, auto& v) { c.truth_amp = num(v); }},

      {"cauchy2.case", [](auto& c, auto& v) { c.cases = parse_cases(v); }},
      {"cauchy2.lateral", [](auto& c, auto& v) { set_lateral_kind(c.p2_lateral, v); }},
      {"cauchy2.robin_coeff", [](auto& c, auto& v) { c.p2_lateral.robin_coeff = num(v); }},
      {"cauchy2.f_amp", [](auto& c, auto& v) { c.p2_f_amp = num(v); }},
      {"cauchy2.gamma", [](auto& c, auto& v) { c.p2_gamma = num(v); }},
      {"cauchy2.start", [](auto& c, auto& v) { c.p2_start = num(v); }},
      {"cauchy2.pin_truth_ends", [](auto& c, auto& v) { c.p2_pin_truth_ends = boolean(v); }},
      {"newton.max_iter", [](auto& c, auto& v) { c.newton.max_iter = integer(v); }},
      {"newton.rho1", [](auto& c, auto& v) { c.newton.rho1 = num(v); }},
      {"newton.rho2", [](auto& c, auto& v) { c.newton.rho2 = num(v); }},
      {"newton.stop_tol", [](auto& c, auto& v) { c.newton.stop_tol = num(v); }},
      {"newton.ell_min", [](auto& c, auto& v) { c.newton.ell_min = num(v); }},
      {"newton.ell_max", [](auto& c, auto& v) { c.newton.ell_max = num(v); }},
      {"newton.smooth_modes", [](auto& c, auto& v) { c.newton.smooth_modes = integer(v); }},
      {"newton.floor_rel", [](auto& c, auto& v) { c.newton.floor_rel = num(v); }},

      {"cauchy3.lateral", [](auto& c, auto& v) { set_lateral_kind(c.p3_lateral, v); }},
      {"cauchy3.robin_coeff", [](auto& c, auto& v) { c.p3_lateral.robin_coeff = num(v); }},
      {"cauchy3.gamma_mean", [](auto& c, auto& v) { c.p3_gamma_mean = num(v); }},
      {"cauchy3.gamma_amp", [](auto& c, auto& v) { c.p3_gamma_amp = num(v); }},
      {"cauchy3.start_ell", [](auto& c, auto& v) { c.p3_start_ell = num(v); }},
      {"cauchy3.start_gamma", [](auto& c, auto& v) { c.p3_start_gamma = num(v); }},
      {"cauchy3.method",
       [](auto& c, auto& v) {
         std::string t = trim(v);
         if (t != "reduced" && t != "frozen") throw ConfigError("cauchy3.method must be reduced or frozen");
         c.p3_method = t;
       }},
      {"cauchy3.synth_modes", [](auto& c, auto& v) { c.p3_synth_modes = integer(v); }},
      {"cauchy3.max_iter", [](auto& c, auto& v) { c.joint.max_iter = integer(v); }},
      {"cauchy3.stop_tol", [](auto& c, auto& v) { c.joint.stop_tol = num(v); }},
      {"cauchy3.gam_min", [](auto& c, auto& v) { c.joint.gam_min = num(v); }},
      {"cauchy3.J_ell", [](auto& c, auto& v) { c.joint.step.J_ell = integer(v); }},
      {"cauchy3.J_gam", [](auto& c, auto& v) { c.joint.step.J_gam = integer(v); }},
      {"cauchy3.reg", [](auto& c, auto& v) { c.joint.step.reg = num(v); }},
      {"cauchy3.pin_ends", [](auto& c, auto& v) { c.joint.step.pin_ends = boolean(v); }},
      {"cauchy3.wronskian_floor", [](auto& c, auto& v) { c.joint.step.wronskian_floor = num(v); }},

      {"frozen.alpha0", [](auto& c, auto& v) { c.frozen.alpha0 = num(v); }},
      {"frozen.theta", [](auto& c, auto& v) { c.frozen.theta = num(v); }},
      {"frozen.tau", [](auto& c, auto& v) { c.frozen.tau = num(v); }},
      {"frozen.max_iter", [](auto& c, auto& v) { c.frozen.max_iter = integer(v); }},
      {"frozen.J_ell", [](auto& c, auto& v) { c.frozen.J_ell = integer(v); }},
      {"frozen.J_gam", [](auto& c, auto& v) { c.frozen.J_gam = integer(v); }},
      {"frozen.weight_exp", [](auto& c, auto& v) { c.frozen.weight_exp = num(v); }},
      {"frozen.modes", [](auto& c, auto& v) { c.p3_frozen_modes = integer(v); }},
  };
  return m;
}

// shortest round-trip form
std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(num(item));
  }
  return out;
}

void set_option(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(c, value);
}

void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  need(!c.noise.empty(), "run.noise must not be empty");
  for (double d : c.noise) need(d >= 0.0 && d < 1.0, "noise levels must lie in [0,1)");
  need(c.jobs >= 1, "run.jobs must be >= 1");
  need(c.N >= 9 && c.M >= 5, "mesh too small");
  need(c.synth_factor >= 1, "mesh.synth_factor must be >= 1");
  need(c.inverse_crime || c.synth_factor >= 2, "synthesis mesh must be at least 2x finer (mesh.synth_factor >= 2)");
  need(c.tau > 1.0, "continuation.tau must exceed 1");
  need(!c.alpha_grid.empty(), "continuation.alpha_grid must not be empty");
  for (double a : c.alpha_grid) need(a > 0.0 && a <= 1.0, "alpha grid values must lie in (0,1]");
  need(c.slices >= 2, "continuation.slices must be >= 2");
  need(c.p1_L > 0.0 && c.p1_height > 0.0, "cauchy1 geometry must be positive");
  need(c.p1_P.size() == c.p1_Q.size() && !c.p1_P.empty(), "cauchy1.P and cauchy1.Q must have equal nonzero length");
  need(c.p1_slices >= 2, "cauchy1.slices must be >= 2");
  need(c.p1_dc_alpha == 0.0 || (c.p1_dc_alpha > 0.5 && c.p1_dc_alpha <= 1.0), "cauchy1.dc_alpha must lie in (0.5,1]");
  need(c.L > 0.0 && c.olell > 0.0, "geometry must be positive");
  need(c.truth_mean - std::fabs(c.truth_amp) > 0.0 && c.truth_mean + std::fabs(c.truth_amp) <= 1.0,
       "truth curve must stay inside (0, olell]");
  need(c.p2_start > 0.0 && c.p2_start <= 1.0, "cauchy2.start must lie in (0,1]");
  need(c.p3_start_ell > 0.0 && c.p3_start_ell <= c.olell, "cauchy3.start_ell must lie in (0, olell]");
  need(c.p3_gamma_mean - std::fabs(c.p3_gamma_amp) > 0.0, "cauchy3 gamma must stay positive");
  for (const LateralBC* b : {&c.p1_lateral, &c.p2_lateral, &c.p3_lateral})
    need(b->kind != LateralBC::Kind::robin || (b->robin_coeff > 0.0 && std::isfinite(b->robin_coeff)),
         "robin_coeff must be finite and > 0");
  need(c.p3_synth_modes >= 1 && c.p3_frozen_modes >= 1, "mode counts must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [sec, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + sec + "' outside a section");
    for (const auto& [key, val] : body) set_option(c, sec + "." + key, val.data());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  auto lat = [](const LateralBC& b) { return to_string(b.kind); };
  std::string cases;
  for (size_t i = 0; i < c.cases.size(); ++i) cases += (i ? "," : "") + to_string(c.cases[i]);
  std::ostringstream os;
  os << "[run]\nproblem = " << to_string(c.problem) << "\nnoise = " << join(c.noise) << "\nseed = " << c.seed
     << "\nout = " << c.out << "\njobs = " << c.jobs << "\ndump_curves = " << (c.dump_curves ? "true" : "false")
     << "\n\n[mesh]\nN = " << c.N << "\nM = " << c.M << "\nsynth_factor = " << c.synth_factor
     << "\ninverse_crime = " << (c.inverse_crime ? "true" : "false") << "\n\n[continuation]\nscheme = "
     << to_string(c.scheme) << "\nalpha = " << fmt(c.alpha) << "\ntau = " << fmt(c.tau)
     << "\nalpha_grid = " << join(c.alpha_grid) << "\nmodes = " << c.modes << "\nslices = " << c.slices
     << "\n\n[cauchy1]\nL = " << fmt(c.p1_L) << "\nheight = " << fmt(c.p1_height) << "\nlateral = "
     << lat(c.p1_lateral) << "\nrobin_coeff = " << fmt(c.p1_lateral.robin_coeff) << "\nmodes = " << c.p1_modes
     << "\nslices = " << c.p1_slices << "\nP = " << join(c.p1_P) << "\nQ = " << join(c.p1_Q)
     << "\ndc_alpha = " << fmt(c.p1_dc_alpha) << "\n\n[geometry]\nL = " << fmt(c.L) << "\nolell = " << fmt(c.olell)
     << "\ntruth_mean = " << fmt(c.truth_mean) << "\ntruth_amp = " << fmt(c.truth_amp) << "\n\n[cauchy2]\ncase = "
     << cases << "\nlateral = " << lat(c.p2_lateral) << "\nrobin_coeff = " << fmt(c.p2_lateral.robin_coeff)
     << "\nf_amp = " << fmt(c.p2_f_amp) << "\ngamma = " << fmt(c.p2_gamma) << "\nstart = " << fmt(c.p2_start)
     << "\npin_truth_ends = " << (c.p2_pin_truth_ends ? "true" : "false") << "\n\n[newton]\nmax_iter = "
     << c.newton.max_iter << "\nrho1 = " << fmt(c.newton.rho1) << "\nrho2 = " << fmt(c.newton.rho2)
     << "\nstop_tol = " << fmt(c.newton.stop_tol) << "\nell_min = " << fmt(c.newton.ell_min)
     << "\nell_max = " << fmt(c.newton.ell_max) << "\nsmooth_modes = " << c.newton.smooth_modes
     << "\nfloor_rel = " << fmt(c.newton.floor_rel) << "\n\n[cauchy3]\nlateral = " << lat(c.p3_lateral)
     << "\nrobin_coeff = " << fmt(c.p3_lateral.robin_coeff) << "\ngamma_mean = " << fmt(c.p3_gamma_mean)
     << "\ngamma_amp = " << fmt(c.p3_gamma_amp) << "\nstart_ell = " << fmt(c.p3_start_ell)
     << "\nstart_gamma = " << fmt(c.p3_start_gamma) << "\nmethod = " << c.p3_method
     << "\nsynth_modes = " << c.p3_synth_modes << "\nmax_iter = " << c.joint.max_iter
     << "\nstop_tol = " << fmt(c.joint.stop_tol) << "\ngam_min = " << fmt(c.joint.gam_min)
     << "\nJ_ell = " << c.joint.step.J_ell << "\nJ_gam = " << c.joint.step.J_gam << "\nreg = " << fmt(c.joint.step.reg)
     << "\npin_ends = " << (c.joint.step.pin_ends ? "true" : "false")
     << "\nwronskian_floor = " << fmt(c.joint.step.wronskian_floor) << "\n\n[frozen]\nalpha0 = "
     << fmt(c.frozen.alpha0) << "\ntheta = " << fmt(c.frozen.theta) << "\ntau = " << fmt(c.frozen.tau)
     << "\nmax_iter = " << c.frozen.max_iter << "\nJ_ell = " << c.frozen.J_ell << "\nJ_gam = " << c.frozen.J_gam
     << "\nweight_exp = " << fmt(c.frozen.weight_exp) << "\nmodes = " << c.p3_frozen_modes << "\n";
  return os.str();
}

}  // namespace fc
