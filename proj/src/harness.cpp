#include "fc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace fc {

namespace fs = std::filesystem;

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_table_csv(std::ostream& os, const ResultTable& t) {
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt6(r[i]);
    os << "\n";
  }
}

void write_xy(const std::string& path, const std::vector<double>& x, const std::vector<std::vector<double>>& cols) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  for (size_t i = 0; i < x.size(); ++i) {
    os << fmt6(x[i]);
    for (const auto& c : cols) os << " " << fmt6(c[i]);
    os << "\n";
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> noisy(const std::vector<double>& g, double delta, double h, std::uint64_t seed) {
  return delta > 0.0 ? add_noise(g, delta, h, seed) : g;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

ContinuationScheme scheme_for(const ExperimentConfig& c) {
  ContinuationScheme s;
  s.kind = c.scheme;
  s.alpha = c.alpha;
  s.tau = c.tau;
  s.alpha_grid = c.alpha_grid;
  return s;
}

int fine_factor(const ExperimentConfig& c) { return c.inverse_crime ? 1 : c.synth_factor; }

std::vector<double> restrict(const std::vector<double>& fine, int factor, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = fine[static_cast<size_t>(factor) * i];
  return v;
}

std::string label(double d) { return fmt6(d); }

// runs f(i) for i in [0, n) on up to `jobs` threads
template <class F>
void parallel_for(int n, int jobs, F&& f) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem 1

std::vector<double> problem1_truth(const ExperimentConfig& c, const std::vector<double>& x, double y) {
  std::vector<double> u(x.size(), 0.0);
  for (size_t j = 0; j < c.p1_P.size(); ++j) {
    double k = (j + 1) * M_PI / c.p1_L;
    double a = c.p1_P[j] * std::cosh(k * y) + c.p1_Q[j] * std::sinh(k * y);
    for (size_t i = 0; i < x.size(); ++i) u[i] += std::sin(k * x[i]) * a;
  }
  return u;
}

Problem1Result run_problem1(const ExperimentConfig& c, double delta) {
  if (c.p1_lateral.kind != LateralBC::Kind::dirichlet)
    throw ConfigError("cauchy1 benchmark truth is built from Dirichlet modes; set cauchy1.lateral = dirichlet");
  const int N = c.N;
  auto B = build_basis(c.p1_L, c.p1_lateral, c.p1_modes, N);
  Problem1Result r;
  r.delta = delta;
  r.x = B->x;
  const double h = B->h;
  std::vector<double> g(N, 0.0);
  for (size_t j = 0; j < c.p1_P.size(); ++j) {
    double k = (j + 1) * M_PI / c.p1_L;
    for (int i = 0; i < N; ++i) g[i] += k * c.p1_Q[j] * std::sin(k * r.x[i]);
  }
  CauchyData d{problem1_truth(c, r.x, 0.0), noisy(g, delta, h, c.seed), delta, B};

  auto ys = linspace(0.0, c.p1_height, c.p1_slices);
  const double hy = c.p1_height / (c.p1_slices - 1);
  auto error = [&](ContinuationScheme& sc, ContinuationStats* st) {
    double num = 0.0, den = 0.0;
    for (int m = 0; m < c.p1_slices; ++m) {
      double wy = (m == 0 || m == c.p1_slices - 1) ? 0.5 * hy : hy;
      auto v = synthesize({B, scheme_coeffs(d, sc, ys[m], c.p1_height, st)});
      auto t = problem1_truth(c, r.x, ys[m]);
      for (int i = 0; i < N; ++i) {
        num += wy * B->w[i] * (v[i] - t[i]) * (v[i] - t[i]);
        den += wy * B->w[i] * t[i] * t[i];
      }
    }
    return std::sqrt(num / den);
  };

  ContinuationScheme split = scheme_for(c);
  split.kind = ContinuationScheme::Kind::fac_lap_split;
  r.err_split = error(split, nullptr);
  r.bands = split.bands;

  if (c.p1_dc_alpha > 0.0) {
    r.dc_alpha = c.p1_dc_alpha;
  } else {
    // smallest order used by the split scheme, raised to the smallest grid
    // value admissible for the one-sided schemes (2 alpha > 1)
    double amin = std::numeric_limits<double>::infinity();
    for (const auto& b : split.bands)
      if (!b.flagged) amin = std::min(amin, b.alpha);
    double lo = std::numeric_limits<double>::infinity(), top = 0.0;
    for (double a : c.alpha_grid) {
      if (a > 0.5) lo = std::min(lo, a);
      top = std::max(top, a);
    }
    if (!std::isfinite(lo)) throw ConfigError("alpha grid has no value above 0.5 for the one-sided schemes");
    r.dc_alpha = std::isfinite(amin) ? std::max(amin, lo) : top;
  }
  ContinuationScheme left, right, exact;
  left.kind = ContinuationScheme::Kind::left_dc;
  right.kind = ContinuationScheme::Kind::right_dc;
  exact.kind = ContinuationScheme::Kind::exact;
  left.alpha = right.alpha = r.dc_alpha;
  r.err_left = error(left, &r.left_stats);
  r.err_right = error(right, &r.right_stats);
  try {
    r.err_exact = error(exact, nullptr);
  } catch (const std::overflow_error&) {
    r.err_exact = std::numeric_limits<double>::infinity();
  }

  r.fig_y = {c.p1_height / 3.0, 2.0 * c.p1_height / 3.0, c.p1_height};
  for (double y : r.fig_y) {
    r.fig_truth.push_back(problem1_truth(c, r.x, y));
    r.fig_left.push_back(synthesize({B, scheme_coeffs(d, left, y, c.p1_height)}));
    r.fig_right.push_back(synthesize({B, scheme_coeffs(d, right, y, c.p1_height)}));
    r.fig_split.push_back(synthesize({B, scheme_coeffs(d, split, y, c.p1_height)}));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Problem 2

Curve truth_curve(const ExperimentConfig& c, int n) {
  Curve k;
  k.L = c.L;
  k.olell = c.olell;
  auto x = uniform_grid(c.L, n);
  k.ell.resize(n);
  for (int i = 0; i < n; ++i) k.ell[i] = c.olell * (c.truth_mean + c.truth_amp * std::cos(2.0 * M_PI * x[i] / c.L));
  return k;
}

namespace {

std::vector<double> problem2_f(const ExperimentConfig& c, int n) {
  auto x = uniform_grid(c.L, n);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = 1.0 + c.p2_f_amp * std::cos(M_PI * x[i] / c.L);
  return f;
}

}  // namespace

Problem2Setup synthesize_problem2(const ExperimentConfig& c, InterfaceBC::Kind kind) {
  const int q = fine_factor(c);
  const int Nf = q * (c.N - 1) + 1, Mf = q * (c.M - 1) + 1;
  Problem2 pf{c.p2_lateral, kind, std::vector<double>(Nf, c.p2_gamma), problem2_f(c, Nf), Mf};
  MeshField u = forward_field(pf, truth_curve(c, Nf));
  Problem2Setup s;
  s.kind = kind;
  s.truth = truth_curve(c, c.N);
  s.f = problem2_f(c, c.N);
  s.g = restrict(bottom_flux(u), q, c.N);
  s.gamma.assign(c.N, c.p2_gamma);
  s.warnings = u.warnings;
  return s;
}

Problem2Cell run_problem2_cell(const ExperimentConfig& c, const Problem2Setup& s, double delta) {
  Problem2Cell cell;
  cell.kind = s.kind;
  cell.delta = delta;
  try {
    const double h = c.L / (c.N - 1);
    auto B = build_basis(c.L, c.p2_lateral, c.modes, c.N);
    CauchyData d{s.f, noisy(s.g, delta, h, c.seed), delta, B};
    ContinuationScheme sc = scheme_for(c);
    MeshField zbar = solve_cauchy_holdall(d, c.p2_lateral, sc, linspace(0.0, c.olell, c.slices), c.olell);
    cell.bands = sc.bands;
    NewtonConfig cfg = c.newton;
    cfg.M = c.M;
    if (c.p2_pin_truth_ends) {
      cfg.ell_left = s.truth.ell.front();
      cfg.ell_right = s.truth.ell.back();
    }
    Curve c0 = s.truth;
    std::fill(c0.ell.begin(), c0.ell.end(), c.p2_start * c.olell);
    switch (s.kind) {
      case InterfaceBC::Kind::D: cell.trace = newton_dirichlet(c0, zbar, c.p2_lateral, s.f, d.g, cfg, &s.truth); break;
      case InterfaceBC::Kind::N: cell.trace = newton_neumann(c0, zbar, c.p2_lateral, s.f, d.g, cfg, &s.truth); break;
      case InterfaceBC::Kind::I:
        cell.trace = newton_impedance(c0, s.gamma, zbar, c.p2_lateral, s.f, d.g, cfg, &s.truth);
        break;
    }
    cell.relerr = cell.trace.rel_errors.back();
    cell.iterations = static_cast<int>(cell.trace.iterates.size()) - 1;
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.relerr = kNaN;
  }
  return cell;
}

// ---------------------------------------------------------------------------
// Problem 3

std::vector<double> truth_gamma(const ExperimentConfig& c, int n) {
  auto x = uniform_grid(c.L, n);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = c.p3_gamma_mean + c.p3_gamma_amp * std::sin(M_PI * x[i] / c.L);
  return g;
}

namespace {

void problem3_f(const ExperimentConfig& c, int n, std::vector<double>& f1, std::vector<double>& f2) {
  auto x = uniform_grid(c.L, n);
  f1.resize(n);
  f2.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = x[i];
    f1[i] = 1.0 + t + t * t;
    f2[i] = 4.0 * t * t - 3.0 * t * t * t;
  }
}

}  // namespace

Problem3Setup synthesize_problem3(const ExperimentConfig& c) {
  // refine further if the synthesis basis needs it (N >= 4J)
  const int q = std::max(fine_factor(c), (4 * c.p3_synth_modes + c.N - 3) / (c.N - 1));
  const int Nf = q * (c.N - 1) + 1;
  std::vector<double> f1, f2;
  problem3_f(c, Nf, f1, f2);
  Curve tf = truth_curve(c, Nf);
  auto gf = truth_gamma(c, Nf);
  // modal synthesis: f1 violates the lateral condition at x = L and the mesh
  // flux is polluted by the corner singularity there
  auto B = build_basis(c.L, c.p3_lateral, c.p3_synth_modes, Nf);
  ModalField u1 = modal_forward(B, f1, tf, gf), u2 = modal_forward(B, f2, tf, gf);
  Problem3Setup s;
  s.truth = truth_curve(c, c.N);
  s.gamma = truth_gamma(c, c.N);
  problem3_f(c, c.N, s.f1, s.f2);
  s.g1 = restrict(modal_bottom_flux(u1), q, c.N);
  s.g2 = restrict(modal_bottom_flux(u2), q, c.N);
  s.warnings = corner_compatibility(tf, c.p3_lateral, f1);
  for (auto& w : corner_compatibility(tf, c.p3_lateral, f2)) s.warnings.push_back(w);

  Traces t1 = modal_traces(u1, tf), t2 = modal_traces(u2, tf);
  double wmax = 0.0, wmin = std::numeric_limits<double>::infinity();
  int crossings = 0;
  double prev = 0.0;
  for (int i = 1; i + 1 < Nf; ++i) {
    double w = t1.u_x[i] * t2.u[i] - t2.u_x[i] * t1.u[i];
    wmax = std::max(wmax, std::fabs(w));
    wmin = std::min(wmin, std::fabs(w));
    if (i > 1 && w * prev < 0.0) ++crossings;
    prev = w;
  }
  s.min_wronskian = wmax > 0.0 ? wmin / wmax : 0.0;
  if (crossings > 0)
    s.warnings.push_back("Wronskian of the excitations changes sign " + std::to_string(crossings) +
                         " time(s) inside (0,L); the elimination formulas are not usable there");
  else if (s.min_wronskian < c.joint.step.wronskian_floor)
    s.warnings.push_back("Wronskian of the excitations falls below the floor inside (0,L)");
  return s;
}

Problem3Cell run_problem3_cell(const ExperimentConfig& c, const Problem3Setup& s, double delta) {
  Problem3Cell cell;
  cell.delta = delta;
  try {
    const double h = c.L / (c.N - 1);
    auto gd1 = noisy(s.g1, delta, h, c.seed), gd2 = noisy(s.g2, delta, h, c.seed + 1);
    Curve c0 = s.truth;
    std::fill(c0.ell.begin(), c0.ell.end(), c.p3_start_ell);
    std::vector<double> gam0(c.N, c.p3_start_gamma);
    if (c.p3_method == "reduced") {
      auto B = build_basis(c.L, c.p3_lateral, c.modes, c.N);
      auto ys = linspace(0.0, c.olell, c.slices);
      ContinuationScheme s1 = scheme_for(c), s2 = scheme_for(c);
      MeshField z1 = solve_cauchy_holdall({s.f1, gd1, delta, B}, c.p3_lateral, s1, ys, c.olell);
      MeshField z2 = solve_cauchy_holdall({s.f2, gd2, delta, B}, c.p3_lateral, s2, ys, c.olell);
      Problem3 p{c.p3_lateral, s.f1, s.f2, c.M};
      cell.trace = recover_joint(p, c0, gam0, z1, z2, gd1, gd2, c.joint, &s.truth, &s.gamma);
      cell.ell = cell.trace.ell.back();
      cell.gamma = cell.trace.gam.back();
      cell.iterations = static_cast<int>(cell.trace.ell.size()) - 1;
      cell.warnings = cell.trace.warnings;
    } else {
      auto B = build_basis(c.L, c.p3_lateral, c.p3_frozen_modes, c.N);
      AllAtOnceState x0;
      x0.ell = c0;
      x0.gam1 = x0.gam2 = gam0;
      x0.u1 = modal_forward_flat(B, s.f1, c.p3_start_ell, c.p3_start_gamma);
      x0.u2 = modal_forward_flat(B, s.f2, c.p3_start_ell, c.p3_start_gamma);
      PenaltyOp pen{s.truth.ell.front()};
      FrozenResult r =
          frozen_newton({s.f1, gd1, delta, B}, {s.f2, gd2, delta, B}, x0, pen, c.frozen, &s.truth, &s.gamma);
      cell.frozen = r.trace;
      cell.ell = r.xi.ell;
      cell.gamma = r.xi.gam1;
      cell.iterations = r.n_star;
      if (!r.nstar_conditions) cell.warnings.push_back("stopping index conditions not met for this schedule");
    }
    cell.relerr_ell = rel_l2_error(cell.ell.ell, s.truth.ell, h);
    cell.relerr_gam = rel_l2_error(cell.gamma, s.gamma, h);
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.relerr_ell = cell.relerr_gam = kNaN;
  }
  return cell;
}

// ---------------------------------------------------------------------------
// pipelines

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  return os;
}

RunOutcome run_cauchy1(const ExperimentConfig& c, const fs::path& out) {
  RunOutcome o;
  o.table.columns = {"noise", "err_split", "err_right_dc", "err_left_dc", "dc_alpha"};
  std::vector<Problem1Result> res(c.noise.size());
  std::vector<std::string> err(c.noise.size());
  parallel_for(static_cast<int>(c.noise.size()), c.jobs, [&](int i) {
    try {
      res[i] = run_problem1(c, c.noise[i]);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  for (size_t i = 0; i < c.noise.size(); ++i) {
    const auto& r = res[i];
    if (!err[i].empty()) {
      ++o.failed_cells;
      o.log.push_back("noise " + label(c.noise[i]) + ": " + err[i]);
      o.table.rows.push_back({c.noise[i], kNaN, kNaN, kNaN, kNaN});
      continue;
    }
    o.table.rows.push_back({c.noise[i], r.err_split, r.err_right, r.err_left, r.dc_alpha});
    auto bo = open_out(out / ("bands_" + label(c.noise[i]) + ".csv"));
    bo << "k_begin,k_end,alpha,flagged\n";
    for (const auto& b : r.bands) bo << b.k_begin << "," << b.k_end << "," << fmt6(b.alpha) << "," << b.flagged << "\n";
    for (size_t k = 0; k < r.fig_y.size(); ++k)
      write_xy((out / ("slice_" + label(c.noise[i]) + "_y" + fmt6(r.fig_y[k]) + ".txt")).string(), r.x,
               {r.fig_truth[k], r.fig_left[k], r.fig_right[k], r.fig_split[k]});
    if (r.left_stats.zeroed_modes || r.right_stats.zeroed_modes)
      o.log.push_back("noise " + label(c.noise[i]) + ": zeroed modes left_dc " +
                      std::to_string(r.left_stats.zeroed_modes) + ", right_dc " +
                      std::to_string(r.right_stats.zeroed_modes));
  }
  return o;
}

RunOutcome run_cauchy2(const ExperimentConfig& c, const fs::path& out) {
  RunOutcome o;
  const int nc = static_cast<int>(c.cases.size()), nn = static_cast<int>(c.noise.size());
  std::vector<Problem2Setup> setups(nc);
  std::vector<std::string> serr(nc);
  parallel_for(nc, c.jobs, [&](int k) {
    try {
      setups[k] = synthesize_problem2(c, c.cases[k]);
    } catch (const std::exception& e) {
      serr[k] = e.what();
    }
  });
  std::vector<Problem2Cell> cells(nc * nn);
  parallel_for(nc * nn, c.jobs, [&](int i) {
    int k = i / nn, j = i % nn;
    if (!serr[k].empty()) {
      cells[i].kind = c.cases[k];
      cells[i].delta = c.noise[j];
      cells[i].error = "synthesis failed: " + serr[k];
      cells[i].relerr = kNaN;
      return;
    }
    cells[i] = run_problem2_cell(c, setups[k], c.noise[j]);
  });

  o.table.columns = {"noise"};
  for (auto k : c.cases) o.table.columns.push_back("relerr_" + to_string(k));
  for (auto k : c.cases) o.table.columns.push_back("iterations_" + to_string(k));
  for (int j = 0; j < nn; ++j) {
    std::vector<double> row = {c.noise[j]};
    for (int k = 0; k < nc; ++k) row.push_back(cells[k * nn + j].relerr);
    for (int k = 0; k < nc; ++k) row.push_back(cells[k * nn + j].error.empty() ? cells[k * nn + j].iterations : kNaN);
    o.table.rows.push_back(row);
  }
  for (int k = 0; k < nc; ++k) {
    for (auto& w : setups[k].warnings) o.log.push_back("synthesis " + to_string(c.cases[k]) + ": " + w);
    if (serr[k].empty())
      write_xy((out / ("truth_" + to_string(c.cases[k]) + ".txt")).string(), setups[k].truth.x(), {setups[k].truth.ell});
  }
  for (const auto& cell : cells) {
    std::string tag = to_string(cell.kind) + "_" + label(cell.delta);
    if (!cell.error.empty()) {
      ++o.failed_cells;
      o.log.push_back("cell " + tag + " failed: " + cell.error);
      continue;
    }
    auto os = open_out(out / ("trace_" + tag + ".csv"));
    write_trace_csv(os, cell.trace);
    for (auto& w : cell.trace.warnings) o.log.push_back("cell " + tag + ": " + w);
    if (cell.trace.nonuniqueness) o.log.push_back("cell " + tag + ": nonuniqueness detected");
    if (c.dump_curves) {
      fs::path dir = out / ("curves_" + tag);
      fs::create_directories(dir);
      for (size_t it = 0; it < cell.trace.iterates.size(); ++it)
        write_xy((dir / ("it" + std::to_string(it) + ".txt")).string(), cell.trace.iterates[it].x(),
                 {cell.trace.iterates[it].ell});
    }
  }
  return o;
}

RunOutcome run_cauchy3(const ExperimentConfig& c, const fs::path& out) {
  RunOutcome o;
  Problem3Setup s = synthesize_problem3(c);
  for (auto& w : s.warnings) o.log.push_back("synthesis: " + w);
  const int nn = static_cast<int>(c.noise.size());
  std::vector<Problem3Cell> cells(nn);
  parallel_for(nn, c.jobs, [&](int j) { cells[j] = run_problem3_cell(c, s, c.noise[j]); });
  o.table.columns = {"noise", "relerr_ell", "relerr_gamma", "iterations"};
  auto x = s.truth.x();
  write_xy((out / "truth_ell.txt").string(), x, {s.truth.ell});
  write_xy((out / "truth_gamma.txt").string(), x, {s.gamma});
  for (const auto& cell : cells) {
    std::string tag = label(cell.delta);
    o.table.rows.push_back({cell.delta, cell.relerr_ell, cell.relerr_gam,
                            cell.error.empty() ? static_cast<double>(cell.iterations) : kNaN});
    if (!cell.error.empty()) {
      ++o.failed_cells;
      o.log.push_back("cell " + tag + " failed: " + cell.error);
      continue;
    }
    for (auto& w : cell.warnings) o.log.push_back("cell " + tag + ": " + w);
    auto os = open_out(out / ("trace_" + tag + ".csv"));
    if (c.p3_method == "reduced") {
      os << "iter,residual,relerr_ell,relerr_gamma\n";
      for (size_t k = 0; k < cell.trace.ell.size(); ++k)
        os << k << "," << fmt6(cell.trace.residual_norms[k]) << "," << fmt6(cell.trace.relerr_ell[k]) << ","
           << fmt6(cell.trace.relerr_gam[k]) << "\n";
    } else {
      os << "n,alpha,residual,relerr_ell,relerr_gamma\n";
      for (const auto& it : cell.frozen)
        os << it.n << "," << fmt6(it.alpha) << "," << fmt6(it.residual) << "," << fmt6(it.relerr_ell) << ","
           << fmt6(it.relerr_gam) << "\n";
    }
    if (c.dump_curves) {
      write_xy((out / ("final_ell_" + tag + ".txt")).string(), x, {cell.ell.ell});
      write_xy((out / ("final_gamma_" + tag + ".txt")).string(), x, {cell.gamma});
      if (c.p3_method == "reduced") {
        fs::path dir = out / ("curves_" + tag);
        fs::create_directories(dir);
        for (size_t it = 0; it < cell.trace.ell.size(); ++it)
        {
          write_xy((dir / ("ell_it" + std::to_string(it) + ".txt")).string(), x, {cell.trace.ell[it].ell});
          write_xy((dir / ("gamma_it" + std::to_string(it) + ".txt")).string(), x, {cell.trace.gam[it]});
        }
      }
    }
  }
  return o;
}

}  // namespace

RunOutcome run(const ExperimentConfig& c, const std::string& out_dir) {
  validate(c);
  fs::path out(out_dir);
  fs::create_directories(out);
  RunOutcome o;
  switch (c.problem) {
    case ProblemKind::cauchy1: o = run_cauchy1(c, out); break;
    case ProblemKind::cauchy2: o = run_cauchy2(c, out); break;
    case ProblemKind::cauchy3: o = run_cauchy3(c, out); break;
  }
  {
    auto os = open_out(out / "table.csv");
    write_table_csv(os, o.table);
  }
  {
    auto os = open_out(out / "log.txt");
    for (auto& l : o.log) os << l << "\n";
  }
  {
    auto os = open_out(out / "config.ini");
    os << dump_config(c);
  }
  return o;
}

void write_synthesis(const ExperimentConfig& c, const std::string& out_dir) {
  validate(c);
  fs::path out(out_dir);
  fs::create_directories(out);
  const double h = c.L / (c.N - 1);
  auto dump = [&](const std::string& name, const std::vector<double>& x, const std::vector<double>& f,
                  const std::vector<double>& g, std::uint64_t seed) {
    std::vector<std::vector<double>> cols = {f, g};
    auto os = open_out(out / (name + "_columns.txt"));
    os << "x f g";
    for (double d : c.noise) {
      cols.push_back(noisy(g, d, x.size() > 1 ? x[1] - x[0] : h, seed));
      os << " g_" << label(d);
    }
    os << "\n";
    write_xy((out / (name + ".txt")).string(), x, cols);
  };
  switch (c.problem) {
    case ProblemKind::cauchy1: {
      auto B = build_basis(c.p1_L, c.p1_lateral, c.p1_modes, c.N);
      std::vector<double> g(c.N, 0.0);
      for (size_t j = 0; j < c.p1_P.size(); ++j) {
        double k = (j + 1) * M_PI / c.p1_L;
        for (int i = 0; i < c.N; ++i) g[i] += k * c.p1_Q[j] * std::sin(k * B->x[i]);
      }
      dump("data", B->x, problem1_truth(c, B->x, 0.0), g, c.seed);
      break;
    }
    case ProblemKind::cauchy2:
      for (auto k : c.cases) {
        auto s = synthesize_problem2(c, k);
        dump("data_" + to_string(k), s.truth.x(), s.f, s.g, c.seed);
        write_xy((out / ("truth_" + to_string(k) + ".txt")).string(), s.truth.x(), {s.truth.ell});
      }
      break;
    case ProblemKind::cauchy3: {
      auto s = synthesize_problem3(c);
      dump("data_1", s.truth.x(), s.f1, s.g1, c.seed);
      dump("data_2", s.truth.x(), s.f2, s.g2, c.seed + 1);
      write_xy((out / "truth.txt").string(), s.truth.x(), {s.truth.ell, s.gamma});
      break;
    }
  }
}

}  // namespace fc
