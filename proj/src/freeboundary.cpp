#include "fc/freeboundary.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace fc {

double rel_l2_error(const std::vector<double>& a, const std::vector<double>& truth, double h) {
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - truth[i];
  return l2norm(d, h) / l2norm(truth, h);
}

void write_trace_csv(std::ostream& os, const RecoveryTrace& t) {
  os << "iter,residual,relerr\n";
  char buf[96];
  for (size_t k = 0; k < t.iterates.size(); ++k) {
    double r = k < t.residual_norms.size() ? t.residual_norms[k] : std::nan("");
    double e = k < t.rel_errors.size() ? t.rel_errors[k] : std::nan("");
    std::snprintf(buf, sizeof buf, "%zu,%.6g,%.6g\n", k, r, e);
    os << buf;
  }
}

InterfaceBC interface_for(const Problem2& p, const Curve& c) {
  switch (p.kind) {
    case InterfaceBC::Kind::D: return InterfaceBC::dirichlet();
    case InterfaceBC::Kind::N: return InterfaceBC::neumann();
    case InterfaceBC::Kind::I: return InterfaceBC::impedance(combined_gamma(c, p.gamma));
  }
  return {};
}

MeshField forward_field(const Problem2& p, const Curve& c) {
  return solve_forward(c, p.lateral, interface_for(p, c), p.f, p.M);
}

std::vector<double> forward_flux(const Problem2& p, const Curve& c) { return bottom_flux(forward_field(p, c)); }

std::vector<double> linearized_interface_data(const Problem2& p, const Curve& c, const Traces& t,
                                              const std::vector<double>& dl) {
  const int N = c.n();
  std::vector<double> r(N);
  if (p.kind == InterfaceBC::Kind::D) {
    for (int i = 0; i < N; ++i) r[i] = -t.u_y[i] * dl[i];
    return r;
  }
  auto lp = c.derivative();
  auto dlp = diff(dl, c.h());
  std::vector<double> gt(N, 0.0), gp(N, 0.0);
  if (p.kind == InterfaceBC::Kind::I) {
    gt = combined_gamma(c, p.gamma);
    for (int i = 0; i < N; ++i) gp[i] = lp[i] * p.gamma[i] / std::sqrt(1.0 + lp[i] * lp[i]);
  }
  for (int i = 0; i < N; ++i)
    r[i] = -(t.u_yy[i] - lp[i] * t.u_xy[i] + gt[i] * t.u_y[i]) * dl[i] + dlp[i] * (t.u_x[i] - gp[i] * t.u[i]);
  return r;
}

std::vector<double> linearized_flux(const Problem2& p, const Curve& c, const std::vector<double>& dl) {
  MeshField u = forward_field(p, c);
  Traces t = interface_traces(u);
  ForwardExtras ex{linearized_interface_data(p, c, t, dl)};
  std::vector<double> zero(c.n(), 0.0);
  return bottom_flux(solve_forward(c, p.lateral, interface_for(p, c), zero, p.M, &ex));
}

double flat_fraction(const Traces& t, double tol) {
  double mu = 0.0;
  for (double v : t.u) mu = std::max(mu, std::fabs(v));
  if (mu == 0.0) return 1.0;
  int cnt = 0;
  for (double v : t.u_x)
    if (std::fabs(v) <= tol * mu) ++cnt;
  return static_cast<double>(cnt) / t.u_x.size();
}

namespace {

std::vector<double> smooth(const std::vector<double>& v, const Curve& c, int K) {
  if (K <= 0) return v;
  return project_cosine(v, c.L, K);
}

}  // namespace

std::vector<double> dirichlet_update(const Curve& c, const MeshField& zbar, const MeshField& u,
                                     const NewtonConfig& cfg, StepInfo* info) {
  Traces z = holdall_traces(zbar, c);
  Traces t = interface_traces(u);
  const int N = c.n();
  double sc = 0.0;
  for (double v : t.u_y) sc = std::max(sc, std::fabs(v));
  std::vector<double> dl(N, 0.0);
  int flagged = 0;
  for (int i = 0; i < N; ++i) {
    if (std::fabs(t.u_y[i]) < cfg.floor_rel * sc) {
      ++flagged;
      continue;
    }
    dl[i] = -z.u[i] / t.u_y[i];
  }
  if (info) info->flagged = flagged;
  return smooth(dl, c, cfg.smooth_modes);
}

std::vector<double> neumann_update(const Curve& c, const MeshField& zbar, const MeshField& u, const NewtonConfig& cfg,
                                   StepInfo* info) {
  Traces z = holdall_traces(zbar, c);
  Traces t = interface_traces(u);
  const int N = c.n();
  const double h = c.h();
  auto lp = c.derivative();
  std::vector<double> b(N);
  for (int i = 0; i < N; ++i) b[i] = z.u_y[i] - lp[i] * z.u_x[i];

  // staggered least squares: ((u_x dl)_{i+1} - (u_x dl)_i)/h ~ b_{i+1/2}
  double t0 = 0.0, t1 = 0.0;
  if (std::isfinite(cfg.ell_left)) t0 = cfg.ell_left - c.ell.front();
  if (std::isfinite(cfg.ell_right)) t1 = cfg.ell_right - c.ell.back();
  double rho1 = cfg.rho1;
  StepInfo si;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * (N - 1) + 2, N);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * (N - 1) + 2);
    const double sw = std::sqrt(h), sr = std::sqrt(h / rho1), sp = std::sqrt(cfg.rho2);
    for (int i = 0; i + 1 < N; ++i) {
      A(i, i + 1) = sw * t.u_x[i + 1] / h;
      A(i, i) = -sw * t.u_x[i] / h;
      r[i] = sw * 0.5 * (b[i] + b[i + 1]);
      A(N - 1 + i, i + 1) = sr / h;
      A(N - 1 + i, i) = -sr / h;
    }
    A(2 * (N - 1), 0) = sp;
    r[2 * (N - 1)] = sp * t0;
    A(2 * (N - 1) + 1, N - 1) = sp;
    r[2 * (N - 1) + 1] = sp * t1;
    Eigen::MatrixXd G = A.transpose() * A;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-15) {
      Eigen::VectorXd d = ldlt.solve(A.transpose() * r);
      std::vector<double> dl(d.data(), d.data() + N);
      si.rho1_used = rho1;
      if (info) *info = si;
      return smooth(dl, c, cfg.smooth_modes);
    }
    si.singular_retry = true;
    rho1 /= 10.0;
  }
  throw std::runtime_error("neumann_update: normal matrix singular after 3 regularization increases");
}

ImpedanceCoeffs impedance_coeffs(const Curve& c, const std::vector<double>& gamma_phys, const Traces& t,
                                 bool use_flat_branch) {
  const int N = c.n();
  const double h = c.h();
  auto lp = c.derivative();
  auto lpp = c.second_derivative();
  auto gp = diff(gamma_phys, h);
  auto gt = combined_gamma(c, gamma_phys);
  auto ut = diff(t.u, h);  // tangential derivative d/dx u(x, l(x))
  ImpedanceCoeffs k;
  k.alpha.resize(N);
  k.beta.resize(N);
  k.c.resize(N);
  for (int i = 0; i < N; ++i) {
    double q = 1.0 + lp[i] * lp[i], sq = std::sqrt(q);
    k.alpha[i] = use_flat_branch ? t.u_x[i] : ut[i] / q;
    k.beta[i] = (lpp[i] * gamma_phys[i] / (q * sq) + lp[i] * gp[i] / sq + gamma_phys[i] * gamma_phys[i]) * t.u[i];
    k.c[i] = -(t.u_yy[i] - lp[i] * t.u_xy[i] + gt[i] * t.u_y[i]);
  }
  return k;
}

std::vector<double> impedance_update(const Curve& c, const std::vector<double>& gamma_phys, const MeshField& zbar,
                                     const MeshField& u, const NewtonConfig& cfg, StepInfo* info) {
  Traces z = holdall_traces(zbar, c);
  Traces t = interface_traces(u);
  const int N = c.n();
  const double h = c.h();
  auto lp = c.derivative();
  auto gt = combined_gamma(c, gamma_phys);
  ImpedanceCoeffs k = impedance_coeffs(c, gamma_phys, t);
  auto ap = diff(k.alpha, h);
  std::vector<double> b(N);
  for (int i = 0; i < N; ++i) b[i] = z.u_y[i] - lp[i] * z.u_x[i] + gt[i] * z.u[i];

  double amax = 0.0;
  for (double v : k.alpha) amax = std::max(amax, std::fabs(v));
  const double fl = 0.05 * amax;
  StepInfo si;
  // l'Hospital value b/(alpha' + beta), valid where alpha vanishes
  auto lh = [&](int i) {
    double d = ap[i] + k.beta[i];
    return std::fabs(d) > 1e-14 ? b[i] / d : 0.0;
  };
  int iL = 0;
  while (iL < N && std::fabs(k.alpha[iL]) < fl) ++iL;
  int iR = N - 1;
  while (iR >= 0 && std::fabs(k.alpha[iR]) < fl) --iR;
  if (iL >= iR) throw std::runtime_error("impedance_update: alpha vanishes on the whole interface");

  // phi' + (beta/alpha) phi = b by the trapezoid integrating factor, from both ends
  auto sweep = [&](int from, int to, int dir) {
    std::vector<double> phi(N, std::nan(""));
    phi[from] = k.alpha[from] * lh(from);
    for (int i = from; i != to; i += dir) {
      int j = i + dir;
      double qi = k.beta[i] / k.alpha[i], qj = k.beta[j] / k.alpha[j];
      double E = std::exp(-dir * 0.5 * h * (qi + qj));
      phi[j] = E * phi[i] + dir * 0.5 * h * (E * b[i] + b[j]);
    }
    return phi;
  };
  auto phiL = sweep(iL, iR, +1), phiR = sweep(iR, iL, -1);
  std::vector<double> dl(N, 0.0);
  int flagged = 0;
  bool overflow = false;
  for (int i = 0; i < N; ++i) {
    if (i < iL || i > iR) {
      dl[i] = lh(i);
      continue;
    }
    double w = static_cast<double>(i - iL) / (iR - iL);
    double phi = (1.0 - w) * phiL[i] + w * phiR[i];
    if (!std::isfinite(phi)) {
      overflow = true;
      continue;
    }
    if (std::fabs(k.alpha[i]) < fl) {
      ++flagged;
      continue;
    }
    dl[i] = phi / k.alpha[i];
  }
  si.flagged = flagged;
  si.overflow = overflow;
  if (info) *info = si;
  return smooth(dl, c, cfg.smooth_modes);
}

namespace {

using StepFn = std::function<std::vector<double>(const Curve&, const MeshField&, StepInfo*)>;

RecoveryTrace run_newton(const Curve& c0, const Problem2& p, const std::vector<double>& g, const NewtonConfig& cfg,
                         const Curve* truth, const StepFn& step) {
  RecoveryTrace tr;
  const double lmin = cfg.ell_min > 0 ? cfg.ell_min : 0.05 * c0.olell;
  const double lmax = cfg.ell_max > 0 ? cfg.ell_max : c0.olell;
  if (!(lmin > 0.0 && lmax <= c0.olell && lmin < lmax)) throw std::invalid_argument("newton: bad clamp interval");
  const double h = c0.h();
  const double gn = std::max(l2norm(g, h), 1e-300);
  Curve c = c0;
  for (auto& v : c.ell) v = std::clamp(v, lmin, lmax);
  std::vector<double> prev_dl;
  for (int k = 0;; ++k) {
    MeshField u = forward_field(p, c);
    auto flux = bottom_flux(u);
    std::vector<double> res(flux.size());
    for (size_t i = 0; i < res.size(); ++i) res[i] = flux[i] - g[i];
    tr.iterates.push_back(c);
    tr.residual_norms.push_back(l2norm(res, h) / gn);
    if (truth) tr.rel_errors.push_back(rel_l2_error(c.ell, truth->ell, h));
    if (p.kind == InterfaceBC::Kind::N && k == 0) {
      Traces t = interface_traces(u);
      if (flat_fraction(t) > 0.5) {
        tr.nonuniqueness = true;
        tr.warnings.push_back("u_x nearly vanishes on most of the interface: ell is not identifiable");
      }
    }
    if (k >= cfg.max_iter) break;
    StepInfo si;
    auto dl = step(c, u, &si);
    tr.flagged_points += si.flagged;
    if (si.overflow) {
      tr.warnings.push_back("integrating factor overflow at iteration " + std::to_string(k));
      if (prev_dl.empty()) break;
      dl = prev_dl;
      for (auto& v : dl) v *= 0.5;
      ++tr.halvings;
    }
    if (si.singular_retry) tr.warnings.push_back("neumann normal matrix regularization increased");
    // keep ell positive: shrink while any point would lose more than half its height
    for (int guard = 0; guard < 30; ++guard) {
      bool ok = true;
      for (size_t i = 0; i < dl.size(); ++i)
        if (dl[i] < -0.5 * c.ell[i]) ok = false;
      if (ok) break;
      for (auto& v : dl) v *= 0.5;
      ++tr.halvings;
    }
    Curve nc = c;
    for (size_t i = 0; i < dl.size(); ++i) nc.ell[i] = std::clamp(c.ell[i] + dl[i], lmin, lmax);
    std::vector<double> applied(dl.size());
    for (size_t i = 0; i < dl.size(); ++i) applied[i] = nc.ell[i] - c.ell[i];
    double upd = l2norm(applied, h) / l2norm(c.ell, h);
    tr.update_norms.push_back(upd);
    prev_dl = dl;
    c = nc;
    if (upd < cfg.stop_tol) {
      MeshField u2 = forward_field(p, c);
      auto f2 = bottom_flux(u2);
      for (size_t i = 0; i < res.size(); ++i) res[i] = f2[i] - g[i];
      tr.iterates.push_back(c);
      tr.residual_norms.push_back(l2norm(res, h) / gn);
      if (truth) tr.rel_errors.push_back(rel_l2_error(c.ell, truth->ell, h));
      break;
    }
  }
  return tr;
}

}  // namespace

RecoveryTrace newton_dirichlet(const Curve& curve0, const MeshField& zbar, const LateralBC& lateral,
                               const std::vector<double>& f, const std::vector<double>& g, const NewtonConfig& cfg,
                               const Curve* truth) {
  Problem2 p{lateral, InterfaceBC::Kind::D, {}, f, cfg.M};
  return run_newton(curve0, p, g, cfg, truth, [&](const Curve& c, const MeshField& u, StepInfo* si) {
    return dirichlet_update(c, zbar, u, cfg, si);
  });
}

RecoveryTrace newton_neumann(const Curve& curve0, const MeshField& zbar, const LateralBC& lateral,
                             const std::vector<double>& f, const std::vector<double>& g, const NewtonConfig& cfg,
                             const Curve* truth) {
  Problem2 p{lateral, InterfaceBC::Kind::N, {}, f, cfg.M};
  return run_newton(curve0, p, g, cfg, truth, [&](const Curve& c, const MeshField& u, StepInfo* si) {
    return neumann_update(c, zbar, u, cfg, si);
  });
}

RecoveryTrace newton_impedance(const Curve& curve0, const std::vector<double>& gamma_phys, const MeshField& zbar,
                               const LateralBC& lateral, const std::vector<double>& f, const std::vector<double>& g,
                               const NewtonConfig& cfg, const Curve* truth) {
  for (double v : gamma_phys)
    if (!(v > 0.0)) throw std::invalid_argument("newton_impedance: gamma must be > 0");
  Problem2 p{lateral, InterfaceBC::Kind::I, gamma_phys, f, cfg.M};
  return run_newton(curve0, p, g, cfg, truth, [&](const Curve& c, const MeshField& u, StepInfo* si) {
    return impedance_update(c, gamma_phys, zbar, u, cfg, si);
  });
}

}  // namespace fc
