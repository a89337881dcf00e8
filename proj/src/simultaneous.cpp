#include "fc/simultaneous.hpp"

#include "fc/freeboundary.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fc {

JointState joint_state(const Problem3& p, const Curve& ell, const std::vector<double>& gam) {
  JointState s;
  s.ell = ell;
  s.gam1 = s.gam2 = gam;
  s.u1 = solve_forward(ell, p.lateral, InterfaceBC::impedance(gam), p.f1, p.M);
  s.u2 = solve_forward(ell, p.lateral, InterfaceBC::impedance(gam), p.f2, p.M);
  return s;
}

std::vector<double> joint_rhs(const JointState& s, const MeshField& zbar, int j) {
  Traces z = holdall_traces(zbar, s.ell);
  auto lp = s.ell.derivative();
  const auto& g = j == 1 ? s.gam1 : s.gam2;
  std::vector<double> b(z.u.size());
  for (size_t i = 0; i < b.size(); ++i) b[i] = z.u_y[i] - lp[i] * z.u_x[i] + g[i] * z.u[i];
  return b;
}

std::vector<double> apply_G(const JointState& s, int j, const std::vector<double>& dl, const std::vector<double>& dg) {
  Traces t = interface_traces(j == 1 ? s.u1 : s.u2);
  const auto& g = j == 1 ? s.gam1 : s.gam2;
  const int N = s.ell.n();
  std::vector<double> prod(N);
  for (int i = 0; i < N; ++i) prod[i] = dl[i] * t.u_x[i];
  auto d = diff(prod, s.ell.h());
  std::vector<double> r(N);
  for (int i = 0; i < N; ++i) r[i] = d[i] - g[i] * t.u_y[i] * dl[i] - t.u[i] * dg[i];
  return r;
}

std::vector<double> wronskian(const MeshField& u1, const MeshField& u2, const Curve& curve) {
  Traces a = u1.mapped ? interface_traces(u1) : holdall_traces(u1, curve);
  Traces b = u2.mapped ? interface_traces(u2) : holdall_traces(u2, curve);
  std::vector<double> w(a.u.size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = a.u_x[i] * b.u[i] - b.u_x[i] * a.u[i];
  return w;
}

namespace {

void check_wronskian(const Traces& t1, const Traces& t2, const Curve& c, double floor) {
  const int N = c.n();
  double sc = 0.0;
  std::vector<double> w(N);
  for (int i = 0; i < N; ++i) {
    w[i] = t1.u_x[i] * t2.u[i] - t2.u_x[i] * t1.u[i];
    sc = std::max(sc, std::fabs(t1.u_x[i] * t2.u[i]) + std::fabs(t2.u_x[i] * t1.u[i]));
  }
  auto x = c.x();
  if (sc == 0.0) throw RankDeficiency("joint system rank deficient: both excitations vanish", 0.0, c.L);
  int best = 0, bs = 0, run = 0, rs = 0;
  for (int i = 0; i < N; ++i) {
    if (std::fabs(w[i]) <= floor * sc) {
      if (run == 0) rs = i;
      ++run;
      if (run > best) {
        best = run;
        bs = rs;
      }
    } else {
      run = 0;
    }
  }
  if (best >= N / 4) {
    double a = x[bs], b = x[bs + best - 1];
    throw RankDeficiency("joint system rank deficient: Wronskian vanishes on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]",
                         a, b);
  }
}

}  // namespace

JointStep joint_newton_step(const JointState& s, const MeshField& zbar1, const MeshField& zbar2,
                            const JointStepConfig& cfg) {
  const Curve& c = s.ell;
  const int N = c.n();
  const double h = c.h();
  auto x = c.x();
  Traces t1 = interface_traces(s.u1), t2 = interface_traces(s.u2);
  check_wronskian(t1, t2, c, cfg.wronskian_floor);
  auto b1 = joint_rhs(s, zbar1, 1), b2 = joint_rhs(s, zbar2, 2);

  const int Kl = cfg.J_ell, Kg = cfg.J_gam, nu = Kl + Kg;
  Eigen::MatrixXd Cl = cosine_matrix(x, c.L, Kl), Dl = cosine_dmatrix(x, c.L, Kl);
  Eigen::MatrixXd Cg = cosine_matrix(x, c.L, Kg);
  const int npin = cfg.pin_ends ? 4 : 0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * N + npin, nu);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * N + npin);
  const double sw = std::sqrt(h);
  auto fill = [&](const Traces& t, const std::vector<double>& g, const std::vector<double>& b, int off) {
    auto uxt = diff(t.u_x, h);
    for (int i = 0; i < N; ++i) {
      double w = sw * (i == 0 || i == N - 1 ? std::sqrt(0.5) : 1.0);
      for (int k = 0; k < Kl; ++k) A(off + i, k) = w * (t.u_x[i] * Dl(i, k) + (uxt[i] - g[i] * t.u_y[i]) * Cl(i, k));
      for (int k = 0; k < Kg; ++k) A(off + i, Kl + k) = -w * t.u[i] * Cg(i, k);
      r[off + i] = w * b[i];
    }
  };
  fill(t1, s.gam1, b1, 0);
  fill(t2, s.gam2, b2, N);

  Eigen::MatrixXd G = A.topRows(2 * N).transpose() * A.topRows(2 * N);
  const double gmax = G.diagonal().maxCoeff();
  if (cfg.pin_ends) {
    double wp = 1e3 * std::sqrt(gmax);
    for (int k = 0; k < Kl; ++k) {
      A(2 * N, k) = wp * Cl(0, k);
      A(2 * N + 1, k) = wp * Cl(N - 1, k);
    }
    for (int k = 0; k < Kg; ++k) {
      A(2 * N + 2, Kl + k) = wp * Cg(0, k);
      A(2 * N + 3, Kl + k) = wp * Cg(N - 1, k);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.topRows(2 * N));
  auto sv = svd.singularValues();
  JointStep out;
  out.sigma_ratio = sv[sv.size() - 1] / sv[0];
  if (!(out.sigma_ratio > 1e-13))
    throw RankDeficiency("joint system rank deficient (singular value ratio " + std::to_string(out.sigma_ratio) + ")",
                         0.0, c.L);

  Eigen::MatrixXd NM = A.transpose() * A;
  NM.diagonal().array() += cfg.reg * gmax;
  Eigen::VectorXd th = NM.ldlt().solve(A.transpose() * r);
  Eigen::VectorXd dl = Cl * th.head(Kl), dg = Cg * th.tail(Kg);
  out.dl.assign(dl.data(), dl.data() + N);
  out.dgam.assign(dg.data(), dg.data() + N);

  std::vector<double> bb(2 * N), rr(2 * N);
  auto g1 = apply_G(s, 1, out.dl, out.dgam), g2 = apply_G(s, 2, out.dl, out.dgam);
  for (int i = 0; i < N; ++i) {
    bb[i] = b1[i];
    bb[N + i] = b2[i];
    rr[i] = g1[i] - b1[i];
    rr[N + i] = g2[i] - b2[i];
  }
  out.rhs_norm = l2norm(bb, h);
  out.lin_residual = out.rhs_norm > 0 ? l2norm(rr, h) / out.rhs_norm : 0.0;
  return out;
}

EliminationCoeffs elimination_coeffs(const JointState& s, const MeshField& zbar1, const MeshField& zbar2) {
  Traces t1 = interface_traces(s.u1), t2 = interface_traces(s.u2);
  auto b1 = joint_rhs(s, zbar1, 1), b2 = joint_rhs(s, zbar2, 2);
  auto lp = s.ell.derivative();
  const int N = s.ell.n();
  EliminationCoeffs k;
  k.a.resize(N);
  k.beta.resize(N);
  k.b.resize(N);
  for (int i = 0; i < N; ++i) {
    k.a[i] = t1.u_x[i] * t2.u[i] - t2.u_x[i] * t1.u[i];
    k.beta[i] = lp[i] * (t1.u_x[i] * t2.u_y[i] - t2.u_x[i] * t1.u_y[i]) +
                s.gam1[i] * (t1.u_y[i] * t2.u[i] - t2.u_y[i] * t1.u[i]);
    k.b[i] = b1[i] * t2.u[i] - b2[i] * t1.u[i];
  }
  return k;
}

std::vector<double> eliminate_dl(const EliminationCoeffs& k, double h, double dl0, int i0, double floor_rel) {
  const int N = static_cast<int>(k.a.size());
  double amax = 0.0;
  for (double v : k.a) amax = std::max(amax, std::fabs(v));
  const double fl = floor_rel * amax;
  int iL = 0;
  while (iL < N && std::fabs(k.a[iL]) < fl) ++iL;
  int iR = N - 1;
  while (iR >= 0 && std::fabs(k.a[iR]) < fl) --iR;
  if (iL >= iR) throw std::runtime_error("eliminate_dl: |a~| below floor on the whole interval");
  for (int i = iL; i <= iR; ++i)
    if (std::fabs(k.a[i]) < fl)
      throw std::runtime_error("eliminate_dl: |a~| below floor near x = " + std::to_string(i * h));
  if (i0 < 0) i0 = iL;
  if (i0 < iL || i0 > iR) throw std::invalid_argument("eliminate_dl: start index outside the admissible interval");

  // (a dl)' - beta dl = b  <=>  phi' - (beta/a) phi = b, phi = a dl
  std::vector<double> phi(N, std::numeric_limits<double>::quiet_NaN());
  phi[i0] = k.a[i0] * dl0;
  for (int dir : {+1, -1}) {
    for (int i = i0; dir > 0 ? i < iR : i > iL; i += dir) {
      int j = i + dir;
      double qi = k.beta[i] / k.a[i], qj = k.beta[j] / k.a[j];
      double E = std::exp(dir * 0.5 * h * (qi + qj));
      phi[j] = E * phi[i] + dir * 0.5 * h * (E * k.b[i] + k.b[j]);
    }
  }
  std::vector<double> dl(N, std::numeric_limits<double>::quiet_NaN());
  for (int i = iL; i <= iR; ++i) dl[i] = phi[i] / k.a[i];
  return dl;
}

std::vector<double> eliminate_dl(const JointState& s, const MeshField& zbar1, const MeshField& zbar2, double dl0,
                                 int i0, double floor_rel) {
  return eliminate_dl(elimination_coeffs(s, zbar1, zbar2), s.ell.h(), dl0, i0, floor_rel);
}

std::vector<double> eliminate_dgam(const JointState& s, const std::vector<double>& dl, const std::vector<double>& b1) {
  Traces t = interface_traces(s.u1);
  const int N = s.ell.n();
  double umax = 0.0;
  for (double v : t.u) umax = std::max(umax, std::fabs(v));
  std::vector<double> prod(N);
  for (int i = 0; i < N; ++i) prod[i] = dl[i] * t.u_x[i];
  auto d = diff(prod, s.ell.h());
  std::vector<double> dg(N);
  for (int i = 0; i < N; ++i) {
    if (std::fabs(t.u[i]) < 1e-8 * umax)
      throw std::runtime_error("eliminate_dgam: u_1 vanishes near x = " + std::to_string(i * s.ell.h()));
    dg[i] = (d[i] - dl[i] * s.gam1[i] * t.u_y[i] - b1[i]) / t.u[i];
  }
  return dg;
}

JointTrace recover_joint(const Problem3& p, const Curve& ell0, const std::vector<double>& gam0,
                         const MeshField& zbar1, const MeshField& zbar2, const std::vector<double>& g1,
                         const std::vector<double>& g2, const JointRecoveryConfig& cfg, const Curve* ell_true,
                         const std::vector<double>* gam_true) {
  JointTrace tr;
  Curve c = ell0;
  std::vector<double> gam = gam0;
  const double h = c.h();
  const double lmin = 0.05 * c.olell, lmax = c.olell;
  const double gn = std::hypot(l2norm(g1, h), l2norm(g2, h));
  auto record = [&](const JointState& s) {
    tr.ell.push_back(s.ell);
    tr.gam.push_back(s.gam1);
    tr.residual_norms.push_back(std::hypot(l2norm(joint_rhs(s, zbar1, 1), h), l2norm(joint_rhs(s, zbar2, 2), h)) / gn);
    if (ell_true) tr.relerr_ell.push_back(rel_l2_error(s.ell.ell, ell_true->ell, h));
    if (gam_true) tr.relerr_gam.push_back(rel_l2_error(s.gam1, *gam_true, h));
  };
  for (int k = 0;; ++k) {
    JointState s = joint_state(p, c, gam);
    record(s);
    if (k >= cfg.max_iter) break;
    JointStep st = joint_newton_step(s, zbar1, zbar2, cfg.step);
    // keep ell and gamma~ positive
    for (int guard = 0; guard < 30; ++guard) {
      bool ok = true;
      for (size_t i = 0; i < st.dl.size(); ++i)
        if (st.dl[i] < -0.5 * c.ell[i] || st.dgam[i] < -0.5 * gam[i]) ok = false;
      if (ok) break;
      for (auto& v : st.dl) v *= 0.5;
      for (auto& v : st.dgam) v *= 0.5;
      tr.warnings.push_back("update halved at iteration " + std::to_string(k));
    }
    const double ln = l2norm(c.ell, h), gnn = l2norm(gam, h);
    std::vector<double> app(2 * st.dl.size());
    for (size_t i = 0; i < st.dl.size(); ++i) {
      double nl = std::clamp(c.ell[i] + st.dl[i], lmin, lmax);
      double ng = std::max(gam[i] + st.dgam[i], cfg.gam_min);
      app[i] = (nl - c.ell[i]) / ln;
      app[st.dl.size() + i] = (ng - gam[i]) / gnn;
      c.ell[i] = nl;
      gam[i] = ng;
    }
    if (l2norm(app, h) < cfg.stop_tol) {
      record(joint_state(p, c, gam));
      break;
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// all-at-once

namespace {

Eigen::MatrixXd mode_derivatives(const EigenBasis& B) {
  Eigen::MatrixXd D(B.N, B.J);
  std::vector<double> col(B.N);
  for (int k = 0; k < B.J; ++k) {
    for (int i = 0; i < B.N; ++i) col[i] = B.modes(i, k);
    auto d = diff(col, B.h);
    for (int i = 0; i < B.N; ++i) D(i, k) = d[i];
  }
  return D;
}

// cosh(s y), sinh(s y)/s and their y-derivatives
struct Hyp {
  double C, S, Cy, Sy;
};
Hyp hyp(double lam, double y) {
  double s = std::sqrt(std::max(lam, 0.0));
  if (s == 0.0) return {1.0, y, 0.0, 1.0};
  double ch = std::cosh(s * y), sh = std::sinh(s * y);
  return {ch, sh / s, s * sh, ch};
}

}  // namespace

Traces modal_traces(const ModalField& u, const Curve& curve) {
  const auto& B = *u.basis;
  if (curve.n() != B.N) throw std::invalid_argument("modal_traces: grid mismatch");
  Eigen::MatrixXd D = mode_derivatives(B);
  Traces t;
  const int N = B.N;
  t.u.assign(N, 0.0);
  t.u_x.assign(N, 0.0);
  t.u_y.assign(N, 0.0);
  t.u_yy.assign(N, 0.0);
  t.u_xy.assign(N, 0.0);
  for (int i = 0; i < N; ++i) {
    const double y = curve.ell[i];
    for (int k = 0; k < B.J; ++k) {
      Hyp hy = hyp(B.lambdas[k], y);
      double v = u.p[k] * hy.C + u.q[k] * hy.S;
      double vy = u.p[k] * hy.Cy + u.q[k] * hy.Sy;
      t.u[i] += B.modes(i, k) * v;
      t.u_y[i] += B.modes(i, k) * vy;
      t.u_yy[i] += B.modes(i, k) * B.lambdas[k] * v;
      t.u_x[i] += D(i, k) * v;
      t.u_xy[i] += D(i, k) * vy;
    }
  }
  return t;
}

std::vector<double> modal_bottom_flux(const ModalField& u) { return synthesize({u.basis, u.q}); }

ModalField modal_forward_flat(const BasisPtr& b, const std::vector<double>& f, double ell, double gam) {
  ModalField u{b, analyze(f, b).c, Eigen::VectorXd(b->J)};
  for (int k = 0; k < b->J; ++k) {
    Hyp hy = hyp(b->lambdas[k], ell);
    u.q[k] = -u.p[k] * (hy.Cy + gam * hy.C) / (hy.Sy + gam * hy.S);
  }
  return u;
}

ModalField modal_forward(const BasisPtr& b, const std::vector<double>& f, const Curve& ell,
                         const std::vector<double>& gam) {
  const auto& B = *b;
  if (ell.n() != B.N || static_cast<int>(gam.size()) != B.N) throw std::invalid_argument("modal_forward: grid mismatch");
  Eigen::MatrixXd D = mode_derivatives(B);
  auto lp = ell.derivative();
  ModalField u{b, analyze(f, b).c, Eigen::VectorXd(B.J)};
  Eigen::MatrixXd A(B.N, B.J);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(B.N);
  for (int i = 0; i < B.N; ++i)
    for (int k = 0; k < B.J; ++k) {
      Hyp hy = hyp(B.lambdas[k], ell.ell[i]);
      A(i, k) = B.modes(i, k) * hy.Sy - lp[i] * D(i, k) * hy.S + gam[i] * B.modes(i, k) * hy.S;
      r[i] -= u.p[k] * (B.modes(i, k) * hy.Cy - lp[i] * D(i, k) * hy.C + gam[i] * B.modes(i, k) * hy.C);
    }
  Eigen::VectorXd cs = A.colwise().norm().cwiseInverse();
  Eigen::VectorXd y = (A * cs.asDiagonal()).colPivHouseholderQr().solve(r);
  u.q = cs.cwiseProduct(y);
  return u;
}

namespace {

// B_{l,g} u on the curve
std::vector<double> interface_op(const Traces& t, const Curve& c, const std::vector<double>& g) {
  auto lp = c.derivative();
  std::vector<double> r(t.u.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = t.u_y[i] - lp[i] * t.u_x[i] + g[i] * t.u[i];
  return r;
}

struct Layout {
  int J, Kl, Kg;
  int n() const { return 4 * J + Kl + 2 * Kg; }
  int p(int j) const { return (j - 1) * 2 * J; }
  int q(int j) const { return (j - 1) * 2 * J + J; }
  int l() const { return 4 * J; }
  int g(int j) const { return 4 * J + Kl + (j - 1) * Kg; }
};

AllAtOnceState apply_coords(const AllAtOnceState& x0, const Eigen::VectorXd& z, const Layout& lay,
                            const Eigen::MatrixXd& Cl, const Eigen::MatrixXd& Cg) {
  AllAtOnceState x = x0;
  x.u1.p += z.segment(lay.p(1), lay.J);
  x.u1.q += z.segment(lay.q(1), lay.J);
  x.u2.p += z.segment(lay.p(2), lay.J);
  x.u2.q += z.segment(lay.q(2), lay.J);
  Eigen::VectorXd dl = Cl * z.segment(lay.l(), lay.Kl);
  Eigen::VectorXd d1 = Cg * z.segment(lay.g(1), lay.Kg), d2 = Cg * z.segment(lay.g(2), lay.Kg);
  for (size_t i = 0; i < x.ell.ell.size(); ++i) {
    x.ell.ell[i] += dl[i];
    x.gam1[i] += d1[i];
    x.gam2[i] += d2[i];
  }
  return x;
}

// residual F~(xi) - h: [p_j - f_j; q_j - g_j; sqrt(h) B u_j] for j = 1, 2
Eigen::VectorXd residual(const AllAtOnceState& x, const Eigen::VectorXd& f1, const Eigen::VectorXd& g1,
                         const Eigen::VectorXd& f2, const Eigen::VectorXd& g2) {
  const int J = x.u1.basis->J, N = x.ell.n();
  const double sw = std::sqrt(x.ell.h());
  Eigen::VectorXd r(2 * (2 * J + N));
  int o = 0;
  for (int j = 1; j <= 2; ++j) {
    const ModalField& u = j == 1 ? x.u1 : x.u2;
    r.segment(o, J) = u.p - (j == 1 ? f1 : f2);
    r.segment(o + J, J) = u.q - (j == 1 ? g1 : g2);
    auto b = interface_op(modal_traces(u, x.ell), x.ell, j == 1 ? x.gam1 : x.gam2);
    for (int i = 0; i < N; ++i) r[o + 2 * J + i] = sw * b[i];
    o += 2 * J + N;
  }
  return r;
}

Eigen::MatrixXd jacobian(const AllAtOnceState& x, const Layout& lay, const Eigen::MatrixXd& Cl,
                         const Eigen::MatrixXd& Dl, const Eigen::MatrixXd& Cg) {
  const auto& B = *x.u1.basis;
  const int J = B.J, N = x.ell.n();
  const double sw = std::sqrt(x.ell.h());
  auto lp = x.ell.derivative();
  Eigen::MatrixXd D = mode_derivatives(B);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * (2 * J + N), lay.n());
  int o = 0;
  for (int j = 1; j <= 2; ++j) {
    const ModalField& u = j == 1 ? x.u1 : x.u2;
    const auto& g = j == 1 ? x.gam1 : x.gam2;
    for (int k = 0; k < J; ++k) {
      K(o + k, lay.p(j) + k) = 1.0;
      K(o + J + k, lay.q(j) + k) = 1.0;
    }
    Traces t = modal_traces(u, x.ell);
    for (int i = 0; i < N; ++i) {
      const int r = o + 2 * J + i;
      for (int k = 0; k < J; ++k) {
        Hyp hy = hyp(B.lambdas[k], x.ell.ell[i]);
        K(r, lay.p(j) + k) = sw * (B.modes(i, k) * hy.Cy - lp[i] * D(i, k) * hy.C + g[i] * B.modes(i, k) * hy.C);
        K(r, lay.q(j) + k) = sw * (B.modes(i, k) * hy.Sy - lp[i] * D(i, k) * hy.S + g[i] * B.modes(i, k) * hy.S);
      }
      double cl = t.u_yy[i] - lp[i] * t.u_xy[i] + g[i] * t.u_y[i];
      for (int m = 0; m < lay.Kl; ++m) K(r, lay.l() + m) = sw * (cl * Cl(i, m) - t.u_x[i] * Dl(i, m));
      for (int m = 0; m < lay.Kg; ++m) K(r, lay.g(j) + m) = sw * t.u[i] * Cg(i, m);
    }
    o += 2 * J + N;
  }
  return K;
}

// penalty P = (gamma~_1 - gamma~_2 on the grid, ell(0) - ell0): affine in z
void penalty(const AllAtOnceState& x0, const PenaltyOp& pen, const Layout& lay, const Eigen::MatrixXd& Cl,
             const Eigen::MatrixXd& Cg, Eigen::MatrixXd& P, Eigen::VectorXd& P0) {
  const int N = x0.ell.n();
  const double sw = std::sqrt(x0.ell.h());
  P = Eigen::MatrixXd::Zero(N + 1, lay.n());
  P0 = Eigen::VectorXd::Zero(N + 1);
  for (int i = 0; i < N; ++i) {
    for (int m = 0; m < lay.Kg; ++m) {
      P(i, lay.g(1) + m) = sw * Cg(i, m);
      P(i, lay.g(2) + m) = -sw * Cg(i, m);
    }
    P0[i] = sw * (x0.gam1[i] - x0.gam2[i]);
  }
  for (int m = 0; m < lay.Kl; ++m) P(N, lay.l() + m) = Cl(0, m);
  P0[N] = x0.ell.ell[0] - pen.ell0_endpoint;
}

Eigen::VectorXd weights(const AllAtOnceState& x0, const Layout& lay, double e) {
  const auto& B = *x0.u1.basis;
  Eigen::VectorXd w(lay.n());
  for (int j = 1; j <= 2; ++j)
    for (int k = 0; k < lay.J; ++k) {
      double v = std::pow(1.0 + B.lambdas[k], 2.0 * e);
      w[lay.p(j) + k] = v;
      w[lay.q(j) + k] = v / (1.0 + B.lambdas[k]);
    }
  for (int m = 0; m < lay.Kl; ++m) {
    double km = m * M_PI / x0.ell.L;
    w[lay.l() + m] = 1.0 + km * km;
  }
  for (int m = 0; m < lay.Kg; ++m) w[lay.g(1) + m] = w[lay.g(2) + m] = 1.0;
  return w;
}

}  // namespace

Eigen::VectorXd stacked_singular_values(const AllAtOnceState& xi0, const PenaltyOp& pen,
                                        const FrozenNewtonConfig& cfg) {
  Layout lay{xi0.u1.basis->J, cfg.J_ell, cfg.J_gam};
  auto x = xi0.ell.x();
  Eigen::MatrixXd Cl = cosine_matrix(x, xi0.ell.L, lay.Kl), Dl = cosine_dmatrix(x, xi0.ell.L, lay.Kl);
  Eigen::MatrixXd Cg = cosine_matrix(x, xi0.ell.L, lay.Kg);
  Eigen::MatrixXd K = jacobian(xi0, lay, Cl, Dl, Cg), P;
  Eigen::VectorXd P0;
  penalty(xi0, pen, lay, Cl, Cg, P, P0);
  Eigen::MatrixXd S(K.rows() + P.rows(), lay.n());
  S << K, P;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  return svd.singularValues();
}

FrozenResult frozen_newton(const CauchyData& d1, const CauchyData& d2, const AllAtOnceState& xi0,
                           const PenaltyOp& pen, const FrozenNewtonConfig& cfg, const Curve* ell_true,
                           const std::vector<double>* gam_true) {
  if (!(cfg.alpha0 > 0.0 && cfg.theta > 0.0 && cfg.theta < 1.0 && cfg.tau > 1.0))
    throw std::invalid_argument("frozen_newton: need alpha0 > 0, theta in (0,1), tau > 1");
  Layout lay{xi0.u1.basis->J, cfg.J_ell, cfg.J_gam};
  auto x = xi0.ell.x();
  const double h = xi0.ell.h();
  Eigen::MatrixXd Cl = cosine_matrix(x, xi0.ell.L, lay.Kl), Dl = cosine_dmatrix(x, xi0.ell.L, lay.Kl);
  Eigen::MatrixXd Cg = cosine_matrix(x, xi0.ell.L, lay.Kg);
  Eigen::VectorXd f1 = analyze(d1.f, xi0.u1.basis).c, g1 = analyze(d1.g, xi0.u1.basis).c;
  Eigen::VectorXd f2 = analyze(d2.f, xi0.u1.basis).c, g2 = analyze(d2.g, xi0.u1.basis).c;

  Eigen::MatrixXd K = jacobian(xi0, lay, Cl, Dl, Cg), P;
  Eigen::VectorXd P0;
  penalty(xi0, pen, lay, Cl, Cg, P, P0);
  Eigen::VectorXd W = weights(xi0, lay, cfg.weight_exp);
  Eigen::MatrixXd KtK = K.transpose() * K + P.transpose() * P;

  const double delta = std::max(d1.delta, d2.delta);
  FrozenResult res;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(lay.n());
  AllAtOnceState cur = xi0;
  Eigen::VectorXd r0 = residual(cur, f1, g1, f2, g2);
  const double rn0 = r0.norm();
  auto log = [&](int n, double a, const AllAtOnceState& s, const Eigen::VectorXd& r) {
    FrozenIter it;
    it.n = n;
    it.alpha = a;
    it.residual = r.norm();
    if (ell_true) it.relerr_ell = rel_l2_error(s.ell.ell, ell_true->ell, h);
    if (gam_true) it.relerr_gam = rel_l2_error(s.gam1, *gam_true, h);
    res.trace.push_back(it);
  };
  log(0, cfg.alpha0, cur, r0);
  double alpha = cfg.alpha0;
  int n = 0;
  for (; n < cfg.max_iter; ++n) {
    if (n > 0 && alpha <= (cfg.tau * delta) * (cfg.tau * delta)) {
      res.stopped_by_discrepancy = true;
      break;
    }
    Eigen::VectorXd r = residual(cur, f1, g1, f2, g2);
    if (!r.allFinite() || r.norm() > 10.0 * rn0 + 1e-300) throw std::runtime_error("frozen_newton: divergence");
    Eigen::MatrixXd A = KtK;
    const double a = alpha;
    A.diagonal() += a * W;
    Eigen::VectorXd rhs = -K.transpose() * r - P.transpose() * (P * z + P0) - a * W.cwiseProduct(z);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("frozen_newton: normal system solve failed");
    z += ldlt.solve(rhs);
    cur = apply_coords(xi0, z, lay, Cl, Cg);
    for (double v : cur.ell.ell)
      if (!(v > 0.0)) throw std::runtime_error("frozen_newton: curve left the admissible set");
    alpha *= cfg.theta;
    log(n + 1, alpha, cur, residual(cur, f1, g1, f2, g2));
  }
  res.n_star = n;
  res.xi = cur;
  res.nstar_conditions = n > 0 && alpha < cfg.alpha0 && delta * delta / (alpha / cfg.theta) < 1.0;
  return res;
}

double range_invariance_residual(const AllAtOnceState& xi, const AllAtOnceState& xi0) {
  const Curve& c = xi.ell;
  const Curve& c0 = xi0.ell;
  const int N = c.n();
  auto lp0 = c0.derivative();
  auto dlp = diff([&] {
    std::vector<double> d(N);
    for (int i = 0; i < N; ++i) d[i] = c.ell[i] - c0.ell[i];
    return d;
  }(), c.h());
  double acc = 0.0;
  for (int j = 1; j <= 2; ++j) {
    const ModalField& u = j == 1 ? xi.u1 : xi.u2;
    const ModalField& u0 = j == 1 ? xi0.u1 : xi0.u2;
    const auto& g = j == 1 ? xi.gam1 : xi.gam2;
    const auto& g0 = j == 1 ? xi0.gam1 : xi0.gam2;
    auto Bu = interface_op(modal_traces(u, c), c, g);
    auto B0u = interface_op(modal_traces(u, c0), c0, g0);
    Traces t0 = modal_traces(u0, c0);
    double umax = 0.0;
    for (double v : t0.u) umax = std::max(umax, std::fabs(v));
    std::vector<double> r(N);
    for (int i = 0; i < N; ++i) {
      if (std::fabs(t0.u[i]) < 1e-8 * umax)
        throw std::runtime_error("range_invariance_residual: u_0 vanishes on the reference curve");
      double dl = c.ell[i] - c0.ell[i];
      double rg = (Bu[i] - B0u[i] - (t0.u_yy[i] - lp0[i] * t0.u_xy[i] + g0[i] * t0.u_y[i]) * dl + dlp[i] * t0.u_x[i]) /
                  t0.u[i];
      r[i] = rg - (g[i] - g0[i]);
    }
    double n = l2norm(r, c.h());
    acc += n * n;
  }
  return std::sqrt(acc);
}

}  // namespace fc
