#include "fc/elliptic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fc {

std::vector<double> diff(const std::vector<double>& v, double h) {
  const int n = static_cast<int>(v.size());
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> Curve::derivative() const { return diff(ell, h()); }

std::vector<double> Curve::second_derivative() const {
  const int N = n();
  const double hh = h();
  std::vector<double> d(N, 0.0);
  if (N < 4) return d;
  for (int i = 1; i + 1 < N; ++i) d[i] = (ell[i + 1] - 2.0 * ell[i] + ell[i - 1]) / (hh * hh);
  d[0] = (2.0 * ell[0] - 5.0 * ell[1] + 4.0 * ell[2] - ell[3]) / (hh * hh);
  d[N - 1] = (2.0 * ell[N - 1] - 5.0 * ell[N - 2] + 4.0 * ell[N - 3] - ell[N - 4]) / (hh * hh);
  return d;
}

void Curve::validate() const {
  if (n() < 4) throw std::invalid_argument("curve: need at least 4 samples");
  for (double v : ell)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("curve: non-positive ell");
  for (double v : ell)
    if (v > olell * (1.0 + 1e-12)) throw std::invalid_argument("curve: ell exceeds hold-all height");
}

std::vector<double> combined_gamma(const Curve& c, const std::vector<double>& gamma) {
  auto lp = c.derivative();
  std::vector<double> g(gamma.size());
  for (size_t i = 0; i < g.size(); ++i) g[i] = std::sqrt(1.0 + lp[i] * lp[i]) * gamma[i];
  return g;
}

std::string to_string(InterfaceBC::Kind k) {
  switch (k) {
    case InterfaceBC::Kind::N: return "N";
    case InterfaceBC::Kind::D: return "D";
    case InterfaceBC::Kind::I: return "I";
  }
  return "?";
}

InterfaceBC::Kind interface_kind_from_string(const std::string& s) {
  if (s == "N" || s == "neumann") return InterfaceBC::Kind::N;
  if (s == "D" || s == "dirichlet") return InterfaceBC::Kind::D;
  if (s == "I" || s == "impedance") return InterfaceBC::Kind::I;
  throw std::invalid_argument("unknown interface case '" + s + "' (expected D, N or I)");
}

double MeshField::y(int i, int m) const {
  if (mapped) return curve.ell[i] * m / (M - 1.0);
  return ys[m];
}

void write_csv(std::ostream& os, const MeshField& f) {
  os << "# N=" << f.N << " M=" << f.M << " L=" << f.L << " olell=" << f.olell
     << " layout=" << (f.mapped ? "mapped" : "holdall") << "\n";
  char buf[32];
  for (int i = 0; i < f.N; ++i) {
    for (int m = 0; m < f.M; ++m) {
      std::snprintf(buf, sizeof buf, "%.10g", f.at(i, m));
      os << (m ? "," : "") << buf;
    }
    os << "\n";
  }
}

std::vector<std::string> corner_compatibility(const Curve& curve, const LateralBC& lateral,
                                              const std::vector<double>& f) {
  std::vector<std::string> w;
  const double h = curve.h();
  auto fp = diff(f, h);
  const int n = static_cast<int>(f.size());
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-6 * scale + 10.0 * h * h * scale;
  double r0 = 0.0, r1 = 0.0;
  switch (lateral.kind) {
    case LateralBC::Kind::dirichlet:
      r0 = f[0];
      r1 = f[n - 1];
      break;
    case LateralBC::Kind::neumann:
      r0 = fp[0];
      r1 = fp[n - 1];
      break;
    case LateralBC::Kind::robin:
      r0 = -fp[0] + lateral.robin_coeff * f[0];
      r1 = fp[n - 1] + lateral.robin_coeff * f[n - 1];
      break;
  }
  if (std::fabs(r0) > tol) w.push_back("bottom data incompatible with lateral condition at x=0 (defect " +
                                         std::to_string(r0) + ")");
  if (std::fabs(r1) > tol) w.push_back("bottom data incompatible with lateral condition at x=L (defect " +
                                         std::to_string(r1) + ")");
  return w;
}

namespace {

using Trip = Eigen::Triplet<double>;

struct System {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
};

System assemble(const Curve& c, const LateralBC& lat, const InterfaceBC& ifc, const std::vector<double>& f, int M,
                const ForwardExtras* ex) {
  const int N = c.n();
  const double h = c.h(), k = 1.0 / (M - 1);
  const auto lp = c.derivative();
  const auto lpp = c.second_derivative();
  const auto& l = c.ell;
  auto id = [M](int i, int m) { return i * M + m; };

  std::vector<Trip> T;
  T.reserve(static_cast<size_t>(N) * M * 9);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N * M);

  for (int i = 0; i < N; ++i) {
    for (int m = 0; m < M; ++m) {
      const int r = id(i, m);
      const double eta = m * k;
      if (m == 0) {
        T.emplace_back(r, r, 1.0);
        b[r] = f[i];
        continue;
      }
      if (m == M - 1) {
        double rhs = ex && !ex->interface_rhs.empty() ? ex->interface_rhs[i] : 0.0;
        if (ifc.kind == InterfaceBC::Kind::D) {
          T.emplace_back(r, r, 1.0);
          b[r] = rhs;
          continue;
        }
        // (1+l'^2)/l U_eta - l' U_x + gamma~ U
        double ce = (1.0 + lp[i] * lp[i]) / l[i] / (2.0 * k);
        T.emplace_back(r, id(i, m), 3.0 * ce);
        T.emplace_back(r, id(i, m - 1), -4.0 * ce);
        T.emplace_back(r, id(i, m - 2), ce);
        double cx = -lp[i] / (2.0 * h);
        if (i == 0) {
          T.emplace_back(r, id(0, m), -3.0 * cx);
          T.emplace_back(r, id(1, m), 4.0 * cx);
          T.emplace_back(r, id(2, m), -cx);
        } else if (i == N - 1) {
          T.emplace_back(r, id(N - 1, m), 3.0 * cx);
          T.emplace_back(r, id(N - 2, m), -4.0 * cx);
          T.emplace_back(r, id(N - 3, m), cx);
        } else {
          T.emplace_back(r, id(i + 1, m), cx);
          T.emplace_back(r, id(i - 1, m), -cx);
        }
        if (ifc.kind == InterfaceBC::Kind::I) T.emplace_back(r, r, ifc.gamma[i]);
        b[r] = rhs;
        continue;
      }
      if (i == 0 || i == N - 1) {
        if (lat.kind == LateralBC::Kind::dirichlet) {
          T.emplace_back(r, r, 1.0);
          continue;
        }
        // outward derivative -u_x at x=0, +u_x at x=L; u_x = U_x - eta l'/l U_eta
        const double s = i == 0 ? -1.0 : 1.0;
        const double cx = s / (2.0 * h);
        if (i == 0) {
          T.emplace_back(r, id(0, m), -3.0 * cx);
          T.emplace_back(r, id(1, m), 4.0 * cx);
          T.emplace_back(r, id(2, m), -cx);
        } else {
          T.emplace_back(r, id(N - 1, m), 3.0 * cx);
          T.emplace_back(r, id(N - 2, m), -4.0 * cx);
          T.emplace_back(r, id(N - 3, m), cx);
        }
        const double ce = -s * eta * lp[i] / l[i] / (2.0 * k);
        T.emplace_back(r, id(i, m + 1), ce);
        T.emplace_back(r, id(i, m - 1), -ce);
        if (lat.kind == LateralBC::Kind::robin) T.emplace_back(r, r, lat.robin_coeff);
        continue;
      }
      // l^2 U_xx - 2 eta l l' U_xeta + (eta^2 l'^2 + 1) U_etaeta + eta (2 l'^2 - l l'') U_eta = 0
      const double a_xx = l[i] * l[i] / (h * h);
      const double a_xe = -2.0 * eta * l[i] * lp[i] / (4.0 * h * k);
      const double a_ee = (eta * eta * lp[i] * lp[i] + 1.0) / (k * k);
      const double a_e = eta * (2.0 * lp[i] * lp[i] - l[i] * lpp[i]) / (2.0 * k);
      T.emplace_back(r, id(i + 1, m), a_xx);
      T.emplace_back(r, id(i - 1, m), a_xx);
      T.emplace_back(r, id(i, m + 1), a_ee + a_e);
      T.emplace_back(r, id(i, m - 1), a_ee - a_e);
      T.emplace_back(r, r, -2.0 * a_xx - 2.0 * a_ee);
      T.emplace_back(r, id(i + 1, m + 1), a_xe);
      T.emplace_back(r, id(i - 1, m - 1), a_xe);
      T.emplace_back(r, id(i + 1, m - 1), -a_xe);
      T.emplace_back(r, id(i - 1, m + 1), -a_xe);
    }
  }
  System s;
  s.A.resize(N * M, N * M);
  s.A.setFromTriplets(T.begin(), T.end());
  s.b = b;
  return s;
}

}  // namespace

MeshField solve_forward(const Curve& curve, const LateralBC& lateral, const InterfaceBC& iface,
                        const std::vector<double>& f, int M, const ForwardExtras* extras) {
  curve.validate();
  const int N = curve.n();
  if (static_cast<int>(f.size()) != N) throw std::invalid_argument("solve_forward: f length mismatch");
  if (M < 4) throw std::invalid_argument("solve_forward: need M >= 4");
  if (iface.kind == InterfaceBC::Kind::I) {
    if (static_cast<int>(iface.gamma.size()) != N) throw std::invalid_argument("solve_forward: gamma length");
    for (double g : iface.gamma)
      if (!(g > 0.0)) throw std::invalid_argument("solve_forward: impedance coefficient must be > 0");
  }
  if (extras && !extras->interface_rhs.empty() && static_cast<int>(extras->interface_rhs.size()) != N)
    throw std::invalid_argument("solve_forward: interface_rhs length");

  System s = assemble(curve, lateral, iface, f, M, extras);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(s.A);
  lu.factorize(s.A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve_forward: factorization failed");
  Eigen::VectorXd x = lu.solve(s.b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw std::runtime_error("solve_forward: solve failed");

  MeshField F;
  F.N = N;
  F.M = M;
  F.L = curve.L;
  F.olell = curve.olell;
  F.mapped = true;
  F.curve = curve;
  F.lateral = lateral;
  F.iface = iface;
  F.values.assign(x.data(), x.data() + x.size());
  F.warnings = corner_compatibility(curve, lateral, f);
  return F;
}

double interior_residual(const MeshField& field) {
  if (!field.mapped) throw std::invalid_argument("interior_residual: mapped field required");
  std::vector<double> f(field.N);
  for (int i = 0; i < field.N; ++i) f[i] = field.at(i, 0);
  System s = assemble(field.curve, field.lateral, field.iface, f, field.M, nullptr);
  Eigen::Map<const Eigen::VectorXd> x(field.values.data(), field.values.size());
  Eigen::VectorXd r = s.A * x - s.b;
  double mx = 0.0;
  for (int i = 1; i + 1 < field.N; ++i)
    for (int m = 1; m + 1 < field.M; ++m) mx = std::max(mx, std::fabs(r[i * field.M + m]));
  return mx;
}

std::vector<double> bottom_flux(const MeshField& F) {
  std::vector<double> g(F.N);
  if (F.mapped) {
    const double k = 1.0 / (F.M - 1);
    for (int i = 0; i < F.N; ++i)
      g[i] = (-3.0 * F.at(i, 0) + 4.0 * F.at(i, 1) - F.at(i, 2)) / (2.0 * k) / F.curve.ell[i];
  } else {
    for (int i = 0; i < F.N; ++i) {
      double y0 = F.ys[0], y1 = F.ys[1], y2 = F.ys[2];
      // derivative of the quadratic interpolant at y0
      double w0 = (2 * y0 - y1 - y2) / ((y0 - y1) * (y0 - y2));
      double w1 = (y0 - y2) / ((y1 - y0) * (y1 - y2));
      double w2 = (y0 - y1) / ((y2 - y0) * (y2 - y1));
      g[i] = w0 * F.at(i, 0) + w1 * F.at(i, 1) + w2 * F.at(i, 2);
    }
  }
  return g;
}

Traces interface_traces(const MeshField& F) {
  if (!F.mapped) throw std::invalid_argument("interface_traces: use holdall_traces for hold-all fields");
  const int N = F.N, M = F.M;
  const double k = 1.0 / (M - 1), h = F.curve.h();
  const auto& l = F.curve.ell;
  const auto lp = F.curve.derivative();
  std::vector<double> U(N), Ue(N), Uee(N);
  for (int i = 0; i < N; ++i) {
    const int t = M - 1;
    U[i] = F.at(i, t);
    Ue[i] = (3.0 * F.at(i, t) - 4.0 * F.at(i, t - 1) + F.at(i, t - 2)) / (2.0 * k);
    Uee[i] = (2.0 * F.at(i, t) - 5.0 * F.at(i, t - 1) + 4.0 * F.at(i, t - 2) - F.at(i, t - 3)) / (k * k);
  }
  auto Ux = diff(U, h), Uxe = diff(Ue, h);
  Traces T;
  T.u = U;
  T.u_x.resize(N);
  T.u_y.resize(N);
  T.u_yy.resize(N);
  T.u_xy.resize(N);
  for (int i = 0; i < N; ++i) {
    T.u_x[i] = Ux[i] - lp[i] / l[i] * Ue[i];
    T.u_y[i] = Ue[i] / l[i];
    T.u_yy[i] = Uee[i] / (l[i] * l[i]);
    T.u_xy[i] = Uxe[i] / l[i] - Ue[i] * lp[i] / (l[i] * l[i]) - lp[i] * Uee[i] / (l[i] * l[i]);
  }
  return T;
}

namespace {

// 4-point Lagrange weights for value, first and second derivative at y
void lagrange4(const double* yk, double y, double* w0, double* w1, double* w2) {
  for (int a = 0; a < 4; ++a) {
    double den = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) den *= yk[a] - yk[b];
    double p = 1.0, d1 = 0.0, d2 = 0.0;
    // product over the three other nodes, with derivatives
    int o[3], q = 0;
    for (int b = 0; b < 4; ++b)
      if (b != a) o[q++] = b;
    double t0 = y - yk[o[0]], t1 = y - yk[o[1]], t2 = y - yk[o[2]];
    p = t0 * t1 * t2;
    d1 = t1 * t2 + t0 * t2 + t0 * t1;
    d2 = 2.0 * (t0 + t1 + t2);
    w0[a] = p / den;
    w1[a] = d1 / den;
    w2[a] = d2 / den;
  }
}

}  // namespace

Traces holdall_traces(const MeshField& F, const Curve& curve) {
  if (F.mapped) throw std::invalid_argument("holdall_traces: hold-all field required");
  if (F.M < 4) throw std::invalid_argument("holdall_traces: need at least 4 slices");
  if (curve.n() != F.N) throw std::invalid_argument("holdall_traces: curve length mismatch");
  const int N = F.N, M = F.M;
  const double h = F.L / (N - 1);
  // x-derivatives slice by slice
  std::vector<double> Fx(F.values.size());
  for (int m = 0; m < M; ++m) {
    std::vector<double> row(N);
    for (int i = 0; i < N; ++i) row[i] = F.at(i, m);
    auto d = diff(row, h);
    for (int i = 0; i < N; ++i) Fx[static_cast<size_t>(i) * M + m] = d[i];
  }
  Traces T;
  T.u.resize(N);
  T.u_x.resize(N);
  T.u_y.resize(N);
  T.u_yy.resize(N);
  T.u_xy.resize(N);
  for (int i = 0; i < N; ++i) {
    double y = curve.ell[i];
    int m0 = static_cast<int>(std::upper_bound(F.ys.begin(), F.ys.end(), y) - F.ys.begin()) - 2;
    m0 = std::clamp(m0, 0, M - 4);
    double w0[4], w1[4], w2[4];
    lagrange4(&F.ys[m0], y, w0, w1, w2);
    double u = 0, uy = 0, uyy = 0, ux = 0, uxy = 0;
    for (int a = 0; a < 4; ++a) {
      double v = F.at(i, m0 + a), vx = Fx[static_cast<size_t>(i) * M + m0 + a];
      u += w0[a] * v;
      uy += w1[a] * v;
      uyy += w2[a] * v;
      ux += w0[a] * vx;
      uxy += w1[a] * vx;
    }
    T.u[i] = u;
    T.u_x[i] = ux;
    T.u_y[i] = uy;
    T.u_yy[i] = uyy;
    T.u_xy[i] = uxy;
  }
  return T;
}

MeshField solve_cauchy_holdall(const CauchyData& data, const LateralBC& lateral, ContinuationScheme& scheme,
                               const std::vector<double>& y_grid, double olell, ContinuationStats* st) {
  if (lateral.kind != data.basis->bc.kind) throw std::invalid_argument("solve_cauchy_holdall: lateral BC mismatch");
  if (y_grid.empty()) throw std::invalid_argument("solve_cauchy_holdall: empty y grid");
  for (size_t q = 1; q < y_grid.size(); ++q)
    if (!(y_grid[q] > y_grid[q - 1])) throw std::invalid_argument("solve_cauchy_holdall: y grid must increase");
  const double ytop = y_grid.back();
  MeshField F;
  F.N = data.basis->N;
  F.M = static_cast<int>(y_grid.size());
  F.L = data.basis->L;
  F.olell = olell;
  F.mapped = false;
  F.lateral = lateral;
  F.ys = y_grid;
  F.values.assign(static_cast<size_t>(F.N) * F.M, 0.0);
  for (int m = 0; m < F.M; ++m) {
    Eigen::VectorXd a = scheme_coeffs(data, scheme, y_grid[m], ytop, st);
    auto v = synthesize({data.basis, a});
    if (y_grid[m] == 0.0) v = data.f;
    for (int i = 0; i < F.N; ++i) F.at(i, m) = v[i];
  }
  return F;
}

}  // namespace fc
