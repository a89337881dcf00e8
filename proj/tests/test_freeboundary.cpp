#include <doctest.h>

#include "fc/freeboundary.hpp"

#include <cmath>
#include <sstream>

using namespace fc;

namespace {

Curve truth(int n) {
  Curve c{std::vector<double>(n), 1.0, 0.1};
  auto x = c.x();
  for (int i = 0; i < n; ++i) c.ell[i] = 0.1 * (0.8 + 0.1 * std::cos(2 * M_PI * x[i]));
  return c;
}

std::vector<double> bottom(int n) {
  auto x = uniform_grid(1.0, n);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = 1 + 0.5 * std::cos(M_PI * x[i]);
  return f;
}

Problem2 problem(InterfaceBC::Kind k, int n, int M) { return {LateralBC::neumann(), k, std::vector<double>(n, 0.1), bottom(n), M}; }

MeshField exact_zbar(const Problem2& p, const std::vector<double>& g, int n) {
  auto B = build_basis(1.0, p.lateral, 0, n);
  ContinuationScheme sc;
  sc.kind = ContinuationScheme::Kind::exact;
  std::vector<double> ys;
  for (int m = 0; m <= 64; ++m) ys.push_back(0.1 * m / 64);
  return solve_cauchy_holdall({p.f, g, 0.0, B}, p.lateral, sc, ys, 0.1);
}

}  // namespace

TEST_CASE("linearized flux matches central differences") {
  const int N = 129;
  auto c = truth(N);
  auto x = c.x();
  std::vector<double> dl(N);
  for (int i = 0; i < N; ++i) dl[i] = 0.01 * std::cos(M_PI * x[i]) + 0.005;
  for (auto k : {InterfaceBC::Kind::D, InterfaceBC::Kind::N, InterfaceBC::Kind::I}) {
    auto p = problem(k, N, 65);
    auto lin = linearized_flux(p, c, dl);
    const double t = 1e-3;
    Curve a = c, b = c;
    for (int i = 0; i < N; ++i) {
      a.ell[i] += t * dl[i];
      b.ell[i] -= t * dl[i];
    }
    auto Fa = forward_flux(p, a), Fb = forward_flux(p, b);
    std::vector<double> e(N);
    for (int i = 0; i < N; ++i) e[i] = (Fa[i] - Fb[i]) / (2 * t) - lin[i];
    CAPTURE(to_string(k));
    CHECK(l2norm(e, c.h()) / l2norm(lin, c.h()) < 1e-3);
  }
}

TEST_CASE("fixed point at the truth") {
  const int N = 129;
  auto c = truth(N);
  for (auto k : {InterfaceBC::Kind::D, InterfaceBC::Kind::N, InterfaceBC::Kind::I}) {
    // data from the twice finer mesh
    auto pf = problem(k, 2 * N - 1, 129);
    auto gf = forward_flux(pf, truth(2 * N - 1));
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) g[i] = gf[2 * i];
    auto p = problem(k, N, 65);
    auto u = forward_field(p, c);
    auto zb = exact_zbar(p, g, N);
    NewtonConfig cfg;
    cfg.ell_left = c.ell.front();
    cfg.ell_right = c.ell.back();
    std::vector<double> dl = k == InterfaceBC::Kind::D   ? dirichlet_update(c, zb, u, cfg)
                             : k == InterfaceBC::Kind::N ? neumann_update(c, zb, u, cfg)
                                                         : impedance_update(c, p.gamma, zb, u, cfg);
    CAPTURE(to_string(k));
    CHECK(l2norm(dl, c.h()) / l2norm(c.ell, c.h()) < 1e-3);
  }
}

TEST_CASE("dirichlet newton converges on noise-free data") {
  const int N = 65;
  auto c = truth(N);
  auto p = problem(InterfaceBC::Kind::D, N, 33);
  auto g = forward_flux(p, c);
  auto zb = exact_zbar(p, g, N);
  Curve c0 = c;
  std::fill(c0.ell.begin(), c0.ell.end(), 0.02);
  NewtonConfig cfg;
  cfg.M = 33;
  auto tr = newton_dirichlet(c0, zb, p.lateral, p.f, g, cfg, &c);
  REQUIRE(tr.iterates.size() == tr.residual_norms.size());
  REQUIRE(tr.iterates.size() == tr.rel_errors.size());
  CHECK(tr.rel_errors.back() < 1e-3);
  CHECK(tr.rel_errors.back() < tr.rel_errors.front());
  for (const auto& it : tr.iterates)
    for (double v : it.ell) CHECK((v > 0.0 && v <= 0.1));
  std::ostringstream os;
  write_trace_csv(os, tr);
  CHECK(os.str().rfind("iter,", 0) == 0);
}

TEST_CASE("constant field admits every flat curve") {
  const int N = 65;
  Problem2 p{LateralBC::neumann(), InterfaceBC::Kind::N, {}, std::vector<double>(N, 1.0), 33};
  std::vector<double> g(N, 0.0);
  for (double h : {0.03, 0.07}) {
    Curve c{std::vector<double>(N, h), 1.0, 0.1};
    auto F = forward_flux(p, c);
    CHECK(l2norm(F, c.h()) < 1e-9);
  }
  auto zb = exact_zbar(p, g, N);
  Curve c0{std::vector<double>(N, 0.05), 1.0, 0.1};
  NewtonConfig cfg;
  cfg.M = 33;
  auto tr = newton_neumann(c0, zb, p.lateral, p.f, g, cfg);
  CHECK(tr.nonuniqueness);
}

TEST_CASE("impedance coefficients: branches agree as the slope vanishes") {
  const int N = 129;
  double prev = INFINITY;
  for (double amp : {1e-2, 1e-3, 1e-4}) {
    Curve c{std::vector<double>(N), 1.0, 0.1};
    auto x = c.x();
    for (int i = 0; i < N; ++i) c.ell[i] = 0.08 + amp * std::cos(2 * M_PI * x[i]);
    auto p = problem(InterfaceBC::Kind::I, N, 65);
    auto t = interface_traces(forward_field(p, c));
    auto a = impedance_coeffs(c, p.gamma, t, false), b = impedance_coeffs(c, p.gamma, t, true);
    double d = 0.0, s = 0.0;
    for (int i = 0; i < N; ++i) {
      d = std::max(d, std::fabs(a.alpha[i] - b.alpha[i]));
      s = std::max(s, std::fabs(b.alpha[i]));
    }
    CHECK(d / s < prev);
    prev = d / s;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("physical impedance equals the combined coefficient") {
  const int N = 65;
  auto c = truth(N);
  auto p = problem(InterfaceBC::Kind::I, N, 33);
  auto a = forward_field(p, c);
  auto b = solve_forward(c, p.lateral, InterfaceBC::impedance(combined_gamma(c, p.gamma)), p.f, 33);
  double d = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::fabs(a.values[i] - b.values[i]));
  CHECK(d < 1e-12);
}

TEST_CASE("relative error") {
  std::vector<double> t = {1, 1, 1}, a = {1, 1.1, 1};
  CHECK(rel_l2_error(t, t, 0.5) == 0.0);
  CHECK(rel_l2_error(a, t, 0.5) == doctest::Approx(0.1 / std::sqrt(2.0)));
}
