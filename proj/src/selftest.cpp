#include "fc/selftest.hpp"

#include "fc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fc {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rate_norm(double a, double lam) {
  const int n = 10000;
  const double h = 1.0 / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = i * h;
    double d = (t == 0.0 ? 1.0 : ml(a, 1.0, -lam * std::pow(t, a))) - std::exp(-lam * t);
    s += (i == 0 || i == n - 1 ? 0.5 : 1.0) * h * d * d;
  }
  return std::sqrt(s);
}

}  // namespace

PropertyCheck check_ml_identities() {
  double e = 0.0;
  for (int i = 0; i <= 700; ++i) {
    double z = -30.0 + 35.0 * i / 700;
    e = std::max(e, std::fabs(ml(1.0, 1.0, z) - std::exp(z)) / (1.0 + std::exp(z)));
  }
  for (int i = 0; i <= 400; ++i) {
    double x = 20.0 * i / 400;
    e = std::max(e, std::fabs(ml(2.0, 1.0, -x * x) - std::cos(x)));
    if (x > 0) e = std::max(e, std::fabs(ml(2.0, 2.0, -x * x) - std::sin(x) / x));
  }
  return {"ml identities", e <= 1e-9, e, "max error " + num(e) + " (limit 1e-9)"};
}

PropertyCheck check_ml_monotone() {
  int bad = 0;
  for (double a : {0.3, 0.5, 0.7, 0.9}) {
    double prev = 1.0;
    for (int i = 0; i <= 160; ++i) {
      double v = ml(a, 1.0, -std::pow(10.0, -4.0 + 8.0 * i / 160));
      if (!(v > 0.0) || v > prev * (1.0 + 1e-12)) ++bad;
      prev = v;
    }
  }
  return {"ml complete monotonicity proxy", bad == 0, double(bad), std::to_string(bad) + " violations"};
}

PropertyCheck check_reciprocal_bound() {
  int bad = 0;
  double worst = 0.0;
  for (double a : {0.5, 0.7, 0.9, 0.99})
    for (double lam : {1.0, 10.0, 100.0, 1000.0})
      for (double y : {0.01, 0.1, 0.5, 1.0}) {
        double lhs = 1.0 / ml(a, 1.0, -lam * std::pow(y, a)), rhs = ml_reciprocal_bound(a, lam, y);
        worst = std::max(worst, lhs / rhs);
        if (lhs > rhs) ++bad;
      }
  return {"reciprocal bound", bad == 0, double(bad),
          std::to_string(bad) + " violations over 64 points, max ratio " + num(worst)};
}

PropertyCheck check_rate_slope() {
  const double as[] = {0.9, 0.95, 0.975, 0.99};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double a : as) {
    double x = std::log(1.0 - a), y = std::log(rate_norm(a, 25.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  return {"rate slope", slope >= 0.9, slope, "slope " + num(slope) + " (limit 0.9)"};
}

PropertyCheck check_rate_bounds() {
  double worst = 1.0;
  for (double lam : {4.0, 25.0, 100.0}) {
    double cmin = INFINITY, cmax = 0.0;
    for (double a : {0.9, 0.925, 0.95, 0.975, 0.99}) {
      double s = 0.0;
      for (int i = 0; i <= 300; ++i) {
        double t = 0.25 + 0.75 * i / 300;
        s = std::max(s, std::fabs(ml(a, 1.0, -lam * std::pow(t, a)) - std::exp(-lam * t)));
      }
      cmin = std::min(cmin, s / (1.0 - a));
      cmax = std::max(cmax, s / (1.0 - a));
    }
    worst = std::max(worst, cmax / cmin);
  }
  return {"rate bounds", worst < 2.0, worst, "max C variation " + num(worst) + "x (limit 2x)"};
}

std::vector<PropertyCheck> lemma_suites() {
  return {check_ml_identities(), check_ml_monotone(), check_reciprocal_bound(), check_rate_slope(),
          check_rate_bounds()};
}

int print_checks(std::ostream& os, const std::vector<PropertyCheck>& v) {
  int fails = 0;
  for (const auto& c : v) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    fails += !c.pass;
  }
  return fails;
}

}  // namespace fc
