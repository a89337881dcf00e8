#include "fc/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAsymTol = 1e-10;

struct Partial {
  double value;
  double err;
  bool ok;
};

// Taylor series in long double. ok=false when cancellation eats the accuracy.
Partial series(double alpha, double beta, double z) {
  if (z == 0.0) return {rgamma(beta), 0.0, true};
  const long double lz = std::log(std::fabs(static_cast<long double>(z)));
  const bool neg = z < 0.0;
  long double sum = 0.0L, abs_sum = 0.0L, prev = 0.0L, last = 0.0L;
  bool past_peak = false;
  for (int k = 0; k < 4000; ++k) {
    long double lg = std::lgamma(static_cast<long double>(alpha) * k + beta);
    long double mag = std::exp(k * lz - lg);
    long double term = (neg && (k & 1)) ? -mag : mag;
    sum += term;
    abs_sum += mag;
    if (k > 0 && mag < prev) past_peak = true;
    prev = mag;
    last = mag;
    if (past_peak && mag <= 1e-21L * std::fabs(sum) + 1e-300L) break;
    if (!std::isfinite(static_cast<double>(abs_sum))) return {0.0, 0.0, false};
  }
  const long double eps = std::numeric_limits<long double>::epsilon();
  double err = static_cast<double>(4.0L * eps * abs_sum + 2.0L * last);
  double v = static_cast<double>(sum);
  bool ok = err <= 1e-14 * (1.0 + std::fabs(v));
  return {v, err, ok};
}

// Large-|z| expansion: exponential saddle contributions plus the algebraic tail
// -sum z^{-k}/Gamma(beta - alpha k), truncated at the smallest term.
Partial asymptotic(double alpha, double beta, double z) {
  const double az = std::fabs(z);
  const double argz = z < 0.0 ? kPi : 0.0;
  std::complex<double> expo = 0.0;
  std::vector<std::complex<double>> seen;
  for (int m = -2; m <= 2; ++m) {
    double th = argz + 2.0 * kPi * m;
    if (std::fabs(th) > alpha * kPi * (1.0 + 1e-14)) continue;
    std::complex<double> s = std::polar(std::pow(az, 1.0 / alpha), th / alpha);
    bool dup = false;
    for (auto& p : seen)
      if (std::abs(p - s) <= 1e-12 * (1.0 + std::abs(s))) dup = true;
    if (dup) continue;
    seen.push_back(s);
    if (s.real() > 709.0) throw std::overflow_error("ml: result exceeds double range");
    expo += std::pow(s, 1.0 - beta) * std::exp(s) / alpha;
  }
  // truncation index from the reflection envelope |z|^-k Gamma(1-beta+alpha k)/pi,
  // which ignores the accidental near-zeros of 1/Gamma
  auto term = [&](int k) { return -std::pow(z, -static_cast<double>(k)) * rgamma(beta - alpha * k); };
  auto env = [&](int k) {
    double x = 1.0 - beta + alpha * k;
    if (x <= 0.0) return std::fabs(term(k));
    return std::exp(-k * std::log(az) + std::lgamma(x)) / kPi;
  };
  double alg = 0.0;
  int K = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 120; ++k) {
    double e = env(k);
    if (e > best && k > 2) break;
    best = std::min(best, e);
    alg += term(k);
    K = k;
    if (e < 1e-18 * (std::fabs(alg) + std::abs(expo))) break;
  }
  double err = std::max(std::fabs(term(K + 1)), std::fabs(term(K + 2)));
  if (z < 0.0 && alpha < 1.0) {
    double c = std::cos(kPi / alpha);
    if (c < 0.0) {
      double r = std::pow(az, 1.0 / alpha);
      err += std::pow(r, 1.0 - beta) * std::exp(r * c) / alpha;
    }
  }
  double v = expo.real() + alg;
  return {v, err, err <= kAsymTol};
}

// Real-axis representation for 0 < alpha < 1, beta < 1 + alpha, z < 0.
double integral_rep(double alpha, double beta, double z, double& err) {
  const double s1 = std::sin(kPi * (1.0 - beta));
  const double s2 = std::sin(kPi * (1.0 - beta + alpha));
  const double c = std::cos(kPi * alpha);
  auto f = [&](double t) -> double {
    if (t <= 0.0) return 0.0;
    double ta = std::pow(t, alpha);
    double num = ta * s1 - z * s2;
    double den = ta * ta - 2.0 * ta * z * c + z * z;
    return std::pow(t, alpha - beta) * std::exp(-t) * num / den / kPi;
  };
  const double tp = std::pow(std::fabs(z), 1.0 / alpha);
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double e1 = 0.0, e2 = 0.0, l1 = 0.0, l2 = 0.0;
  double a = ts.integrate(f, 0.0, tp, 1e-14, &e1, &l1);
  auto g = [&](double u) { return f(tp + u); };
  double b = es.integrate(g, 1e-14, &e2, &l2);
  err = (e1 * l1 + e2 * l2) + 1e-15 * (std::fabs(a) + std::fabs(b));
  return a + b;
}

MLResult integral(double alpha, double beta, double z) {
  // lower beta into (0, 1] via E_{a,b}(z) = (E_{a,b-a}(z) - 1/G(b-a))/z
  if (beta > 1.0) {
    MLResult r = integral(alpha, beta - alpha, z);
    r.value = (r.value - rgamma(beta - alpha)) / z;
    r.est_abs_err /= std::fabs(z);
    return r;
  }
  double err = 0.0;
  double v = integral_rep(alpha, beta, z, err);
  return {v, err, MLBranch::integral};
}

}  // namespace

std::string to_string(MLBranch b) {
  switch (b) {
    case MLBranch::series: return "series";
    case MLBranch::asymptotic: return "asymptotic";
    case MLBranch::integral: return "integral";
  }
  return "?";
}

double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 171.6) return 0.0;
  return 1.0 / std::tgamma(x);
}

double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw std::domain_error("gamma: pole");
  return std::tgamma(x);
}

MLResult ml(const MLQuery& q) {
  const double a = q.alpha, b = q.beta, z = q.z;
  if (!(a > 0.0 && a <= 2.0)) throw std::domain_error("ml: alpha must lie in (0,2]");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::domain_error("ml: beta must be > 0");
  if (!std::isfinite(z)) throw std::domain_error("ml: z must be finite");

  if (z >= 0.0) {
    double s = std::pow(z, 1.0 / a);
    if (s <= 25.0) {
      Partial p = series(a, b, z);
      if (!std::isfinite(p.value)) throw std::overflow_error("ml: result exceeds double range");
      return {p.value, p.err, MLBranch::series};
    }
    Partial p = asymptotic(a, b, z);
    if (!std::isfinite(p.value)) throw std::overflow_error("ml: result exceeds double range");
    return {p.value, p.err, MLBranch::asymptotic};
  }

  Partial p = series(a, b, z);
  if (p.ok && (std::fabs(z) <= 5.0 || p.err <= 1e-15)) return {p.value, p.err, MLBranch::series};
  if (std::fabs(z) > 5.0 || !p.ok) {
    Partial as = asymptotic(a, b, z);
    if (as.ok && std::fabs(z) > 1.0) return {as.value, as.err, MLBranch::asymptotic};
    if (a < 1.0) {
      MLResult r = integral(a, b, z);
      if (p.ok && p.err < r.est_abs_err) return {p.value, p.err, MLBranch::series};
      return r;
    }
    if (!p.ok && as.err < p.err) return {as.value, as.err, MLBranch::asymptotic};
  }
  return {p.value, p.err, MLBranch::series};
}

double ml_kernel(double alpha, double beta, double lambda, double t) {
  if (!(t > 0.0)) throw std::domain_error("ml_kernel: t must be > 0");
  if (lambda < 0.0) throw std::domain_error("ml_kernel: lambda must be >= 0");
  return std::pow(t, beta - 1.0) * ml(alpha, beta, -lambda * std::pow(t, alpha));
}

double ml_reciprocal_bound(double alpha, double lambda, double y) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("ml_reciprocal_bound: alpha in (0,1)");
  if (lambda < 0.0 || y < 0.0) throw std::domain_error("ml_reciprocal_bound: lambda, y >= 0");
  return 1.0 + std::tgamma(1.0 - alpha) * lambda * std::pow(y, alpha);
}

}  // namespace fc
