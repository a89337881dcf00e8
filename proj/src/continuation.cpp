#include "fc/continuation.hpp"

#include "fc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fc {

std::string to_string(ContinuationScheme::Kind k) {
  switch (k) {
    case ContinuationScheme::Kind::exact: return "exact";
    case ContinuationScheme::Kind::left_dc: return "left_dc";
    case ContinuationScheme::Kind::right_dc: return "right_dc";
    case ContinuationScheme::Kind::fac_lap: return "fac_lap";
    case ContinuationScheme::Kind::fac_lap_split: return "fac_lap_split";
  }
  return "?";
}

ContinuationScheme::Kind scheme_kind_from_string(const std::string& s) {
  using K = ContinuationScheme::Kind;
  if (s == "exact") return K::exact;
  if (s == "left_dc" || s == "leftDC") return K::left_dc;
  if (s == "right_dc" || s == "rightDC") return K::right_dc;
  if (s == "fac_lap" || s == "facLap") return K::fac_lap;
  if (s == "fac_lap_split" || s == "split") return K::fac_lap_split;
  throw std::invalid_argument("unknown continuation scheme '" + s + "'");
}

namespace {

void check_pair(const SpectralCoeffs& f, const SpectralCoeffs& g) {
  if (f.basis != g.basis || f.c.size() != g.c.size())
    throw std::invalid_argument("continuation: f and g coefficients on different bases");
}

void check_alpha2(double a2) {
  if (!(a2 > 1.0 && a2 <= 2.0)) throw std::domain_error("continuation: 2 alpha must lie in (1,2]");
}

Slice to_slice(const BasisPtr& b, const Eigen::VectorXd& a, double y) {
  return {y, synthesize({b, a})};
}

}  // namespace

Eigen::VectorXd exact_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double y) {
  check_pair(f, g);
  const auto& B = *f.basis;
  Eigen::VectorXd a(B.J);
  for (int j = 0; j < B.J; ++j) {
    double s = B.sqrt_lambda(j);
    if (s == 0.0) {
      a[j] = f.c[j] + g.c[j] * y;
      continue;
    }
    if (s * y > 700.0) throw std::overflow_error("continue_exact: sqrt(lambda) y exceeds exp range");
    a[j] = f.c[j] * std::cosh(s * y) + g.c[j] * std::sinh(s * y) / s;
  }
  return a;
}

Eigen::VectorXd left_dc_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double alpha2, double y,
                               ContinuationStats* st) {
  check_pair(f, g);
  check_alpha2(alpha2);
  const auto& B = *f.basis;
  Eigen::VectorXd a(B.J);
  for (int j = 0; j < B.J; ++j) {
    double z = B.lambdas[j] * std::pow(y, alpha2);
    try {
      double e1 = ml(alpha2, 1.0, z), e2 = ml(alpha2, 2.0, z);
      double amp = std::max(std::fabs(e1), std::fabs(y * e2));
      if (amp > kAmplificationCap) {
        a[j] = 0.0;
        if (st) ++st->zeroed_modes;
        continue;
      }
      a[j] = f.c[j] * e1 + g.c[j] * y * e2;
    } catch (const std::overflow_error&) {
      a[j] = 0.0;
      if (st) ++st->zeroed_modes;
    }
  }
  return a;
}

Eigen::VectorXd right_dc_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double alpha2, double y,
                                ContinuationStats* st) {
  check_pair(f, g);
  check_alpha2(alpha2);
  const auto& B = *f.basis;
  Eigen::VectorXd a(B.J);
  for (int j = 0; j < B.J; ++j) {
    double z = B.lambdas[j] * std::pow(y, alpha2);
    try {
      double e1 = ml(alpha2, 1.0, z), e2 = ml(alpha2, 2.0, z), e3 = ml(alpha2, alpha2, z);
      // scale out the dominant growth of both factors before forming the difference
      double sc = std::max(1.0, std::fabs(e1));
      double en1 = e1 / sc, en2 = e2 / sc, en3 = e3 / sc;
      double num = (f.c[j] * en1 + g.c[j] * y * en2);
      double t1 = en1 * en1, t2 = z * en3 * en2, den = t1 - t2;
      // cancellation: den carries no digits once it is below rounding of the terms
      if (std::fabs(den) < 1e-12 * std::fabs(num) || std::fabs(den) < 1e-8 * std::max(std::fabs(t1), std::fabs(t2))) {
        a[j] = 0.0;
        if (st) ++st->zeroed_modes;
        continue;
      }
      double amp = std::max(std::fabs(en1), std::fabs(y * en2)) / std::fabs(den) / sc;
      if (amp > kAmplificationCap) {
        a[j] = 0.0;
        if (st) ++st->zeroed_modes;
        continue;
      }
      a[j] = num / den / sc;
    } catch (const std::overflow_error&) {
      a[j] = 0.0;
      if (st) ++st->zeroed_modes;
    }
  }
  return a;
}

namespace {

double fac_lap_mode(double s, double fj, double gj, double alpha, double y) {
  if (s == 0.0) return fj + 0.5 * gj * (y + std::pow(y, alpha) * rgamma(1.0 + alpha));
  double up = (s * fj + gj) / (2.0 * s), um = (s * fj - gj) / (2.0 * s);
  double e = y == 0.0 ? 1.0 : ml(alpha, 1.0, -s * std::pow(y, alpha));
  return up / e + um * std::exp(-s * y);
}

}  // namespace

Eigen::VectorXd fac_lap_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double alpha, double y) {
  check_pair(f, g);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("fac_lap: alpha must lie in (0,1]");
  const auto& B = *f.basis;
  Eigen::VectorXd a(B.J);
  for (int j = 0; j < B.J; ++j) a[j] = fac_lap_mode(B.sqrt_lambda(j), f.c[j], g.c[j], alpha, y);
  return a;
}

Eigen::VectorXd banded_fac_lap_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g,
                                      const std::vector<Band>& bands, double y) {
  check_pair(f, g);
  const auto& B = *f.basis;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(B.J);
  std::vector<char> done(B.J, 0);
  for (const auto& b : bands)
    for (int j = b.k_begin; j < b.k_end && j < B.J; ++j) {
      a[j] = fac_lap_mode(B.sqrt_lambda(j), f.c[j], g.c[j], b.alpha, y);
      done[j] = 1;
    }
  for (int j = 0; j < B.J; ++j)
    if (!done[j] && B.sqrt_lambda(j) == 0.0) a[j] = f.c[j] + g.c[j] * y;
  return a;
}

Slice continue_exact(const CauchyData& d, double y) {
  return to_slice(d.basis, exact_coeffs(analyze(d.f, d.basis), analyze(d.g, d.basis), y), y);
}

Slice continue_left_dc(const CauchyData& d, double alpha2, double y, ContinuationStats* st) {
  return to_slice(d.basis, left_dc_coeffs(analyze(d.f, d.basis), analyze(d.g, d.basis), alpha2, y, st), y);
}

Slice continue_right_dc(const CauchyData& d, double alpha2, double y, ContinuationStats* st) {
  return to_slice(d.basis, right_dc_coeffs(analyze(d.f, d.basis), analyze(d.g, d.basis), alpha2, y, st), y);
}

Slice continue_fac_lap(const CauchyData& d, double alpha, double y) {
  return to_slice(d.basis, fac_lap_coeffs(analyze(d.f, d.basis), analyze(d.g, d.basis), alpha, y), y);
}

std::pair<SpectralCoeffs, SpectralCoeffs> split_data(const CauchyData& d, ContinuationStats* st) {
  SpectralCoeffs f = analyze(d.f, d.basis), g = analyze(d.g, d.basis);
  SpectralCoeffs up{d.basis, Eigen::VectorXd(d.basis->J)}, um{d.basis, Eigen::VectorXd(d.basis->J)};
  for (int j = 0; j < d.basis->J; ++j) {
    double s = d.basis->sqrt_lambda(j);
    if (s == 0.0) {
      up.c[j] = um.c[j] = 0.5 * f.c[j];
      if (st) ++st->excluded_zero_modes;
      continue;
    }
    up.c[j] = 0.5 * (f.c[j] + g.c[j] / s);
    um.c[j] = 0.5 * (f.c[j] - g.c[j] / s);
  }
  return {up, um};
}

Eigen::VectorXd split_noise_levels(const CauchyData& d) {
  const auto& B = *d.basis;
  double sig_c = d.delta * l2norm(d.g, B.h) * std::sqrt(B.h / B.L);
  Eigen::VectorXd s(B.J);
  for (int j = 0; j < B.J; ++j) {
    double r = B.sqrt_lambda(j);
    s[j] = r == 0.0 ? 0.0 : sig_c / (2.0 * r);
  }
  return s;
}

namespace {

// data-consistency defect of mode j: fractional inversion to depth Y followed
// by exact propagation back to y = 0
double defect_factor(double s, double alpha, double Y) {
  double e = ml(alpha, 1.0, -s * std::pow(Y, alpha));
  return std::fabs(1.0 - std::exp(-s * Y) / e);
}

}  // namespace

std::vector<Band> select_bands(const CauchyData& d, double Y, double tau, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("select_bands: empty alpha grid");
  auto [up, um] = split_data(d);
  (void)um;
  Eigen::VectorXd sig = split_noise_levels(d);
  const auto& B = *d.basis;

  std::vector<int> pick(B.J, -1);
  std::vector<char> flag(B.J, 0);
  for (int j = 0; j < B.J; ++j) {
    double s = B.sqrt_lambda(j);
    if (s == 0.0) continue;
    int idx = -1;
    for (size_t q = 0; q < grid.size(); ++q) {
      if (std::fabs(up.c[j]) * defect_factor(s, grid[q], Y) <= tau * sig[j]) {
        idx = static_cast<int>(q);
        break;
      }
    }
    if (idx < 0) {
      idx = static_cast<int>(grid.size()) - 1;
      flag[j] = 1;
    }
    pick[j] = idx;
  }

  // greedy low-to-high: a mode joins the open band when the band test still
  // passes at the band's order and the mode does not admit a smaller order;
  // flagged modes are absorbed this way whenever the aggregate test allows
  auto band_ok = [&](int k0, int k1, double alpha) {
    double r2 = 0.0, s2 = 0.0;
    for (int k = k0; k < k1; ++k) {
      double d = up.c[k] * defect_factor(B.sqrt_lambda(k), alpha, Y);
      r2 += d * d;
      s2 += sig[k] * sig[k];
    }
    return std::sqrt(r2) <= tau * std::sqrt(s2);
  };
  std::vector<Band> bands;
  int open = -1;  // pick index of the open band's first mode
  for (int j = 0; j < B.J; ++j) {
    if (pick[j] < 0) {
      open = -1;
      continue;
    }
    if (open >= 0 && !bands.back().flagged && (pick[j] >= open || flag[j]) &&
        band_ok(bands.back().k_begin, j + 1, bands.back().alpha)) {
      bands.back().k_end = j + 1;
      continue;
    }
    bands.push_back({j, j + 1, grid[pick[j]], flag[j] != 0});
    open = pick[j];
  }
  return bands;
}

SplitResult split_frequency_continue(const CauchyData& d, const std::vector<double>& y_grid, double tau,
                                     const std::vector<double>& grid) {
  if (!(tau > 1.0)) throw std::invalid_argument("split_frequency_continue: tau must exceed 1");
  if (y_grid.empty()) return {};
  double Y = *std::max_element(y_grid.begin(), y_grid.end());
  SplitResult r;
  r.bands = Y > 0.0 ? select_bands(d, Y, tau, grid) : std::vector<Band>{};
  SpectralCoeffs f = analyze(d.f, d.basis), g = analyze(d.g, d.basis);
  for (double y : y_grid) r.slices.push_back(to_slice(d.basis, banded_fac_lap_coeffs(f, g, r.bands, y), y));
  return r;
}

Eigen::VectorXd scheme_coeffs(const CauchyData& d, ContinuationScheme& sc, double y, double y_top,
                              ContinuationStats* st) {
  SpectralCoeffs f = analyze(d.f, d.basis), g = analyze(d.g, d.basis);
  using K = ContinuationScheme::Kind;
  switch (sc.kind) {
    case K::exact: return exact_coeffs(f, g, y);
    case K::left_dc: return left_dc_coeffs(f, g, 2.0 * sc.alpha, y, st);
    case K::right_dc: return right_dc_coeffs(f, g, 2.0 * sc.alpha, y, st);
    case K::fac_lap: return fac_lap_coeffs(f, g, sc.alpha, y);
    case K::fac_lap_split:
      if (sc.bands.empty() && y_top > 0.0) sc.bands = select_bands(d, y_top, sc.tau, sc.alpha_grid);
      return banded_fac_lap_coeffs(f, g, sc.bands, y);
  }
  return {};
}

SpectralCoeffs landweber_smooth(const SpectralCoeffs& u0, double sigma_t, double mu, double l, double delta,
                                double norm_at_l, double c, LandweberInfo* info) {
  if (!(sigma_t >= 1.0)) throw std::invalid_argument("landweber_smooth: sigma_t must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("landweber_smooth: delta must be > 0");
  if (!(l > 0.0)) throw std::invalid_argument("landweber_smooth: l must be > 0");
  const auto& B = *u0.basis;
  Eigen::VectorXd A = Eigen::VectorXd::Zero(B.J);
  for (int j = 0; j < B.J; ++j) {
    if (B.lambdas[j] <= 0.0) continue;
    A[j] = mu * std::pow(B.lambdas[j], -sigma_t);
    if (!(A[j] > 0.0 && A[j] <= 1.0 + 1e-15))
      throw std::invalid_argument("landweber_smooth: mu violates ||A|| <= 1");
  }
  double r = std::log(norm_at_l / delta);
  int steps = r > 0.0 ? static_cast<int>(std::ceil(c * r / (l * l))) : 0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(B.J);
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < B.J; ++j) {
      if (B.lambdas[j] <= 0.0) {
        v[j] = u0.c[j];
        continue;
      }
      v[j] = v[j] * (1.0 - A[j]) + A[j] * u0.c[j];
    }
  if (info) info->steps = steps;
  return {u0.basis, v};
}

std::vector<double> add_noise(const std::vector<double>& v, double delta, double h, std::uint64_t seed) {
  if (delta == 0.0) return v;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> n(v.size());
  for (auto& e : n) e = nd(rng);
  double scale = delta * l2norm(v, h) / l2norm(n, h);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] + scale * n[i];
  return out;
}

}  // namespace fc
