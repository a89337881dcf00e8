#pragma once

#include "fc/spectral.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fc {

struct CauchyData {
  std::vector<double> f;
  std::vector<double> g;
  double delta = 0.0;
  BasisPtr basis;
};

struct Band {
  int k_begin = 0;  // first mode index (inclusive)
  int k_end = 0;    // one past the last
  double alpha = 1.0;
  bool flagged = false;
};

struct ContinuationScheme {
  enum class Kind { exact, left_dc, right_dc, fac_lap, fac_lap_split };
  Kind kind = Kind::fac_lap_split;
  double alpha = 0.99;  // fac_lap order, or alpha with 2 alpha in (1,2) for the one-sided schemes
  std::vector<Band> bands;
  double tau = 1.5;
  std::vector<double> alpha_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999};
};

std::string to_string(ContinuationScheme::Kind k);
ContinuationScheme::Kind scheme_kind_from_string(const std::string& s);

struct Slice {
  double y = 0.0;
  std::vector<double> values;
};

struct ContinuationStats {
  int zeroed_modes = 0;  // overflow guard or vanishing denominator
  int excluded_zero_modes = 0;
};

constexpr double kAmplificationCap = 1e12;

// Modal coefficients a_j(y) for each scheme.
Eigen::VectorXd exact_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double y);
Eigen::VectorXd left_dc_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double alpha2, double y,
                               ContinuationStats* st = nullptr);
Eigen::VectorXd right_dc_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double alpha2, double y,
                                ContinuationStats* st = nullptr);
Eigen::VectorXd fac_lap_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g, double alpha, double y);
Eigen::VectorXd banded_fac_lap_coeffs(const SpectralCoeffs& f, const SpectralCoeffs& g,
                                      const std::vector<Band>& bands, double y);

Slice continue_exact(const CauchyData& data, double y);
Slice continue_left_dc(const CauchyData& data, double alpha2, double y, ContinuationStats* st = nullptr);
Slice continue_right_dc(const CauchyData& data, double alpha2, double y, ContinuationStats* st = nullptr);
Slice continue_fac_lap(const CauchyData& data, double alpha, double y);

std::pair<SpectralCoeffs, SpectralCoeffs> split_data(const CauchyData& data, ContinuationStats* st = nullptr);

// Expected noise standard deviation of the modal coefficients of u_{+0}, for
// white noise of relative L2 size delta on g.
Eigen::VectorXd split_noise_levels(const CauchyData& data);

std::vector<Band> select_bands(const CauchyData& data, double y_top, double tau,
                               const std::vector<double>& alpha_grid);

struct SplitResult {
  std::vector<Slice> slices;
  std::vector<Band> bands;
};

SplitResult split_frequency_continue(const CauchyData& data, const std::vector<double>& y_grid, double tau = 1.5,
                                     const std::vector<double>& alpha_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99,
                                                                              0.999});

// Applies any scheme (bands for the split variant are selected on the fly
// when empty, using y_top as the propagation depth).
Eigen::VectorXd scheme_coeffs(const CauchyData& data, ContinuationScheme& scheme, double y, double y_top,
                              ContinuationStats* st = nullptr);

struct LandweberInfo {
  int steps = 0;
};

SpectralCoeffs landweber_smooth(const SpectralCoeffs& u0_noisy, double sigma_t, double mu, double l, double delta,
                                double norm_at_l, double c = 1.0, LandweberInfo* info = nullptr);

// Additive Gaussian perturbation with relative L2 size exactly delta.
std::vector<double> add_noise(const std::vector<double>& v, double delta, double h, std::uint64_t seed);

}  // namespace fc
