#pragma once

#include "fc/continuation.hpp"
#include "fc/elliptic.hpp"
#include "fc/freeboundary.hpp"
#include "fc/simultaneous.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { cauchy1, cauchy2, cauchy3 };
std::string to_string(ProblemKind p);
ProblemKind problem_from_string(const std::string& s);

// Every knob of the pipelines.  File format: INI sections, `key = value`,
// `#` or `;` comments; section and key names are those listed in README.md.
struct ExperimentConfig {
  // [run]
  ProblemKind problem = ProblemKind::cauchy2;
  std::vector<double> noise = {0.01, 0.02, 0.05, 0.1};
  std::uint64_t seed = 42;
  std::string out = "out";
  int jobs = 1;
  bool dump_curves = true;

  // [mesh]
  int N = 129;
  int M = 65;
  int synth_factor = 2;        // synthesis mesh refinement
  bool inverse_crime = false;  // debugging only: synthesize on the inversion mesh

  // [continuation]
  ContinuationScheme::Kind scheme = ContinuationScheme::Kind::fac_lap_split;
  double alpha = 0.99;
  double tau = 1.5;
  std::vector<double> alpha_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999};
  int modes = 0;  // 0: N/4
  int slices = 65;

  // [cauchy1]
  double p1_L = 6.283185307179586;
  double p1_height = 1.0;
  LateralBC p1_lateral = LateralBC::dirichlet();
  int p1_modes = 8;
  int p1_slices = 33;
  std::vector<double> p1_P = {1.0, 0.3, 0.1};  // u = sum sin(j pi x/L)(P_j cosh + Q_j sinh)(j pi y/L)
  std::vector<double> p1_Q = {0.5, -0.3, -0.1};
  double p1_dc_alpha = 0.0;  // 0: smallest admissible split order

  // [geometry]
  double L = 1.0;
  double olell = 0.1;
  double truth_mean = 0.8;  // ell(x) = olell (mean + amp cos(2 pi x / L))
  double truth_amp = 0.1;

  // [cauchy2]
  std::vector<InterfaceBC::Kind> cases = {InterfaceBC::Kind::D};
  LateralBC p2_lateral = LateralBC::neumann();
  double p2_f_amp = 0.5;  // f = 1 + amp cos(pi x / L)
  double p2_gamma = 0.1;  // physical impedance for (I)
  double p2_start = 0.2;  // start curve: constant start * olell
  bool p2_pin_truth_ends = true;
  NewtonConfig newton;

  // [cauchy3]
  LateralBC p3_lateral = LateralBC::robin(1.0);
  double p3_gamma_mean = 1.0;  // gamma~(x) = mean + amp sin(pi x / L)
  double p3_gamma_amp = 0.5;
  double p3_start_ell = 0.09;
  double p3_start_gamma = 1.0;
  std::string p3_method = "reduced";  // reduced | frozen
  int p3_synth_modes = 48;
  JointRecoveryConfig joint;
  FrozenNewtonConfig frozen;
  int p3_frozen_modes = 16;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// "section.key" = value, e.g. "cauchy2.case" = "N"
void set_option(ExperimentConfig& c, const std::string& key, const std::string& value);
void validate(const ExperimentConfig& c);
std::string dump_config(const ExperimentConfig& c);

std::vector<double> parse_list(const std::string& s);

}  // namespace fc
