#pragma once

#include "fc/elliptic.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace fc {

struct NewtonConfig {
  int max_iter = 10;
  double rho1 = 1e3;
  double rho2 = 1e6;
  double stop_tol = 1e-4;
  double ell_min = -1.0;  // negative: 5% of the hold-all height
  double ell_max = -1.0;  // negative: the hold-all height
  int smooth_modes = 8;
  int M = 65;
  // known boundary values of ell, pinned by the rho2 penalty in the (N) step
  double ell_left = std::numeric_limits<double>::quiet_NaN();
  double ell_right = std::numeric_limits<double>::quiet_NaN();
  double floor_rel = 1e-8;
};

struct RecoveryTrace {
  std::vector<Curve> iterates;
  std::vector<double> residual_norms;  // relative, ||u_y(.,0) - g|| / ||g||, one per iterate
  std::vector<double> rel_errors;      // empty without truth
  std::vector<double> update_norms;    // relative L2 size of each applied update
  int flagged_points = 0;
  int halvings = 0;
  bool nonuniqueness = false;
  std::vector<std::string> warnings;
};

void write_trace_csv(std::ostream& os, const RecoveryTrace& t);

double rel_l2_error(const std::vector<double>& a, const std::vector<double>& truth, double h);

// Problem 2 forward map ell -> u_y(.,0) and its linearization.  For (I) the
// physical coefficient gamma is fixed and gamma~ follows the curve.
struct Problem2 {
  LateralBC lateral;
  InterfaceBC::Kind kind = InterfaceBC::Kind::D;
  std::vector<double> gamma;  // physical gamma, (I) only
  std::vector<double> f;
  int M = 65;
};

InterfaceBC interface_for(const Problem2& p, const Curve& c);
MeshField forward_field(const Problem2& p, const Curve& c);
std::vector<double> forward_flux(const Problem2& p, const Curve& c);
// right-hand side of the linearized interface condition for direction dl
std::vector<double> linearized_interface_data(const Problem2& p, const Curve& c, const Traces& t,
                                              const std::vector<double>& dl);
std::vector<double> linearized_flux(const Problem2& p, const Curve& c, const std::vector<double>& dl);

struct StepInfo {
  int flagged = 0;
  bool overflow = false;
  bool singular_retry = false;
  double rho1_used = 0.0;
};

// Raw Newton updates (smoothed, before trust region and clamping).
std::vector<double> dirichlet_update(const Curve& c, const MeshField& zbar, const MeshField& u,
                                     const NewtonConfig& cfg, StepInfo* info = nullptr);
std::vector<double> neumann_update(const Curve& c, const MeshField& zbar, const MeshField& u, const NewtonConfig& cfg,
                                   StepInfo* info = nullptr);
std::vector<double> impedance_update(const Curve& c, const std::vector<double>& gamma_phys, const MeshField& zbar,
                                     const MeshField& u, const NewtonConfig& cfg, StepInfo* info = nullptr);

// coefficient functions of the (I) linearization written as (alpha dl)' + beta dl
struct ImpedanceCoeffs {
  std::vector<double> alpha, beta, c;
};
ImpedanceCoeffs impedance_coeffs(const Curve& c, const std::vector<double>& gamma_phys, const Traces& t,
                                 bool use_flat_branch = false);

RecoveryTrace newton_dirichlet(const Curve& curve0, const MeshField& zbar, const LateralBC& lateral,
                               const std::vector<double>& f, const std::vector<double>& g, const NewtonConfig& cfg,
                               const Curve* truth = nullptr);
RecoveryTrace newton_neumann(const Curve& curve0, const MeshField& zbar, const LateralBC& lateral,
                             const std::vector<double>& f, const std::vector<double>& g, const NewtonConfig& cfg,
                             const Curve* truth = nullptr);
RecoveryTrace newton_impedance(const Curve& curve0, const std::vector<double>& gamma_phys, const MeshField& zbar,
                               const LateralBC& lateral, const std::vector<double>& f, const std::vector<double>& g,
                               const NewtonConfig& cfg, const Curve* truth = nullptr);

// fraction of interface points with |u_x| below tol * max|u|
double flat_fraction(const Traces& t, double tol = 1e-3);

}  // namespace fc
