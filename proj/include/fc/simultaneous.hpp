#pragma once

#include "fc/elliptic.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fc {

// Two excitations on the same curve, impedance interface with combined coefficient.
struct Problem3 {
  LateralBC lateral = LateralBC::robin(1.0);
  std::vector<double> f1, f2;
  int M = 65;
};

struct JointState {
  MeshField u1, u2;
  Curve ell;
  std::vector<double> gam1, gam2;
};

JointState joint_state(const Problem3& p, const Curve& ell, const std::vector<double>& gam);

struct RankDeficiency : std::runtime_error {
  double x_begin, x_end;
  RankDeficiency(const std::string& what, double a, double b) : std::runtime_error(what), x_begin(a), x_end(b) {}
};

// B_{l,gamma~} zbar_j on the current curve
std::vector<double> joint_rhs(const JointState& s, const MeshField& zbar, int j);

// G(u_j, l, gamma~)(dl, dg) = (dl u_jx)' - gamma~ u_jy dl - u_j dg, derivatives along the curve
std::vector<double> apply_G(const JointState& s, int j, const std::vector<double>& dl, const std::vector<double>& dg);

std::vector<double> wronskian(const MeshField& u1, const MeshField& u2, const Curve& curve);

struct JointStepConfig {
  int J_ell = 6;
  int J_gam = 6;
  double reg = 1e-6;  // relative to the largest eigenvalue of the normal matrix
  bool pin_ends = true;
  double wronskian_floor = 1e-6;
};

struct JointStep {
  std::vector<double> dl, dgam;
  double rhs_norm = 0.0;       // ||(b_1, b_2)||
  double lin_residual = 0.0;   // ||G(dl,dg) - b|| / ||b||
  double sigma_ratio = 0.0;    // smallest / largest singular value of the system
};

JointStep joint_newton_step(const JointState& s, const MeshField& zbar1, const MeshField& zbar2,
                            const JointStepConfig& cfg);

// Elimination path.  The integration starts at index i0 (default: first point
// where |a~| exceeds the floor), with dl(x_i0) = dl0.
struct EliminationCoeffs {
  std::vector<double> a, beta, b;
};
EliminationCoeffs elimination_coeffs(const JointState& s, const MeshField& zbar1, const MeshField& zbar2);
std::vector<double> eliminate_dl(const JointState& s, const MeshField& zbar1, const MeshField& zbar2, double dl0,
                                 int i0 = -1, double floor_rel = 1e-2);
std::vector<double> eliminate_dl(const EliminationCoeffs& k, double h, double dl0, int i0 = -1,
                                 double floor_rel = 1e-2);
std::vector<double> eliminate_dgam(const JointState& s, const std::vector<double>& dl, const std::vector<double>& b1);

struct JointRecoveryConfig {
  int max_iter = 10;
  double stop_tol = 1e-4;
  double gam_min = 1e-2;
  JointStepConfig step;
};

struct JointTrace {
  std::vector<Curve> ell;
  std::vector<std::vector<double>> gam;
  std::vector<double> residual_norms;  // ||(B z1, B z2)|| / ||(g1, g2)|| on each iterate
  std::vector<double> relerr_ell, relerr_gam;
  std::vector<std::string> warnings;
};

JointTrace recover_joint(const Problem3& p, const Curve& ell0, const std::vector<double>& gam0,
                         const MeshField& zbar1, const MeshField& zbar2, const std::vector<double>& g1,
                         const std::vector<double>& g2, const JointRecoveryConfig& cfg, const Curve* ell_true = nullptr,
                         const std::vector<double>* gam_true = nullptr);

// ---- all-at-once formulation ----

// u(x,y) = sum_k phi_k(x) (p_k cosh(s_k y) + q_k sinh(s_k y)/s_k): harmonic and
// satisfying the lateral condition by construction
struct ModalField {
  BasisPtr basis;
  Eigen::VectorXd p, q;
};

Traces modal_traces(const ModalField& u, const Curve& curve);
std::vector<double> modal_bottom_flux(const ModalField& u);

struct AllAtOnceState {
  ModalField u1, u2;
  Curve ell;
  std::vector<double> gam1, gam2;
};

// modal field solving the forward problem exactly for constant ell and gamma~
ModalField modal_forward_flat(const BasisPtr& b, const std::vector<double>& f, double ell, double gam);
// general curve: q by least squares collocation of the interface condition at the grid points;
// free of the corner singularity that incompatible bottom data causes on the mesh
ModalField modal_forward(const BasisPtr& b, const std::vector<double>& f, const Curve& ell,
                         const std::vector<double>& gam);

struct PenaltyOp {
  double ell0_endpoint = 0.0;
};

struct FrozenNewtonConfig {
  double alpha0 = 1e-2;
  double theta = 0.6;
  double tau = 1.5;
  int max_iter = 40;
  int J_ell = 8;
  int J_gam = 8;
  double weight_exp = 1.5;  // (1 + lambda)^weight_exp on the modal u coefficients
};

struct FrozenIter {
  int n = 0;
  double alpha = 0.0;
  double residual = 0.0;
  double relerr_ell = 0.0, relerr_gam = 0.0;
};

struct FrozenResult {
  AllAtOnceState xi;
  int n_star = 0;
  bool stopped_by_discrepancy = false;
  bool nstar_conditions = false;  // alpha_{n*} -> 0 and delta^2/alpha_{n*-1} -> 0 proxies
  std::vector<FrozenIter> trace;
};

// data: (f_j, g_j^delta) on the basis grid; delta is the relative noise level
FrozenResult frozen_newton(const CauchyData& d1, const CauchyData& d2, const AllAtOnceState& xi0,
                           const PenaltyOp& pen, const FrozenNewtonConfig& cfg, const Curve* ell_true = nullptr,
                           const std::vector<double>* gam_true = nullptr);

// frozen Jacobian [K; P] at xi0 in the coordinates used by frozen_newton;
// returns its singular values (descending)
Eigen::VectorXd stacked_singular_values(const AllAtOnceState& xi0, const PenaltyOp& pen, const FrozenNewtonConfig& cfg);

// || r(xi) - (xi - xi0) || in the discrete L2 norm of the gamma components
// (the u and ell components vanish identically)
double range_invariance_residual(const AllAtOnceState& xi, const AllAtOnceState& xi0);

}  // namespace fc
