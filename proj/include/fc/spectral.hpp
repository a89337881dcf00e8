#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace fc {

struct LateralBC {
  enum class Kind { dirichlet, neumann, robin };
  Kind kind = Kind::dirichlet;
  double robin_coeff = 1.0;

  static LateralBC dirichlet() { return {Kind::dirichlet, 0.0}; }
  static LateralBC neumann() { return {Kind::neumann, 0.0}; }
  static LateralBC robin(double s) { return {Kind::robin, s}; }
};

std::string to_string(LateralBC::Kind k);
LateralBC::Kind lateral_kind_from_string(const std::string& s);

// On a uniform grid x_i = i h, h = L/(N-1).
std::vector<double> uniform_grid(double L, int N);
std::vector<double> trapezoid_weights(double L, int N);
double trapezoid(const std::vector<double>& f, double h);
double l2norm(const std::vector<double>& f, double h);

struct EigenBasis {
  double L = 1.0;
  LateralBC bc;
  int J = 0;
  int N = 0;
  double h = 0.0;
  std::vector<double> lambdas;
  std::vector<double> x;
  std::vector<double> w;  // trapezoid weights
  Eigen::MatrixXd modes;  // N x J, columns phi_j on the grid

  double sqrt_lambda(int j) const;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

// J <= 0 selects the default J = N/4.
BasisPtr build_basis(double L, const LateralBC& bc, int J, int N);

// Robin characteristic function, scaled: zero at k = sqrt(lambda).
double robin_characteristic(double k, double sigma, double L);

struct SpectralCoeffs {
  BasisPtr basis;
  Eigen::VectorXd c;
};

SpectralCoeffs analyze(const std::vector<double>& samples, const BasisPtr& basis);
std::vector<double> synthesize(const SpectralCoeffs& coeffs);

// Cosine modes cos(k pi x / L), k < K, used to smooth curve updates.
std::vector<double> project_cosine(const std::vector<double>& f, double L, int K);
Eigen::MatrixXd cosine_matrix(const std::vector<double>& x, double L, int K);
Eigen::MatrixXd cosine_dmatrix(const std::vector<double>& x, double L, int K);

}  // namespace fc
