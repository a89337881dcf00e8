#pragma once

#include "fc/continuation.hpp"
#include "fc/spectral.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fc {

struct Curve {
  std::vector<double> ell;
  double L = 1.0;
  double olell = 1.0;

  int n() const { return static_cast<int>(ell.size()); }
  double h() const { return L / (n() - 1); }
  std::vector<double> x() const { return uniform_grid(L, n()); }
  std::vector<double> derivative() const;
  std::vector<double> second_derivative() const;
  void validate() const;
};

// centered differences, one-sided second order at the ends
std::vector<double> diff(const std::vector<double>& v, double h);

// gamma~ = sqrt(1 + l'^2) gamma
std::vector<double> combined_gamma(const Curve& c, const std::vector<double>& gamma);

struct InterfaceBC {
  enum class Kind { N, D, I };
  Kind kind = Kind::D;
  std::vector<double> gamma;  // combined coefficient, used iff kind = I

  static InterfaceBC dirichlet() { return {Kind::D, {}}; }
  static InterfaceBC neumann() { return {Kind::N, {}}; }
  static InterfaceBC impedance(std::vector<double> g) { return {Kind::I, std::move(g)}; }
};

std::string to_string(InterfaceBC::Kind k);
InterfaceBC::Kind interface_kind_from_string(const std::string& s);

// Values on an N x M structured mesh, stored row-major by x: values[i*M + m].
// mapped: y = eta * ell(x_i), eta = m/(M-1).  hold-all: y = m * olell/(M-1).
struct MeshField {
  int N = 0, M = 0;
  double L = 1.0, olell = 1.0;
  bool mapped = true;
  Curve curve;
  LateralBC lateral;
  InterfaceBC iface;
  std::vector<double> values;
  std::vector<double> ys;  // slice heights of a hold-all field
  std::vector<std::string> warnings;

  double& at(int i, int m) { return values[static_cast<size_t>(i) * M + m]; }
  double at(int i, int m) const { return values[static_cast<size_t>(i) * M + m]; }
  double y(int i, int m) const;
};

void write_csv(std::ostream& os, const MeshField& f);

struct Traces {
  std::vector<double> u, u_x, u_y, u_yy, u_xy;
};

// Optional inhomogeneous data for the forward problem: right-hand side of the
// interface row (value for D, sqrt(1+l'^2)(d_nu u + gamma u) for N/I).
struct ForwardExtras {
  std::vector<double> interface_rhs;
};

MeshField solve_forward(const Curve& curve, const LateralBC& lateral, const InterfaceBC& iface,
                        const std::vector<double>& f, int M = 65, const ForwardExtras* extras = nullptr);

std::vector<double> bottom_flux(const MeshField& field);

// traces on y = ell(x); for hold-all fields the curve is passed explicitly
Traces interface_traces(const MeshField& field);
Traces holdall_traces(const MeshField& field, const Curve& curve);

MeshField solve_cauchy_holdall(const CauchyData& data, const LateralBC& lateral, ContinuationScheme& scheme,
                               const std::vector<double>& y_grid, double olell, ContinuationStats* st = nullptr);

// Discrete residual of the interior equation (max abs), for diagnostics.
double interior_residual(const MeshField& field);

// Corner compatibility of the bottom data with the lateral condition; solve_forward
// stores the result in MeshField::warnings.
std::vector<std::string> corner_compatibility(const Curve& curve, const LateralBC& lateral,
                                              const std::vector<double>& f);

}  // namespace fc
