#pragma once

#include <string>

namespace fc {

enum class MLBranch { series, asymptotic, integral };

struct MLQuery {
  double alpha;
  double beta;
  double z;
};

struct MLResult {
  double value = 0.0;
  double est_abs_err = 0.0;
  MLBranch branch = MLBranch::series;
};

std::string to_string(MLBranch b);

// 1/Gamma(x), finite (zero) at the poles
double rgamma(double x);
double gamma_fn(double x);

// E_{alpha,beta}(z) for real z, alpha in (0,2], beta > 0.
// Throws std::domain_error on bad parameters and std::overflow_error
// when the value leaves the double range.
MLResult ml(const MLQuery& q);
inline double ml(double alpha, double beta, double z) { return ml(MLQuery{alpha, beta, z}).value; }

// t^{beta-1} E_{alpha,beta}(-lambda t^alpha)
double ml_kernel(double alpha, double beta, double lambda, double t);

// 1 + Gamma(1-alpha) lambda y^alpha
double ml_reciprocal_bound(double alpha, double lambda, double y);

}  // namespace fc
