#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fc {

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  // the measured quantity
  std::string detail;
};

// classical identities E_{1,1}=exp, E_{2,1}(-x^2)=cos, E_{2,2}(-x^2)=sin x/x
PropertyCheck check_ml_identities();
// t -> E_{a,1}(-t) positive and non-increasing on [1e-4, 1e4]
PropertyCheck check_ml_monotone();
// 1/E_{a,1}(-lam y^a) <= 1 + Gamma(1-a) lam y^a on the 4x4x4 grid; value = violations
PropertyCheck check_reciprocal_bound();
// log-log slope of ||E_{a,1}(-25 t^a) - exp(-25 t)||_{L2(0,1)} against 1-a
PropertyCheck check_rate_slope();
// sup_{[0.25,1]} |d_a| / (1-a) stable within 2x across a, for lam in {4,25,100}
PropertyCheck check_rate_bounds();

std::vector<PropertyCheck> lemma_suites();
// prints one line per check, returns the number of failures
int print_checks(std::ostream& os, const std::vector<PropertyCheck>& v);

}  // namespace fc
