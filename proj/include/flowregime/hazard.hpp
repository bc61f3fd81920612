#pragma once

#include <cmath>

#include "flowregime/errors.hpp"
#include "flowregime/math_util.hpp"

namespace flowregime {

// Bernoulli change-point prior: constant probability of a break per interval.
class Hazard {
 public:
  explicit Hazard(double cp_prob) : cp_prob_(cp_prob) {
    if (!(cp_prob > 0.0) || cp_prob > 1.0)
      throw ConfigError("hazard: cp_prob must be in (0, 1]");
    log_cp_ = std::log(cp_prob);
    log_growth_ = cp_prob < 1.0 ? std::log1p(-cp_prob) : kNegInf;
  }

  double cp_prob() const { return cp_prob_; }
  double log_cp() const { return log_cp_; }
  double log_growth() const { return log_growth_; }

 private:
  double cp_prob_;
  double log_cp_;
  double log_growth_;
};

struct HazardTransition {
  double p_reset;  // mass moved to run length 0
  double p_grow;   // mass moved to r_prev + 1
};

inline HazardTransition hazard_transition(std::int64_t r_prev, const Hazard& hz) {
  (void)r_prev;  // the prior is memoryless in the run length
  return {hz.cp_prob(), 1.0 - hz.cp_prob()};
}

}  // namespace flowregime
