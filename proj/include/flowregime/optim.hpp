#pragma once

#include <functional>
#include <vector>

namespace flowregime {

struct NelderMeadOptions {
  int max_evals = 500;
  double spread_tol = 1e-8;   // simplex function-value spread
  double initial_step = 0.1;  // per-coordinate simplex offset
  // Scale the spread tolerance by 1+|f_best|; used on sum-of-squares
  // surfaces whose magnitude grows with the sample size.
  bool relative_spread = false;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fval = 0.0;
  int evals = 0;
  bool converged = false;
};

// Minimizes f. Derivative-free; good enough for the 3-4 dimensional
// likelihood surfaces used here.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, NelderMeadOptions opts = {});

}  // namespace flowregime
