#pragma once

// Derivative-free simplex minimizer with dimension-dependent coefficients
// (expansion 1 + 2/n, contraction 0.75 - 1/(2n), shrink 1 - 1/n).

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace vaxsite::detail {

struct SimplexOptions {
  std::size_t max_evaluations = 2000;
  double tolerance = 1e-12;  // stop when every vertex is this close to the best
  bool adaptive = true;
  double target = -HUGE_VAL;  // stop once the best value reaches this
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Never calls `f` more than `options.max_evaluations` times.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start, const std::vector<double>& step,
                          const SimplexOptions& options);

}  // namespace vaxsite::detail
