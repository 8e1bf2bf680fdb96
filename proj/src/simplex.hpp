#pragma once

// Dense two-phase primal simplex for the small allocation LPs that arise
// inside the exhaustive solver. Not meant for large models.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace vaxsite::detail {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    RowSense sense = RowSense::kLessEqual;
    double rhs = 0.0;
  };

  std::vector<double> cost;
  std::vector<double> lower;  // finite
  std::vector<double> upper;  // may be +inf
  std::vector<Row> rows;

  std::size_t num_vars() const noexcept { return cost.size(); }
  std::size_t add_var(double c, double lo = 0.0,
                      double hi = std::numeric_limits<double>::infinity());
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

LpResult solve_lp(const LinearProgram& lp, std::size_t max_iterations = 200000);

}  // namespace vaxsite::detail
