#include "simplex.hpp"

#include <algorithm>
#include <cmath>

namespace vaxsite::detail {

std::size_t LinearProgram::add_var(double c, double lo, double hi) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return cost.size() - 1;
}

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Row m_ holds reduced costs; its rhs holds minus the objective value.
  double& reduced(std::size_t c) { return at(m_, c); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void set_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= cols_; ++j) reduced(j) = j < cols_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Runs simplex iterations on the current cost row. Columns with
  // allowed[j] == false never enter.
  LpStatus optimize(const std::vector<char>& allowed, std::size_t& iterations,
                    std::size_t max_iterations) {
    const std::size_t bland_after = 50 * (m_ + cols_);
    std::size_t local = 0;
    while (true) {
      if (iterations >= max_iterations) return LpStatus::kIterationLimit;
      const bool bland = local >= bland_after;
      std::size_t enter = cols_;
      double best = -kCostEps;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allowed[j]) continue;
        const double r = reduced(j);
        if (r < best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter == cols_) return LpStatus::kOptimal;
      std::size_t leave = m_;
      double ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotEps) continue;
        const double q = rhs(i) / a;
        if (leave == m_ || q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && basis_[i] < basis_[leave])) {
          leave = i;
          ratio = q;
        }
      }
      if (leave == m_) return LpStatus::kUnbounded;
      pivot(leave, enter);
      ++iterations;
      ++local;
    }
  }

 private:
  std::size_t m_, cols_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, std::size_t max_iterations) {
  const std::size_t n = lp.num_vars();
  LpResult result;

  // Shift to x' = x - lower and add finite upper bounds as rows.
  struct StdRow {
    std::vector<std::pair<std::size_t, double>> terms;
    RowSense sense;
    double rhs;
  };
  std::vector<StdRow> rows;
  rows.reserve(lp.rows.size() + n);
  for (const auto& r : lp.rows) {
    double rhs = r.rhs;
    for (const auto& [j, a] : r.terms) rhs -= a * lp.lower[j];
    rows.push_back({r.terms, r.sense, rhs});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper[j])) {
      const double span = lp.upper[j] - lp.lower[j];
      if (span < -1e-9) return result;  // empty bound interval: infeasible
      rows.push_back({{{j, 1.0}}, RowSense::kLessEqual, std::max(span, 0.0)});
    }
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      r.rhs = -r.rhs;
      for (auto& t : r.terms) t.second = -t.second;
      if (r.sense == RowSense::kLessEqual) {
        r.sense = RowSense::kGreaterEqual;
      } else if (r.sense == RowSense::kGreaterEqual) {
        r.sense = RowSense::kLessEqual;
      }
    }
  }

  const std::size_t m = rows.size();
  std::size_t slack_count = 0, artificial_count = 0;
  for (const auto& r : rows) {
    if (r.sense != RowSense::kEqual) ++slack_count;
    if (r.sense != RowSense::kLessEqual) ++artificial_count;
  }
  const std::size_t first_slack = n;
  const std::size_t first_artificial = n + slack_count;
  const std::size_t cols = first_artificial + artificial_count;

  Tableau tab(m, cols);
  std::size_t slack = first_slack, artificial = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& [j, a] : rows[i].terms) tab.at(i, j) += a;
    tab.rhs(i) = rows[i].rhs;
    switch (rows[i].sense) {
      case RowSense::kLessEqual:
        tab.at(i, slack) = 1.0;
        tab.basis()[i] = slack++;
        break;
      case RowSense::kGreaterEqual:
        tab.at(i, slack++) = -1.0;
        tab.at(i, artificial) = 1.0;
        tab.basis()[i] = artificial++;
        break;
      case RowSense::kEqual:
        tab.at(i, artificial) = 1.0;
        tab.basis()[i] = artificial++;
        break;
    }
  }

  std::vector<char> allowed(cols, 1);
  if (artificial_count > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = first_artificial; j < cols; ++j) phase1[j] = 1.0;
    tab.set_costs(phase1);
    const auto status = tab.optimize(allowed, result.iterations, max_iterations);
    if (status == LpStatus::kIterationLimit) {
      result.status = status;
      return result;
    }
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::fabs(r.rhs));
    if (-tab.reduced(cols) > 1e-9 * scale) return result;  // infeasible
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < first_artificial) continue;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (std::fabs(tab.at(i, j)) > kPivotEps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = 0;
  }

  std::vector<double> phase2(cols, 0.0);
  std::copy(lp.cost.begin(), lp.cost.end(), phase2.begin());
  tab.set_costs(phase2);
  const auto status = tab.optimize(allowed, result.iterations, max_iterations);
  if (status != LpStatus::kOptimal) {
    result.status = status;
    return result;
  }

  result.status = LpStatus::kOptimal;
  result.x.assign(lp.lower.begin(), lp.lower.end());
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = tab.basis()[i];
    if (j < n) result.x[j] += tab.rhs(i);
  }
  for (std::size_t j = 0; j < n; ++j) result.objective += lp.cost[j] * result.x[j];
  return result;
}

}  // namespace vaxsite::detail
