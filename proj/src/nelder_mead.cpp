#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vaxsite::detail {

namespace {

struct Vertex {
  std::vector<double> x;
  double f = 0.0;
};

std::vector<double> blend(const std::vector<double>& from, const std::vector<double>& to,
                          double t) {
  std::vector<double> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) out[i] = from[i] + t * (to[i] - from[i]);
  return out;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start, const std::vector<double>& step,
                          const SimplexOptions& options) {
  const std::size_t n = start.size();
  const double dim = static_cast<double>(n);
  const double expand = options.adaptive ? 1.0 + 2.0 / dim : 2.0;
  const double contract = options.adaptive ? 0.75 - 0.5 / dim : 0.5;
  const double shrink = options.adaptive ? 1.0 - 1.0 / dim : 0.5;

  SimplexResult result;
  std::size_t used = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++used;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  const auto budget_left = [&](std::size_t need) { return used + need <= options.max_evaluations; };

  if (n == 0 || !budget_left(1)) {
    result.x = start;
    result.value = n == 0 && budget_left(1) ? eval(start) : HUGE_VAL;
    result.evaluations = used;
    return result;
  }

  std::vector<Vertex> simplex;
  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < n && budget_left(1); ++i) {
    auto x = start;
    x[i] += step[i];
    simplex.push_back({x, eval(x)});
  }
  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  if (simplex.size() < n + 1) {
    const auto best = std::min_element(simplex.begin(), simplex.end(), by_value);
    result.x = best->x;
    result.value = best->f;
    result.evaluations = used;
    return result;
  }

  while (true) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    double spread = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        spread = std::max(spread, std::abs(simplex[k].x[i] - simplex[0].x[i]));
      }
    }
    if (spread <= options.tolerance || simplex[0].f <= options.target) {
      result.converged = true;
      break;
    }
    // Reflection plus one follow-up; a shrink needs n more.
    if (!budget_left(2)) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i] / dim;
    }
    auto& worst = simplex[n];
    const auto xr = blend(centroid, worst.x, -1.0);
    const double fr = eval(xr);
    if (fr < simplex[0].f) {
      const auto xe = blend(centroid, worst.x, -expand);
      const double fe = eval(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < simplex[n - 1].f) {
      worst = {xr, fr};
      continue;
    }
    const bool outside = fr < worst.f;
    const auto xc = outside ? blend(centroid, xr, contract) : blend(centroid, worst.x, contract);
    const double fc = eval(xc);
    if (fc < std::min(fr, worst.f)) {
      worst = {xc, fc};
      continue;
    }
    if (!budget_left(n)) {
      if (outside && fr < worst.f) worst = {xr, fr};
      break;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      simplex[k].x = blend(simplex[0].x, simplex[k].x, shrink);
      simplex[k].f = eval(simplex[k].x);
    }
  }
  const auto best = std::min_element(simplex.begin(), simplex.end(), by_value);
  result.x = best->x;
  result.value = best->f;
  result.evaluations = used;
  return result;
}

}  // namespace vaxsite::detail
