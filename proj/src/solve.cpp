#include "vaxsite/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simplex.hpp"
#include "vaxsite/mcf.hpp"

namespace vaxsite::solve {

using plan::AllocationPlan;
using plan::Instance;
using plan::PlanModel;

std::string_view status_name(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kFeasible: return "feasible";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kExported: return "exported";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntegrality = 1e-6;

double tolerance(double reference) { return 1e-9 * std::max(1.0, std::fabs(reference)); }

bool improves(double value, double incumbent) {
  return !std::isfinite(incumbent) || value < incumbent - tolerance(incumbent);
}

// A block of residents of `home` sharing one cost row: the non-commuters
// (work == home, commuter == false) or the commuters to `work`.
struct Group {
  std::size_t home = 0;
  std::size_t work = 0;
  bool commuter = false;
  Count size = 0;
};

std::vector<Group> make_groups(const Instance& inst) {
  std::vector<Group> groups;
  const auto n = inst.size();
  for (std::size_t u = 0; u < n; ++u) {
    if (const auto nc = inst.non_commuters(u); nc > 0) groups.push_back({u, u, false, nc});
    for (std::size_t v = 0; v < n; ++v) {
      if (const auto e = inst.commuters.e(u, v); e > 0) groups.push_back({u, v, true, e});
    }
  }
  return groups;
}

double group_cost(const Instance& inst, const Group& g, std::size_t w) {
  return g.commuter ? inst.travel.d(g.home, g.work, w) : inst.travel.roundtrip(g.home, w);
}

void assign(AllocationPlan& plan, const Group& g, std::size_t t, std::size_t w, Count amount) {
  if (g.commuter) {
    plan.z(t, g.home, g.work, w) += amount;
  } else {
    plan.y(t, g.home, w) += amount;
  }
}

AllocationPlan empty_plan(const PlanModel& model, const std::vector<std::size_t>& sites) {
  const auto& l = model.layout();
  AllocationPlan plan(l.n(), l.periods(), l.has_z());
  for (auto w : sites) plan.open()[w] = true;
  return plan;
}

// Travel-only optimum with periods aggregated per site; costs do not depend
// on the period, so any split that respects per-period supply is optimal.
struct TravelFlow {
  bool feasible = false;
  double cost = 0.0;
  std::vector<std::vector<Count>> flow;  // [group][site slot]
};

TravelFlow travel_flow(const Instance& inst, const std::vector<Group>& groups,
                       const std::vector<std::size_t>& sites) {
  const auto g_count = groups.size();
  const auto s_count = sites.size();
  const std::size_t source = 0, sink = 1 + g_count + s_count;
  flow::MinCostFlow mcf(sink + 1);
  Count demand = 0;
  std::vector<std::vector<std::size_t>> arcs(g_count, std::vector<std::size_t>(s_count));
  for (std::size_t g = 0; g < g_count; ++g) {
    demand += groups[g].size;
    mcf.add_arc(source, 1 + g, groups[g].size, 0.0);
    for (std::size_t k = 0; k < s_count; ++k) {
      arcs[g][k] = mcf.add_arc(1 + g, 1 + g_count + k, groups[g].size,
                               group_cost(inst, groups[g], sites[k]));
    }
  }
  for (std::size_t k = 0; k < s_count; ++k) {
    Count capacity = 0;
    for (std::size_t t = 0; t < inst.periods(); ++t) capacity += inst.supply(t, sites[k]);
    mcf.add_arc(1 + g_count + k, sink, capacity, 0.0);
  }
  const auto result = mcf.solve(source, sink);
  TravelFlow out;
  out.feasible = result.flow == demand;
  out.cost = result.cost;
  out.flow.assign(g_count, std::vector<Count>(s_count, 0));
  for (std::size_t g = 0; g < g_count; ++g) {
    for (std::size_t k = 0; k < s_count; ++k) out.flow[g][k] = mcf.flow(arcs[g][k]);
  }
  return out;
}

AllocationPlan split_by_period(const PlanModel& model, const std::vector<Group>& groups,
                               const std::vector<std::size_t>& sites, const TravelFlow& tf) {
  const auto& inst = model.instance();
  auto plan = empty_plan(model, sites);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    std::vector<Count> room(inst.periods());
    for (std::size_t t = 0; t < inst.periods(); ++t) room[t] = inst.supply(t, sites[k]);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      Count left = tf.flow[g][k];
      for (std::size_t t = 0; t < inst.periods() && left > 0; ++t) {
        const auto take = std::min(left, room[t]);
        if (take <= 0) continue;
        assign(plan, groups[g], t, sites[k], take);
        room[t] -= take;
        left -= take;
      }
      if (left != 0) throw Error(ErrorCode::kInvariantBreach, "period split overflowed supply");
    }
  }
  return plan;
}

bool needs_health_search(const PlanModel& model) {
  const auto& h = model.instance().health;
  return model.layout().has_health() && (h.lambda > 0.0 || h.lambda_eq > 0.0);
}

// LP over the allocation a(g, t, k) with optional shortfall and spread
// variables, used for branch-and-bound when health or equity terms are on.
struct AllocationLp {
  detail::LinearProgram lp;
  std::size_t periods = 0, sites = 0, districts = 0;
  std::size_t allocation_vars = 0;
  // Integer totals v(t, u) follow the allocation block; the shortfall and
  // spread terms only see these, so they are branched on first.
  std::size_t totals_end = 0;

  std::size_t a(std::size_t g, std::size_t t, std::size_t k) const {
    return (g * periods + t) * sites + k;
  }
  std::size_t v(std::size_t t, std::size_t u) const {
    return allocation_vars + t * districts + u;
  }
};

AllocationLp build_allocation_lp(const PlanModel& model, const std::vector<Group>& groups,
                                 const std::vector<std::size_t>& sites) {
  const auto& inst = model.instance();
  const auto& h = inst.health;
  const auto n = inst.size();
  AllocationLp out;
  out.periods = inst.periods();
  out.sites = sites.size();
  auto& lp = out.lp;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t t = 0; t < out.periods; ++t) {
      for (std::size_t k = 0; k < out.sites; ++k) {
        lp.add_var(group_cost(inst, groups[g], sites[k]), 0.0,
                   static_cast<double>(groups[g].size));
      }
    }
  }
  out.allocation_vars = lp.num_vars();
  out.districts = n;
  for (std::size_t t = 0; t < out.periods; ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      const auto v = lp.add_var(0.0, 0.0, static_cast<double>(inst.districts.population(u)));
      detail::LinearProgram::Row row{{{v, -1.0}}, detail::RowSense::kEqual, 0.0};
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].home != u) continue;
        for (std::size_t k = 0; k < out.sites; ++k) row.terms.emplace_back(out.a(g, t, k), 1.0);
      }
      lp.rows.push_back(std::move(row));
    }
  }
  out.totals_end = lp.num_vars();

  // Residents of u vaccinated in period t.
  const auto vaccinated = [&](std::size_t t, std::size_t u, double sign,
                              std::vector<std::pair<std::size_t, double>>& terms) {
    terms.emplace_back(out.v(t, u), sign);
  };

  for (std::size_t g = 0; g < groups.size(); ++g) {
    detail::LinearProgram::Row row{{}, detail::RowSense::kEqual,
                                   static_cast<double>(groups[g].size)};
    for (std::size_t t = 0; t < out.periods; ++t) {
      for (std::size_t k = 0; k < out.sites; ++k) row.terms.emplace_back(out.a(g, t, k), 1.0);
    }
    lp.rows.push_back(std::move(row));
  }
  for (std::size_t t = 0; t < out.periods; ++t) {
    for (std::size_t k = 0; k < out.sites; ++k) {
      detail::LinearProgram::Row row{{}, detail::RowSense::kLessEqual,
                                     static_cast<double>(inst.supply(t, sites[k]))};
      for (std::size_t g = 0; g < groups.size(); ++g) row.terms.emplace_back(out.a(g, t, k), 1.0);
      lp.rows.push_back(std::move(row));
    }
  }
  if (h.lambda > 0.0) {
    for (std::size_t t = 0; t < out.periods; ++t) {
      for (std::size_t u = 0; u < n; ++u) {
        const double target = static_cast<double>(inst.districts.population(u)) * h.targets[u];
        const auto zeta = lp.add_var(h.lambda * h.delta(t, u));
        detail::LinearProgram::Row row{{{zeta, 1.0}}, detail::RowSense::kGreaterEqual, target};
        for (std::size_t s = 0; s <= t; ++s) vaccinated(s, u, 1.0, row.terms);
        lp.rows.push_back(std::move(row));
      }
    }
  }
  if (h.lambda_eq > 0.0) {
    for (std::size_t t = 0; t < inst.equity_periods(); ++t) {
      const auto tau = lp.add_var(h.lambda_eq);
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t u2 = 0; u2 < n; ++u2) {
          if (u == u2) continue;
          detail::LinearProgram::Row row{{{tau, 1.0}}, detail::RowSense::kGreaterEqual, 0.0};
          vaccinated(t, u, -1.0, row.terms);
          vaccinated(t, u2, 1.0, row.terms);
          lp.rows.push_back(std::move(row));
        }
      }
    }
  }
  return out;
}

AllocationPlan plan_from_lp(const PlanModel& model, const std::vector<Group>& groups,
                            const std::vector<std::size_t>& sites, const AllocationLp& alp,
                            const std::vector<double>& x) {
  auto plan = empty_plan(model, sites);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t t = 0; t < alp.periods; ++t) {
      for (std::size_t k = 0; k < alp.sites; ++k) {
        const auto amount = static_cast<Count>(std::llround(x[alp.a(g, t, k)]));
        if (amount != 0) assign(plan, groups[g], t, sites[k], amount);
      }
    }
  }
  return plan;
}

double composite(const PlanModel& model, const AllocationPlan& plan) {
  return plan::evaluate_plan(model, plan).composite;
}

}  // namespace

SubsetResult solve_subset(const PlanModel& model, const std::vector<std::size_t>& sites,
                          double cutoff, const Limits& limits) {
  const auto& inst = model.instance();
  const auto groups = make_groups(inst);
  SubsetResult result;
  result.open_bound = plan::kInfinity;

  const auto tf = travel_flow(inst, groups, sites);
  result.feasible = tf.feasible;
  result.travel_bound = tf.cost;
  if (!tf.feasible) return result;
  if (!improves(tf.cost, cutoff)) {
    result.pruned = true;
    return result;
  }

  // The travel-optimal split is feasible; it is optimal when no health or
  // equity weight is active and otherwise seeds the incumbent.
  auto seed = split_by_period(model, groups, sites, tf);
  const double seed_value = composite(model, seed);
  double incumbent = cutoff;
  if (improves(seed_value, incumbent)) {
    incumbent = seed_value;
    result.plan = std::move(seed);
    result.objective = seed_value;
  }
  if (!needs_health_search(model)) return result;

  auto alp = build_allocation_lp(model, groups, sites);
  struct Node {
    std::vector<double> lower, upper;
    double bound;
  };
  std::vector<Node> stack;
  stack.push_back({alp.lp.lower, alp.lp.upper, tf.cost});
  while (!stack.empty()) {
    if (result.nodes >= limits.max_nodes_per_subset) {
      for (const auto& node : stack) result.open_bound = std::min(result.open_bound, node.bound);
      break;
    }
    auto node = std::move(stack.back());
    stack.pop_back();
    if (!improves(node.bound, incumbent)) continue;
    ++result.nodes;
    alp.lp.lower = node.lower;
    alp.lp.upper = node.upper;
    const auto lp = detail::solve_lp(alp.lp);
    if (lp.status == detail::LpStatus::kInfeasible) continue;
    if (lp.status != detail::LpStatus::kOptimal) {
      throw Error(ErrorCode::kInvariantBreach, "allocation LP did not reach optimality");
    }
    if (!improves(lp.objective, incumbent)) continue;

    const std::size_t none = alp.totals_end;
    const auto most_fractional = [&](std::size_t from, std::size_t to) {
      std::size_t pick = none;
      double most = kIntegrality;
      for (std::size_t j = from; j < to; ++j) {
        const double frac = std::fabs(lp.x[j] - std::round(lp.x[j]));
        if (frac > most) {
          most = frac;
          pick = j;
        }
      }
      return pick;
    };
    auto branch = most_fractional(alp.allocation_vars, alp.totals_end);
    if (branch == none) branch = most_fractional(0, alp.allocation_vars);
    if (branch == none) {
      auto candidate = plan_from_lp(model, groups, sites, alp, lp.x);
      const double value = composite(model, candidate);
      if (improves(value, incumbent)) {
        incumbent = value;
        result.objective = value;
        result.plan = std::move(candidate);
      }
      continue;
    }
    const double v = lp.x[branch];
    Node down{node.lower, node.upper, lp.objective};
    down.upper[branch] = std::floor(v);
    Node up{std::move(node.lower), std::move(node.upper), lp.objective};
    up.lower[branch] = std::ceil(v);
    // Explore the nearer side first.
    if (v - std::floor(v) < 0.5) {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));
    } else {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    }
  }
  return result;
}

namespace {

std::size_t choose_bounded(std::size_t n, std::size_t k, std::size_t cap) {
  // C(n, k), saturating just above cap.
  k = std::min(k, n - k);
  unsigned long long value = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    value = value * (n - k + i) / i;
    if (value > cap) return cap + 1;
  }
  return static_cast<std::size_t>(value);
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const auto k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SolveReport solve_exhaustive(const PlanModel& model, const Limits& limits) {
  const auto started = Clock::now();
  const auto& inst = model.instance();
  const auto n = inst.size();

  std::vector<std::size_t> subset;
  bool pinned = !inst.fixed_open.empty();
  if (pinned) {
    for (std::size_t w = 0; w < n; ++w) {
      if (inst.fixed_open[w]) subset.push_back(w);
    }
  } else {
    const auto k = std::min(inst.max_sites, n);
    const auto count = choose_bounded(n, k, limits.max_subsets);
    if (count > limits.max_subsets) {
      throw Error(ErrorCode::kTooLarge, "C(" + std::to_string(n) + ", " + std::to_string(k) +
                                            ") site subsets exceed the limit of " +
                                            std::to_string(limits.max_subsets));
    }
    subset.resize(k);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
  }

  SolveReport report;
  double incumbent = plan::kInfinity;
  double lower_bound = plan::kInfinity;  // over subsets left incomplete
  bool any_feasible = false;
  bool exhausted = true;
  do {
    if (limits.time_budget.count() > 0.0 &&
        Clock::now() - started > limits.time_budget) {
      exhausted = false;
      break;
    }
    ++report.nodes_or_subsets;
    auto sub = solve_subset(model, subset, incumbent, limits);
    report.bb_nodes += sub.nodes;
    any_feasible = any_feasible || sub.feasible;
    if (sub.pruned) ++report.subsets_pruned;
    lower_bound = std::min(lower_bound, sub.open_bound);
    if (sub.plan && improves(sub.objective, incumbent)) {
      incumbent = sub.objective;
      report.plan = std::move(sub.plan);
    }
  } while (!pinned && next_combination(subset, n));

  report.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
  if (!report.plan) {
    if (exhausted && !any_feasible) {
      throw Error(ErrorCode::kInfeasible, "no site subset admits a feasible allocation");
    }
    if (exhausted) {
      throw Error(ErrorCode::kInvariantBreach, "feasible subsets produced no plan");
    }
    throw Error(ErrorCode::kInfeasible, "time budget exhausted before a feasible plan was found");
  }
  report.objective = incumbent;
  if (!exhausted) lower_bound = 0.0;  // objective terms are non-negative
  if (lower_bound < incumbent - tolerance(incumbent)) {
    report.status = Status::kFeasible;
    report.gap = (incumbent - lower_bound) / std::max(1.0, std::fabs(incumbent));
  } else {
    report.status = Status::kOptimal;
    report.gap = 0.0;
  }
  return report;
}

std::vector<plan::Violation> validate(const PlanModel& model, const AllocationPlan& plan) {
  return plan::check_plan(model.instance(), plan);
}

std::vector<plan::Violation> validate_assignment(const PlanModel& model,
                                                 std::span<const double> values,
                                                 double tol) {
  std::vector<plan::Violation> out;
  const auto& vars = model.variables();
  if (values.size() != vars.size()) {
    out.push_back({plan::Family::k1a, "assignment length", 1.0});
    return out;
  }
  const auto family_of = [&](std::size_t j) {
    const auto& l = model.layout();
    if (j < l.x_count()) return plan::Family::k1a;
    if (j < l.x_count() + l.y_count()) return plan::Family::k1b;
    if (j < l.x_count() + l.y_count() + l.z_count()) return plan::Family::k1c;
    if (j < l.x_count() + l.y_count() + l.z_count() + l.zeta_count()) return plan::Family::k2g;
    return plan::Family::k2h;
  };
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double v = values[j];
    if (v < vars[j].lower - tol) {
      out.push_back({family_of(j), "bound " + vars[j].name, vars[j].lower - v});
    }
    if (v > vars[j].upper + tol) {
      out.push_back({family_of(j), "bound " + vars[j].name, v - vars[j].upper});
    }
  }
  for (const auto& c : model.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values[t.var];
    const double scale = tol * std::max(1.0, std::fabs(c.rhs));
    double excess = 0.0;
    switch (c.sense) {
      case plan::Sense::kLessEqual: excess = lhs - c.rhs; break;
      case plan::Sense::kGreaterEqual: excess = c.rhs - lhs; break;
      case plan::Sense::kEqual: excess = std::fabs(lhs - c.rhs); break;
    }
    if (excess > scale) out.push_back({c.family, c.name, excess});
  }
  return out;
}

}  // namespace vaxsite::solve
