#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "vaxsite/plan.hpp"
#include "vaxsite/solve.hpp"

namespace vaxsite::plan {
namespace {

using testing::close_relative;
using testing::make_districts;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvariantBreach;
}

struct Fixture {
  ingest::DistrictTable table;
  ingest::CommuterMatrix commuters;
  travel::TravelModel travel;
  ingest::SupplySchedule supply;
};

Fixture three_by_two(Count capacity = 100) {
  const auto table = make_districts({10, 20, 30});
  ingest::CommuterMatrix e{Matrix<Count>(3, 3, 0)};
  e.e(0, 1) = 3;
  e.e(2, 0) = 5;
  Matrix<double> c(3, 3, 0.0);
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t v = 0; v < 3; ++v) c(u, v) = u == v ? 0.0 : 5.0 + u + 2.0 * v;
  }
  return {table, e, travel::TravelModel(ingest::TravelMatrix{c}),
          ingest::uniform_supply(table, 2, 1, capacity)};
}

epi::PriorityScores scores_for(const Fixture& f) {
  return epi::priority_scores(f.commuters, f.supply.horizon());
}

TEST(BuildP1, VariableCounts) {
  const auto f = three_by_two();
  const auto p1 = build_p1(f.table, f.commuters, f.travel, f.supply, 2, true);
  EXPECT_EQ(p1.variables().size(), 75u);
  EXPECT_EQ(p1.formulation(), Formulation::kP1);
  const auto p0 = build_p1(f.table, f.commuters, f.travel, f.supply, 2, false);
  EXPECT_EQ(p0.variables().size(), 21u);
  EXPECT_EQ(p0.formulation(), Formulation::kP0);
  EXPECT_EQ(p0.count_constraints(Family::k1c), 0u);
  EXPECT_EQ(p0.count_constraints(Family::k1e), 0u);
  EXPECT_EQ(p1.count_constraints(Family::k1a), 1u);
  EXPECT_EQ(p1.count_constraints(Family::k1b), 3u);
  EXPECT_EQ(p1.count_constraints(Family::k1c), 9u);
  EXPECT_EQ(p1.count_constraints(Family::k1d), 18u);
  EXPECT_EQ(p1.count_constraints(Family::k1e), 54u);
  EXPECT_EQ(p1.count_constraints(Family::k1f), 6u);
}

TEST(BuildP1, OrderingAndNames) {
  const auto f = three_by_two();
  const auto m = build_p1(f.table, f.commuters, f.travel, f.supply, 2, true);
  const auto& v = m.variables();
  EXPECT_EQ(v[0].name, "X_00");
  EXPECT_EQ(v[0].kind, VarKind::kBinary);
  EXPECT_EQ(v[3].name, "Y_00_00_00");
  EXPECT_EQ(v[4].name, "Y_00_00_01");
  EXPECT_EQ(v[21].name, "Z_00_00_00_00");
  EXPECT_EQ(v.back().name, "Z_01_02_02_02");
  EXPECT_EQ(*m.find_variable("Y_01_02_00"), m.layout().y(1, 2, 0));
  EXPECT_FALSE(m.find_variable("Y_09_00_00"));
  std::set<std::string> names;
  for (const auto& var : v) names.insert(var.name);
  EXPECT_EQ(names.size(), v.size());
  for (const auto& c : m.constraints()) {
    for (const auto& t : c.terms) EXPECT_LT(t.var, v.size());
  }
}

TEST(BuildP1, ObjectiveIsTravel) {
  const auto f = three_by_two();
  const auto m = build_p1(f.table, f.commuters, f.travel, f.supply, 2, true);
  const auto& l = m.layout();
  EXPECT_EQ(m.objective()[l.y(1, 0, 2)], f.travel.roundtrip(0, 2));
  EXPECT_EQ(m.objective()[l.z(0, 2, 0, 1)], f.travel.d(2, 0, 1));
  EXPECT_EQ(m.objective()[l.x(1)], 0.0);
}

TEST(BuildP1, LinkingUsesSiteCapacity) {
  auto f = three_by_two();
  f.supply.doses(1, 2) = 42;
  const auto m = build_p1(f.table, f.commuters, f.travel, f.supply, 2, true);
  for (const auto& c : m.constraints()) {
    if (c.name == "C1D_01_00_02") {
      ASSERT_EQ(c.terms.size(), 2u);
      EXPECT_EQ(c.terms[1].coef, -42.0);
      return;
    }
  }
  FAIL() << "row not found";
}

TEST(BuildP1, Errors) {
  const auto f = three_by_two();
  EXPECT_EQ(code_of([&] { build_p1(f.table, f.commuters, f.travel, f.supply, 0, true); }),
            ErrorCode::kBadK);
  EXPECT_EQ(code_of([&] { build_p1(f.table, f.commuters, f.travel, f.supply, 4, true); }),
            ErrorCode::kBadK);
}

TEST(BuildP1, SupplyWarningsOrStrictErrors) {
  auto f = three_by_two(0);
  const auto m = build_p1(f.table, f.commuters, f.travel, f.supply, 2, true);
  ASSERT_FALSE(m.warnings().empty());
  EXPECT_NE(m.warnings()[0].find("ZeroCapacity"), std::string::npos);
  BuildOptions strict;
  strict.strict = true;
  EXPECT_EQ(code_of([&] { build_p1(f.table, f.commuters, f.travel, f.supply, 2, true, strict); }),
            ErrorCode::kZeroCapacity);
  f = three_by_two(10);  // two sites x 2 periods x 10 < 60 persons
  EXPECT_EQ(code_of([&] { build_p1(f.table, f.commuters, f.travel, f.supply, 2, true, strict); }),
            ErrorCode::kInfeasibleByConstruction);
  EXPECT_NO_THROW(build_p1(three_by_two().table, f.commuters, f.travel,
                           three_by_two().supply, 2, true, strict));
}

TEST(BuildP2, RowsAndWeights) {
  const auto table = make_districts({4, 6});
  ingest::CommuterMatrix e{Matrix<Count>(2, 2, 0)};
  e.e(0, 1) = 1;
  const travel::TravelModel travel(ingest::TravelMatrix{Matrix<double>(2, 2, 1.0)});
  const auto supply = ingest::uniform_supply(table, 1, 1, 10);
  const auto scores = epi::priority_scores(e, 1);
  const auto m = build_p2(table, e, travel, supply, 1, {0.5, 0.5}, scores, 10, 150);
  EXPECT_EQ(m.count_constraints(Family::k2h), 2u);
  EXPECT_EQ(m.count_constraints(Family::k2g), 2u);
  const auto& l = m.layout();
  EXPECT_EQ(l.zeta_count(), 2u);
  EXPECT_EQ(l.tau_count(), 1u);
  EXPECT_EQ(m.objective()[l.zeta(0, 0)], 10.0 * scores.delta(0, 0));
  EXPECT_EQ(m.objective()[l.tau(0)], 150.0);
  EXPECT_EQ(m.variables()[l.zeta(0, 1)].kind, VarKind::kContinuous);
  EXPECT_EQ(m.variables()[l.tau(0)].name, "TAU_00");
}

TEST(BuildP2, ZeroWeightsCollapseToP1) {
  const auto f = three_by_two();
  const auto p1 = build_p1(f.table, f.commuters, f.travel, f.supply, 2, true);
  const auto p2 = build_p2(f.table, f.commuters, f.travel, f.supply, 2, {0.6, 0.7, 0.8},
                           scores_for(f), 0.0, 0.0);
  for (std::size_t j = 0; j < p1.variables().size(); ++j) {
    EXPECT_EQ(p1.objective()[j], p2.objective()[j]);
    EXPECT_EQ(p1.variables()[j].name, p2.variables()[j].name);
  }
  for (std::size_t j = p1.variables().size(); j < p2.variables().size(); ++j) {
    EXPECT_EQ(p2.objective()[j], 0.0);
  }
}

TEST(BuildP2, DefaultsAndErrors) {
  EXPECT_EQ(kDefaultLambda, 10.0);
  EXPECT_EQ(kDefaultLambdaEq, 150.0);
  EXPECT_EQ(kDefaultMaxSites, 6u);
  EXPECT_EQ(epi::kDefaultDecay, 0.9);
  const auto f = three_by_two();
  const auto s = scores_for(f);
  EXPECT_EQ(code_of([&] {
              build_p2(f.table, f.commuters, f.travel, f.supply, 2, {0.5, 0.5, 0.5}, s, -1, 0);
            }),
            ErrorCode::kNegativeWeight);
  EXPECT_EQ(code_of([&] {
              build_p2(f.table, f.commuters, f.travel, f.supply, 2, {0.5, 1.5, 0.5}, s, 1, 0);
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              build_p2_fixed(f.table, f.commuters, f.travel, f.supply, 1, {0.5, 0.5, 0.5}, s, 1,
                             1, {0, 2});
            }),
            ErrorCode::kTooManySites);
}

TEST(BuildP2Fixed, PinsSitesThroughBounds) {
  const auto f = three_by_two();
  const auto m = build_p2_fixed(f.table, f.commuters, f.travel, f.supply, 2, {0.5, 0.5, 0.5},
                                scores_for(f), 10, 150, {1});
  const auto& v = m.variables();
  EXPECT_EQ(v[0].lower, 0.0);
  EXPECT_EQ(v[0].upper, 0.0);
  EXPECT_EQ(v[1].lower, 1.0);
  EXPECT_EQ(v[1].upper, 1.0);
  EXPECT_EQ(m.formulation(), Formulation::kP2Fixed);
}

TEST(BuildP2Fixed, NoSitesMeansInfeasible) {
  const auto f = three_by_two();
  const auto m = build_p2_fixed(f.table, f.commuters, f.travel, f.supply, 2, {0.5, 0.5, 0.5},
                                scores_for(f), 10, 150, {});
  EXPECT_EQ(code_of([&] { solve::solve_exhaustive(m); }), ErrorCode::kInfeasible);
}

TEST(BuildP2Fixed, WorseSiteCostsMore) {
  // Two districts; district 0 holds everyone, so pinning site 1 costs travel.
  const auto table = make_districts({3, 0});
  ingest::CommuterMatrix e{Matrix<Count>(2, 2, 0)};
  e.e(0, 1) = 1;
  Matrix<double> c(2, 2, 0.0);
  c(0, 1) = 4;
  c(1, 0) = 6;
  const travel::TravelModel travel(ingest::TravelMatrix{c});
  const auto supply = ingest::uniform_supply(table, 1, 1, 10);
  const auto scores = epi::priority_scores(e, 1);
  const auto free = solve::solve_exhaustive(
      build_p2(table, e, travel, supply, 1, {0.0, 0.0}, scores, 0, 0));
  const auto pinned = solve::solve_exhaustive(
      build_p2_fixed(table, e, travel, supply, 1, {0.0, 0.0}, scores, 0, 0, {1}));
  EXPECT_EQ(free.objective, 0.0);
  EXPECT_EQ(pinned.objective, 2 * 10.0 + 0.0);  // commuter at its work site costs 0
  EXPECT_GT(pinned.objective, free.objective);
}

Instance single_district(Count population, std::size_t periods, double target) {
  const auto table = make_districts({population});
  Instance inst{table,
                ingest::no_commuters(table),
                travel::TravelModel(ingest::TravelMatrix{Matrix<double>(1, 1, 0.0)}),
                ingest::uniform_supply(table, periods, 0, population),
                1,
                false,
                {{target}, Matrix<double>(periods, 1, 1.0), 1.0, 0.0},
                {}};
  return inst;
}

TEST(EvaluatePlan, ShortfallClampsAtZero) {
  const auto inst = single_district(1000, 2, 0.9);
  AllocationPlan plan(1, 2, false);
  plan.open()[0] = true;
  plan.y(0, 0, 0) = 700;
  plan.y(1, 0, 0) = 300;
  auto m = evaluate_plan(inst, plan, inst.health, Formulation::kP2);
  EXPECT_EQ(m.shortfall(0, 0), 200.0);
  EXPECT_EQ(m.shortfall(1, 0), 0.0);
  EXPECT_EQ(m.health_term, 200.0);

  plan.y(0, 0, 0) = 950;
  plan.y(1, 0, 0) = 50;
  m = evaluate_plan(inst, plan, inst.health, Formulation::kP2);
  EXPECT_EQ(m.shortfall(0, 0), 0.0);
}

TEST(EvaluatePlan, PeriodInequityIsTheLargestDifference) {
  const auto table = make_districts({100, 40, 60});
  Instance inst{table,
                ingest::no_commuters(table),
                travel::TravelModel(ingest::TravelMatrix{Matrix<double>(3, 3, 0.0)}),
                ingest::uniform_supply(table, 1, 1, 100),
                3,
                false,
                {},
                {}};
  AllocationPlan plan(3, 1, false);
  for (std::size_t u = 0; u < 3; ++u) {
    plan.open()[u] = true;
    plan.y(0, u, u) = table.population(u);
  }
  const auto m = evaluate_plan(inst, plan, HealthWeights{}, Formulation::kP1);
  EXPECT_EQ(m.inequity, 60.0);
  EXPECT_EQ(m.period_inequity, std::vector<double>{60.0});
}

TEST(EvaluatePlan, RejectsInfeasiblePlans) {
  const auto inst = single_district(10, 1, 0.5);
  AllocationPlan plan(1, 1, false);
  plan.y(0, 0, 0) = 10;  // site not open
  try {
    evaluate_plan(inst, plan, inst.health, Formulation::kP2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasiblePlan);
    EXPECT_NE(std::string(e.what()).find("1d"), std::string::npos);
  }
}

TEST(EvaluatePlan, OpeningTooManySitesCites1a) {
  const auto f = three_by_two();
  const auto m = build_p1(f.table, f.commuters, f.travel, f.supply, 1, true);
  auto plan = *solve::solve_exhaustive(m).plan;
  plan.open() = {true, true, true};
  const auto v = check_plan(m.instance(), plan);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].family, Family::k1a);
  EXPECT_EQ(v[0].amount, 2.0);
}

// Random feasible plan by greedy filling of random open sites.
std::optional<AllocationPlan> random_plan(const PlanModel& model, std::mt19937_64& rng) {
  const auto& inst = model.instance();
  const auto n = inst.size(), periods = inst.periods();
  AllocationPlan plan(n, periods, model.layout().has_z());
  std::vector<std::size_t> sites(n);
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  if (!inst.fixed_open.empty()) {
    sites.clear();
    for (std::size_t w = 0; w < n; ++w) {
      if (inst.fixed_open[w]) sites.push_back(w);
    }
  } else {
    std::shuffle(sites.begin(), sites.end(), rng);
    sites.resize(inst.max_sites);
  }
  for (auto w : sites) plan.open()[w] = true;
  Matrix<Count> room(periods, n, 0);
  for (std::size_t t = 0; t < periods; ++t) {
    for (auto w : sites) room(t, w) = inst.supply(t, w);
  }
  const auto place = [&](std::size_t u, std::optional<std::size_t> v, Count count) {
    for (Count i = 0; i < count; ++i) {
      std::vector<std::pair<std::size_t, std::size_t>> cells;
      for (std::size_t t = 0; t < periods; ++t) {
        for (auto w : sites) {
          if (room(t, w) > 0) cells.emplace_back(t, w);
        }
      }
      if (cells.empty()) return false;
      const auto [t, w] = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
      --room(t, w);
      if (v) {
        ++plan.z(t, u, *v, w);
      } else {
        ++plan.y(t, u, w);
      }
    }
    return true;
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (!place(u, std::nullopt, inst.non_commuters(u))) return std::nullopt;
    for (std::size_t v = 0; v < n; ++v) {
      if (!place(u, v, inst.commuters.e(u, v))) return std::nullopt;
    }
  }
  return plan;
}

TEST(PlanProperties, ObjectiveConcordanceAndAccounting) {
  std::mt19937_64 rng(12);
  testing::GeneratorOptions opts;
  opts.max_n = 5;
  opts.max_periods = 3;
  opts.max_population = 20;
  opts.max_supply = 30;
  int checked = 0;
  for (int i = 0; i < 400 && checked < 150; ++i) {
    const auto raw = testing::random_instance(rng, opts);
    const auto model = testing::build_model(raw);
    const auto plan = random_plan(model, rng);
    if (!plan) continue;
    ++checked;
    ASSERT_TRUE(check_plan(model.instance(), *plan).empty());
    const auto metrics = evaluate_plan(model, *plan);
    const auto values = to_assignment(model, *plan);
    EXPECT_TRUE(solve::validate_assignment(model, values).empty());
    EXPECT_NEAR(metrics.composite, model.objective_value(values),
                1e-6 * std::max(1.0, metrics.composite));
    EXPECT_EQ(from_assignment(model, values), *plan);
    Count total = 0;
    for (auto v : metrics.vaccinated.data()) total += v;
    EXPECT_EQ(total, model.instance().districts.total_population());
  }
  EXPECT_GT(checked, 50);
}

TEST(PlanProperties, P1NeverWorseThanP0UnderCommuterCosts) {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 40; ++i) {
    auto raw = testing::random_instance(rng);
    raw.health = false;
    raw.pinned = false;
    raw.include_commuters = true;
    const auto p1 = testing::build_model(raw);
    raw.include_commuters = false;
    const auto p0 = testing::build_model(raw);
    solve::SolveReport r0, r1;
    try {
      r0 = solve::solve_exhaustive(p0);
      r1 = solve::solve_exhaustive(p1);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    const auto lifted = lift_to_commuters(*r0.plan, p1.instance());
    EXPECT_TRUE(check_plan(p1.instance(), lifted).empty());
    const auto p0_under_commuters = evaluate_plan(p1, lifted).travel_minutes;
    EXPECT_LE(r1.objective, p0_under_commuters + 1e-9);
    // Lifting never costs more than pricing everyone as a non-commuter.
    EXPECT_LE(p0_under_commuters, r0.objective + 1e-9);
  }
  EXPECT_GT(checked, 10);
}

TEST(PlanProperties, WeightedShortfallNonIncreasingInLambda) {
  std::mt19937_64 rng(14);
  int checked = 0;
  for (int i = 0; i < 300 && checked < 25; ++i) {
    auto raw = testing::random_instance(rng);
    if (!raw.health) continue;
    raw.lambda_eq = 0.0;
    double previous = plan::kInfinity;
    bool ok = true;
    for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
      raw.lambda = lambda;
      const auto model = testing::build_model(raw);
      try {
        const auto report = solve::solve_exhaustive(model);
        const double weighted = evaluate_plan(model, *report.plan).health_term;
        EXPECT_LE(weighted, previous + 1e-9) << "instance " << i << " lambda " << lambda;
        previous = weighted;
      } catch (const Error&) {
        ok = false;
        break;
      }
    }
    if (ok) ++checked;
  }
  EXPECT_GT(checked, 10);
}

}  // namespace
}  // namespace vaxsite::plan
