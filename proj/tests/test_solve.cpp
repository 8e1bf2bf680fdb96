#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "vaxsite/solve.hpp"

namespace vaxsite {
namespace {

using testing::close_relative;
using testing::RawInstance;

RawInstance two_sites_example() {
  RawInstance r;
  r.n = 2;
  r.periods = 1;
  r.max_sites = 1;
  r.population = {2, 0};
  r.commuters = Matrix<Count>(2, 2, 0);
  r.minutes = Matrix<double>(2, 2, 0.0);
  r.minutes(0, 1) = r.minutes(1, 0) = 10.0;
  r.supply = Matrix<Count>(1, 2, 100);
  return r;
}

TEST(Oracle, AgreesWithPersonByPersonEnumeration) {
  std::mt19937_64 rng(7);
  testing::GeneratorOptions tiny;
  tiny.max_n = 3;
  tiny.max_population = 2;
  tiny.max_supply = 4;
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    const auto r = testing::random_instance(rng, tiny);
    const auto a = testing::oracle_optimum(r);
    const auto b = testing::naive_optimum(r);
    ASSERT_EQ(a.has_value(), b.has_value()) << "instance " << i;
    if (a) {
      EXPECT_TRUE(close_relative(*a, *b)) << *a << " vs " << *b;
      ++compared;
    }
  }
  EXPECT_GT(compared, 50);
}

TEST(SolveExhaustive, OpensTheHomeSiteWhenOnlyOneIsAllowed) {
  const auto model = testing::build_model(two_sites_example());
  const auto report = solve::solve_exhaustive(model);
  EXPECT_EQ(report.status, solve::Status::kOptimal);
  EXPECT_EQ(report.objective, 0.0);
  EXPECT_EQ(report.gap, 0.0);
  ASSERT_TRUE(report.plan);
  EXPECT_EQ(report.plan->open_sites(), std::vector<std::size_t>{0});
  EXPECT_EQ(report.nodes_or_subsets, 2u);
}

TEST(SolveExhaustive, OtherSiteCostsTwoRoundTrips) {
  auto r = two_sites_example();
  r.supply(0, 0) = 0;
  const auto report = solve::solve_exhaustive(testing::build_model(r));
  EXPECT_EQ(report.objective, 40.0);
  EXPECT_EQ(report.plan->open_sites(), std::vector<std::size_t>{1});
}

TEST(SolveExhaustive, ZeroSupplyIsInfeasible) {
  auto r = two_sites_example();
  r.supply = Matrix<Count>(1, 2, 0);
  const auto model = testing::build_model(r);
  EXPECT_FALSE(model.warnings().empty());
  try {
    solve::solve_exhaustive(model);
    FAIL() << "expected Infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(SolveExhaustive, AllSitesAndFreeTravelCostNothing) {
  std::mt19937_64 rng(3);
  auto r = testing::random_instance(rng);
  r.minutes = Matrix<double>(r.n, r.n, 0.0);
  r.max_sites = r.n;
  r.health = false;
  r.pinned = false;
  r.supply = Matrix<Count>(r.periods, r.n, 100);
  const auto report = solve::solve_exhaustive(testing::build_model(r));
  EXPECT_EQ(report.objective, 0.0);
}

TEST(SolveExhaustive, TooManySubsets) {
  RawInstance r = two_sites_example();
  solve::Limits limits;
  limits.max_subsets = 1;
  try {
    solve::solve_exhaustive(testing::build_model(r), limits);
    FAIL() << "expected TooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooLarge);
  }
}

TEST(SolveExhaustive, TiesGoToTheLexicographicallySmallestSubset) {
  RawInstance r;
  r.n = 3;
  r.periods = 1;
  r.max_sites = 1;
  r.population = {0, 0, 0};
  r.commuters = Matrix<Count>(3, 3, 0);
  r.minutes = Matrix<double>(3, 3, 5.0);
  for (std::size_t i = 0; i < 3; ++i) r.minutes(i, i) = 0.0;
  r.supply = Matrix<Count>(1, 3, 1);
  const auto report = solve::solve_exhaustive(testing::build_model(r));
  EXPECT_EQ(report.plan->open_sites(), std::vector<std::size_t>{0});
}

TEST(SolveExhaustive, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(20240611);
  int feasible = 0;
  for (int i = 0; i < 80; ++i) {
    const auto r = testing::random_instance(rng);
    const auto model = testing::build_model(r);
    const auto expected = testing::oracle_optimum(r);
    if (!expected) {
      EXPECT_THROW(solve::solve_exhaustive(model), Error) << "instance " << i;
      continue;
    }
    ++feasible;
    const auto report = solve::solve_exhaustive(model);
    ASSERT_TRUE(report.plan);
    EXPECT_EQ(report.status, solve::Status::kOptimal);
    EXPECT_TRUE(close_relative(report.objective, *expected))
        << "instance " << i << ": " << report.objective << " vs " << *expected;
    EXPECT_TRUE(solve::validate(model, *report.plan).empty());
    const auto values = plan::to_assignment(model, *report.plan);
    EXPECT_TRUE(solve::validate_assignment(model, values).empty());
    EXPECT_TRUE(close_relative(model.objective_value(values), report.objective));
  }
  EXPECT_GT(feasible, 30);
}

TEST(SolveExhaustive, DeterministicReports) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto model = testing::build_model(testing::random_instance(rng));
    try {
      const auto a = solve::solve_exhaustive(model);
      const auto b = solve::solve_exhaustive(model);
      EXPECT_EQ(a.objective, b.objective);
      EXPECT_EQ(a.plan, b.plan);
      EXPECT_EQ(a.bb_nodes, b.bb_nodes);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
    }
  }
}

TEST(SolveExhaustive, PinningTheFreeOptimumReproducesIt) {
  std::mt19937_64 rng(99);
  int checked = 0;
  while (checked < 10) {
    auto r = testing::random_instance(rng);
    if (!r.health) continue;
    r.pinned = false;
    const auto free_model = testing::build_model(r);
    solve::SolveReport free;
    try {
      free = solve::solve_exhaustive(free_model);
    } catch (const Error&) {
      continue;
    }
    r.pinned = true;
    r.fixed_sites = free.plan->open_sites();
    const auto fixed = solve::solve_exhaustive(testing::build_model(r));
    EXPECT_TRUE(close_relative(fixed.objective, free.objective));
    ++checked;
  }
}

TEST(Validate, ReportsShortDemandAndOverCapacity) {
  auto r = two_sites_example();
  r.supply = Matrix<Count>(1, 2, 2);
  const auto model = testing::build_model(r);
  auto plan = *solve::solve_exhaustive(model).plan;
  EXPECT_TRUE(solve::validate(model, plan).empty());

  auto short_plan = plan;
  short_plan.y(0, 0, 0) -= 1;
  const auto v1 = solve::validate(model, short_plan);
  ASSERT_EQ(v1.size(), 1u);
  EXPECT_EQ(v1[0].family, plan::Family::k1b);
  EXPECT_EQ(v1[0].where, "u=D0");

  auto over = plan;
  over.y(0, 0, 0) += 1;
  const auto v2 = solve::validate(model, over);
  bool saw_capacity = false;
  for (const auto& v : v2) {
    if (v.family == plan::Family::k1f && v.where == "t=0,w=D0") {
      saw_capacity = true;
      EXPECT_EQ(v.amount, 1.0);
    }
  }
  EXPECT_TRUE(saw_capacity);
}

}  // namespace
}  // namespace vaxsite
