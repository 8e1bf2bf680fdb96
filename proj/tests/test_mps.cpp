#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "vaxsite/solve.hpp"

namespace vaxsite::solve {
namespace {

using testing::RawInstance;

RawInstance small(bool commuters, bool health, bool pinned) {
  RawInstance r;
  r.n = 3;
  r.periods = 2;
  r.equity_periods = 1;
  r.max_sites = 2;
  r.population = {4, 3, 2};
  r.commuters = Matrix<Count>(3, 3, 0);
  r.commuters(0, 1) = 1;
  r.commuters(2, 0) = 1;
  r.minutes = Matrix<double>(3, 3, 0.0);
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t v = 0; v < 3; ++v) r.minutes(u, v) = u == v ? 0.0 : 3.0 * (u + 1) + v;
  }
  r.supply = Matrix<Count>(2, 3, 4);
  r.include_commuters = commuters;
  r.health = health;
  if (health) {
    r.lambda = 10.0;
    r.lambda_eq = 150.0;
    r.targets = {0.5, 0.25, 0.75};
    r.delta = Matrix<double>(2, 3, 0.3);
  }
  r.pinned = pinned;
  if (pinned) r.fixed_sites = {1};
  return r;
}

std::string mps_text(const plan::PlanModel& m) {
  std::ostringstream out;
  export_mps(m, out);
  return out.str();
}

TEST(Mps, ParseBackIsStructurallyIdentical) {
  for (const auto& r : {small(false, false, false), small(true, false, false),
                        small(true, true, false), small(true, true, true)}) {
    const auto model = testing::build_model(r);
    std::istringstream in(mps_text(model));
    const auto parsed = read_mps(in);
    EXPECT_EQ(parsed.columns.size(), model.variables().size());
    EXPECT_EQ(parsed.rows.size(), model.constraints().size());
    const auto diff = compare_structure(model, parsed);
    EXPECT_TRUE(diff.empty()) << diff.front();
  }
}

TEST(Mps, ColumnsFollowModelOrder) {
  const auto model = testing::build_model(small(true, false, false));
  std::istringstream in(mps_text(model));
  const auto parsed = read_mps(in);
  ASSERT_EQ(parsed.columns.size(), 75u);
  EXPECT_EQ(parsed.columns[0].name, "X_00");
  EXPECT_EQ(parsed.columns[3].name, "Y_00_00_00");
  EXPECT_EQ(parsed.columns[21].name, "Z_00_00_00_00");
  for (const auto& c : parsed.columns) EXPECT_TRUE(c.integer);
  EXPECT_TRUE(parsed.minimize);
}

TEST(Mps, PinnedSitesBecomeFixedBounds) {
  const auto model = testing::build_model(small(true, true, true));
  const auto text = mps_text(model);
  EXPECT_NE(text.find(" FX BND  X_00  0\n"), std::string::npos);
  EXPECT_NE(text.find(" FX BND  X_01  1\n"), std::string::npos);
  EXPECT_NE(text.find(" FX BND  X_02  0\n"), std::string::npos);
  EXPECT_NE(text.find("'INTEND'"), std::string::npos);
}

TEST(Mps, ByteIdenticalAcrossRuns) {
  const auto r = small(true, true, false);
  EXPECT_EQ(mps_text(testing::build_model(r)), mps_text(testing::build_model(r)));
}

TEST(Mps, ReaderRejectsGarbage) {
  std::istringstream no_end("NAME X\nROWS\n N OBJ\n");
  EXPECT_THROW(read_mps(no_end), Error);
  std::istringstream bad_row("NAME X\nROWS\n Q R1\nENDATA\n");
  EXPECT_THROW(read_mps(bad_row), Error);
  std::istringstream unknown("NAME X\nROWS\n N OBJ\nCOLUMNS\n    A  R9  1\nENDATA\n");
  EXPECT_THROW(read_mps(unknown), Error);
}

TEST(Mps, ReaderAcceptsTwoPairColumnLines) {
  std::istringstream in(
      "NAME T\nROWS\n N OBJ\n L R1\n G R2\nCOLUMNS\n    A  OBJ  1  R1  2\n    A  R2  3\n"
      "RHS\n    RHS  R1  4  R2  5\nBOUNDS\n UP BND  A  7\nENDATA\n");
  const auto m = read_mps(in);
  ASSERT_EQ(m.columns.size(), 1u);
  EXPECT_EQ(m.columns[0].cost, 1.0);
  EXPECT_EQ(m.columns[0].entries.size(), 2u);
  EXPECT_EQ(m.rows[1].rhs, 5.0);
  EXPECT_EQ(m.columns[0].upper, 7.0);
}

TEST(SolutionFile, RoundTripsTheExhaustivePlan) {
  for (const auto& r : {small(false, false, false), small(true, true, false)}) {
    const auto model = testing::build_model(r);
    const auto report = solve_exhaustive(model);
    std::stringstream file;
    write_solution(model, *report.plan, file);
    EXPECT_EQ(import_solution(model, file), *report.plan);
  }
}

TEST(SolutionFile, UnlistedAuxiliariesTakeTheirSmallestValues) {
  const auto model = testing::build_model(small(true, true, false));
  const auto report = solve_exhaustive(model);
  std::stringstream full;
  write_solution(model, *report.plan, full);
  std::string text, line;
  while (std::getline(full, line)) {
    if (line.rfind("ZETA", 0) != 0 && line.rfind("TAU", 0) != 0) text += line + "\n";
  }
  std::istringstream stripped(text);
  const auto values = read_solution(model, stripped);
  EXPECT_EQ(values, plan::to_assignment(model, *report.plan));
}

TEST(SolutionFile, Errors) {
  const auto model = testing::build_model(small(true, false, false));
  const auto code = [&](const std::string& text) {
    std::istringstream in(text);
    try {
      import_solution(model, in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvariantBreach;
  };
  EXPECT_EQ(code("Y_00_00_00 3.4999\n"), ErrorCode::kNonIntegralValue);
  EXPECT_EQ(code("NOT_A_VAR 1\n"), ErrorCode::kUnknownVariable);
  EXPECT_EQ(code("X_00 1 extra\n"), ErrorCode::kMalformedRow);
  EXPECT_EQ(code("X_00 1\n"), ErrorCode::kInfeasiblePlan);

  const auto report = solve_exhaustive(model);
  std::stringstream file;
  write_solution(model, *report.plan, file);
  file << "# open every site\n";
  std::string text = file.str();
  for (const char* x : {"X_00", "X_01", "X_02"}) {
    if (text.find(std::string(x) + " ") == std::string::npos) text += std::string(x) + " 1\n";
  }
  std::istringstream in(text);
  try {
    import_solution(model, in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasiblePlan);
    EXPECT_NE(std::string(e.what()).find("constraint 1a"), std::string::npos);
  }
}

TEST(SolutionFile, NearIntegersAreRounded) {
  const auto model = testing::build_model(small(false, false, false));
  const auto report = solve_exhaustive(model);
  std::stringstream noisy;
  noisy.precision(12);
  const auto values = plan::to_assignment(model, *report.plan);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] != 0.0) noisy << model.variables()[j].name << ' ' << values[j] + 4e-7 << '\n';
  }
  EXPECT_EQ(import_solution(model, noisy), *report.plan);
}

}  // namespace
}  // namespace vaxsite::solve
