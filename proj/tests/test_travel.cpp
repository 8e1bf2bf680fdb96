#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vaxsite/travel.hpp"

namespace vaxsite::travel {
namespace {

TravelMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool symmetric) {
  std::uniform_int_distribution<int> minutes(0, 60);
  TravelMatrix c{Matrix<double>(n, n, 0.0)};
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      if (symmetric && v < u) {
        c.minutes(u, v) = c.minutes(v, u);
      } else {
        c.minutes(u, v) = minutes(rng);
      }
    }
  }
  return c;
}

// Floyd-Warshall closure turns any symmetric matrix into a metric one.
void make_metric(TravelMatrix& c) {
  const auto n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        c.minutes(i, j) = std::min(c.minutes(i, j), c.minutes(i, k) + c.minutes(k, j));
      }
    }
  }
}

TEST(CommuterCost, HandExamples) {
  TravelMatrix c{Matrix<double>(3, 3, 0.0)};  // A=0, B=1, W=2
  c.minutes(0, 2) = c.minutes(2, 0) = 5;
  c.minutes(1, 2) = c.minutes(2, 1) = 4;
  c.minutes(0, 1) = c.minutes(1, 0) = 8;
  EXPECT_EQ(commuter_cost(c, 0, 1, 2), 1.0);
  EXPECT_EQ(commuter_cost(c, 2, 2, 2), 0.0);
  for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(commuter_cost(c, 0, v, 0), 0.0);
}

TEST(CommuterCost, MatchesEnumerationOfFourOptions) {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 20; ++round) {
    const auto c = random_matrix(rng, 5, false);
    const TravelModel model(c);
    for (std::size_t u = 0; u < 5; ++u) {
      for (std::size_t v = 0; v < 5; ++v) {
        for (std::size_t w = 0; w < 5; ++w) {
          const double options[] = {
              c(u, w) + c(w, u), c(v, w) + c(w, v), c(v, w) + c(w, u) - c(v, u),
              c(u, w) + c(w, v) - c(u, v)};
          const double best = *std::min_element(std::begin(options), std::end(options));
          EXPECT_EQ(model.d(u, v, w), best);
          EXPECT_LE(model.d(u, v, w), model.roundtrip(u, w));
          EXPECT_LE(model.d(u, v, w), model.roundtrip(v, w));
        }
      }
    }
  }
}

TEST(CommuterCost, NonNegativeForMetricMatrices) {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 20; ++round) {
    auto c = random_matrix(rng, 5, true);
    make_metric(c);
    for (std::size_t u = 0; u < 5; ++u) {
      for (std::size_t v = 0; v < 5; ++v) {
        for (std::size_t w = 0; w < 5; ++w) EXPECT_GE(commuter_cost(c, u, v, w), 0.0);
      }
    }
  }
}

TEST(CommuterCost, CollapsesToRoundTripWhenLivingAndWorkingTogether) {
  std::mt19937_64 rng(3);
  const auto c = random_matrix(rng, 6, false);
  for (std::size_t u = 0; u < 6; ++u) {
    for (std::size_t w = 0; w < 6; ++w) {
      EXPECT_EQ(commuter_cost(c, u, u, w), noncommuter_cost(c, u, w));
    }
  }
}

TEST(CommuterCost, KeepsNegativeValuesFromNonMetricInput) {
  TravelMatrix c{Matrix<double>(3, 3, 0.0)};
  c.minutes(0, 1) = c.minutes(1, 0) = 100;  // A-B direct is slow
  c.minutes(0, 2) = c.minutes(2, 0) = 1;
  c.minutes(1, 2) = c.minutes(2, 1) = 1;
  EXPECT_LT(commuter_cost(c, 0, 1, 2), 0.0);
}

TEST(NoncommuterCost, Sums) {
  TravelMatrix c{Matrix<double>(2, 2, 0.0)};
  c.minutes(0, 1) = 10;
  c.minutes(1, 0) = 12;
  EXPECT_EQ(noncommuter_cost(c, 0, 0), 0.0);
  EXPECT_EQ(noncommuter_cost(c, 0, 1), 22.0);
  c.minutes(0, 1) = 0;
  c.minutes(1, 0) = 7;
  EXPECT_EQ(noncommuter_cost(c, 0, 1), 7.0);
}

TEST(TravelModel, LazyAndEagerAgree) {
  std::mt19937_64 rng(4);
  const auto c = random_matrix(rng, TravelModel::kEagerLimit + 1, false);
  const TravelModel lazy(c);
  EXPECT_FALSE(lazy.materialized());
  EXPECT_EQ(lazy.d(3, 7, 11), commuter_cost(c, 3, 7, 11));
  EXPECT_EQ(lazy.d(5, 5, 5), 0.0);
  const TravelModel eager(random_matrix(rng, 4, false));
  EXPECT_TRUE(eager.materialized());
}

TEST(Acceptance, HandExamples) {
  const double options[] = {2.0, 4.0, 10.0};
  EXPECT_DOUBLE_EQ(acceptance_score(options, 2.0), 1.25);
  EXPECT_NEAR(logistic(acceptance_score(options, 2.0)), 0.77730, 1e-5);
  EXPECT_DOUBLE_EQ(acceptance_score(options, 10.0), -1.75);
  EXPECT_NEAR(logistic(acceptance_score(options, 10.0)), 0.14804, 1e-5);
  const double single[] = {7.0};
  EXPECT_EQ(logistic(acceptance_score(single, 7.0)), 0.5);
  const double equal[] = {3.0, 3.0};
  EXPECT_EQ(logistic(acceptance_score(equal, 3.0)), 0.5);
}

TEST(Acceptance, LogisticStaysInsideTheOpenInterval) {
  for (double s : {-700.0, -30.0, -1.0, 0.0, 1.0, 30.0, 700.0}) {
    const double l = logistic(s);
    EXPECT_TRUE(std::isfinite(l));
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0);
  }
  EXPECT_GT(logistic(-30.0), 0.0);
  EXPECT_LT(logistic(30.0), 1.0);
}

TEST(Acceptance, CheaperAssignedSiteIsMoreLikely) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(0.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> options{d(rng), d(rng), d(rng), d(rng)};
    const double before = logistic(acceptance_score(options, options[0]));
    const double lowered = options[0] - 1.0 - d(rng) / 10.0;
    options[0] = lowered;
    const double after = logistic(acceptance_score(options, lowered));
    EXPECT_GT(after, before);
  }
}

TEST(AcceptanceModel, UsesOpenSitesOnly) {
  TravelMatrix c{Matrix<double>(3, 3, 0.0)};
  c.minutes(0, 1) = c.minutes(1, 0) = 1;
  c.minutes(0, 2) = c.minutes(2, 0) = 2;
  c.minutes(1, 2) = c.minutes(2, 1) = 5;
  const TravelModel model(c);
  const AcceptanceModel acc(model, {0, 2});
  const double opts[] = {model.d(1, 1, 0), model.d(1, 1, 2)};
  EXPECT_DOUBLE_EQ(acc.nu(1, 1, 0), acceptance_score(opts, opts[0]));
  EXPECT_DOUBLE_EQ(acc.likelihood(1, 1, 2), logistic(acceptance_score(opts, opts[1])));
  try {
    acc.likelihood(0, 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSiteNotOpen);
  }
  const std::size_t open[] = {0, 2};
  EXPECT_EQ(acceptance_likelihood(model, 1, 1, 0, open), acc.likelihood(1, 1, 0));
}

}  // namespace
}  // namespace vaxsite::travel
