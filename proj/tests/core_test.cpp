#include <gtest/gtest.h>

#include <random>

#include "drsa/core.hpp"

namespace {

using drsa::TimeGrid;

TEST(Bucketize, BoundaryMapsToItsOwnInterval) {
  TimeGrid g(1.0, 10);
  EXPECT_EQ(g.bucketize(3.0), 3u);
  EXPECT_EQ(g.bucketize(2.5), 3u);
  EXPECT_EQ(g.bucketize(1e-9), 1u);
  EXPECT_EQ(g.bucketize(10.0), 10u);
}

TEST(Bucketize, RejectsNonPositiveAndOutOfGrid) {
  TimeGrid g(1.0, 10);
  EXPECT_THROW(g.bucketize(0.0), drsa::InvalidTimeError);
  EXPECT_THROW(g.bucketize(-1.0), drsa::InvalidTimeError);
  EXPECT_THROW(g.bucketize(10.0000001), drsa::OutOfGridError);
}

TEST(Bucketize, PropertiesOverRandomTimes) {
  std::mt19937_64 rng(11);
  for (double s : {0.1, 0.7, 1.0, 2.5, 3.3}) {
    TimeGrid g(s, 37);
    std::uniform_real_distribution<double> u(0.0, g.horizon());
    double prev_t = 0.0;
    std::size_t prev_l = 0;
    std::vector<double> ts(500);
    for (auto& t : ts) {
      do t = u(rng); while (t == 0.0);
    }
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
      const auto l = g.bucketize(t);
      EXPECT_LT(g.boundary(l - 1), t);
      EXPECT_LE(t, g.boundary(l));
      if (t >= prev_t) EXPECT_GE(l, prev_l);
      prev_t = t;
      prev_l = l;
    }
    for (std::size_t l = 1; l <= g.num_intervals(); ++l) EXPECT_EQ(g.bucketize(g.boundary(l)), l);
  }
}

TEST(TimeGrid, RejectsDegenerateConstruction) {
  EXPECT_THROW(TimeGrid(0.0, 5), std::invalid_argument);
  EXPECT_THROW(TimeGrid(1.0, 0), std::invalid_argument);
  TimeGrid g(0.5, 4);
  EXPECT_DOUBLE_EQ(g.boundary(0), 0.0);
  EXPECT_DOUBLE_EQ(g.horizon(), 2.0);
}

TEST(Sample, CensorStatusFollowsEventPresence) {
  drsa::Sample unc({{0, 1.0}}, 5.0, 3.0);
  EXPECT_EQ(unc.censor_status(), 0);
  EXPECT_DOUBLE_EQ(unc.relevant_time(), 3.0);
  drsa::Sample cen({{0, 1.0}}, 5.0, std::nullopt);
  EXPECT_EQ(cen.censor_status(), 1);
  EXPECT_DOUBLE_EQ(cen.relevant_time(), 5.0);
  EXPECT_FALSE(cen.evaluation_event_time().has_value());
  drsa::Sample held({}, 5.0, std::nullopt, 7.0);
  EXPECT_EQ(held.censor_status(), 1);
  EXPECT_DOUBLE_EQ(*held.evaluation_event_time(), 7.0);
}

TEST(Sample, RejectsInvalidRows) {
  EXPECT_THROW(drsa::Sample({}, 5.0, 7.0), drsa::DataError);
  EXPECT_THROW(drsa::Sample({}, 0.0, std::nullopt), drsa::InvalidTimeError);
  EXPECT_THROW(drsa::Sample({{2, 1.0}, {1, 1.0}}, 5.0, std::nullopt), drsa::DataError);
  EXPECT_THROW(drsa::Sample({{1, 1.0}, {1, 2.0}}, 5.0, std::nullopt), drsa::DataError);
  EXPECT_THROW(drsa::Sample({}, 5.0, 3.0, 4.0), drsa::DataError);
}

TEST(Dataset, EnforcesGridAndFeatureBounds) {
  TimeGrid g(1.0, 5);
  EXPECT_THROW(drsa::Dataset({drsa::Sample({}, 6.0, std::nullopt)}, 3, g), drsa::OutOfGridError);
  EXPECT_THROW(drsa::Dataset({drsa::Sample({{3, 1.0}}, 2.0, std::nullopt)}, 3, g), drsa::DataError);
  drsa::Dataset d({drsa::Sample({{2, 1.0}}, 2.0, 1.0), drsa::Sample({}, 5.0, std::nullopt)}, 3, g);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.censor_rate(), 0.5);
}

}  // namespace
