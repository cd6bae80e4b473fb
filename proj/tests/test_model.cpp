#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cavity/model.hpp"

using namespace cavity;

TEST(ScaledTime, ZeroMapsToZero) {
  EXPECT_EQ(to_physical_time(ScaledTime{0.0}, {1.0, 0.1, 0.0, 5}), 0.0);
  EXPECT_EQ(to_physical_time(ScaledTime{0.0}, {1.0, 3.0, 0.0, 5}), 0.0);
}

TEST(ScaledTime, OneUnitIsPiOverLambda) {
  EXPECT_NEAR(to_physical_time(ScaledTime{1.0}, {1.0, 0.1, 0.0, 5}), 10.0 * std::numbers::pi,
              1e-12);
}

TEST(ScaledTime, QuarterUnitIsFirstPeakInstant) {
  const ModelParams p{1.0, 0.1, 0.0, 5};
  EXPECT_NEAR(p.lambda * to_physical_time(ScaledTime{0.25}, p), std::numbers::pi / 4, 1e-15);
}

TEST(ScaledTime, UncoupledCavitiesRejected) {
  const ModelParams p{1.0, 0.0, 0.1, 5};
  EXPECT_THROW(to_physical_time(ScaledTime{1.0}, p), Error);
  EXPECT_THROW(to_scaled_time(1.0, p), Error);
}

TEST(ScaledTime, RoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_lambda(-4.0, 0.0), time(0.0, 1e5);
  for (int i = 0; i < 1000; ++i) {
    const ModelParams p{1.0, std::pow(10.0, log_lambda(rng)), 0.0, 1};
    const double t = time(rng);
    EXPECT_NEAR(to_physical_time(to_scaled_time(t, p), p), t, 4 * t * 1e-16 + 1e-300);
  }
}

TEST(Validate, AcceptsFigureParameterSets) {
  EXPECT_TRUE(validate({1.0, 0.1, 0.1, 5}).ok());
  EXPECT_TRUE(validate({1.0, 0.001, 0.3, 5}).ok());
  EXPECT_EQ(validate({1.0, 0.1, 0.1, 5}).params, (ModelParams{1.0, 0.1, 0.1, 5}));
}

TEST(Validate, NamesEachViolation) {
  EXPECT_FALSE(validate({0.0, 0.1, 0.1, 5}).ok());
  const auto r = validate({-1.0, NAN, INFINITY, -2});
  ASSERT_EQ(r.errors.size(), 4u);
  EXPECT_NE(r.errors[0].find("omega"), std::string::npos);
  EXPECT_NE(r.errors[1].find("lambda"), std::string::npos);
  EXPECT_NE(r.errors[2].find("epsilon"), std::string::npos);
  EXPECT_NE(r.errors[3].find("n_initial"), std::string::npos);
  EXPECT_THROW(require_valid({NAN, 0.1, 0.0, 1}), Error);
}
