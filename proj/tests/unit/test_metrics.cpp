#include <gtest/gtest.h>

#include <cmath>

#include "tipla/metrics.hpp"
#include "tipla/potentials.hpp"
#include "tipla/rng.hpp"

using namespace tipla;

namespace {

SampleSet normal_set(std::uint64_t seed, std::size_t n, double mean, double sd) {
  RandomStream rng(seed);
  Vector v(n);
  for (auto& x : v) x = mean + sd * rng.normal();
  return SampleSet::scalar(std::move(v));
}

}  // namespace

TEST(W2, ShiftedDiracs) {
  const auto a = SampleSet::scalar({0.0, 0.0, 0.0});
  const auto b = SampleSet::scalar({2.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(w2_empirical_1d(a, b), 2.0);
}

TEST(W2, SortedCoupling) {
  const auto a = SampleSet::scalar({3.0, 1.0, 2.0});
  const auto b = SampleSet::scalar({1.5, 3.5, 2.5});
  EXPECT_DOUBLE_EQ(w2_empirical_1d(a, b), 0.5);
}

TEST(W2, MetricProperties) {
  const auto a = normal_set(1, 500, 0.0, 1.0);
  const auto b = normal_set(2, 500, 0.5, 2.0);
  const auto c = normal_set(3, 500, -1.0, 0.5);
  EXPECT_EQ(w2_empirical_1d(a, a), 0.0);
  EXPECT_DOUBLE_EQ(w2_empirical_1d(a, b), w2_empirical_1d(b, a));
  EXPECT_LE(w2_empirical_1d(a, c), w2_empirical_1d(a, b) + w2_empirical_1d(b, c) + 1e-12);
}

TEST(W2, ApproachesGaussianClosedForm) {
  // W2(N(m1, s1^2), N(m2, s2^2))^2 = (m1 - m2)^2 + (s1 - s2)^2
  const auto a = normal_set(4, 200000, 0.0, 1.0);
  const auto b = normal_set(5, 200000, 1.0, 2.0);
  EXPECT_NEAR(w2_empirical_1d(a, b), std::sqrt(2.0), 0.02);
}

TEST(W2, UnequalCountsResampleDeterministically) {
  const auto a = normal_set(6, 1000, 0.0, 1.0);
  const auto b = normal_set(7, 300, 0.0, 1.0);
  EXPECT_EQ(w2_empirical_1d(a, b, 11), w2_empirical_1d(a, b, 11));
  EXPECT_LT(w2_empirical_1d(a, b, 11), 0.3);
}

TEST(W2, PerCoordinateAndToPoint) {
  SampleSet a;
  a.dim = 2;
  a.push_back(Vector{0.0, 1.0});
  a.push_back(Vector{0.0, 3.0});
  SampleSet b;
  b.dim = 2;
  b.push_back(Vector{1.0, 1.0});
  b.push_back(Vector{1.0, 3.0});
  const auto w = w2_per_coordinate(a, b);
  EXPECT_EQ(w.per_coordinate, (Vector{1.0, 0.0}));
  EXPECT_EQ(w.max, 1.0);
  // mean of |(0,1)-(0,2)|^2 and |(0,3)-(0,2)|^2 is 1
  EXPECT_DOUBLE_EQ(w2_to_point(a, Vector{0.0, 2.0}), 1.0);
}

TEST(W2, DiracBiasVarianceIdentity) {
  const auto a = normal_set(8, 10000, 0.3, 0.7);
  const auto m = estimate_moments(a);
  const double biased_var = m.variance[0] * (m.count - 1.0) / m.count;
  const double w = w2_to_point(a, Vector{1.0});
  EXPECT_NEAR(w * w, biased_var + (m.mean[0] - 1.0) * (m.mean[0] - 1.0), 1e-10);
}

TEST(W2, RejectsBadInput) {
  EXPECT_THROW(w2_empirical_1d(SampleSet::scalar({}), SampleSet::scalar({1.0})), InputError);
  EXPECT_THROW(w2_empirical_1d(SampleSet::scalar({NAN}), SampleSet::scalar({1.0})), InputError);
}

TEST(Moments, KnownValues) {
  const auto a = SampleSet::scalar({1.0, 2.0, 3.0, 4.0});
  const auto m = estimate_moments(a);
  EXPECT_EQ(m.count, 4u);
  EXPECT_DOUBLE_EQ(m.mean[0], 2.5);
  EXPECT_DOUBLE_EQ(m.variance[0], 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.norm2_mean, 7.5);
  EXPECT_DOUBLE_EQ(m.norm4_mean, (1.0 + 16.0 + 81.0 + 256.0) / 4.0);
  EXPECT_NEAR(m.mean_se[0], std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}

TEST(Moments, StandardErrorsCalibrated) {
  const auto a = normal_set(9, 40000, 0.0, 2.0);
  const auto m = estimate_moments(a);
  EXPECT_NEAR(m.mean_se[0], 2.0 / std::sqrt(40000.0), 1e-3);
  // var se of a gaussian sample: sigma^2 sqrt(2 / n)
  EXPECT_NEAR(m.variance_se[0], 4.0 * std::sqrt(2.0 / 40000.0), 3e-3);
  EXPECT_NEAR(m.variance[0], 4.0, 5.0 * m.variance_se[0]);
}

TEST(OlsSlope, ExactLineAndDegenerateCases) {
  const Vector x{1.0, 2.0, 3.0};
  const Vector y{3.0, 1.0, -1.0};
  EXPECT_DOUBLE_EQ(*ols_slope(x, y), -2.0);
  EXPECT_FALSE(ols_slope(Vector{2.0}, Vector{1.0}).has_value());
  EXPECT_FALSE(ols_slope(Vector{2.0, 2.0}, Vector{1.0, 3.0}).has_value());
}

TEST(Trajectories, BurnInAndDivergence) {
  Trajectory t;
  for (std::size_t k = 0; k < 10; ++k) {
    t.records.push_back({k, {double(k)}, double(k * k), false});
  }
  const auto s = theta_samples(t, 0.5);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(s.values.front(), 5.0);
  auto d = divergence_summary(t);
  EXPECT_FALSE(d.diverged);
  EXPECT_DOUBLE_EQ(d.max_norm, 9.0);

  t.records.push_back({10, {NAN}, NAN, true});
  t.divergence_step = 10;
  EXPECT_EQ(theta_samples(t, 0.5).size(), 5u);
  d = divergence_summary(t);
  EXPECT_TRUE(d.diverged);
  EXPECT_EQ(d.first_step, 10u);
  EXPECT_TRUE(std::isinf(d.max_norm));
}

TEST(VarianceStudy, SingleNGivesNoSlope) {
  QuadraticModel model(1);
  VarianceStudy study;
  study.base.algorithm = Algorithm::tipla_c;
  study.base.lambda = 1e-2;
  study.base.n_steps = 100;
  study.n_values = {4};
  study.repeats = 5;
  const auto r = variance_vs_n_study(model, study);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].final_thetas.size(), 5u);
  EXPECT_FALSE(r.fitted_slope.has_value());
  EXPECT_EQ(r.n_values(), (std::vector<std::size_t>{4}));
}

TEST(VarianceStudy, ConcurrencyDoesNotChangeCells) {
  QuadraticModel model(1);
  VarianceStudy study;
  study.base.algorithm = Algorithm::tipla_c;
  study.base.lambda = 1e-2;
  study.base.n_steps = 100;
  study.n_values = {2, 8};
  study.repeats = 4;
  const auto serial = variance_vs_n_study(model, study);
  study.threads = 3;
  const auto parallel = variance_vs_n_study(model, study);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(serial.entries[j].final_thetas, parallel.entries[j].final_thetas);
  }
  ASSERT_TRUE(serial.fitted_slope.has_value());
  EXPECT_EQ(*serial.fitted_slope, *parallel.fitted_slope);
}
