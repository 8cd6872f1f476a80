#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "tipla/errors.hpp"
#include "tipla/rng.hpp"

using namespace tipla;

TEST(RandomStream, GoldenOutputs) {
  RandomStream a(12345);
  EXPECT_EQ(a.next(), 0x8d948a82def8a568ULL);
  EXPECT_EQ(a.next(), 0x3477f953796702a0ULL);

  auto b = RandomStream::derive(1, StreamDomain::noise, 0);
  EXPECT_EQ(b.next(), 0xf22d0e68ff658a6bULL);
  EXPECT_EQ(b.next(), 0x4083b6d791c4bf53ULL);
  EXPECT_EQ(b.next(), 0x955bb904bb868842ULL);
}

TEST(RandomStream, SatisfiesStdConcept) {
  static_assert(std::uniform_random_bit_generator<RandomStream>);
  RandomStream rng(3);
  std::uniform_int_distribution<int> dist(0, 9);
  EXPECT_LE(dist(rng), 9);
}

TEST(RandomStream, DerivedStreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t domain = 1; domain <= 6; ++domain) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      first.insert(RandomStream::derive(1, static_cast<StreamDomain>(domain), i).next());
    }
  }
  EXPECT_EQ(first.size(), 300u);
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_EQ(derive_seed(9, 5, 1), derive_seed(9, 5, 1));
}

TEST(RandomStream, UniformRangeAndMean) {
  RandomStream rng(4);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12 / n)
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomStream, UniformIndexBounds) {
  RandomStream rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 5.0 * std::sqrt(10000.0 * 6.0 / 7.0));
}

TEST(RandomStream, NormalMoments) {
  RandomStream rng(6);
  const int n = 400000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

// Reference moments of exp(-t^4/s^4 - t^2/s^2) by quadrature.
double gg_moment(double sigma2, int power) {
  const double s = std::sqrt(sigma2);
  double num = 0.0, den = 0.0;
  const double h = s * 1e-4;
  for (double t = -6.0 * s; t <= 6.0 * s; t += h) {
    const double w = std::exp(-std::pow(t / s, 4) - std::pow(t / s, 2));
    num += w * std::pow(t, power);
    den += w;
  }
  return num / den;
}

TEST(GeneralizedGaussian, QuadratureMatchesFrozenValues) {
  EXPECT_NEAR(gg_moment(0.1, 2), 0.0233959958486833, 1e-10);
  EXPECT_NEAR(gg_moment(0.1, 4), 0.00133020020756584, 1e-11);
  EXPECT_NEAR(gg_moment(1.0, 2), 0.233959958486833, 1e-9);
  EXPECT_NEAR(gg_moment(1.0, 4), 0.133020020756584, 1e-9);
}

TEST(GeneralizedGaussian, SampleMomentsMatchDensity) {
  for (double sigma2 : {0.1, 1.0}) {
    RandomStream rng(7);
    const int n = 200000;
    const double center = 3.0;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = sample_generalized_gaussian(rng, center, sigma2) - center;
      s1 += t;
      s2 += t * t;
      s4 += t * t * t * t;
    }
    const double m2 = gg_moment(sigma2, 2);
    const double m4 = gg_moment(sigma2, 4);
    const double m8 = gg_moment(sigma2, 8);
    EXPECT_NEAR(s1 / n, 0.0, 5.0 * std::sqrt(m2 / n));
    EXPECT_NEAR(s2 / n, m2, 5.0 * std::sqrt((m4 - m2 * m2) / n));
    EXPECT_NEAR(s4 / n, m4, 5.0 * std::sqrt((m8 - m4 * m4) / n));
  }
}

TEST(SampleBall, InsideAndRadiallyUniform) {
  RandomStream rng(8);
  const int n = 100000;
  Vector v(3);
  int inner = 0;
  for (int i = 0; i < n; ++i) {
    sample_ball(rng, 2.0, v);
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    ASSERT_LE(r, 2.0);
    if (r <= 1.0) ++inner;
  }
  // P(r <= R/2) = 1/8 in three dimensions.
  EXPECT_NEAR(inner / double(n), 0.125, 5.0 * std::sqrt(0.125 * 0.875 / n));
}
