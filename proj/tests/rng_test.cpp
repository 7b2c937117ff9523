#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ortest/detail/parallel.hpp"
#include "ortest/rng.hpp"

using namespace ortest;

TEST(SplitMix, ReferenceSequence) {
  // Published splitmix64 outputs for state 0.
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(splitmix64(state), 0x06C45D188009454FULL);
}

TEST(DeriveSeed, DistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
}

TEST(GaussianStream, Reproducible) {
  GaussianStream a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    (void)c;
  }
  GaussianStream d(123), e(124);
  EXPECT_NE(d.next(), e.next());
}

TEST(GaussianStream, Moments) {
  GaussianStream g(9);
  const int n = 400000;
  double s1 = 0, s2 = 0, s4 = 0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.next();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
    below += z < 1.0;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.05);
  EXPECT_NEAR(double(below) / n, 0.841345, 0.003);
}

TEST(GaussianStream, CorrelatedCovariance) {
  Matrix l(2, 2);
  l << 1, 0, 0.9, std::sqrt(1 - 0.81);
  GaussianStream g(1);
  const int n = 200000;
  double sxy = 0;
  for (int i = 0; i < n; ++i) {
    const Vector x = g.correlated(Vector::Zero(2), l);
    sxy += x(0) * x(1);
  }
  EXPECT_NEAR(sxy / n, 0.9, 0.01);
}

TEST(Chunked, ResultsIndependentOfThreads) {
  auto work = [](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
    GaussianStream g(derive_seed(5, chunk));
    double s = 0;
    for (std::uint64_t i = begin; i < end; ++i) s += g.next();
    return s;
  };
  const auto one = detail::chunked<double>(100003, 1000, 1, work);
  const auto many = detail::chunked<double>(100003, 1000, 8, work);
  ASSERT_EQ(one.size(), 101u);
  EXPECT_EQ(one, many);
}

TEST(Chunked, PropagatesExceptions) {
  auto work = [](std::uint64_t chunk, std::uint64_t, std::uint64_t) -> int {
    if (chunk == 3) throw std::runtime_error("boom");
    return 1;
  };
  EXPECT_THROW(detail::chunked<int>(100, 10, 4, work), std::runtime_error);
}
