#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hyperbc/parallel.hpp"
#include "hyperbc/random.hpp"
#include "hyperbc/statistics.hpp"

namespace {

TEST(RunningStats, MatchesTwoPassFormulas) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(2.0, 3.0);
  std::vector<double> xs(1000);
  for (double& x : xs) x = normal(rng);
  hyperbc::RunningStats s;
  for (double x : xs) s.add(x);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(s.mean(), mean, 1e-12);
  EXPECT_NEAR(s.variance(), ss / (xs.size() - 1), 1e-10);
  EXPECT_NEAR(s.stderr_of_mean(), std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-12);
}

TEST(RunningStats, MergeEqualsSequential) {
  hyperbc::RunningStats all;
  hyperbc::RunningStats a;
  hyperbc::RunningStats b;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i * 0.7) * i;
    all.add(x);
    (i < 37 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count(), all.count());
  EXPECT_NEAR(a.mean(), all.mean(), 1e-12);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-9);
  EXPECT_EQ(a.min(), all.min());
  EXPECT_EQ(a.max(), all.max());
}

TEST(CompensatedSum, RecoversCancellation) {
  hyperbc::CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

TEST(CompensatedSum, UniformWeightsSumToOne) {
  for (std::size_t n : {3u, 7u, 1000u, 1000000u}) {
    hyperbc::CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(1.0 / static_cast<double>(n));
    EXPECT_EQ(s.value(), 1.0) << n;
  }
}

TEST(MomentFeatures, IdenticalSamplesGiveZeroDiscrepancy) {
  hyperbc::MomentFeatures a(2);
  for (int i = 0; i < 50; ++i) {
    const double d[2] = {1.0 + 0.01 * i, 0.5};
    a.add(d, 0.1 * i);
  }
  EXPECT_EQ(hyperbc::max_abs_z(a, a), 0.0);
}

TEST(MomentFeatures, DetectsShift) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  hyperbc::MomentFeatures a(1);
  hyperbc::MomentFeatures b(1);
  for (int i = 0; i < 20000; ++i) {
    const double d0[1] = {std::abs(normal(rng))};
    const double d1[1] = {std::abs(normal(rng)) + 0.1};
    a.add(d0, normal(rng));
    b.add(d1, normal(rng));
  }
  EXPECT_GT(hyperbc::max_abs_z(a, b), 5.0);
}

TEST(RandomStream, SplitsAreDistinctAndReproducible) {
  const hyperbc::RandomStream root(42);
  EXPECT_EQ(root.split("a").key(), hyperbc::RandomStream(42).split("a").key());
  EXPECT_NE(root.split("a").key(), root.split("b").key());
  auto e1 = root.engine(3);
  auto e2 = root.engine(3);
  EXPECT_EQ(e1(), e2());
  EXPECT_NE(root.engine(0)(), root.engine(1)());
}

struct SumAcc {
  double sum = 0.0;
  void merge(const SumAcc& o) { sum += o.sum; }
};

TEST(Parallel, ResultsIndependentOfThreadCount) {
  const hyperbc::RandomStream rng(9);
  auto body = [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto eng = rng.engine(chunk);
    std::uniform_real_distribution<double> u;
    SumAcc acc;
    for (std::size_t i = begin; i < end; ++i) acc.sum += u(eng);
    return acc;
  };
  hyperbc::ParallelOptions one{1000, 1};
  hyperbc::ParallelOptions four{1000, 4};
  const double a = hyperbc::reduce_chunks(12345, one, SumAcc{}, body).sum;
  const double b = hyperbc::reduce_chunks(12345, four, SumAcc{}, body).sum;
  EXPECT_EQ(a, b);
}

TEST(Parallel, PropagatesExceptions) {
  hyperbc::ParallelOptions opts{10, 3};
  auto body = [](std::size_t chunk, std::size_t, std::size_t) -> SumAcc {
    if (chunk == 5) throw std::runtime_error("boom");
    return {};
  };
  EXPECT_THROW(hyperbc::reduce_chunks(100, opts, SumAcc{}, body), std::runtime_error);
}

}  // namespace
