#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcdiff/rng.hpp"

using qcdiff::Rng;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams are reproducible and distinct") {
  const Rng root(7);
  Rng a = root.derive(3);
  Rng b = root.derive(3);
  Rng c = root.derive(4);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  CHECK(root.derive("corpus").next_u64() != root.derive("train").next_u64());
}

TEST_CASE("derivation ignores parent consumption") {
  Rng a(9);
  const std::uint64_t before = a.derive_seed(1);
  a.next_u64();
  a.next_u64();
  CHECK(a.derive_seed(1) == before);
}

TEST_CASE("uniform doubles stay in [0,1)") {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = r.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("next_below is bounded and roughly uniform") {
  Rng r(2);
  std::vector<long> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[r.next_below(5)];
  for (long c : counts) {
    CHECK(c > n / 5 - 700);
    CHECK(c < n / 5 + 700);
  }
}

TEST_CASE("Box-Muller moments") {
  Rng r(3);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
