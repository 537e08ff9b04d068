#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "matchlab/format.hpp"
#include "matchlab/rng.hpp"

using matchlab::Rng;

TEST_CASE("same seed, same stream") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(a.counter() == 100);
}

TEST_CASE("different seeds diverge immediately") {
  Rng a(1), b(2);
  CHECK(a.next() != b.next());
}

TEST_CASE("split is pure and yields distinct children") {
  Rng parent(7);
  const auto before = parent.counter();
  Rng c1 = parent.split(0), c1_again = parent.split(0), c2 = parent.split(1);
  CHECK(parent.counter() == before);
  CHECK(c1.key() == c1_again.key());
  CHECK(c1.key() != c2.key());
  CHECK(c1.key() != parent.key());

  std::set<std::uint64_t> keys;
  for (std::uint64_t s = 0; s < 10000; ++s) keys.insert(parent.split(s).key());
  CHECK(keys.size() == 10000);
}

TEST_CASE("uniform stays strictly inside (0,1) with the right moments") {
  Rng rng(3);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  // SE of the mean is sqrt(1/12 / n) ~ 6.5e-4.
  CHECK(std::abs(mean - 0.5) < 5 * 6.5e-4);
  CHECK(sum_sq / n - mean * mean == doctest::Approx(1.0 / 12).epsilon(0.01));
}

TEST_CASE("below is unbiased on a small awkward bound") {
  Rng rng(11);
  const int bound = 7, n = 70000;
  std::vector<int> counts(bound, 0);
  for (int i = 0; i < n; ++i) {
    const auto x = rng.below(bound);
    REQUIRE(x < static_cast<std::uint64_t>(bound));
    ++counts[x];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  // 6 degrees of freedom; the 0.999 quantile is 22.46.
  CHECK(chi2 < 22.46);
}

TEST_CASE("below(1) is always zero") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(rng.below(1) == 0);
}

TEST_CASE("format_double round-trips") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.below(40)) - 20);
    double back = 0.0;
    REQUIRE(matchlab::parse_double(matchlab::format_double(x), back));
    CHECK(back == x);
  }
  CHECK(matchlab::format_double(0.1) == "0.1");
  CHECK(matchlab::format_double(1.0) == "1");
  CHECK(matchlab::format_double(std::nan("")) == "nan");
}

TEST_CASE("strict parsers reject trailing garbage") {
  double d = 0;
  int i = 0;
  CHECK(matchlab::parse_double(" 2.5 ", d));
  CHECK(d == 2.5);
  CHECK(matchlab::parse_double("+3", d));
  CHECK_FALSE(matchlab::parse_double("2.5x", d));
  CHECK_FALSE(matchlab::parse_double("", d));
  CHECK(matchlab::parse_int("42", i));
  CHECK(i == 42);
  CHECK_FALSE(matchlab::parse_int("4.2", i));
  CHECK_FALSE(matchlab::parse_int("99999999999", i));
}
