#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "qpart/calibrate.hpp"
#include "qpart/enumerate.hpp"
#include "qpart/errors.hpp"
#include "qpart/partition.hpp"

using namespace qpart;

namespace {

// Strict partitions of n into exactly m parts: d(n,m) = d(n-m,m) + d(n-m,m-1).
std::uint64_t distinct_rec(std::int64_t n, int m, std::map<std::pair<std::int64_t, int>, std::uint64_t>& memo) {
  if (m == 0) return n == 0;
  if (n <= 0) return 0;
  auto key = std::make_pair(n, m);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const auto v = distinct_rec(n - m, m, memo) + distinct_rec(n - m, m - 1, memo);
  memo[key] = v;
  return v;
}

// Subset enumeration over {1^q, ..., J^q}.
std::map<std::pair<std::uint64_t, int>, std::uint64_t> subsets(int q, int J) {
  std::map<std::pair<std::uint64_t, int>, std::uint64_t> out;
  for (std::uint32_t mask = 0; mask < (1u << J); ++mask) {
    std::uint64_t n = 0;
    int m = 0;
    for (int j = 0; j < J; ++j)
      if (mask >> j & 1) {
        n += ipow(j + 1, q);
        ++m;
      }
    ++out[{n, m}];
  }
  return out;
}

}  // namespace

TEST_CASE("partition value type") {
  const auto p = Partition::from_parts({9, 4, 1}, 2);
  CHECK(p.N == 14);
  CHECK(p.M == 3);
  CHECK(p.lmax() == 9);
  CHECK(p.lmin() == 1u);
  CHECK(join_parts(p) == "9;4;1");
  CHECK_THROWS_AS(Partition::from_parts({4, 4}, 2), DomainError);
  CHECK_THROWS_AS(Partition::from_parts({1, 4}, 2), DomainError);
  CHECK_THROWS_AS(Partition::from_parts({5}, 2), DomainError);
  const Partition e;
  CHECK(e.lmax() == 0);
  CHECK_FALSE(e.lmin().has_value());
  CHECK(is_qth_power(1ull << 62, 2));
  CHECK_FALSE(is_qth_power((1ull << 62) + 1, 2));
}

TEST_CASE("q=1 counts agree with the strict partition recurrence") {
  std::map<std::pair<std::int64_t, int>, std::uint64_t> memo;
  for (std::uint64_t n = 0; n <= 90; ++n)
    for (int m = 0; m <= 10; ++m) {
      CAPTURE(n);
      CAPTURE(m);
      CHECK(count_partitions(1, n, m) == distinct_rec(std::int64_t(n), m, memo));
    }
}

TEST_CASE("counts agree with subset enumeration and the knapsack table") {
  for (int q : {1, 2, 3}) {
    const int J = q == 1 ? 16 : 14;
    const auto sub = subsets(q, J);
    const std::uint64_t nmax = ipow(J + 1, q) - 1;  // all partitions of n <= nmax use parts <= J^q
    const auto table = enum_table(q, nmax, J);
    for (const auto& [key, c] : sub) {
      if (key.first > nmax) continue;
      CAPTURE(q);
      CAPTURE(key.first);
      CAPTURE(key.second);
      CHECK(count_partitions(q, key.first, key.second) == c);
      CHECK(table.at(key.first, key.second) == c);
    }
  }
}

TEST_CASE("listing") {
  const auto ps = list_partitions(1, 12, 3);
  REQUIRE(ps.size() == 7);
  std::set<std::vector<std::uint64_t>> got;
  for (const auto& p : ps) got.insert(p.parts);
  const std::set<std::vector<std::uint64_t>> want = {{9, 2, 1}, {8, 3, 1}, {7, 4, 1}, {6, 5, 1},
                                                     {7, 3, 2}, {6, 4, 2}, {5, 4, 3}};
  CHECK(got == want);
  for (std::size_t i = 1; i < ps.size(); ++i) CHECK(ps[i - 1].parts > ps[i].parts);
  CHECK(list_partitions(2, 30, 2).empty());
  CHECK(count_partitions(2, 5, 2) == 1);
  CHECK(list_partitions(2, 5, 2)[0].parts == std::vector<std::uint64_t>{4, 1});
  CHECK(count_partitions(1, 0, 0) == 1);
  CHECK_THROWS_AS(count_partitions(1, 100, 65), ResourceError);
  CHECK_THROWS_AS(count_partitions(2, 6000000, 3), ResourceError);
}

TEST_CASE("cumulative counts") {
  CHECK(cumulative_count(1, 2, 20) == 90);
  CHECK(asymptotic_cumulative(1, 2, 20) == doctest::Approx(100.0));
  CHECK(asymptotic_cumulative(2, 2, 100) == doctest::Approx(M_PI * 100 / 8));
  // brute force over pairs
  for (int q : {1, 2}) {
    for (double x : {7.0, 50.0, 333.0}) {
      std::uint64_t c = 0;
      for (std::uint64_t a = 1; double(ipow(a, q)) <= x; ++a)
        for (std::uint64_t b = 1; b < a; ++b)
          if (double(ipow(a, q) + ipow(b, q)) <= x) ++c;
      CHECK(cumulative_count(q, 2, x) == c);
    }
  }
}

TEST_CASE("Boltzmann joint law on a finite space") {
  for (auto [q, L] : {std::pair{1, 6ull}, std::pair{2, 36ull}}) {
    const auto p = crude_params(q, 10.0, 2.0);
    double s = 0.0;
    const std::uint64_t J = qth_root_floor(double(L), q);
    std::uint64_t nmax = 0;
    for (std::uint64_t j = 1; j <= J; ++j) nmax += ipow(j, q);
    for (std::uint64_t n = 0; n <= nmax; ++n)
      for (int m = 0; m <= int(J); ++m) s += boltzmann_joint_pmf(p, n, m, L);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    // empty partition has probability 1/F
    CHECK(boltzmann_joint_pmf(p, 0, 0, L) == doctest::Approx(1.0 / partial_generating_function(p, L)));
  }
}

TEST_CASE("sharp majorant") {
  CHECK(sharp_majorant(1, 12, 3) == 9);
  CHECK(sharp_majorant(2, 5, 2) == 4);
  CHECK(sharp_majorant(2, 14, 3) == 9);
  CHECK_THROWS_AS(sharp_majorant(2, 30, 2), EmptySpaceError);
}

TEST_CASE("table CSV") {
  const auto t = enum_table(2, 5, 2);
  CHECK(enum_table_csv(t) == "n,m,count\n0,0,1\n1,1,1\n4,1,1\n5,2,1\n");
}
