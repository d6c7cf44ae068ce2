#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "qpart/rng.hpp"
#include "qpart/stats.hpp"

using namespace qpart;

TEST_CASE("normal cdf") {
  boost::math::normal n01;
  for (double x : {-5.0, -1.0, 0.0, 0.3, 2.5}) CHECK(stats::normal_cdf(x) == doctest::Approx(cdf(n01, x)).epsilon(1e-14));
}

TEST_CASE("chi-square quantile and tail") {
  for (double k : {1.0, 2.0, 6.0, 30.0}) {
    boost::math::chi_squared d(k);
    CHECK(stats::chi2_quantile(0.99, k) == doctest::Approx(quantile(d, 0.99)).epsilon(1e-10));
    CHECK(stats::chi2_sf(k + 1.0, k) == doctest::Approx(cdf(complement(d, k + 1.0))).epsilon(1e-12));
  }
  CHECK(stats::chi2_quantile(0.9, 2.0) == doctest::Approx(2.0 * std::log(10.0)));
}

TEST_CASE("Kolmogorov constants") {
  CHECK(stats::ks_critical(0.01, 1) == doctest::Approx(1.62762).epsilon(1e-5));
  CHECK(stats::kolmogorov_sf(1.62762) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(stats::kolmogorov_sf(1.35810) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("KS statistic on a tiny sample") {
  // sample {0.1, 0.6} vs uniform: max(0.5-0.1, 1-0.6, 0.6-0.5) = 0.4
  CHECK(stats::ks_statistic({0.6, 0.1}, [](double x) { return x; }) == doctest::Approx(0.4));
}

TEST_CASE("lattice KS sees the gap before an observed point") {
  // F uniform on {0,...,9}; all observations at 5: D = max(|1 - 0.6|, |0 - 0.5|) = 0.5
  auto F = [](std::int64_t k) { return k < 0 ? 0.0 : k > 9 ? 1.0 : (k + 1) / 10.0; };
  CHECK(stats::ks_statistic_lattice({5, 5, 5}, F) == doctest::Approx(0.5));
  CHECK(stats::ks_statistic_lattice({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, F) == doctest::Approx(0.0));
}

TEST_CASE("KS of a correct sample stays below the critical value") {
  RngStream r(9, 0);
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) x.push_back(r.exponential());
  const double d = stats::ks_statistic(x, [](double t) { return -std::expm1(-t); });
  CHECK(d < stats::ks_critical(0.001, x.size()));
}

TEST_CASE("chi-square pools small cells") {
  const std::vector<std::uint64_t> obs = {50, 50, 1, 0, 0};
  const std::vector<double> p = {0.49, 0.49, 0.01, 0.01, 0.0};
  const auto cs = stats::chi_square(obs, p, 0.01);
  CHECK(cs.dof == 1);
  // cells 3..5 merge into cell 2: expected 49.49 and 51.51 of 101
  CHECK(cs.statistic == doctest::Approx(0.51 * 0.51 / 49.49 + 0.51 * 0.51 / 51.51));
  CHECK(cs.critical == doctest::Approx(6.634897).epsilon(1e-6));
}

TEST_CASE("moments helpers") {
  const std::vector<double> x = {1, 2, 3, 4}, y = {2, 4, 6, 8}, z = {4, 3, 2, 1};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::correlation(x, y) == doctest::Approx(1.0));
  CHECK(stats::correlation(x, z) == doctest::Approx(-1.0));
}
