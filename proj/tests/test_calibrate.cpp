#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "qpart/calibrate.hpp"
#include "qpart/errors.hpp"

using namespace qpart;
namespace bm = boost::math;

namespace {

// Plain long double summation of the Bernoulli moment series, far past the tail.
MomentSummary brute_moments(const ModelParams& p, std::uint64_t jmax) {
  long double en = 0, em = 0, vn = 0, vm = 0, cv = 0;
  for (std::uint64_t j = 1; j <= jmax; ++j) {
    const long double l = std::pow((long double)j, p.q);
    const long double w = (long double)p.z2 * std::exp(-(long double)p.gamma * l);
    const long double pr = w / (1 + w);
    const long double pq = pr / (1 + w);
    en += l * pr;
    em += pr;
    vn += l * l * pq;
    vm += pq;
    cv += l * pq;
  }
  return {double(en), double(em), double(vn), double(vm), double(cv), std::nullopt};
}

}  // namespace

TEST_CASE("crude calibration closed form") {
  const auto p = calibrate_crude(1, 1e6, 100);
  CHECK(p.gamma == doctest::Approx(1e-4));
  CHECK(p.z2 == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(p.kappa == doctest::Approx(0.01));
  const auto p2 = calibrate_crude(2, 12500, 5);
  CHECK(p2.gamma0() == doctest::Approx(2e-4));
  CHECK(p2.z2 == doctest::Approx(5.0 * std::sqrt(2e-4) / bm::tgamma(1.5)).epsilon(1e-14));
}

TEST_CASE("calibration preconditions") {
  CHECK_THROWS_AS(calibrate_crude(1, 100, 20), DomainError);  // kappa = 4
  CHECK_THROWS_AS(calibrate_crude(0, 1e6, 10), DomainError);
  CHECK_THROWS_AS(calibrate_crude(1, 1e6, -1), DomainError);
  CHECK_NOTHROW(crude_params(1, 100, 20));
}

TEST_CASE("bias-corrected targets exceed the originals") {
  const auto t = corrected_targets(1, 1e6, 100);
  // q=1: N~ = N + M^2/4, M~ = M + M^2 g0/2
  CHECK(t.N == doctest::Approx(1e6 + 2500.0));
  CHECK(t.M == doctest::Approx(100.5));
  const auto p = calibrate_corrected(1, 1e6, 100);
  CHECK(p.z2 == doctest::Approx(0.0100750).epsilon(1e-6));
}

TEST_CASE("exact moments match brute-force summation") {
  for (int q : {1, 2, 3}) {
    const auto p = calibrate_crude(q, q == 1 ? 1e4 : 1e5, 5);
    const auto a = exact_moments(p);
    const auto b = brute_moments(p, q == 1 ? 400000 : q == 2 ? 5000 : 500);
    CAPTURE(q);
    CHECK(a.EN == doctest::Approx(b.EN).epsilon(1e-12));
    CHECK(a.EM == doctest::Approx(b.EM).epsilon(1e-12));
    CHECK(a.VarN == doctest::Approx(b.VarN).epsilon(1e-12));
    CHECK(a.VarM == doctest::Approx(b.VarM).epsilon(1e-12));
    CHECK(a.CovNM == doctest::Approx(b.CovNM).epsilon(1e-12));
  }
}

TEST_CASE("truncated moments stop at L") {
  const auto p = calibrate_crude(2, 1e4, 3);
  const auto a = exact_moments(p, 50);
  const auto b = brute_moments(p, 7);
  CHECK(a.EN == doctest::Approx(b.EN).epsilon(1e-14));
  CHECK(a.truncation_L == 50u);
}

TEST_CASE("Newton calibration hits the targets") {
  for (int q : {1, 2, 3}) {
    const double N = 1e6, M = q == 3 ? 10 : 30;
    const auto p = calibrate_exact(q, N, M);
    const auto m = exact_moments(p);
    CAPTURE(q);
    CHECK(m.EN == doctest::Approx(N).epsilon(1e-9));
    CHECK(m.EM == doctest::Approx(M).epsilon(1e-9));
    CHECK(p.method == Method::NewtonExact);
  }
}

TEST_CASE("bias correction shrinks the crude error") {
  const double N = 1e6, M = 100;
  const auto c = exact_moments(calibrate_crude(1, N, M));
  const auto b = exact_moments(calibrate_corrected(1, N, M));
  CHECK(std::abs(b.EN - N) < std::abs(c.EN - N));
  CHECK(std::abs(b.EM - M) < std::abs(c.EM - M));
}

TEST_CASE("covariance asymptotics") {
  const auto p = calibrate_exact(2, 1e7, 50);
  const auto m = exact_moments(p);
  CHECK(m.VarM / 50 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(m.CovNM / 1e7 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(m.VarN * 50 / (3.0 * 1e14) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("integer helpers") {
  CHECK(ipow(3, 4) == 81);
  CHECK_THROWS_AS(ipow(1ull << 32, 2), ResourceError);
  CHECK(qth_root_floor(80.999, 4) == 2);
  CHECK(qth_root_floor(81.0, 4) == 3);
  CHECK(qth_root_floor(0.5, 2) == 0);
  CHECK(qth_root_floor(1e18, 2) == 1000000000ull);
  CHECK(floor_to_qth_power(68555.9, 1) == 68555);
  CHECK(floor_to_qth_power(130.0, 2) == 121);
}

TEST_CASE("upper cutoff defining equations") {
  const double N = 1e6, M = 100, delta = 0.1;
  const double g0 = M / N;
  const double Lf = upper_cutoff_value(1, N, M, delta, Regime::FixedM);
  CHECK(bm::gamma_q(1.0, g0 * Lf) == doctest::Approx(-std::log1p(-delta) / M).epsilon(1e-10));
  const double Lg = upper_cutoff_value(2, N, M, delta, Regime::GrowingM);
  const double Bq = std::log(M) - 0.5 * std::log(std::log(M)) - bm::lgamma(0.5);
  CHECK(std::exp(-std::exp(-(M / (2 * N) * Lg - Bq))) == doctest::Approx(1 - delta).epsilon(1e-12));
  CHECK(upper_cutoff(1, N, M, 0.01, Regime::FixedM) > upper_cutoff(1, N, M, 0.1, Regime::FixedM));
  CHECK_THROWS_AS(upper_cutoff(1, 1e6, 0.05, 0.1, Regime::FixedM), InfeasibleError);
  CHECK_THROWS_AS(upper_cutoff(1, 1e6, 2.0, 0.1, Regime::GrowingM), DomainError);
}

TEST_CASE("lower cutoff defining equations") {
  const double N = 1e6, M = 100, delta = 0.1;
  const double L0 = lower_cutoff_value(2, N, M, delta, Regime::FixedM);
  CHECK(bm::gamma_p(0.5, M / (2 * N) * L0) == doctest::Approx(std::log(10.0) / M).epsilon(1e-10));
  CHECK(lower_cutoff(2, N, M, delta, Regime::FixedM) % 1 == 0);
  CHECK_THROWS_AS(lower_cutoff(1, 1e6, 2.0, 0.01, Regime::FixedM), InfeasibleError);
  const auto pol = cutoff_policy(1, 1e6, 2.0, 0.01, Regime::FixedM);
  CHECK_FALSE(pol.L0.has_value());
}

TEST_CASE("censoring constants") {
  // q=1: C1 = (e (1 - e^{-m}) / m)^m / m!
  for (int m : {1, 3, 5}) {
    const double ref = std::pow(std::exp(1.0) * (1 - std::exp(-m)) / m, m) / bm::tgamma(m + 1.0);
    CHECK(censoring_constant_c1(m, 1) == doctest::Approx(ref).epsilon(1e-13));
  }
  const double c3 = censoring_constant_c3(5, 1, 1.1);
  CHECK(c3 == doctest::Approx((bm::gamma_p(5.0, 5.5) - bm::gamma_p(5.0, 5.0)) / std::pow(bm::gamma_p(1.0, 5.5), 5)).epsilon(1e-12));
  CHECK(censoring_limit(TaskKind::T3_Approximate, 1, 2500, 5, 1.1, 0.1, false) == 27);
  CHECK_THROWS_AS(censoring_limit(TaskKind::T1_Exact, 3, 100, 2, 1.0, 0.1, true), DomainError);
  CHECK(censoring_limit(TaskKind::T1_Exact, 3, 100, 2, 1.0, 0.1, false) >= 1);
}

TEST_CASE("corrected limit is much smaller than the crude one") {
  const double crude = censoring_limit_value(TaskKind::T1_Exact, 1, 2500, 5, 1.0, 0.1, false);
  const double corr = censoring_limit_value(TaskKind::T1_Exact, 1, 2500, 5, 1.0, 0.1, true);
  CHECK(corr < crude);
  // doubling ln(1/delta) doubles the corrected limit
  CHECK(censoring_limit_value(TaskKind::T1_Exact, 1, 2500, 5, 1.0, 0.01, true) == doctest::Approx(2 * corr));
}
