#include <doctest.h>

#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

#include "qpart/calibrate.hpp"
#include "qpart/enumerate.hpp"
#include "qpart/errors.hpp"
#include "qpart/sampler.hpp"

using namespace qpart;

namespace {

std::uint32_t mask_of(const Partition& p) {
  std::uint32_t m = 0;
  for (auto v : p.parts) m |= 1u << (v - 1);
  return m;
}

double subset_prob(const ModelParams& params, std::uint32_t mask, int J) {
  double pr = 1.0;
  for (int j = 1; j <= J; ++j) {
    const double w = params.z2 * std::exp(-params.gamma * j);
    const double p = w / (1 + w);
    pr *= (mask >> (j - 1) & 1) ? p : 1 - p;
  }
  return pr;
}

}  // namespace

TEST_CASE("free sampler reproduces the product Bernoulli law") {
  const auto params = crude_params(1, 3.0, 1.5);
  const int n = 200000;
  for (auto kind : {SamplerKind::Naive, SamplerKind::Skip}) {
    const auto ps = sample_batch(params, 4, n, 11, 1, kind);
    std::map<std::uint32_t, int> freq;
    for (const auto& p : ps) ++freq[mask_of(p)];
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
      const double pr = subset_prob(params, mask, 4);
      const double sd = std::sqrt(pr * (1 - pr) / n);
      CAPTURE(mask);
      CHECK(std::abs(freq[mask] / double(n) - pr) <= 4 * sd);
    }
  }
}

TEST_CASE("skip sampler matches the naive sampler on a large range") {
  const auto params = calibrate_crude(1, 1e4, 10);
  const std::uint64_t L = 30000;
  const int n = 4000;
  const auto a = sample_batch(params, L, n, 3, 1, SamplerKind::Naive);
  const auto b = sample_batch(params, L, n, 4, 1, SamplerKind::Skip);
  double ma = 0, mb = 0, na = 0, nb = 0;
  for (int i = 0; i < n; ++i) {
    ma += double(a[i].M);
    mb += double(b[i].M);
    na += double(a[i].N);
    nb += double(b[i].N);
  }
  const auto mom = exact_moments(params, L);
  CHECK(std::abs(ma / n - mom.EM) < 4 * std::sqrt(mom.VarM / n));
  CHECK(std::abs(mb / n - mom.EM) < 4 * std::sqrt(mom.VarM / n));
  CHECK(std::abs(na / n - mom.EN) < 4 * std::sqrt(mom.VarN / n));
  CHECK(std::abs(nb / n - mom.EN) < 4 * std::sqrt(mom.VarN / n));
  for (const auto& p : b) {
    REQUIRE(p.lmax() <= L);
    for (std::size_t i = 1; i < p.parts.size(); ++i) REQUIRE(p.parts[i] < p.parts[i - 1]);
  }
}

TEST_CASE("batches are independent of thread count and of batch position") {
  const auto params = calibrate_crude(2, 12500, 5);
  const auto a = sample_batch(params, 40000, 1000, 5, 1);
  const auto b = sample_batch(params, 40000, 1000, 5, 4);
  CHECK(a == b);
  const auto c = sample_range(params, 40000, 500, 10, 5, 2);
  for (int i = 0; i < 10; ++i) CHECK(c[i] == a[500 + i]);
  CHECK(sample_batch(params, 40000, 1, 5)[0] == free_sample(params, 40000, RngHandle{5, 0}));
  CHECK(sample_batch(params, 40000, 0, 5).empty());
}

TEST_CASE("zero z2 gives the empty partition") {
  auto params = crude_params(1, 100, 2);
  params.z2 = 0.0;
  RngStream r(1, 0);
  CHECK(free_sample(params, 1000, r).empty());
  CHECK(part_probability(params, 1.0) == 0.0);
}

TEST_CASE("tail rejection probability is a product") {
  const auto params = crude_params(1, 10, 2);
  double ref = 1.0;
  for (int l = 4; l <= 9; ++l) ref *= 1 - part_probability(params, l);
  CHECK(tail_rejection_probability(params, 3, 9) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(tail_rejection_probability(params, 9, 9) == 1.0);
}

TEST_CASE("fast kernel has the conditioned free law") {
  // parts law of free_sample on L=6 given M = 2 and N <= 8
  const auto params = crude_params(1, 6.0, 2.0);
  std::map<std::uint32_t, double> want;
  double norm = 0;
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    int m = 0, w = 0;
    for (int j = 1; j <= 6; ++j)
      if (mask >> (j - 1) & 1) {
        ++m;
        w += j;
      }
    if (m != 2 || w > 8) continue;
    want[mask] = subset_prob(params, mask, 6);
    norm += want[mask];
  }
  const RejectionKernel k(params, 6, 2, 8);
  std::map<std::uint32_t, int> got;
  int acc = 0;
  RngStream r(2, 0);
  while (acc < 100000) {
    if (auto p = k.attempt_fast(r)) {
      ++got[mask_of(*p)];
      ++acc;
    }
  }
  for (auto& [mask, pr] : want) {
    const double p = pr / norm;
    CAPTURE(mask);
    CHECK(std::abs(got[mask] / double(acc) - p) <= 4 * std::sqrt(p * (1 - p) / acc));
  }
  std::size_t total = 0;
  for (auto& [mask, c] : got) total += want.count(mask) ? c : 0;
  CHECK(total == std::size_t(acc));
}

TEST_CASE("rejection sampler examples") {
  RejectionTask t;
  t.n = 5;
  t.m = 2;
  t.t_star = censoring_limit(TaskKind::T1_Exact, 2, 5, 2, 1.0, 0.1, true);
  RngStream r(0, 0);
  const auto rec = reject_sample_crude(2, t, r);
  REQUIRE(rec.verdict == Verdict::Sampled);
  CHECK(rec.partition->parts == std::vector<std::uint64_t>{4, 1});
  CHECK(rec.attempts_external >= 1);
  CHECK(rec.attempts_internal >= rec.attempts_external);

  t.n = 3;
  const auto v = reject_sample_crude(2, t, r);
  CHECK(v.verdict == Verdict::Void);
  CHECK(v.attempts_internal == 0);

  t.theta = 1.5;
  CHECK_THROWS_AS(reject_sample_crude(2, t, r), DomainError);
  t.kind = TaskKind::T2_MultiExact;
  CHECK_THROWS_AS(reject_sample_crude(2, t, r), DomainError);
}

TEST_CASE("rejection sampler stays in the target space and respects t*") {
  RejectionTask t;
  t.n = 12;
  t.m = 3;
  t.t_star = 1;
  const auto params = crude_params(1, 12, 3);
  int sampled = 0;
  for (int i = 0; i < 2000; ++i) {
    RngStream r(7, i);
    for (bool fast : {true, false}) {
      const auto rec = reject_sample(t, params, r, RejectOptions{fast});
      CHECK(rec.attempts_external <= 1);
      if (rec.partition) {
        CHECK(rec.partition->N == 12);
        CHECK(rec.partition->M == 3);
        ++sampled;
      }
    }
  }
  CHECK(sampled > 0);
}

TEST_CASE("multiple exact and approximate tasks") {
  RejectionTask t;
  t.kind = TaskKind::T2_MultiExact;
  t.n = 40;
  t.m = 3;
  t.theta = 1.1;
  t.delta = 0.1;
  t.corrected = true;
  RngStream r(3, 0);
  const auto finds = reject_sample_range(1, t, r);
  CHECK(finds.size() == 5);
  for (const auto& f : finds)
    if (f.record.partition) CHECK(f.record.partition->N == f.k);

  t.kind = TaskKind::T3_Approximate;
  t.n = 2500;
  t.m = 5;
  t.t_star = censoring_limit(TaskKind::T3_Approximate, 1, 2500, 5, 1.1, 0.1, false);
  const auto rec = reject_sample_crude(1, t, r);
  if (rec.partition) {
    CHECK(rec.partition->N >= 2500);
    CHECK(rec.partition->N <= 2750);
    CHECK(rec.partition->M == 5);
  }
}

TEST_CASE("expected internal attempts") {
  for (int q : {1, 2}) {
    const double mu = 5 * boost::math::gamma_p(1.0 / q, 5.5 / q);
    CHECK(expected_internal_attempts(q, 5, 1.1) ==
          doctest::Approx(120 * std::exp(mu) / std::pow(mu, 5)).epsilon(1e-12));
  }
  CHECK(auto_sampler_kind(1, 1000) == SamplerKind::Naive);
  CHECK(auto_sampler_kind(1, 10000000) == SamplerKind::Skip);
}
