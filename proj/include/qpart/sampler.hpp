#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qpart/calibrate.hpp"
#include "qpart/partition.hpp"
#include "qpart/rng.hpp"

namespace qpart {

enum class Verdict { Sampled, Void };

struct SampleRecord {
  std::optional<Partition> partition;
  std::uint64_t attempts_internal = 0;
  std::uint64_t attempts_external = 0;
  Verdict verdict = Verdict::Void;
};

/// Bernoulli parameter z1^l z2 / (1 + z1^l z2) of part l.
double part_probability(const ModelParams& params, double ell);

/// Free sampler: one uniform per candidate j^q <= L, scanned downward.
Partition free_sample(const ModelParams& params, std::uint64_t L, RngStream& rng);
Partition free_sample(const ModelParams& params, std::uint64_t L, RngHandle h);

/// Product of (1 - p_l) over q-th powers l with ell_from < l <= L.
double tail_rejection_probability(const ModelParams& params, std::uint64_t ell_from,
                                  std::uint64_t L);

/// Same law as free_sample, jumping between included parts by inverting the
/// cumulative hazard with one exponential variate per part.
class SkipSampler {
 public:
  SkipSampler(const ModelParams& params, std::uint64_t L);
  Partition sample(RngStream& rng) const;
  std::uint64_t candidates() const { return J_; }

 private:
  int q_;
  std::uint64_t J_;
  std::vector<double> tail_;  // tail_[j] = sum_{i >= j} -log(1 - p_i), tail_[J+1] = 0
};

/// Precomputed tables for the optimized internal loop of the rejection sampler.
class RejectionKernel {
 public:
  RejectionKernel(const ModelParams& params, std::uint64_t L, int m_target,
                  std::uint64_t weight_cap);

  /// Early-terminating scan with the aggregated acceptance draw; empty on reject.
  std::optional<Partition> attempt_fast(RngStream& rng) const;
  /// Full scan of every candidate; empty unless exactly m_target parts were drawn.
  std::optional<Partition> attempt_naive(RngStream& rng) const;

  std::uint64_t candidates() const { return J_; }

 private:
  Partition make(std::vector<std::uint64_t>&& parts, std::uint64_t W) const;

  int q_;
  int m_;
  std::uint64_t cap_;
  std::uint64_t J_;
  std::vector<double> p_;        // p_[j], j = 1..J
  std::vector<double> logsurv_;  // logsurv_[j] = sum_{i <= j} log(1 - p_i)
  std::vector<std::uint64_t> minw_;  // minw_[r] = sum_{i <= r} i^q
};

/// free_sample_fast contract: parts law of free_sample conditioned on M = m_target, N <= weight_cap.
std::optional<Partition> free_sample_fast(const ModelParams& params, std::uint64_t L, int m_target,
                                          std::uint64_t weight_cap, RngStream& rng);

struct RejectOptions {
  bool fast = true;
};

/// Rejection sampler for T1 / T3: at most task.t_star external attempts.
SampleRecord reject_sample(const RejectionTask& task, const ModelParams& params, RngStream& rng,
                           RejectOptions opt = {});

/// Crude parameters with <N> = n, <M> = m (no small-kappa check), then reject_sample.
SampleRecord reject_sample_crude(int q, const RejectionTask& task, RngStream& rng,
                                 RejectOptions opt = {});

struct RangeFind {
  std::uint64_t k;
  SampleRecord record;
};

/// T2: one exact run per weight k in [n, theta n] with Bonferroni thresholds.
std::vector<RangeFind> reject_sample_range(int q, const RejectionTask& task, RngStream& rng,
                                           RejectOptions opt = {});

enum class SamplerKind { Naive, Skip };

/// Partitions first .. first+count-1, partition i drawn from stream (seed, i).
std::vector<Partition> sample_range(const ModelParams& params, std::uint64_t L, std::uint64_t first,
                                    std::uint64_t count, std::uint64_t master_seed,
                                    unsigned threads = 1, SamplerKind kind = SamplerKind::Naive);

std::vector<Partition> sample_batch(const ModelParams& params, std::uint64_t L, std::uint64_t count,
                                    std::uint64_t master_seed, unsigned threads = 1,
                                    SamplerKind kind = SamplerKind::Naive);

/// Skip for large candidate sets, naive otherwise.
SamplerKind auto_sampler_kind(int q, std::uint64_t L);

/// Expected internal attempts m! e^mu / mu^m with mu = m P(1/q, theta m / q).
double expected_internal_attempts(int q, int m, double theta = 1.0);

}  // namespace qpart
