#include "qpart/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "qpart/errors.hpp"
#include "qpart/special.hpp"

namespace qpart {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kSkipThreshold = 20000;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kMax - b ? kMax : a + b; }

std::uint64_t sat_pow(std::uint64_t j, int q) {
  try {
    return ipow(j, q);
  } catch (const ResourceError&) {
    return kMax;
  }
}

std::vector<double> probability_table(const ModelParams& params, std::uint64_t J) {
  std::vector<double> p(J + 1, 0.0);
  for (std::uint64_t j = 1; j <= J; ++j) p[j] = part_probability(params, std::pow(double(j), params.q));
  return p;
}

Partition naive_scan(const std::vector<double>& p, int q, RngStream& rng) {
  Partition out;
  const std::uint64_t J = p.size() - 1;
  for (std::uint64_t j = J; j >= 1; --j) {
    if (rng.uniform() < p[j]) {
      const std::uint64_t l = ipow(j, q);
      out.parts.push_back(l);
      out.N += l;
    }
  }
  out.M = out.parts.size();
  return out;
}

}  // namespace

double part_probability(const ModelParams& params, double ell) {
  if (params.z2 == 0.0) return 0.0;
  return logistic(std::log(params.z2) - params.gamma * ell);
}

Partition free_sample(const ModelParams& params, std::uint64_t L, RngStream& rng) {
  const std::uint64_t J = qth_root_floor(double(L), params.q);
  return naive_scan(probability_table(params, J), params.q, rng);
}

Partition free_sample(const ModelParams& params, std::uint64_t L, RngHandle h) {
  RngStream rng(h);
  return free_sample(params, L, rng);
}

double tail_rejection_probability(const ModelParams& params, std::uint64_t ell_from,
                                  std::uint64_t L) {
  if (ell_from > L) throw DomainError("tail range is reversed");
  const std::uint64_t j0 = qth_root_floor(double(ell_from), params.q);
  const std::uint64_t j1 = qth_root_floor(double(L), params.q);
  double s = 0.0;
  for (std::uint64_t j = j0 + 1; j <= j1; ++j)
    s += std::log1p(-part_probability(params, std::pow(double(j), params.q)));
  return std::exp(s);
}

SkipSampler::SkipSampler(const ModelParams& params, std::uint64_t L)
    : q_(params.q), J_(qth_root_floor(double(L), params.q)), tail_(J_ + 2, 0.0) {
  for (std::uint64_t j = J_; j >= 1; --j) {
    const double p = part_probability(params, std::pow(double(j), q_));
    tail_[j] = tail_[j + 1] - std::log1p(-p);
  }
}

Partition SkipSampler::sample(RngStream& rng) const {
  Partition out;
  std::uint64_t k = J_ + 1;
  while (k > 1) {
    const double target = tail_[k] + rng.exponential();
    if (tail_[1] < target) break;
    // largest j in [1, k-1] with tail_[j] >= target
    std::uint64_t lo = 1, hi = k - 1;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (tail_[mid] >= target) lo = mid;
      else hi = mid - 1;
    }
    const std::uint64_t l = ipow(lo, q_);
    out.parts.push_back(l);
    out.N += l;
    k = lo;
  }
  out.M = out.parts.size();
  return out;
}

RejectionKernel::RejectionKernel(const ModelParams& params, std::uint64_t L, int m_target,
                                 std::uint64_t weight_cap)
    : q_(params.q),
      m_(m_target),
      cap_(weight_cap),
      J_(qth_root_floor(double(L), params.q)),
      p_(probability_table(params, J_)),
      logsurv_(J_ + 1, 0.0),
      minw_(std::size_t(std::max(m_target, 0)) + 1, 0) {
  if (m_target < 1) throw DomainError("target length must be positive");
  for (std::uint64_t j = 1; j <= J_; ++j) logsurv_[j] = logsurv_[j - 1] + std::log1p(-p_[j]);
  for (int r = 1; r <= m_; ++r) minw_[r] = sat_add(minw_[r - 1], sat_pow(r, q_));
}

Partition RejectionKernel::make(std::vector<std::uint64_t>&& parts, std::uint64_t W) const {
  Partition out;
  out.parts = std::move(parts);
  out.N = W;
  out.M = out.parts.size();
  return out;
}

std::optional<Partition> RejectionKernel::attempt_fast(RngStream& rng) const {
  std::vector<std::uint64_t> parts;
  parts.reserve(m_);
  std::uint64_t W = 0;
  for (std::uint64_t j = J_; j >= 1; --j) {
    const int r = m_ - int(parts.size());
    if (r == 0) {
      if (rng.uniform() < std::exp(logsurv_[j])) return make(std::move(parts), W);
      return std::nullopt;
    }
    if (std::uint64_t(r) > j) return std::nullopt;
    if (sat_add(W, minw_[r]) > cap_) return std::nullopt;
    if (rng.uniform() < p_[j]) {
      const std::uint64_t l = ipow(j, q_);
      W += l;
      if (sat_add(W, minw_[r - 1]) > cap_) return std::nullopt;
      parts.push_back(l);
    }
  }
  if (int(parts.size()) == m_) return make(std::move(parts), W);
  return std::nullopt;
}

std::optional<Partition> RejectionKernel::attempt_naive(RngStream& rng) const {
  Partition p = naive_scan(p_, q_, rng);
  if (p.M != std::uint64_t(m_)) return std::nullopt;
  return p;
}

std::optional<Partition> free_sample_fast(const ModelParams& params, std::uint64_t L, int m_target,
                                          std::uint64_t weight_cap, RngStream& rng) {
  return RejectionKernel(params, L, m_target, weight_cap).attempt_fast(rng);
}

SampleRecord reject_sample(const RejectionTask& task, const ModelParams& params, RngStream& rng,
                           RejectOptions opt) {
  if (task.kind == TaskKind::T2_MultiExact)
    throw DomainError("multiple exact task runs through reject_sample_range");
  if (task.n < 1 || task.m < 1) throw DomainError("rejection task needs n, m >= 1");
  if (!(task.theta >= 1.0)) throw DomainError("theta must be at least 1");
  if (task.kind == TaskKind::T1_Exact && task.theta != 1.0)
    throw DomainError("exact task requires theta = 1");
  if (task.t_star < 1) throw DomainError("censoring limit must be at least 1");

  SampleRecord rec;
  const std::uint64_t L = static_cast<std::uint64_t>(std::floor(task.theta * double(task.n)));
  const std::uint64_t J = qth_root_floor(double(L), params.q);
  std::uint64_t minimal = 0;
  for (int r = 1; r <= task.m; ++r) minimal = sat_add(minimal, sat_pow(r, params.q));
  if (J < std::uint64_t(task.m) || minimal > L) return rec;

  const RejectionKernel kernel(params, L, task.m, opt.fast ? L : kMax);
  while (rec.attempts_external < task.t_star) {
    std::optional<Partition> lam;
    do {
      ++rec.attempts_internal;
      lam = opt.fast ? kernel.attempt_fast(rng) : kernel.attempt_naive(rng);
    } while (!lam);
    ++rec.attempts_external;
    if (lam->N >= task.n && lam->N <= L) {
      rec.partition = std::move(lam);
      rec.verdict = Verdict::Sampled;
      return rec;
    }
  }
  return rec;
}

SampleRecord reject_sample_crude(int q, const RejectionTask& task, RngStream& rng,
                                 RejectOptions opt) {
  return reject_sample(task, crude_params(q, double(task.n), double(task.m)), rng, opt);
}

std::vector<RangeFind> reject_sample_range(int q, const RejectionTask& task, RngStream& rng,
                                           RejectOptions opt) {
  if (!(task.theta > 1.0)) throw DomainError("multiple exact task needs theta > 1");
  const std::uint64_t top = static_cast<std::uint64_t>(std::floor(task.theta * double(task.n)));
  std::vector<RangeFind> out;
  for (std::uint64_t k = task.n; k <= top; ++k) {
    RejectionTask sub = task;
    sub.kind = TaskKind::T1_Exact;
    sub.n = k;
    sub.theta = 1.0;
    const double tk = std::ceil(
        censoring_limit_t2_value(q, task.n, k, task.m, task.theta, task.delta, task.corrected));
    sub.t_star = tk >= 1.8e19 ? kMax : std::max<std::uint64_t>(1, std::uint64_t(tk));
    out.push_back({k, reject_sample(sub, crude_params(q, double(k), double(task.m)), rng, opt)});
  }
  return out;
}

SamplerKind auto_sampler_kind(int q, std::uint64_t L) {
  return qth_root_floor(double(L), q) > kSkipThreshold ? SamplerKind::Skip : SamplerKind::Naive;
}

std::vector<Partition> sample_range(const ModelParams& params, std::uint64_t L, std::uint64_t first,
                                    std::uint64_t count, std::uint64_t master_seed,
                                    unsigned threads, SamplerKind kind) {
  std::vector<Partition> out(count);
  if (count == 0) return out;

  std::vector<double> p;
  std::optional<SkipSampler> skip;
  if (kind == SamplerKind::Skip) skip.emplace(params, L);
  else p = probability_table(params, qth_root_floor(double(L), params.q));

  constexpr std::uint64_t kChunk = 256;
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::uint64_t start = next.fetch_add(kChunk);
      if (start >= count) return;
      const std::uint64_t stop = std::min(count, start + kChunk);
      for (std::uint64_t i = start; i < stop; ++i) {
        RngStream rng(master_seed, first + i);
        out[i] = skip ? skip->sample(rng) : naive_scan(p, params.q, rng);
      }
    }
  };

  const unsigned n = std::max(1u, threads);
  if (n == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return out;
}

std::vector<Partition> sample_batch(const ModelParams& params, std::uint64_t L, std::uint64_t count,
                                    std::uint64_t master_seed, unsigned threads, SamplerKind kind) {
  return sample_range(params, L, 0, count, master_seed, threads, kind);
}

double expected_internal_attempts(int q, int m, double theta) {
  if (q < 1 || m < 1 || !(theta >= 1.0)) throw DomainError("invalid complexity arguments");
  const double mu = m * reg_gamma_lower(1.0 / q, theta * m / q);
  return std::exp(log_gamma(m + 1.0) + mu - m * std::log(mu));
}

}  // namespace qpart
