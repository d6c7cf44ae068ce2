#include "qpart/enumerate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qpart/errors.hpp"
#include "qpart/special.hpp"

namespace qpart {

namespace {

constexpr int kMaxM = 64;
constexpr std::uint64_t kListLimit = 1000000;

void check_bounds(int q, std::uint64_t n, int m) {
  if (q < 1) throw DomainError("q must be a positive integer");
  if (m < 0) throw DomainError("m must be nonnegative");
  if (double(n) > 1e7 / q || m > kMaxM) throw ResourceError("enumeration beyond desk-scale bounds");
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceError("partition count overflows 64 bits");
  return r;
}

// Descending DFS over part indices with minimal/maximal tail pruning.
class Dfs {
 public:
  Dfs(int q, std::uint64_t top) : q_(q), pw_(top + 1, 0), pre_(top + 1, 0) {
    for (std::uint64_t j = 1; j <= top; ++j) {
      pw_[j] = ipow(j, q);
      pre_[j] = pre_[j - 1] + pw_[j];
    }
  }

  std::uint64_t count(std::uint64_t rem, int r, std::uint64_t maxj) const {
    if (r == 0) return rem == 0 ? 1 : 0;
    if (std::uint64_t(r) > maxj) return 0;
    if (rem < pre_[r]) return 0;
    if (pre_[maxj] - pre_[maxj - r] < rem) return 0;
    if (r == 1) {
      const std::uint64_t j = qth_root_floor(double(rem), q_);
      return (j >= 1 && j <= maxj && pw_[j] == rem) ? 1 : 0;
    }
    std::uint64_t total = 0;
    const std::uint64_t hi = std::min(maxj, qth_root_floor(double(rem - pre_[r - 1]), q_));
    for (std::uint64_t j = hi; j >= std::uint64_t(r); --j) {
      if (pre_[j] - pre_[j - r] < rem) break;
      total = checked_add(total, count(rem - pw_[j], r - 1, j - 1));
    }
    return total;
  }

  void list(std::uint64_t rem, int r, std::uint64_t maxj, std::vector<std::uint64_t>& cur,
            std::vector<Partition>& out) const {
    if (r == 0) {
      if (rem == 0) {
        if (out.size() >= kListLimit) throw ResourceError("listing bound exceeded");
        Partition p;
        p.parts = cur;
        for (auto v : cur) p.N += v;
        p.M = cur.size();
        out.push_back(std::move(p));
      }
      return;
    }
    if (std::uint64_t(r) > maxj || rem < pre_[r] || pre_[maxj] - pre_[maxj - r] < rem) return;
    const std::uint64_t hi = std::min(maxj, qth_root_floor(double(rem - pre_[r - 1]), q_));
    for (std::uint64_t j = hi; j >= std::uint64_t(r); --j) {
      if (pre_[j] - pre_[j - r] < rem) break;
      cur.push_back(pw_[j]);
      list(rem - pw_[j], r - 1, j - 1, cur, out);
      cur.pop_back();
    }
  }

  std::uint64_t pw(std::uint64_t j) const { return pw_[j]; }

 private:
  int q_;
  std::vector<std::uint64_t> pw_;
  std::vector<std::uint64_t> pre_;
};

std::uint64_t restricted_count(int q, std::uint64_t n, int m, std::uint64_t maxj) {
  if (m == 0) return n == 0 ? 1 : 0;
  const std::uint64_t top = std::min(maxj, qth_root_floor(double(n), q));
  if (top == 0) return 0;
  return Dfs(q, top).count(n, m, top);
}

// Tuples j_1 > ... > j_r >= 1 with j_i <= maxj and sum j_i^q <= x; last level in closed form.
std::uint64_t nested(int q, int r, std::uint64_t maxj, double x) {
  if (r == 0) return 1;
  if (maxj < std::uint64_t(r) || x < 1.0) return 0;
  if (r == 1) return std::min(maxj, qth_root_floor(x, q));
  std::uint64_t total = 0;
  const std::uint64_t hi = std::min(maxj, qth_root_floor(x, q));
  for (std::uint64_t j = hi; j >= std::uint64_t(r); --j) {
    total = checked_add(total, nested(q, r - 1, j - 1, x - double(ipow(j, q))));
  }
  return total;
}

}  // namespace

std::uint64_t EnumTable::at(std::uint64_t n, int m) const {
  if (n > max_n) throw ResourceError("EnumTable queried beyond max_n");
  const auto it = entries.find({n, m});
  return it == entries.end() ? 0 : it->second;
}

std::uint64_t count_partitions(int q, std::uint64_t n, int m) {
  check_bounds(q, n, m);
  return restricted_count(q, n, m, std::numeric_limits<std::uint64_t>::max());
}

std::vector<Partition> list_partitions(int q, std::uint64_t n, int m) {
  check_bounds(q, n, m);
  std::vector<Partition> out;
  if (m == 0) {
    if (n == 0) out.emplace_back();
    return out;
  }
  const std::uint64_t top = qth_root_floor(double(n), q);
  if (top == 0) return out;
  std::vector<std::uint64_t> cur;
  Dfs(q, top).list(n, m, top, cur, out);
  return out;
}

std::uint64_t cumulative_count(int q, int m, double x) {
  check_bounds(q, x > 0 ? std::uint64_t(x) : 0, m);
  if (m == 0) return 1;
  return nested(q, m, std::numeric_limits<std::uint64_t>::max(), x);
}

double asymptotic_cumulative(int q, int m, double x) {
  if (q < 1 || m < 1) throw DomainError("asymptotic_cumulative needs q, m >= 1");
  if (!(x > 0.0)) throw DomainError("asymptotic_cumulative needs x > 0");
  const double lg = std::log(double(q)) + m * log_gamma(1.0 + 1.0 / q) + (double(m) / q) * std::log(x) -
                    log_gamma(m + 1.0) - std::log(double(m)) - log_gamma(double(m) / q);
  return std::exp(lg);
}

double log_partial_generating_function(const ModelParams& params, std::uint64_t L) {
  if (L < 1) throw DomainError("partial generating function needs L >= 1");
  if (params.z2 == 0.0) return 0.0;
  const double lnz2 = std::log(params.z2);
  const std::uint64_t J = qth_root_floor(double(L), params.q);
  double acc = 0.0;
  for (std::uint64_t j = 1; j <= J; ++j) {
    const double l = std::pow(double(j), params.q);
    const double t = lnz2 - params.gamma * l;
    acc += std::log1p(std::exp(t));
    const double r = std::exp(-params.gamma * (std::pow(double(j + 1), params.q) - l));
    if (r < 1.0 && std::exp(t) * r / (1.0 - r) <= 1e-17 * acc) break;
  }
  return acc;
}

double partial_generating_function(const ModelParams& params, std::uint64_t L) {
  return std::exp(log_partial_generating_function(params, L));
}

double boltzmann_joint_pmf(const ModelParams& params, std::uint64_t n, int m, std::uint64_t L) {
  check_bounds(params.q, n, m);
  const std::uint64_t c = restricted_count(params.q, n, m, qth_root_floor(double(L), params.q));
  if (c == 0) return 0.0;
  const double lw = std::log(double(c)) - params.gamma * double(n) + m * std::log(params.z2) -
                    log_partial_generating_function(params, L);
  return std::exp(lw);
}

std::uint64_t sharp_majorant(int q, std::uint64_t n, int m) {
  check_bounds(q, n, m);
  if (m < 1) throw DomainError("sharp_majorant needs m >= 1");
  const std::uint64_t top = qth_root_floor(double(n), q);
  if (top > 0) {
    const Dfs dfs(q, top);
    for (std::uint64_t j = top; j >= std::uint64_t(m); --j) {
      if (dfs.count(n - dfs.pw(j), m - 1, j - 1) > 0) return dfs.pw(j);
    }
  }
  throw EmptySpaceError("partition space is empty");
}

EnumTable enum_table(int q, std::uint64_t max_n, int max_m) {
  check_bounds(q, max_n, max_m);
  const std::size_t W = max_n + 1;
  const std::size_t K = std::size_t(max_m) + 1;
  std::vector<std::uint64_t> F(W * K, 0);
  F[0] = 1;
  for (std::uint64_t j = 1;; ++j) {
    const std::uint64_t l = ipow(j, q);
    if (l > max_n) break;
    for (std::uint64_t n = max_n; n >= l; --n) {
      for (int m = max_m; m >= 1; --m) {
        const std::uint64_t add = F[(n - l) * K + (m - 1)];
        if (add) F[n * K + m] = checked_add(F[n * K + m], add);
      }
    }
  }
  EnumTable t;
  t.q = q;
  t.max_n = max_n;
  for (std::uint64_t n = 0; n <= max_n; ++n)
    for (int m = 0; m <= max_m; ++m)
      if (F[n * K + m]) t.entries[{n, m}] = F[n * K + m];
  return t;
}

std::string enum_table_csv(const EnumTable& t) {
  std::ostringstream os;
  os << "n,m,count\n";
  for (const auto& [key, c] : t.entries) os << key.first << ',' << key.second << ',' << c << '\n';
  return os.str();
}

}  // namespace qpart
