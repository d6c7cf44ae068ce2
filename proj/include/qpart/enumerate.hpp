#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qpart/calibrate.hpp"
#include "qpart/partition.hpp"

namespace qpart {

/// Counts F_{n,m} of strict q-th power partitions for n <= max_n.
struct EnumTable {
  int q = 1;
  std::uint64_t max_n = 0;
  std::map<std::pair<std::uint64_t, int>, std::uint64_t> entries;

  std::uint64_t at(std::uint64_t n, int m) const;
};

std::uint64_t count_partitions(int q, std::uint64_t n, int m);
std::vector<Partition> list_partitions(int q, std::uint64_t n, int m);

/// Number of j_1 > ... > j_m >= 1 with sum j_i^q <= x.
std::uint64_t cumulative_count(int q, int m, double x);
double asymptotic_cumulative(int q, int m, double x);

/// ln of prod_{l <= L} (1 + z1^l z2).
double log_partial_generating_function(const ModelParams& params, std::uint64_t L);
double partial_generating_function(const ModelParams& params, std::uint64_t L);

double boltzmann_joint_pmf(const ModelParams& params, std::uint64_t n, int m, std::uint64_t L);

/// Largest part over all members of the space; EmptySpaceError if there are none.
std::uint64_t sharp_majorant(int q, std::uint64_t n, int m);

/// All nonzero F_{n,m} with n <= max_n, by a knapsack recursion over parts.
EnumTable enum_table(int q, std::uint64_t max_n, int max_m);

/// CSV with header n,m,count, rows sorted by (n, m).
std::string enum_table_csv(const EnumTable& t);

}  // namespace qpart
