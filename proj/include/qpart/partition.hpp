#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpart {

/// Strict partition into distinct q-th powers, parts in decreasing order.
struct Partition {
  std::vector<std::uint64_t> parts;
  std::uint64_t N = 0;
  std::uint64_t M = 0;

  /// Validates strict decrease and the q-th power property, then caches N and M.
  static Partition from_parts(std::vector<std::uint64_t> parts, int q);

  bool empty() const { return parts.empty(); }
  std::uint64_t lmax() const { return parts.empty() ? 0 : parts.front(); }
  std::optional<std::uint64_t> lmin() const;

  bool operator==(const Partition&) const = default;
};

bool is_qth_power(std::uint64_t x, int q);

/// Parts joined by ';' in decreasing order.
std::string join_parts(const Partition& p);

}  // namespace qpart
