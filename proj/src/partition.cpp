#include "qpart/partition.hpp"

#include <limits>

#include "qpart/calibrate.hpp"
#include "qpart/errors.hpp"

namespace qpart {

bool is_qth_power(std::uint64_t x, int q) {
  if (x == 0) return false;
  const std::uint64_t j = qth_root_floor(double(x), q);
  for (std::uint64_t c = (j > 1 ? j - 1 : 1); c <= j + 1; ++c) {
    try {
      if (ipow(c, q) == x) return true;
    } catch (const ResourceError&) {
      return false;
    }
  }
  return false;
}

Partition Partition::from_parts(std::vector<std::uint64_t> parts, int q) {
  Partition p;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0 && !(parts[i] < parts[i - 1])) throw DomainError("parts must be strictly decreasing");
    if (!is_qth_power(parts[i], q)) throw DomainError("part is not a q-th power");
    if (p.N > std::numeric_limits<std::uint64_t>::max() - parts[i])
      throw ResourceError("partition weight overflows 64 bits");
    p.N += parts[i];
  }
  p.M = parts.size();
  p.parts = std::move(parts);
  return p;
}

std::optional<std::uint64_t> Partition::lmin() const {
  if (parts.empty()) return std::nullopt;
  return parts.back();
}

std::string join_parts(const Partition& p) {
  std::string s;
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(p.parts[i]);
  }
  return s;
}

}  // namespace qpart
