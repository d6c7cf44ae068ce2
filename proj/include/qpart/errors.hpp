#pragma once

#include <stdexcept>
#include <string>

namespace qpart {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Desk-scale bounds exceeded (enumeration limits, counter overflow).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested partition space has no members.
class EmptySpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested threshold has no solution for the given tolerance.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newton calibration failed; carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gamma, double z2,
                   double resN, double resM)
      : std::runtime_error(what), gamma_(gamma), z2_(z2), resN_(resN), resM_(resM) {}

  double gamma() const { return gamma_; }
  double z2() const { return z2_; }
  double residualN() const { return resN_; }
  double residualM() const { return resM_; }

 private:
  double gamma_, z2_, resN_, resM_;
};

}  // namespace qpart
