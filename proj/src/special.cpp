#include "qpart/special.hpp"

#include <cmath>

#include "qpart/errors.hpp"

namespace qpart {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kStirlingShift = 15.0;

// Tail of the Stirling series for ln Gamma(x), x >= kStirlingShift.
double stirling_tail(double x) {
  static constexpr double c[] = {
      1.0 / 12.0,        -1.0 / 360.0,          1.0 / 1260.0,    -1.0 / 1680.0,
      1.0 / 1188.0,      -691.0 / 360360.0,     1.0 / 156.0,     -3617.0 / 122400.0,
  };
  const double r = 1.0 / x;
  const double r2 = r * r;
  double s = 0.0;
  for (int k = 7; k >= 0; --k) s = s * r2 + c[k];
  return s * r;
}

// ln(x^a e^-x / Gamma(a)), the common prefactor of P and Q.
double log_prefactor(double a, double x) {
  if (a >= kStirlingShift) {
    const double d = (x - a) / a;
    // a*ln(x/a) + a - x = -a*(d - log1p(d))
    const double core = -a * (d - std::log1p(d));
    return core + 0.5 * std::log(a) - kHalfLog2Pi - stirling_tail(a);
  }
  return a * std::log(x) - x - log_gamma(a);
}

double series_lower(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum;
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double cf_upper(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || std::isinf(a)) throw DomainError("incomplete gamma: shape must be positive");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: point must be nonnegative");
}

void check_cpg(const CompoundPGParams& p) {
  if (!(p.M > 0.0) || std::isinf(p.M)) throw DomainError("cpg: mean length must be positive");
  if (!(p.invq > 0.0 && p.invq <= 1.0)) throw DomainError("cpg: 1/q must lie in (0,1]");
}

double log_poisson(double M, int m) {
  return -M + m * std::log(M) - log_gamma(m + 1.0);
}

// Bound on the Poisson tail mass beyond index m, valid for m + 2 > M.
double poisson_tail_bound(double M, int m) {
  const double next = std::exp(log_poisson(M, m + 1));
  return next / (1.0 - M / (m + 2.0));
}

}  // namespace

double log_gamma(double a) {
  if (!(a > 0.0) || std::isinf(a)) throw DomainError("log_gamma: argument must be positive");
  double x = a;
  double prod = 1.0;
  while (x < kStirlingShift) {
    prod *= x;
    x += 1.0;
  }
  const double lg = (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_tail(x);
  return prod == 1.0 ? lg : lg - std::log(prod);
}

double reg_gamma_lower(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double lp = log_prefactor(a, x);
  if (x < a + 1.0) return std::min(1.0, std::exp(lp) * series_lower(a, x));
  return std::max(0.0, 1.0 - std::exp(lp) * cf_upper(a, x));
}

double reg_gamma_upper(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double lp = log_prefactor(a, x);
  if (x < a + 1.0) return std::max(0.0, 1.0 - std::exp(lp) * series_lower(a, x));
  return std::min(1.0, std::exp(lp) * cf_upper(a, x));
}

double upper_inc_gamma(double a, double x) {
  check_args(a, x);
  return std::exp(log_gamma(a)) * reg_gamma_upper(a, x);
}

double inv_reg_gamma_lower(double a, double p) {
  if (!(a > 0.0)) throw DomainError("inv_reg_gamma_lower: shape must be positive");
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("inv_reg_gamma_lower: p must lie in [0,1)");
  if (p == 0.0) return 0.0;

  double lo = 0.0;
  double hi = std::max(1.0, a);
  while (reg_gamma_lower(a, hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 300 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (reg_gamma_lower(a, mid) < p) lo = mid;
    else hi = mid;
  }

  const double lga = log_gamma(a);
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double f = reg_gamma_lower(a, x) - p;
    const double df = std::exp((a - 1.0) * std::log(x) - x - lga);
    if (!(df > 0.0) || !std::isfinite(df)) break;
    double next = x - f / df;
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (f < 0) lo = x;
    else hi = x;
    if (std::abs(next - x) <= 1e-15 * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double limit_shape(int q, double x) {
  if (q < 1) throw DomainError("limit_shape: q must be positive");
  if (!(x >= 0.0)) throw DomainError("limit_shape: x must be nonnegative");
  return reg_gamma_upper(1.0 / q, x);
}

int cpg_truncation(double M) {
  const int cap = static_cast<int>(std::ceil(M + 12.0 * std::sqrt(M) + 30.0));
  for (int m = 1; m < cap; ++m) {
    if (m + 2 > M && poisson_tail_bound(M, m) < 1e-12) return m;
  }
  return cap;
}

double cpg_cdf(const CompoundPGParams& p, double x) {
  check_cpg(p);
  if (!(x >= 0.0)) throw DomainError("cpg_cdf: x must be nonnegative");
  if (std::isinf(x)) return 1.0;
  const int top = cpg_truncation(p.M);
  double g = std::exp(-p.M);
  if (x == 0.0) return g;
  for (int m = 1; m <= top; ++m) {
    g += std::exp(log_poisson(p.M, m)) * reg_gamma_lower(m * p.invq, x);
  }
  return std::min(1.0, g);
}

double cpg_pdf(const CompoundPGParams& p, double x) {
  check_cpg(p);
  if (!(x > 0.0)) throw DomainError("cpg_pdf: x must be positive");
  const int top = cpg_truncation(p.M);
  const double lx = std::log(x);
  double g = 0.0;
  for (int m = 1; m <= top; ++m) {
    const double a = m * p.invq;
    g += std::exp(log_poisson(p.M, m) + (a - 1.0) * lx - x - log_gamma(a));
  }
  return g;
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace qpart
