#include "qpart/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpart/errors.hpp"
#include "qpart/special.hpp"

namespace qpart::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_critical(double alpha, std::uint64_t n) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0) throw DomainError("ks_critical needs 0 < alpha < 1, n > 0");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(double(n));
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  return d;
}

double ks_statistic_lattice(std::vector<std::int64_t> ks,
                            const std::function<double(std::int64_t)>& cdf) {
  if (ks.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(ks.begin(), ks.end());
  const double n = double(ks.size());
  double d = 0.0;
  double below = 0.0;
  std::size_t i = 0;
  while (i < ks.size()) {
    const std::int64_t v = ks[i];
    std::size_t j = i;
    while (j < ks.size() && ks[j] == v) ++j;
    const double at = double(j) / n;
    d = std::max({d, std::abs(at - cdf(v)), std::abs(below - cdf(v - 1))});
    below = at;
    i = j;
  }
  return d;
}

double chi2_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return reg_gamma_upper(dof / 2.0, x / 2.0);
}

double chi2_quantile(double p, double dof) { return 2.0 * inv_reg_gamma_lower(dof / 2.0, p); }

ChiSquare chi_square(const std::vector<std::uint64_t>& observed, std::vector<double> probs,
                     double alpha, double min_expected) {
  if (observed.size() != probs.size() || observed.empty())
    throw DomainError("chi_square needs matching nonempty cells");
  double total = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    total += double(observed[i]);
    mass += probs[i];
  }
  if (mass < 1.0) probs.back() += 1.0 - mass;

  std::vector<double> obs, exp;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += double(observed[i]);
    e += probs[i] * total;
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (obs.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }

  ChiSquare r;
  r.dof = int(obs.size()) - 1;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] > 0.0) r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    else if (obs[i] > 0.0) r.statistic = std::numeric_limits<double>::infinity();
  }
  if (r.dof < 1) {
    r.critical = std::numeric_limits<double>::infinity();
    r.p_value = 1.0;
    return r;
  }
  r.critical = chi2_quantile(1.0 - alpha, r.dof);
  r.p_value = std::isinf(r.statistic) ? 0.0 : chi2_sf(r.statistic, r.dof);
  return r;
}

double mean(const std::vector<double>& x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) throw DomainError("variance needs two observations");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size() - 1);
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("correlation needs paired samples");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace qpart::stats
