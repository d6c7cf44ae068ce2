#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace qpart::stats {

double normal_cdf(double x);

/// Asymptotic Kolmogorov critical value c(alpha) / sqrt(n).
double ks_critical(double alpha, std::uint64_t n);
/// P(sqrt(n) D > lambda) in the Kolmogorov limit.
double kolmogorov_sf(double lambda);

/// sup |F_n - F| for a continuous hypothesized CDF.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

/// sup |F_n - F| when both laws live on the integer lattice; cdf(k) = F at lattice point k.
double ks_statistic_lattice(std::vector<std::int64_t> ks, const std::function<double(std::int64_t)>& cdf);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double critical = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square with adjacent cells pooled until every expected count is >= min_expected.
/// probs need not sum to one; the missing mass is added to the last cell.
ChiSquare chi_square(const std::vector<std::uint64_t>& observed, std::vector<double> probs,
                     double alpha, double min_expected = 5.0);

double chi2_sf(double x, double dof);
double chi2_quantile(double p, double dof);

double mean(const std::vector<double>& x);
/// Unbiased sample variance.
double variance(const std::vector<double>& x);
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qpart::stats
