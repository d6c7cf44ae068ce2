#pragma once

namespace qpart {

/// Mixing parameters of the compound Poisson-Gamma law.
struct CompoundPGParams {
  double M;     // Poisson mean
  double invq;  // gamma shape step 1/q
};

/// ln Gamma(a) for a > 0.
double log_gamma(double a);

/// Regularized lower incomplete gamma P(a, x).
double reg_gamma_lower(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
double reg_gamma_upper(double a, double x);

/// Non-regularized upper incomplete gamma Gamma(a, x).
double upper_inc_gamma(double a, double x);

/// Inverse of P(a, .) on [0, 1).
double inv_reg_gamma_lower(double a, double p);

/// Limit shape of scaled Young diagrams, 1 - P(1/q, x).
double limit_shape(int q, double x);

/// CDF of the compound Poisson-Gamma law, including the atom at 0.
double cpg_cdf(const CompoundPGParams& p, double x);

/// Density of the absolutely continuous part of the compound Poisson-Gamma law.
double cpg_pdf(const CompoundPGParams& p, double x);

/// Poisson truncation index used by cpg_cdf / cpg_pdf.
int cpg_truncation(double M);

/// Logistic map 1/(1+exp(-t)) without overflow.
double logistic(double t);

}  // namespace qpart
