#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpart/calibrate.hpp"
#include "qpart/partition.hpp"

namespace qpart {

enum class Outcome { Pass, Fail, Warning, NotApplicable };
std::string to_string(Outcome o);

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t n = 0;
  Outcome verdict = Outcome::Fail;
  std::string reference;
  std::string note;

  bool failed() const { return verdict == Outcome::Fail; }
};

struct StandardizedPair {
  double n_star = 0.0;
  double m_star = 0.0;
};

/// Y(x): number of parts >= x.
std::uint64_t young_boundary_eval(const Partition& p, double x);

/// Y(A x) / <M> with A = q<N>/<M>.
std::vector<double> scaled_young(const Partition& p, int q, double N_target, double M_target,
                                 const std::vector<double>& grid);

/// Exact sup over x >= 0 of |scaled Young boundary - limit shape|.
double sup_distance(const Partition& p, int q, double N_target, double M_target);
std::vector<double> limit_shape_sup_distance(const std::vector<Partition>& samples, int q,
                                             double N_target, double M_target);

TestResult fluctuation_variance_check(const std::vector<Partition>& samples, int q, double N_target,
                                      double M_target, double x);
/// KS of the standardized scaled boundary at x against the standard normal.
TestResult fluctuation_normality(const std::vector<Partition>& samples, int q, double N_target,
                                 double M_target, double x, double alpha = 0.01);

/// Poisson mean of the length under parts <= theta <N> with fixed <M>.
double truncated_length_mean(int q, double M_target, double theta);

TestResult test_length_poisson(const std::vector<Partition>& samples, double M_target,
                               std::optional<double> mu_override = std::nullopt,
                               double alpha = 0.01);

TestResult test_weight_conditional_gamma(const std::vector<Partition>& samples, int m, int q,
                                         double N_target, double M_target, double alpha = 0.01);

/// Atom at zero, KS of the nonzero part against the compound Poisson-Gamma law, mean identity.
std::vector<TestResult> test_weight_marginal(const std::vector<Partition>& samples, int q,
                                             double M_target, double N_target,
                                             double alpha = 0.01);

/// Local minimum of the compound Poisson-Gamma density on (0, 1].
double cpg_density_minimizer(int q, double M_target);

/// Empirical mass of scaled weights <= x0 against x0 g(x0) + e^{-<M>}.
TestResult test_small_weight_excess(const std::vector<Partition>& samples, int q, double N_target,
                                    double M_target);

StandardizedPair standardize(const Partition& p, int q, double N_target, double M_target);

/// Marginal normality, correlation, ellipse coverage.
std::vector<TestResult> test_joint_normal(const std::vector<Partition>& samples, int q,
                                          double N_target, double M_target, double alpha = 0.01);

std::vector<TestResult> test_extremes(const std::vector<Partition>& samples, int q,
                                      double N_target, double M_target, Regime regime,
                                      double alpha = 0.01);

TestResult test_uniformity(const std::vector<Partition>& task_samples, int q, std::uint64_t n,
                           int m, double alpha = 0.01);

struct MomentReport {
  MomentSummary empirical;
  MomentSummary exact;
  std::vector<TestResult> tests;
};

/// Sample moments against the exact series (binding, 4 standard errors) and the asymptotic forms.
MomentReport empirical_moment_report(const std::vector<Partition>& samples,
                                     const ModelParams& params,
                                     std::optional<std::uint64_t> L = std::nullopt);

/// Cutoff used for experiments: the largest part escapes it with probability below 1e-9.
std::uint64_t sampling_cutoff(int q, double N_target, double M_target);

struct SuiteConfig {
  std::string suite;
  int q = 1;
  double N_target = 0.0;
  double M_target = 0.0;
  std::uint64_t n = 0;
  int m = 0;
  std::uint64_t count = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Method method = Method::NewtonExact;
  double alpha = 0.01;
  double delta = 0.1;
};

/// Runs a named suite with Bonferroni-corrected significance.
std::vector<TestResult> run_suite(const SuiteConfig& cfg);

std::string report_json(const std::vector<TestResult>& results);

}  // namespace qpart
