#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qpart {

enum class Method { Crude, BiasCorrected, NewtonExact };
enum class Regime { FixedM, GrowingM };
enum class TaskKind { T1_Exact, T2_MultiExact, T3_Approximate };

std::string to_string(Method m);
std::string to_string(Regime r);

/// Boltzmann parameters z1 = exp(-gamma), z2 together with the hyper-parameters they target.
struct ModelParams {
  int q = 1;
  double N_target = 0.0;
  double M_target = 0.0;
  double gamma = 0.0;
  double z2 = 0.0;
  double kappa = 0.0;
  Method method = Method::Crude;

  double z1() const;
  double gamma0() const;  // <M>/(q<N>)
};

struct MomentSummary {
  double EN = 0.0;
  double EM = 0.0;
  double VarN = 0.0;
  double VarM = 0.0;
  double CovNM = 0.0;
  std::optional<std::uint64_t> truncation_L;
};

struct CutoffPolicy {
  double delta = 0.1;
  std::uint64_t L = 0;
  std::optional<std::uint64_t> L0;
  Regime regime = Regime::FixedM;
};

struct RejectionTask {
  TaskKind kind = TaskKind::T1_Exact;
  std::uint64_t n = 0;
  int m = 0;
  double theta = 1.0;
  double delta = 0.1;
  std::uint64_t t_star = 1;
  bool corrected = false;
};

/// Crude leading-order formulas without the small-kappa check.
ModelParams crude_params(int q, double N_target, double M_target);

ModelParams calibrate_crude(int q, double N_target, double M_target);
ModelParams calibrate_corrected(int q, double N_target, double M_target);
ModelParams calibrate_exact(int q, double N_target, double M_target, double tol = 1e-10);
ModelParams calibrate(int q, double N_target, double M_target, Method method);

/// Bias-corrected hyper-parameters (N~, M~) fed to the crude formulas.
struct CorrectedTargets {
  double N;
  double M;
};
CorrectedTargets corrected_targets(int q, double N_target, double M_target);

/// Series moments of (N, M), optionally restricted to parts <= L.
MomentSummary exact_moments(const ModelParams& params,
                            std::optional<std::uint64_t> L = std::nullopt);

/// Real-valued threshold before rounding to a q-th power.
double upper_cutoff_value(int q, double N_target, double M_target, double delta, Regime regime);
double lower_cutoff_value(int q, double N_target, double M_target, double delta, Regime regime);

std::uint64_t upper_cutoff(int q, double N_target, double M_target, double delta, Regime regime);
std::uint64_t lower_cutoff(int q, double N_target, double M_target, double delta, Regime regime);

/// Both cutoffs; L0 is left empty when the lower threshold is infeasible or zero.
CutoffPolicy cutoff_policy(int q, double N_target, double M_target, double delta, Regime regime);

double censoring_constant_c1(int m, int q);
double censoring_constant_c3(int m, int q, double theta);

/// Censoring limit before rounding up.
double censoring_limit_value(TaskKind kind, int q, std::uint64_t n, int m, double theta,
                             double delta, bool corrected);
/// Per-weight limit t*_k of the multiple exact task, k in [n, theta n].
double censoring_limit_t2_value(int q, std::uint64_t n, std::uint64_t k, int m, double theta,
                                double delta, bool corrected);

std::uint64_t censoring_limit(TaskKind kind, int q, std::uint64_t n, int m, double theta,
                              double delta, bool corrected);

/// Largest j with j^q <= x.
std::uint64_t qth_root_floor(double x, int q);
/// Largest perfect q-th power <= x, or 0.
std::uint64_t floor_to_qth_power(double x, int q);
/// j^q, throwing on 64-bit overflow.
std::uint64_t ipow(std::uint64_t j, int q);

}  // namespace qpart
