#include "qpart/calibrate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qpart/errors.hpp"
#include "qpart/numeric.hpp"
#include "qpart/special.hpp"

namespace qpart {

namespace {

constexpr double kSeriesRelTol = 1e-15;

void check_targets(int q, double N, double M) {
  if (q < 1) throw DomainError("q must be a positive integer");
  if (!(N >= 1.0) || std::isinf(N)) throw DomainError("<N> must be at least 1");
  if (!(M > 0.0) || std::isinf(M)) throw DomainError("<M> must be positive");
}

void check_kappa(int q, double N, double M) {
  const double kappa = std::pow(M, q + 1) / N;
  if (!(kappa < 1.0)) throw DomainError("kappa = <M>^(q+1)/<N> must be below 1");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
}

ModelParams crude_from(int q, double N, double M, double Neff, double Meff, Method method) {
  ModelParams p;
  p.q = q;
  p.N_target = N;
  p.M_target = M;
  p.gamma = Meff / (q * Neff);
  p.z2 = Meff * std::pow(p.gamma, 1.0 / q) / std::exp(log_gamma(1.0 + 1.0 / q));
  p.kappa = std::pow(M, q + 1) / N;
  p.method = method;
  return p;
}

struct Residual {
  MomentSummary mom;
  double rN, rM;
  double norm() const { return std::max(std::abs(rN), std::abs(rM)); }
};

Residual residual(int q, double N, double M, double s1, double s2) {
  ModelParams p = crude_params(q, N, M);
  p.gamma = -s1;
  p.z2 = std::exp(s2);
  Residual r;
  r.mom = exact_moments(p);
  r.rN = r.mom.EN / N - 1.0;
  r.rM = r.mom.EM / M - 1.0;
  return r;
}

double log_c1(int m, int q) {
  const double a = 1.0 / q;
  const double inner = a + log_gamma(a) + std::log(reg_gamma_lower(a, double(m) / q)) -
                       (1.0 - a) * std::log(double(q)) - a * std::log(double(m));
  return m * inner - log_gamma(m + 1.0);
}

// Cardinality-informed constant multiplying n * log(...) in the corrected limits.
double log_corrected_constant(int m, int q) {
  if (q == 1) {
    return m + m * std::log1p(-std::exp(-double(m))) + log_gamma(double(m)) - m * std::log(double(m));
  }
  const double h = 0.5 * m;
  return h * std::log(2.0 * std::exp(1.0) / m) + log_gamma(h) +
         m * std::log(reg_gamma_lower(0.5, h));
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Crude: return "crude";
    case Method::BiasCorrected: return "corrected";
    case Method::NewtonExact: return "exact";
  }
  return "unknown";
}

std::string to_string(Regime r) { return r == Regime::FixedM ? "fixed" : "growing"; }

double ModelParams::z1() const { return std::exp(-gamma); }
double ModelParams::gamma0() const { return M_target / (q * N_target); }

ModelParams crude_params(int q, double N, double M) {
  check_targets(q, N, M);
  return crude_from(q, N, M, N, M, Method::Crude);
}

ModelParams calibrate_crude(int q, double N, double M) {
  check_targets(q, N, M);
  check_kappa(q, N, M);
  return crude_from(q, N, M, N, M, Method::Crude);
}

CorrectedTargets corrected_targets(int q, double N, double M) {
  check_targets(q, N, M);
  const double a = 1.0 / q;
  const double g0 = M / (q * N);
  const double denom = std::exp(log_gamma(a));
  const double Nt = N + M * M * std::pow(g0, a - 1.0) / (std::pow(2.0, 1.0 + a) * denom);
  const double Mt = M + q * M * M * std::pow(g0, a) / (std::pow(2.0, a) * denom);
  return {Nt, Mt};
}

ModelParams calibrate_corrected(int q, double N, double M) {
  check_targets(q, N, M);
  check_kappa(q, N, M);
  const CorrectedTargets t = corrected_targets(q, N, M);
  return crude_from(q, N, M, t.N, t.M, Method::BiasCorrected);
}

ModelParams calibrate_exact(int q, double N, double M, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const ModelParams start = calibrate_corrected(q, N, M);

  Eigen::Vector2d s(-start.gamma, std::log(start.z2));
  Residual cur = residual(q, N, M, s[0], s[1]);

  for (int it = 0; it < 50; ++it) {
    if (std::abs(cur.rN) <= tol && std::abs(cur.rM) <= tol) {
      ModelParams p = start;
      p.gamma = -s[0];
      p.z2 = std::exp(s[1]);
      p.method = Method::NewtonExact;
      return p;
    }
    Eigen::Matrix2d J;
    J << cur.mom.VarN, cur.mom.CovNM, cur.mom.CovNM, cur.mom.VarM;
    const Eigen::Vector2d F(cur.mom.EN - N, cur.mom.EM - M);
    const Eigen::Vector2d step = J.ldlt().solve(-F);

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 30; ++h, lambda *= 0.5) {
      const Eigen::Vector2d trial = s + lambda * step;
      if (!(trial[0] < 0.0) || !trial.allFinite()) continue;
      Residual r = residual(q, N, M, trial[0], trial[1]);
      if (r.norm() <= cur.norm()) {
        s = trial;
        cur = r;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw ConvergenceError("Newton calibration did not converge", -s[0], std::exp(s[1]), cur.rN,
                         cur.rM);
}

ModelParams calibrate(int q, double N, double M, Method method) {
  switch (method) {
    case Method::Crude: return calibrate_crude(q, N, M);
    case Method::BiasCorrected: return calibrate_corrected(q, N, M);
    case Method::NewtonExact: return calibrate_exact(q, N, M);
  }
  throw DomainError("unknown calibration method");
}

MomentSummary exact_moments(const ModelParams& params, std::optional<std::uint64_t> L) {
  MomentSummary out;
  out.truncation_L = L;
  if (params.z2 == 0.0) return out;
  if (!(params.z2 > 0.0) || !(params.gamma > 0.0)) throw DomainError("invalid Boltzmann parameters");

  const int q = params.q;
  const double g = params.gamma;
  const double lnz2 = std::log(params.z2);
  NeumaierSum en, em, vn, vm, cv;

  for (std::uint64_t j = 1;; ++j) {
    const double l = std::pow(double(j), q);
    if (L && l > double(*L)) break;
    const double t = lnz2 - g * l;
    const double p = logistic(t);
    const double pq = p * logistic(-t);
    en.add(l * p);
    em.add(p);
    vm.add(pq);
    cv.add(l * pq);
    vn.add(l * l * pq);

    // Geometric tail certificate on the majorant l^k z1^l z2, k = 0, 1, 2.
    const double lnext = std::pow(double(j + 1), q);
    const double r0 = std::exp(-g * (lnext - l));
    const double grow = lnext / l;
    const double r[3] = {r0, r0 * grow, r0 * grow * grow};
    const double acc[3] = {vm.value(), cv.value(), vn.value()};
    const double u = std::exp(t);
    bool done = true;
    double uk = u;
    for (int k = 0; k < 3; ++k) {
      if (!(r[k] < 1.0) || uk * r[k] / (1.0 - r[k]) > kSeriesRelTol * acc[k]) {
        done = false;
        break;
      }
      uk *= l;
    }
    if (done) break;
  }
  out.EN = en.value();
  out.EM = em.value();
  out.VarN = vn.value();
  out.VarM = vm.value();
  out.CovNM = cv.value();
  return out;
}

std::uint64_t ipow(std::uint64_t j, int q) {
  std::uint64_t r = 1;
  for (int i = 0; i < q; ++i) {
    if (j != 0 && r > std::numeric_limits<std::uint64_t>::max() / j)
      throw ResourceError("q-th power overflows 64 bits");
    r *= j;
  }
  return r;
}

std::uint64_t qth_root_floor(double x, int q) {
  if (q < 1) throw DomainError("q must be a positive integer");
  if (!(x >= 1.0)) return 0;
  auto le = [&](std::uint64_t j) {
    try {
      return double(ipow(j, q)) <= x;
    } catch (const ResourceError&) {
      return false;
    }
  };
  std::uint64_t j = static_cast<std::uint64_t>(std::floor(std::pow(x, 1.0 / q)));
  while (le(j + 1)) ++j;
  while (j > 0 && !le(j)) --j;
  return j;
}

std::uint64_t floor_to_qth_power(double x, int q) {
  const std::uint64_t j = qth_root_floor(x, q);
  return j == 0 ? 0 : ipow(j, q);
}

double upper_cutoff_value(int q, double N, double M, double delta, Regime regime) {
  check_targets(q, N, M);
  check_delta(delta);
  const double a = 1.0 / q;
  const double g0 = M / (q * N);
  const double lnlnv = -std::log1p(-delta);  // ln(1/(1-delta))

  if (regime == Regime::GrowingM) {
    if (!(M > std::exp(1.0))) throw DomainError("growing regime needs <M> > e");
    const double lm = std::log(M);
    const double Bq = lm - (1.0 - a) * std::log(lm) - log_gamma(a);
    return (Bq - std::log(lnlnv)) / g0;
  }

  const double c = lnlnv / M;
  if (!(c < 1.0)) throw InfeasibleError("upper cutoff: tolerance too large for <M>");
  double lo = 0.0;
  double hi = 1e4 / g0 * (1.0 + std::log(1.0 / delta));
  while (reg_gamma_upper(a, g0 * hi) > c) hi *= 2.0;
  for (int i = 0; i < 400 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (reg_gamma_upper(a, g0 * mid) > c) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lower_cutoff_value(int q, double N, double M, double delta, Regime regime) {
  check_targets(q, N, M);
  check_delta(delta);
  const double a = 1.0 / q;
  const double g0 = M / (q * N);
  const double lnd = std::log(1.0 / delta);

  if (regime == Regime::GrowingM) {
    return std::pow(std::exp(log_gamma(a)) * lnd / (q * M), q) / g0;
  }
  const double c = lnd / M;
  if (!(c < 1.0)) throw InfeasibleError("lower cutoff: ln(1/delta) must be below <M>");
  return inv_reg_gamma_lower(a, c) / g0;
}

std::uint64_t upper_cutoff(int q, double N, double M, double delta, Regime regime) {
  const std::uint64_t L = floor_to_qth_power(upper_cutoff_value(q, N, M, delta, regime), q);
  if (L == 0) throw InfeasibleError("upper cutoff admits no part");
  return L;
}

std::uint64_t lower_cutoff(int q, double N, double M, double delta, Regime regime) {
  return floor_to_qth_power(lower_cutoff_value(q, N, M, delta, regime), q);
}

CutoffPolicy cutoff_policy(int q, double N, double M, double delta, Regime regime) {
  CutoffPolicy c;
  c.delta = delta;
  c.regime = regime;
  c.L = upper_cutoff(q, N, M, delta, regime);
  try {
    const std::uint64_t L0 = lower_cutoff(q, N, M, delta, regime);
    if (L0 > 0 && L0 < c.L) c.L0 = L0;
  } catch (const InfeasibleError&) {
  }
  return c;
}

double censoring_constant_c1(int m, int q) {
  if (m < 1 || q < 1) throw DomainError("censoring constant needs m, q >= 1");
  return std::exp(log_c1(m, q));
}

double censoring_constant_c3(int m, int q, double theta) {
  if (m < 1 || q < 1) throw DomainError("censoring constant needs m, q >= 1");
  if (!(theta > 1.0)) throw DomainError("approximate task needs theta > 1");
  const double a = double(m) / q;
  const double num = reg_gamma_lower(a, theta * a) - reg_gamma_lower(a, a);
  return num / std::pow(reg_gamma_lower(1.0 / q, theta * a), m);
}

double censoring_limit_value(TaskKind kind, int q, std::uint64_t n, int m, double theta,
                             double delta, bool corrected) {
  if (q < 1 || m < 1 || n < 1) throw DomainError("censoring limit needs q, n, m >= 1");
  check_delta(delta);
  if (!(theta >= 1.0)) throw DomainError("theta must be at least 1");
  if (corrected && kind != TaskKind::T3_Approximate && q != 1 && q != 2)
    throw DomainError("corrected censoring limits are available for q = 1, 2 only");

  const double nd = double(n);
  switch (kind) {
    case TaskKind::T1_Exact: {
      if (corrected) return std::exp(log_corrected_constant(m, q)) * nd * std::log(1.0 / delta);
      const double c = std::exp(log_c1(m, q) + (double(m) / q) * std::log(nd));
      if (!(c > 1.0)) return 1.0;
      return std::log(delta) / std::log1p(-1.0 / c);
    }
    case TaskKind::T2_MultiExact:
      return censoring_limit_t2_value(q, n, n, m, theta, delta, corrected);
    case TaskKind::T3_Approximate: {
      const double c3 = censoring_constant_c3(m, q, theta);
      if (!(c3 > 0.0)) throw InfeasibleError("approximate task has vanishing hit probability");
      if (c3 >= 1.0) return 1.0;
      return std::log(delta) / std::log1p(-c3);
    }
  }
  throw DomainError("unknown task kind");
}

double censoring_limit_t2_value(int q, std::uint64_t n, std::uint64_t k, int m, double theta,
                                double delta, bool corrected) {
  if (q < 1 || m < 1 || n < 1 || k < 1) throw DomainError("censoring limit needs q, n, k, m >= 1");
  check_delta(delta);
  if (!(theta > 1.0)) throw DomainError("multiple exact task needs theta > 1");
  if (corrected && q != 1 && q != 2)
    throw DomainError("corrected censoring limits are available for q = 1, 2 only");
  const double kd = double(k);
  const double lg = std::max(0.0, std::log((theta - 1.0) * double(n) / delta));
  if (corrected) return std::exp(log_corrected_constant(m, q)) * kd * lg;
  return std::exp(log_c1(m, q) + (double(m) / q) * std::log(kd)) * lg;
}

std::uint64_t censoring_limit(TaskKind kind, int q, std::uint64_t n, int m, double theta,
                              double delta, bool corrected) {
  const double v = std::ceil(censoring_limit_value(kind, q, n, m, theta, delta, corrected));
  if (!(v < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(v));
}

}  // namespace qpart
