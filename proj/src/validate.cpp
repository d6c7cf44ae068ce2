#include "qpart/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include <Eigen/Dense>
#include <json.hpp>

#include "qpart/enumerate.hpp"
#include "qpart/errors.hpp"
#include "qpart/sampler.hpp"
#include "qpart/special.hpp"
#include "qpart/stats.hpp"

namespace qpart {

namespace {

Outcome pass_if(bool ok) { return ok ? Outcome::Pass : Outcome::Fail; }

double gamma0(int q, double N, double M) { return M / (q * N); }

std::int64_t lattice_index(std::uint64_t part, int q) {
  return std::int64_t(qth_root_floor(double(part), q));
}

void require_samples(const std::vector<Partition>& s, std::size_t n, const char* what) {
  if (s.size() < n) throw ResourceError(std::string(what) + ": too few samples");
}

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Warning: return "warning";
    case Outcome::NotApplicable: return "not-applicable";
  }
  return "fail";
}

std::uint64_t young_boundary_eval(const Partition& p, double x) {
  if (x < 0.0) throw DomainError("young boundary needs x >= 0");
  std::uint64_t c = 0;
  for (auto v : p.parts) c += double(v) >= x;
  return c;
}

std::vector<double> scaled_young(const Partition& p, int q, double N_target, double M_target,
                                 const std::vector<double>& grid) {
  const double A = q * N_target / M_target;
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(double(young_boundary_eval(p, A * x)) / M_target);
  return out;
}

double sup_distance(const Partition& p, int q, double N_target, double M_target) {
  const double A = q * N_target / M_target;
  const std::size_t K = p.parts.size();
  // jump points x_k = lambda_k / A, x_0 = inf, x_{K+1} = 0
  auto omega_at = [&](std::size_t k) {
    if (k == 0) return 0.0;
    if (k == K + 1) return 1.0;
    return limit_shape(q, double(p.parts[k - 1]) / A);
  };
  double d = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    const double y = double(k) / M_target;
    d = std::max({d, std::abs(y - omega_at(k)), std::abs(y - omega_at(k + 1))});
  }
  return d;
}

std::vector<double> limit_shape_sup_distance(const std::vector<Partition>& samples, int q,
                                             double N_target, double M_target) {
  if (samples.empty()) throw DomainError("limit shape distance of an empty sample");
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& p : samples) out.push_back(sup_distance(p, q, N_target, M_target));
  return out;
}

TestResult fluctuation_variance_check(const std::vector<Partition>& samples, int q, double N_target,
                                      double M_target, double x) {
  if (!(x >= 0.0)) throw DomainError("fluctuation check needs x >= 0");
  require_samples(samples, 1000, "fluctuation_variance_check");
  const double omega = limit_shape(q, x);
  if (omega < 1e-6) throw DomainError("limit shape is degenerate at this x");
  std::vector<double> y;
  y.reserve(samples.size());
  for (const auto& p : samples) y.push_back(scaled_young(p, q, N_target, M_target, {x})[0]);
  const double ratio = M_target * stats::variance(y) / omega;
  const double tol = std::max(0.15, 6.0 / std::sqrt(double(samples.size())));
  TestResult r{"fluctuation variance ratio", ratio, tol, samples.size(),
               pass_if(std::abs(ratio - 1.0) <= tol), "Gaussian fluctuations of the Young boundary",
               "centered at the empirical mean"};
  return r;
}

TestResult fluctuation_normality(const std::vector<Partition>& samples, int q, double N_target,
                                 double M_target, double x, double alpha) {
  require_samples(samples, 1000, "fluctuation_normality");
  const double omega = limit_shape(q, x);
  if (omega < 1e-6) throw DomainError("limit shape is degenerate at this x");
  const double A = q * N_target / M_target;
  std::vector<std::int64_t> k;
  std::vector<double> y;
  for (const auto& p : samples) {
    const auto c = young_boundary_eval(p, A * x);
    k.push_back(std::int64_t(c));
    y.push_back(double(c) / M_target);
  }
  const double mu = stats::mean(y);
  const double sd = std::sqrt(omega / M_target);
  const double d = stats::ks_statistic_lattice(
      k, [&](std::int64_t c) { return stats::normal_cdf((double(c) / M_target - mu) / sd); });
  const double crit = stats::ks_critical(alpha, samples.size());
  return {"fluctuation normality", d, crit, samples.size(), pass_if(d < crit),
          "Gaussian fluctuations of the Young boundary", ""};
}

double truncated_length_mean(int q, double M_target, double theta) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  if (std::isinf(theta)) return M_target;
  return M_target * reg_gamma_lower(1.0 / q, theta * M_target / q);
}

TestResult test_length_poisson(const std::vector<Partition>& samples, double M_target,
                               std::optional<double> mu_override, double alpha) {
  require_samples(samples, 1000, "test_length_poisson");
  const double mu = mu_override.value_or(M_target);
  if (!(mu > 0.0)) throw DomainError("Poisson mean must be positive");
  std::uint64_t kmax = 0;
  for (const auto& p : samples) kmax = std::max(kmax, p.M);
  const std::uint64_t K = std::max<std::uint64_t>(kmax, std::uint64_t(std::ceil(mu + 10.0 * std::sqrt(mu) + 10.0)));
  std::vector<std::uint64_t> obs(K + 1, 0);
  for (const auto& p : samples) ++obs[p.M];
  std::vector<double> probs(K + 1, 0.0);
  for (std::uint64_t k = 0; k < K; ++k)
    probs[k] = std::exp(double(k) * std::log(mu) - mu - log_gamma(double(k) + 1.0));
  probs[K] = reg_gamma_lower(double(K), mu);
  const auto cs = stats::chi_square(obs, probs, alpha);
  TestResult r{"length Poisson chi-square", cs.statistic, cs.critical, samples.size(),
               pass_if(cs.dof >= 1 && cs.statistic <= cs.critical), "Poisson limit of the length", ""};
  r.note = "dof=" + std::to_string(cs.dof) + " p=" + std::to_string(cs.p_value) +
           " mu=" + std::to_string(mu);
  return r;
}

TestResult test_weight_conditional_gamma(const std::vector<Partition>& samples, int m, int q,
                                         double N_target, double M_target, double alpha) {
  if (m < 1) throw DomainError("conditional length must be positive");
  std::vector<std::int64_t> w;
  for (const auto& p : samples)
    if (p.M == std::uint64_t(m)) w.push_back(std::int64_t(p.N));
  if (w.size() < 500) throw ResourceError("fewer than 500 samples of the requested length");
  const double g0 = gamma0(q, N_target, M_target);
  const double a = double(m) / q;
  const double d = stats::ks_statistic_lattice(
      w, [&](std::int64_t k) { return k < 0 ? 0.0 : reg_gamma_lower(a, g0 * double(k)); });
  const double crit = stats::ks_critical(alpha, w.size());
  return {"weight given length " + std::to_string(m) + " gamma KS", d, crit, w.size(),
          pass_if(d < crit), "gamma limit of the weight given the length", ""};
}

std::vector<TestResult> test_weight_marginal(const std::vector<Partition>& samples, int q,
                                             double M_target, double N_target, double alpha) {
  require_samples(samples, 1000, "test_weight_marginal");
  const double g0 = gamma0(q, N_target, M_target);
  const double n = double(samples.size());
  const double pi0 = std::exp(-M_target);
  std::vector<TestResult> out;

  std::vector<std::int64_t> nz;
  std::vector<double> x;
  for (const auto& p : samples) {
    x.push_back(g0 * double(p.N));
    if (p.N > 0) nz.push_back(std::int64_t(p.N));
  }
  const double zero_frac = 1.0 - double(nz.size()) / n;
  const double sig = std::sqrt(pi0 * (1.0 - pi0) / n);
  TestResult atom{"weight atom at zero", zero_frac, pi0, samples.size(),
                  pass_if(std::abs(zero_frac - pi0) <= 4.0 * sig), "atom of the weight marginal", ""};
  atom.note = "sigma=" + std::to_string(sig);
  out.push_back(atom);

  if (nz.empty()) {
    out.push_back({"weight compound Poisson-Gamma KS", 1.0, 0.0, 0, Outcome::Fail,
                   "compound Poisson-Gamma marginal", "no nonzero weights"});
  } else {
    const CompoundPGParams cp{M_target, 1.0 / q};
    const double d = stats::ks_statistic_lattice(nz, [&](std::int64_t k) {
      if (k <= 0) return 0.0;
      return (cpg_cdf(cp, g0 * double(k)) - pi0) / (1.0 - pi0);
    });
    const double crit = stats::ks_critical(alpha, nz.size());
    out.push_back({"weight compound Poisson-Gamma KS", d, crit, nz.size(), pass_if(d < crit),
                   "compound Poisson-Gamma marginal", "conditional on nonzero weight"});
  }

  const double mu = stats::mean(x);
  const double se = std::sqrt(stats::variance(x) / n);
  const double target = M_target / q;
  TestResult mr{"scaled weight mean", mu, target, samples.size(),
                pass_if(std::abs(mu - target) <= 4.0 * se), "mean of the compound Poisson-Gamma law", ""};
  mr.note = "se=" + std::to_string(se);
  out.push_back(mr);
  return out;
}

double cpg_density_minimizer(int q, double M_target) {
  const CompoundPGParams cp{M_target, 1.0 / q};
  auto g = [&](double x) { return cpg_pdf(cp, x); };
  double a = 1e-4, b = 1.0;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > 1e-10) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

TestResult test_small_weight_excess(const std::vector<Partition>& samples, int q, double N_target,
                                    double M_target) {
  require_samples(samples, 1000, "test_small_weight_excess");
  const double x0 = cpg_density_minimizer(q, M_target);
  const CompoundPGParams cp{M_target, 1.0 / q};
  const double bound = x0 * cpg_pdf(cp, x0) + std::exp(-M_target);
  const double g0 = gamma0(q, N_target, M_target);
  std::uint64_t c = 0;
  for (const auto& p : samples) c += g0 * double(p.N) <= x0;
  const double n = double(samples.size());
  const double frac = double(c) / n;
  const double se = std::sqrt(std::max(frac * (1.0 - frac), 1e-12) / n);
  TestResult r{"small weight excess", frac, bound, samples.size(), pass_if(frac > bound),
               "singularity of the weight density at zero", ""};
  r.note = "x0=" + std::to_string(x0) + " G(x0)=" + std::to_string(cpg_cdf(cp, x0)) +
           " se=" + std::to_string(se) +
           " z=" + std::to_string((frac - bound) / se);
  return r;
}

StandardizedPair standardize(const Partition& p, int q, double N_target, double M_target) {
  return {std::sqrt(M_target / (q + 1.0)) * (double(p.N) - N_target) / N_target,
          (double(p.M) - M_target) / std::sqrt(M_target)};
}

std::vector<TestResult> test_joint_normal(const std::vector<Partition>& samples, int q,
                                          double N_target, double M_target, double alpha) {
  require_samples(samples, 10000, "test_joint_normal");
  const std::uint64_t n = samples.size();
  std::vector<double> ns, ms;
  std::vector<std::int64_t> mk;
  for (const auto& p : samples) {
    const auto s = standardize(p, q, N_target, M_target);
    ns.push_back(s.n_star);
    ms.push_back(s.m_star);
    mk.push_back(std::int64_t(p.M));
  }
  const double crit = stats::ks_critical(alpha, n);
  const double dn = stats::ks_statistic(ns, stats::normal_cdf);
  const double dm = stats::ks_statistic_lattice(mk, [&](std::int64_t k) {
    return stats::normal_cdf((double(k) - M_target) / std::sqrt(M_target));
  });
  const double rho0 = 1.0 / std::sqrt(q + 1.0);
  const double rho = stats::correlation(ns, ms);

  Eigen::Matrix2d K;
  K << 1.0, rho0, rho0, 1.0;
  const Eigen::Matrix2d Kinv = K.inverse();
  const double level = 0.1;
  const double chi = 2.0 * std::log(1.0 / level);
  std::uint64_t inside = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const Eigen::Vector2d v(ns[i], ms[i]);
    inside += v.dot(Kinv * v) <= chi;
  }
  const double cover = double(inside) / double(n);

  std::vector<TestResult> out = {
      {"standardized weight normality KS", dn, crit, n, pass_if(dn < crit), "bivariate normal limit", ""},
      {"standardized length normality KS", dm, crit, n, pass_if(dm < crit), "bivariate normal limit",
       "length is integer valued; compared on its lattice"},
      {"weight-length correlation", rho, rho0, n, pass_if(std::abs(rho - rho0) <= 0.03),
       "limiting correlation 1/sqrt(q+1)", "tolerance 0.03"},
      {"ellipse coverage", cover, 1.0 - level, n, pass_if(std::abs(cover - (1.0 - level)) <= 0.02),
       "Mahalanobis confidence ellipse", "tolerance 0.02"}};
  if (M_target < 10.0)
    for (auto& r : out) {
      r.verdict = Outcome::Warning;
      r.note += (r.note.empty() ? "" : "; ") + std::string("mean length below 10, outside the theorem's regime");
    }
  return out;
}

std::vector<TestResult> test_extremes(const std::vector<Partition>& samples, int q,
                                      double N_target, double M_target, Regime regime,
                                      double alpha) {
  require_samples(samples, 10000, "test_extremes");
  const double g0 = gamma0(q, N_target, M_target);
  const double M = M_target;
  std::vector<std::int64_t> jmax, jmin;
  for (const auto& p : samples) {
    if (p.empty()) continue;
    jmax.push_back(lattice_index(p.lmax(), q));
    jmin.push_back(lattice_index(*p.lmin(), q));
  }
  const std::uint64_t ne = jmax.size();
  const std::uint64_t n = samples.size();
  auto xq = [&](std::int64_t j) { return g0 * std::pow(double(j), q); };
  std::vector<TestResult> out;

  if (regime == Regime::FixedM) {
    const double pi0 = std::exp(-M);
    const double frac = double(n - ne) / double(n);
    const double sig = std::sqrt(pi0 * (1.0 - pi0) / double(n));
    TestResult atom{"empty partition proportion", frac, pi0, n,
                    pass_if(std::abs(frac - pi0) <= 4.0 * sig), "atom of the largest part law", ""};
    atom.note = "sigma=" + std::to_string(sig);
    out.push_back(atom);
    if (ne == 0) return out;
    const double crit = stats::ks_critical(alpha, ne);
    const double dmax = stats::ks_statistic_lattice(jmax, [&](std::int64_t j) {
      if (j <= 0) return 0.0;
      return (std::exp(-M * reg_gamma_upper(1.0 / q, xq(j))) - pi0) / (1.0 - pi0);
    });
    const double dmin = stats::ks_statistic_lattice(jmin, [&](std::int64_t j) {
      if (j <= 0) return 0.0;
      return 1.0 - (std::exp(-M * reg_gamma_lower(1.0 / q, xq(j))) - pi0) / (1.0 - pi0);
    });
    out.push_back({"largest part KS", dmax, crit, ne, pass_if(dmax < crit),
                   "largest part law with fixed mean length", "conditional on nonempty"});
    out.push_back({"smallest part KS", dmin, crit, ne, pass_if(dmin < crit),
                   "smallest part law with fixed mean length", "conditional on nonempty"});
    return out;
  }

  if (!(M > std::exp(1.0))) throw DomainError("growing regime needs <M> > e");
  const double bq = std::pow(q * M / std::exp(log_gamma(1.0 / q)), q);
  const double Bq = std::log(M) - (1.0 - 1.0 / q) * std::log(std::log(M)) - log_gamma(1.0 / q);
  const double crit = stats::ks_critical(alpha, std::max<std::uint64_t>(ne, 1));
  const double dmax = ne ? stats::ks_statistic_lattice(jmax, [&](std::int64_t j) {
    return std::exp(-std::exp(-(xq(j) - Bq)));
  }) : 1.0;
  const double dmin = ne ? stats::ks_statistic_lattice(jmin, [&](std::int64_t j) {
    if (j <= 0) return 0.0;
    return -std::expm1(-std::pow(bq * xq(j), 1.0 / q));
  }) : 1.0;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < jmax.size(); ++i) {
    a.push_back(xq(jmax[i]) - Bq);
    b.push_back(bq * xq(jmin[i]));
  }
  const double rho = ne >= 2 ? stats::correlation(a, b) : 0.0;
  const double rcrit = 4.0 / std::sqrt(double(std::max<std::uint64_t>(ne, 1)));
  const std::string empties = ne < n ? std::to_string(n - ne) + " empty partitions excluded" : "";
  out.push_back({"normalized largest part Gumbel KS", dmax, crit, ne, pass_if(ne && dmax < crit),
                 "Gumbel limit of the largest part", empties});
  out.push_back({"normalized smallest part Weibull KS", dmin, crit, ne, pass_if(ne && dmin < crit),
                 "Weibull limit of the smallest part", empties});
  out.push_back({"extremes correlation", std::abs(rho), rcrit, ne, pass_if(std::abs(rho) < rcrit),
                 "asymptotic independence of the extremes", ""});
  return out;
}

TestResult test_uniformity(const std::vector<Partition>& task_samples, int q, std::uint64_t n,
                           int m, double alpha) {
  const std::string name = "uniformity chi-square";
  const std::string ref = "uniform law on the constrained space";
  const std::uint64_t count = count_partitions(q, n, m);
  if (count < 2)
    return {name, 0.0, 0.0, task_samples.size(), Outcome::NotApplicable, ref,
            count == 0 ? "empty space" : "singleton space"};
  if (count > 10000)
    return {name, 0.0, 0.0, task_samples.size(), Outcome::NotApplicable, ref, "space too large"};
  const auto members = list_partitions(q, n, m);
  std::map<std::vector<std::uint64_t>, std::size_t> index;
  for (std::size_t i = 0; i < members.size(); ++i) index[members[i].parts] = i;
  std::vector<std::uint64_t> obs(members.size(), 0);
  std::uint64_t foreign = 0;
  for (const auto& p : task_samples) {
    const auto it = index.find(p.parts);
    if (it == index.end()) ++foreign;
    else ++obs[it->second];
  }
  if (task_samples.empty())
    return {name, 0.0, 0.0, 0, Outcome::Fail, ref, "no samples"};
  if (foreign)
    return {name, std::numeric_limits<double>::infinity(), 0.0, task_samples.size(), Outcome::Fail,
            ref, std::to_string(foreign) + " samples outside the space"};
  const auto cs = stats::chi_square(obs, std::vector<double>(obs.size(), 1.0 / double(obs.size())), alpha);
  TestResult r{name, cs.statistic, cs.critical, task_samples.size(),
               pass_if(cs.statistic <= cs.critical), ref, ""};
  r.note = std::to_string(members.size()) + " cells, p=" + std::to_string(cs.p_value);
  if (double(task_samples.size()) / double(members.size()) < 50.0) r.note += ", fewer than 50 per cell";
  return r;
}

MomentReport empirical_moment_report(const std::vector<Partition>& samples,
                                     const ModelParams& params, std::optional<std::uint64_t> L) {
  require_samples(samples, 2, "empirical_moment_report");
  const double n = double(samples.size());
  double sN = 0.0, sM = 0.0;
  for (const auto& p : samples) {
    sN += double(p.N);
    sM += double(p.M);
  }
  const double mN = sN / n, mM = sM / n;
  std::vector<double> dN2, dM2, dNM;
  for (const auto& p : samples) {
    const double a = double(p.N) - mN, b = double(p.M) - mM;
    dN2.push_back(a * a);
    dM2.push_back(b * b);
    dNM.push_back(a * b);
  }
  MomentReport rep;
  rep.empirical.EN = mN;
  rep.empirical.EM = mM;
  rep.empirical.VarN = stats::mean(dN2) * n / (n - 1.0);
  rep.empirical.VarM = stats::mean(dM2) * n / (n - 1.0);
  rep.empirical.CovNM = stats::mean(dNM) * n / (n - 1.0);
  rep.exact = exact_moments(params, L);

  auto se_of = [&](const std::vector<double>& v) { return n > 2 ? std::sqrt(stats::variance(v) / n) : 0.0; };
  struct Row {
    const char* name;
    double emp, ex, se;
  };
  const Row rows[] = {
      {"mean weight", mN, rep.exact.EN, std::sqrt(rep.empirical.VarN / n)},
      {"mean length", mM, rep.exact.EM, std::sqrt(rep.empirical.VarM / n)},
      {"weight variance", rep.empirical.VarN, rep.exact.VarN, se_of(dN2)},
      {"length variance", rep.empirical.VarM, rep.exact.VarM, se_of(dM2)},
      {"weight-length covariance", rep.empirical.CovNM, rep.exact.CovNM, se_of(dNM)},
  };
  for (const auto& r : rows) {
    const bool ok = std::abs(r.emp - r.ex) <= 4.0 * r.se || r.emp == r.ex;
    TestResult t{std::string(r.name) + " vs exact", r.emp, r.ex, samples.size(), pass_if(ok),
                 "covariance identities of the Boltzmann model", "se=" + std::to_string(r.se)};
    rep.tests.push_back(t);
  }

  const int q = params.q;
  const double N = params.N_target, M = params.M_target;
  if (N > 0.0 && M > 0.0) {
    const Row asym[] = {
        {"length variance / <M>", rep.empirical.VarM / M, 1.0, 0.0},
        {"covariance / <N>", rep.empirical.CovNM / N, 1.0, 0.0},
        {"weight variance / ((q+1)<N>^2/<M>)", rep.empirical.VarN * M / ((q + 1.0) * N * N), 1.0, 0.0},
    };
    for (const auto& r : asym) {
      const bool ok = std::abs(r.emp - 1.0) <= 0.1;
      rep.tests.push_back({r.name, r.emp, 1.0, samples.size(), ok ? Outcome::Pass : Outcome::Warning,
                           "asymptotic covariance matrix", "tolerance 0.1, informative"});
    }
  }
  return rep;
}

std::uint64_t sampling_cutoff(int q, double N_target, double M_target) {
  return upper_cutoff(q, N_target, M_target, 1e-9, Regime::FixedM);
}

namespace {

using Family = std::function<std::vector<TestResult>(double)>;

std::vector<Family> build_suite(const SuiteConfig& cfg, std::vector<Partition>& free_samples,
                                std::vector<Partition>& task_samples) {
  const int q = cfg.q;
  const double N = cfg.N_target, M = cfg.M_target;
  std::vector<Family> fams;
  const bool fixed = cfg.suite == "fixed-m" || cfg.suite == "all";
  const bool growing = cfg.suite == "growing-m" || cfg.suite == "all";
  const bool moments = cfg.suite == "moments" || cfg.suite == "all";
  const bool uniform = cfg.suite == "uniformity" || (cfg.suite == "all" && cfg.n > 0 && cfg.m > 0);

  if (fixed || growing || moments) {
    if (!(N > 0.0 && M > 0.0)) throw DomainError("suite needs --N and --M");
    const ModelParams params = calibrate(q, N, M, cfg.method);
    const std::uint64_t L = sampling_cutoff(q, N, M);
    free_samples = sample_batch(params, L, cfg.count, cfg.seed, cfg.threads, auto_sampler_kind(q, L));
    const auto* s = &free_samples;
    if (fixed) {
      fams.push_back([=](double a) { return std::vector<TestResult>{test_length_poisson(*s, M, std::nullopt, a)}; });
      fams.push_back([=](double a) { return test_weight_marginal(*s, q, M, N, a); });
      fams.push_back([=](double a) {
        std::vector<TestResult> out;
        std::map<std::uint64_t, std::uint64_t> byM;
        for (const auto& p : *s) ++byM[p.M];
        for (const auto& [m, c] : byM)
          if (m >= 1 && c >= 500) out.push_back(test_weight_conditional_gamma(*s, int(m), q, N, M, a));
        return out;
      });
      if (M < 30.0)
        fams.push_back([=](double) { return std::vector<TestResult>{test_small_weight_excess(*s, q, N, M)}; });
      if (s->size() >= 10000)
        fams.push_back([=](double a) { return test_extremes(*s, q, N, M, Regime::FixedM, a); });
    }
    if (growing) {
      if (s->size() >= 10000) {
        fams.push_back([=](double a) { return test_joint_normal(*s, q, N, M, a); });
        if (M > std::exp(1.0))
          fams.push_back([=](double a) { return test_extremes(*s, q, N, M, Regime::GrowingM, a); });
      }
      if (s->size() >= 1000)
        for (double x : {0.3, 0.7, 1.2})
          fams.push_back([=](double a) {
            return std::vector<TestResult>{fluctuation_variance_check(*s, q, N, M, x),
                                           fluctuation_normality(*s, q, N, M, x, a)};
          });
    }
    if (moments)
      fams.push_back([=](double) { return empirical_moment_report(*s, params, L).tests; });
  }

  if (uniform) {
    if (cfg.n < 1 || cfg.m < 1) throw DomainError("uniformity suite needs --n and --m");
    RejectionTask task;
    task.kind = TaskKind::T1_Exact;
    task.n = cfg.n;
    task.m = cfg.m;
    task.delta = cfg.delta;
    task.corrected = q <= 2;
    task.t_star = censoring_limit(TaskKind::T1_Exact, q, cfg.n, cfg.m, 1.0, cfg.delta, task.corrected);
    const ModelParams params = crude_params(q, double(cfg.n), double(cfg.m));
    const std::uint64_t cap = 100 * std::max<std::uint64_t>(cfg.count, 1);
    if (count_partitions(q, cfg.n, cfg.m) > 0) {
      for (std::uint64_t i = 0; i < cap && task_samples.size() < cfg.count; ++i) {
        RngStream rng(cfg.seed, i);
        auto rec = reject_sample(task, params, rng);
        if (rec.partition) task_samples.push_back(std::move(*rec.partition));
      }
    }
    const auto* t = &task_samples;
    const std::uint64_t n = cfg.n;
    const int m = cfg.m;
    fams.push_back([=](double a) { return std::vector<TestResult>{test_uniformity(*t, q, n, m, a)}; });
  }
  return fams;
}

}  // namespace

std::vector<TestResult> run_suite(const SuiteConfig& cfg) {
  static const char* known[] = {"fixed-m", "growing-m", "uniformity", "moments", "all"};
  if (std::find(std::begin(known), std::end(known), cfg.suite) == std::end(known))
    throw DomainError("unknown suite: " + cfg.suite);
  std::vector<Partition> free_samples, task_samples;
  const auto fams = build_suite(cfg, free_samples, task_samples);
  std::size_t k = 0;
  for (const auto& f : fams) k += f(cfg.alpha).size();
  const double a = cfg.alpha / double(std::max<std::size_t>(k, 1));
  std::vector<TestResult> out;
  for (const auto& f : fams)
    for (auto& r : f(a)) out.push_back(std::move(r));
  return out;
}

std::string report_json(const std::vector<TestResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j{{"name", r.name},
                     {"statistic", r.statistic},
                     {"threshold", r.threshold},
                     {"n", r.n},
                     {"verdict", to_string(r.verdict)},
                     {"reference", r.reference}};
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace qpart
