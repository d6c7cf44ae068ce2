// qpart: calibration, sampling, enumeration and validation of strict q-th power partitions.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpart/calibrate.hpp"
#include "qpart/enumerate.hpp"
#include "qpart/errors.hpp"
#include "qpart/partition.hpp"
#include "qpart/sampler.hpp"
#include "qpart/special.hpp"
#include "qpart/validate.hpp"

using namespace qpart;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kOutcome = 1, kUsage = 2, kIo = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integers given as "12500" or "1.25e4".
std::uint64_t parse_count(const std::string& s, const char* flag) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !(v >= 0.0) || v != std::floor(v) || v > 9007199254740992.0)
    throw DomainError(std::string(flag) + " expects a nonnegative integer, got '" + s + "'");
  return static_cast<std::uint64_t>(v);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  f << text;
  if (!f) throw IoError("cannot write " + path);
}

Method parse_method(const std::string& s) {
  if (s == "crude") return Method::Crude;
  if (s == "corrected") return Method::BiasCorrected;
  return Method::NewtonExact;
}

Regime parse_regime(const std::string& s) { return s == "growing" ? Regime::GrowingM : Regime::FixedM; }

std::string sample_csv(const std::vector<Partition>& ps) {
  std::ostringstream os;
  os << "index,N,M,lmax,lmin,parts\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& p = ps[i];
    os << i << ',' << p.N << ',' << p.M << ',' << p.lmax() << ',';
    if (auto l = p.lmin()) os << *l;
    os << ',' << join_parts(p) << '\n';
  }
  return os.str();
}

json partition_json(const Partition& p) { return json{{"N", p.N}, {"M", p.M}, {"parts", p.parts}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boltzmann sampling of strict partitions into q-th powers"};
  app.require_subcommand(1);

  int q = 1;
  double N = 0.0, M = 0.0, theta = 1.0, delta = 0.1, step = 0.01, xmax = 0.0;
  std::string n_s = "0", count_s, seed_s, method_s = "exact", regime_s = "fixed";
  std::string format_s, out, suite, sampler_s = "auto", task_s;
  int m = 0;
  bool corrected = false, list = false;
  std::string max_n_s;
  std::optional<double> delta_opt;
  unsigned threads = 1;

  auto add_q = [&](CLI::App* c) { c->add_option("--q", q, "power q >= 1")->check(CLI::PositiveNumber); };
  auto add_targets = [&](CLI::App* c) {
    c->add_option("--N", N, "target mean weight <N>")->required();
    c->add_option("--M", M, "target mean length <M>")->required();
  };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", seed_s, "master seed (default $QPART_SEED or 0)"); };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", out, "output file (default stdout)"); };
  auto add_method = [&](CLI::App* c) {
    c->add_option("--method", method_s, "calibration")->check(CLI::IsMember({"crude", "corrected", "exact"}));
  };
  auto add_regime = [&](CLI::App* c) {
    c->add_option("--regime", regime_s, "cutoff regime")->check(CLI::IsMember({"fixed", "growing"}));
  };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", format_s, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* cal = app.add_subcommand("calibrate", "Boltzmann parameters, moments and cutoffs");
  add_q(cal);
  add_targets(cal);
  add_method(cal);
  add_regime(cal);
  add_format(cal);
  add_out(cal);
  cal->add_option("--delta", delta_opt, "cutoff confidence parameter");

  auto* smp = app.add_subcommand("sample", "free Boltzmann samples as CSV");
  add_q(smp);
  add_targets(smp);
  add_method(smp);
  add_regime(smp);
  add_seed(smp);
  add_out(smp);
  add_format(smp);
  smp->add_option("--count", count_s, "number of samples");
  smp->add_option("--delta", delta_opt, "truncate parts at the upper cutoff for this delta");
  smp->add_option("--threads", threads, "worker threads");
  smp->add_option("--sampler", sampler_s, "auto, naive or skip")->check(CLI::IsMember({"auto", "naive", "skip"}));

  auto* rej = app.add_subcommand("reject", "rejection sampler with censoring");
  add_q(rej);
  rej->add_option("--n", n_s, "target weight")->required();
  rej->add_option("--m", m, "target length")->required();
  rej->add_option("--theta", theta, "weight tolerance factor");
  rej->add_option("--delta", delta, "censoring confidence");
  rej->add_flag("--corrected", corrected, "cardinality-corrected censoring limits");
  rej->add_option("--task", task_s, "t1, t2 or t3 (default t1 if theta = 1, else t3)")
      ->check(CLI::IsMember({"t1", "t2", "t3"}));
  add_seed(rej);
  add_out(rej);
  add_format(rej);

  auto* en = app.add_subcommand("enumerate", "exact counts and listings");
  add_q(en);
  en->add_option("--n", n_s, "weight (or maximal weight with --max-n)");
  en->add_option("--m", m, "length (or maximal length with --max-n)");
  en->add_flag("--list", list, "list all members");
  en->add_option("--max-n", max_n_s, "CSV table of all counts up to this weight");
  add_out(en);
  add_format(en);

  auto* val = app.add_subcommand("validate", "statistical test suites");
  val->add_option("--suite", suite, "fixed-m, growing-m, uniformity, moments or all")
      ->required()
      ->check(CLI::IsMember({"fixed-m", "growing-m", "uniformity", "moments", "all"}));
  add_q(val);
  val->add_option("--N", N, "target mean weight");
  val->add_option("--M", M, "target mean length");
  val->add_option("--n", n_s, "weight for the uniformity suite");
  val->add_option("--m", m, "length for the uniformity suite");
  val->add_option("--count", count_s, "number of samples");
  val->add_option("--delta", delta, "censoring confidence for the uniformity suite");
  val->add_option("--threads", threads, "worker threads");
  add_method(val);
  add_seed(val);
  add_out(val);
  add_format(val);

  auto* shp = app.add_subcommand("shape", "mean scaled Young boundary against the limit shape");
  add_q(shp);
  add_targets(shp);
  add_method(shp);
  add_seed(shp);
  add_out(shp);
  add_format(shp);
  shp->add_option("--count", count_s, "number of samples");
  shp->add_option("--step", step, "grid step")->check(CLI::PositiveNumber);
  shp->add_option("--xmax", xmax, "grid end (default: limit shape below 1e-4)");
  shp->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (seed_s.empty())
      if (const char* env = std::getenv("QPART_SEED")) seed_s = env;
    const std::uint64_t seed = seed_s.empty() ? 0 : parse_count(seed_s, "--seed");
    const Method method = parse_method(method_s);
    const Regime regime = parse_regime(regime_s);

    if (*cal) {
      const ModelParams p = calibrate(q, N, M, method);
      const MomentSummary mom = exact_moments(p);
      json j{{"q", q},         {"N_target", N},          {"M_target", M},          {"method", to_string(method)},
             {"z1", p.z1()},   {"z2", p.z2},             {"gamma", p.gamma},       {"gamma0", p.gamma0()},
             {"kappa", p.kappa}, {"EN", mom.EN},         {"EM", mom.EM},           {"VarN", mom.VarN},
             {"VarM", mom.VarM}, {"CovNM", mom.CovNM}};
      if (delta_opt) {
        const CutoffPolicy c = cutoff_policy(q, N, M, *delta_opt, regime);
        j["delta"] = c.delta;
        j["regime"] = to_string(regime);
        j["L"] = c.L;
        j["L0"] = c.L0 ? json(*c.L0) : json(nullptr);
      }
      if (format_s == "csv") {
        std::ostringstream os;
        os << "key,value\n";
        for (auto& [k, v] : j.items()) os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        emit(out, os.str());
      } else {
        emit(out, j.dump(2) + "\n");
      }
      return kOk;
    }

    if (*smp) {
      const std::uint64_t count = parse_count(count_s.empty() ? "1" : count_s, "--count");
      const ModelParams p = calibrate(q, N, M, method);
      const std::uint64_t L = delta_opt ? upper_cutoff(q, N, M, *delta_opt, regime) : sampling_cutoff(q, N, M);
      const SamplerKind kind = sampler_s == "naive" ? SamplerKind::Naive
                               : sampler_s == "skip" ? SamplerKind::Skip
                                                     : auto_sampler_kind(q, L);
      const auto ps = sample_batch(p, L, count, seed, threads, kind);
      if (format_s == "json") {
        json arr = json::array();
        for (const auto& s : ps) arr.push_back(partition_json(s));
        emit(out, arr.dump() + "\n");
      } else {
        emit(out, sample_csv(ps));
      }
      return kOk;
    }

    if (*rej) {
      const std::uint64_t n = parse_count(n_s, "--n");
      RejectionTask task;
      task.kind = task_s == "t2"   ? TaskKind::T2_MultiExact
                  : task_s == "t3" ? TaskKind::T3_Approximate
                  : task_s == "t1" ? TaskKind::T1_Exact
                  : theta == 1.0   ? TaskKind::T1_Exact
                                   : TaskKind::T3_Approximate;
      task.n = n;
      task.m = m;
      task.theta = theta;
      task.delta = delta;
      task.corrected = corrected;
      RngStream rng(seed, 0);
      const auto t0 = std::chrono::steady_clock::now();
      json j;
      bool sampled = false;
      if (task.kind == TaskKind::T2_MultiExact) {
        const auto finds = reject_sample_range(q, task, rng);
        json arr = json::array();
        for (const auto& f : finds) {
          json e{{"k", f.k},
                 {"verdict", f.record.verdict == Verdict::Sampled ? "Sampled" : "Void"},
                 {"attempts_internal", f.record.attempts_internal},
                 {"attempts_external", f.record.attempts_external}};
          if (f.record.partition) {
            e["partition"] = f.record.partition->parts;
            sampled = true;
          }
          arr.push_back(e);
        }
        j["task"] = "t2";
        j["verdict"] = sampled ? "Sampled" : "Void";
        j["runs"] = arr;
      } else {
        task.t_star = censoring_limit(task.kind, q, n, m, theta, delta, corrected);
        const auto rec = reject_sample_crude(q, task, rng);
        sampled = rec.verdict == Verdict::Sampled;
        j["task"] = task.kind == TaskKind::T1_Exact ? "t1" : "t3";
        j["verdict"] = sampled ? "Sampled" : "Void";
        if (rec.partition) j["partition"] = rec.partition->parts;
        j["attempts_internal"] = rec.attempts_internal;
        j["attempts_external"] = rec.attempts_external;
        j["t_star"] = task.t_star;
      }
      j["wall_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      emit(out, j.dump(2) + "\n");
      return sampled ? kOk : kOutcome;
    }

    if (*en) {
      if (!max_n_s.empty()) {
        emit(out, enum_table_csv(enum_table(q, parse_count(max_n_s, "--max-n"), m)));
        return kOk;
      }
      const std::uint64_t n = parse_count(n_s, "--n");
      const std::uint64_t c = count_partitions(q, n, m);
      if (format_s == "csv") {
        std::ostringstream os;
        if (list) {
          os << "index,parts\n";
          const auto ps = list_partitions(q, n, m);
          for (std::size_t i = 0; i < ps.size(); ++i) os << i << ',' << join_parts(ps[i]) << '\n';
        } else {
          os << "q,n,m,count\n" << q << ',' << n << ',' << m << ',' << c << '\n';
        }
        emit(out, os.str());
        return kOk;
      }
      json j{{"q", q}, {"n", n}, {"m", m}, {"count", c}};
      if (list) {
        json arr = json::array();
        for (const auto& p : list_partitions(q, n, m)) arr.push_back(p.parts);
        j["partitions"] = arr;
      }
      emit(out, j.dump(2) + "\n");
      return kOk;
    }

    if (*val) {
      SuiteConfig cfg;
      cfg.suite = suite;
      cfg.q = q;
      cfg.N_target = N;
      cfg.M_target = M;
      cfg.n = parse_count(n_s, "--n");
      cfg.m = m;
      cfg.count = parse_count(count_s.empty() ? "10000" : count_s, "--count");
      cfg.seed = seed;
      cfg.threads = threads;
      cfg.method = method;
      cfg.delta = delta;
      const auto results = run_suite(cfg);
      emit(out, report_json(results));
      for (const auto& r : results)
        if (r.failed()) return kOutcome;
      return kOk;
    }

    if (*shp) {
      const std::uint64_t count = parse_count(count_s.empty() ? "1000" : count_s, "--count");
      const ModelParams p = calibrate(q, N, M, method);
      const std::uint64_t L = sampling_cutoff(q, N, M);
      const auto ps = sample_batch(p, L, count, seed, threads, auto_sampler_kind(q, L));
      double end = xmax;
      if (!(end > 0.0)) {
        end = step;
        while (limit_shape(q, end) >= 1e-4) end += step;
      }
      const auto steps = static_cast<std::size_t>(std::llround(end / step));
      std::vector<double> grid;
      for (std::size_t i = 0; i <= steps; ++i) grid.push_back(double(i) * step);
      std::vector<double> acc(grid.size(), 0.0);
      for (const auto& s : ps) {
        const auto y = scaled_young(s, q, N, M, grid);
        for (std::size_t i = 0; i < y.size(); ++i) acc[i] += y[i];
      }
      std::ostringstream os;
      os << "x,mean_Y,omega\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double mean = ps.empty() ? 0.0 : acc[i] / double(ps.size());
        os << fmt(grid[i]) << ',' << fmt(mean) << ',' << fmt(limit_shape(q, grid[i])) << '\n';
      }
      emit(out, os.str());
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
