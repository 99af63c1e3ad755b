// usmopt: command-line driver for BD-RIS scattering-matrix optimization on
// the unitary-symmetric manifold.
//
// Subcommands: gen, run, sweep, bench, verify.
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "usm/bdris.hpp"
#include "usm/cmx_io.hpp"
#include "usm/manifold.hpp"
#include "usm/optim.hpp"
#include "usm/rng.hpp"

namespace fs = std::filesystem;
using namespace usm;

namespace {

struct ScenarioFlags {
  std::string file;
  std::optional<int> m, n_t, n_r;
  std::optional<double> rician_k;
  bool blocked = false;

  Scenario resolve() const {
    Scenario scn;
    if (!file.empty()) scn = Scenario::load(file);
    if (m) scn.m = *m;
    if (n_t) scn.n_t = *n_t;
    if (n_r) scn.n_r = *n_r;
    if (rician_k) scn.rician_k = *rician_k;
    if (blocked) scn.alpha_direct = 8.0;
    scn.validate();
    return scn;
  }

  void add_to(CLI::App* app) {
    app->add_option("--scenario", file, "Scenario file (key=value)");
    app->add_option("--m", m, "BD-RIS elements");
    app->add_option("--nt", n_t, "Transmit antennas");
    app->add_option("--nr", n_r, "Receive antennas");
    app->add_option("--rician-k", rician_k, "Rician K factor");
    app->add_flag("--blocked", blocked, "Blocked direct link (alpha_direct=8)");
  }
};

struct RunFlags {
  std::string cost = "sumgain";   // sumgain | rate | mse
  std::string method = "po";      // po | ls
  std::string rank = "low";       // full | low
  int trials = 20;
  uint64_t seed = 1;
  std::string out = "out";
  double eps = 1e-3;
  bool eps_relative = false;
  int max_iters = 500;
  int threads = 1;
  bool audit = false;

  void add_to(CLI::App* app) {
    app->add_option("--cost", cost, "Cost function")
        ->check(CLI::IsMember({"sumgain", "rate", "mse"}));
    app->add_option("--method", method, "Step rule")
        ->check(CLI::IsMember({"po", "ls"}));
    app->add_option("--rank", rank, "Search space")
        ->check(CLI::IsMember({"full", "low"}));
    app->add_option("--trials", trials, "Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Base seed (trial t uses seed+t)");
    app->add_option("--out", out, "Output directory");
    app->add_option("--eps", eps, "Convergence threshold");
    app->add_flag("--eps-relative", eps_relative,
                  "Scale threshold by max(1,|cost|)");
    app->add_option("--max-iters", max_iters, "Outer iteration cap");
    app->add_option("--threads", threads, "Trial worker pool size");
  }

  OptimConfig optim_config() const {
    OptimConfig cfg;
    cfg.eps = eps;
    cfg.eps_relative = eps_relative;
    cfg.max_iters = max_iters;
    return cfg;
  }
};

int resolve_threads(int requested) {
  int t = std::max(1, requested);
  if (const char* env = std::getenv("US_MANIFOLD_NUM_THREADS"))
    t = std::min(t, std::max(1, std::atoi(env)));
  return t;
}

void run_parallel(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next(0);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::unique_ptr<CostFunction> make_cost(const std::string& name,
                                        const MimoChannel& ch) {
  if (name == "sumgain") return sumgain_cost(ch);
  if (name == "rate") return rate_cost(ch);
  return mse_cost(ch);
}

struct TrialResult {
  bool ok = false;
  std::string error;
  double final_cost = 0.0;
  OptimReport report;
};

TrialResult run_trial(const Scenario& scn, const RunFlags& flags, int trial) {
  TrialResult res;
  try {
    uint64_t trial_seed = flags.seed + static_cast<uint64_t>(trial);
    MimoChannel ch = gen_channels(scn, trial_seed);
    MimoChannel ch_opt = ch;
    int dim = scn.m;
    if (flags.rank == "low") {
      LowRankReduction red = low_rank_reduce(ch);
      ch_opt = reduced_channel(ch, red);
      dim = red.r;
    }
    auto cost = make_cost(flags.cost, ch_opt);
    UsPoint u0 = random_point(dim, stream_key(trial_seed, 0x696e6974ULL));
    OptimConfig cfg = flags.optim_config();
    auto [u, rep] = flags.method == "po" ? optimize_po(*cost, u0, cfg)
                                         : optimize_ls(*cost, u0, cfg);
    res.final_cost = cost->value(u);
    res.report = std::move(rep);
    res.ok = true;
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0
                   : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (v.size() - 1));
}

void write_convergence_csv(const std::string& path,
                           const std::vector<TrialResult>& results) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path);
  out << "trial,iteration,cost,grad_norm,elapsed_s\n";
  char buf[160];
  for (size_t t = 0; t < results.size(); ++t) {
    if (!results[t].ok) continue;
    const auto& rep = results[t].report;
    double elapsed = 0.0;
    for (int i = 0; i < rep.iterations; ++i) {
      elapsed += rep.iter_times_s[i];
      std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g,%.17g,%.17g\n", t, i + 1,
                    rep.cost_trace[i], rep.grad_norm_trace[i], elapsed);
      out << buf;
    }
  }
}

struct Summary {
  double mean_cost = 0.0, std_cost = 0.0, mean_iters = 0.0, mean_time_s = 0.0;
  int ok_trials = 0;
};

Summary summarize(const std::vector<TrialResult>& results) {
  Summary s;
  std::vector<double> costs, iters, times;
  for (const auto& r : results) {
    if (!r.ok) continue;
    costs.push_back(r.final_cost);
    iters.push_back(r.report.iterations);
    times.push_back(r.report.wall_time_s);
  }
  s.ok_trials = static_cast<int>(costs.size());
  s.mean_cost = mean(costs);
  s.std_cost = stddev(costs);
  s.mean_iters = mean(iters);
  s.mean_time_s = mean(times);
  return s;
}

// --- gen ---------------------------------------------------------------

int cmd_gen(const ScenarioFlags& sf, uint64_t seed, const std::string& out_dir) {
  Scenario scn = sf.resolve();
  MimoChannel ch = gen_channels(scn, seed);
  fs::create_directories(out_dir);
  write_cmatrix(out_dir + "/h_d.cmx", ch.h_d);
  write_cmatrix(out_dir + "/f.cmx", ch.f);
  write_cmatrix(out_dir + "/g.cmx", ch.g);
  std::ofstream meta(out_dir + "/meta.txt");
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  meta << "seed=" << seed << '\n'
       << "tx_power_mw=" << num(scn.tx_power_mw) << '\n'
       << "noise_power_dbm=" << num(scn.noise_power_dbm()) << '\n'
       << "snr_linear=" << num(ch.snr_linear) << '\n'
       << "alpha_direct=" << num(scn.alpha_direct) << '\n';
  scn.save(out_dir + "/scenario.txt");
  std::cout << "wrote h_d.cmx f.cmx g.cmx meta.txt scenario.txt to " << out_dir
            << "\n";
  return 0;
}

// --- run ---------------------------------------------------------------

int audit_summary(const std::string& conv_path, const Summary& s);

int cmd_run(const ScenarioFlags& sf, const RunFlags& flags) {
  Scenario scn = sf.resolve();
  std::vector<TrialResult> results(flags.trials);
  run_parallel(flags.trials, resolve_threads(flags.threads),
               [&](int t) { results[t] = run_trial(scn, flags, t); });

  fs::create_directories(flags.out);
  write_convergence_csv(flags.out + "/convergence.csv", results);
  Summary s = summarize(results);
  {
    std::ofstream out(flags.out + "/summary.csv");
    out << "variant,mean_cost,std_cost,mean_iters,mean_time_s,ok_trials\n";
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%s-%s,%.17g,%.17g,%.17g,%.17g,%d\n",
                  flags.method.c_str(), flags.rank.c_str(), s.mean_cost,
                  s.std_cost, s.mean_iters, s.mean_time_s, s.ok_trials);
    out << buf;
  }
  int failures = 0;
  for (const auto& r : results)
    if (!r.ok) {
      ++failures;
      std::cerr << "trial failed: " << r.error << "\n";
    }
  std::cout << "trials=" << flags.trials << " ok=" << s.ok_trials
            << " mean_cost=" << s.mean_cost << " mean_iters=" << s.mean_iters
            << "\n";
  if (flags.audit && s.ok_trials > 0) {
    if (audit_summary(flags.out + "/convergence.csv", s) != 0) return 2;
  }
  return failures == flags.trials ? 2 : 0;
}

// Recomputes the summary from the trace file and cross-checks it.
int audit_summary(const std::string& conv_path, const Summary& s) {
  std::ifstream in(conv_path);
  std::string line;
  std::getline(in, line);  // header
  std::map<int, double> final_cost;
  std::map<int, int> iters;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    int trial = std::stoi(cols[0]);
    iters[trial] = std::stoi(cols[1]);
    final_cost[trial] = std::stod(cols[2]);
  }
  std::vector<double> costs, its;
  for (auto& [t, c] : final_cost) costs.push_back(c);
  for (auto& [t, i] : iters) its.push_back(i);
  if (std::abs(mean(costs) - s.mean_cost) >
          1e-12 * std::max(1.0, std::abs(s.mean_cost)) ||
      std::abs(mean(its) - s.mean_iters) > 1e-12 * std::max(1.0, s.mean_iters)) {
    std::cerr << "audit: summary does not match trace file\n";
    return 2;
  }
  std::cout << "audit: summary matches trace file\n";
  return 0;
}

// --- sweep -------------------------------------------------------------

struct SweepRow {
  int m;
  std::string variant;
  Summary s;
};

int cmd_sweep(const ScenarioFlags& sf, const RunFlags& flags,
              const std::string& param, const std::vector<int>& values) {
  if (param != "m") throw InvalidInput("sweep: only --param m is supported");
  std::vector<SweepRow> rows;
  for (int mval : values) {
    ScenarioFlags sfv = sf;
    sfv.m = mval;
    Scenario scn = sfv.resolve();

    std::vector<TrialResult> primary(flags.trials);
    run_parallel(flags.trials, resolve_threads(flags.threads),
                 [&](int t) { primary[t] = run_trial(scn, flags, t); });
    rows.push_back({mval, flags.method + "-" + flags.rank, summarize(primary)});

    if (flags.cost == "rate") {
      // Baselines from the rate study: matched-filter low-cost design and
      // optimization on the full unitary group followed by projection.
      std::vector<TrialResult> lc(flags.trials), up(flags.trials);
      run_parallel(flags.trials, resolve_threads(flags.threads), [&](int t) {
        uint64_t ts = flags.seed + static_cast<uint64_t>(t);
        MimoChannel ch = gen_channels(scn, ts);
        auto cost = rate_cost(ch);
        if (!sf.blocked) {
          try {
            UsPoint theta = low_cost_baseline(ch);
            lc[t].ok = true;
            lc[t].final_cost = cost->value(theta);
          } catch (const DegenerateBaseline& e) {
            lc[t].error = e.what();
          }
        }
        try {
          UsPoint u0 = random_point(scn.m, stream_key(ts, 0x696e6974ULL));
          auto [theta, rep] =
              optimize_unitary_then_project(*cost, u0.u, flags.optim_config());
          up[t].ok = true;
          up[t].final_cost = cost->value(theta);
          up[t].report = std::move(rep);
        } catch (const std::exception& e) {
          up[t].error = e.what();
        }
      });
      if (!sf.blocked) rows.push_back({mval, "low_cost", summarize(lc)});
      rows.push_back({mval, "unitary_proj", summarize(up)});
    }

    if (flags.cost == "mse") {
      // MSE achieved by the max-rate design over the same channels.
      std::vector<TrialResult> mr(flags.trials);
      run_parallel(flags.trials, resolve_threads(flags.threads), [&](int t) {
        try {
          RunFlags rf = flags;
          rf.cost = "rate";
          uint64_t ts = flags.seed + static_cast<uint64_t>(t);
          MimoChannel ch = gen_channels(scn, ts);
          MimoChannel ch_opt = ch;
          int dim = scn.m;
          if (rf.rank == "low") {
            LowRankReduction red = low_rank_reduce(ch);
            ch_opt = reduced_channel(ch, red);
            dim = red.r;
          }
          auto rcost = rate_cost(ch_opt);
          auto mcost = mse_cost(ch_opt);
          UsPoint u0 = random_point(dim, stream_key(ts, 0x696e6974ULL));
          OptimConfig cfg = rf.optim_config();
          auto [theta, rep] = rf.method == "po" ? optimize_po(*rcost, u0, cfg)
                                                : optimize_ls(*rcost, u0, cfg);
          mr[t].ok = true;
          mr[t].final_cost = mcost->value(theta);
          mr[t].report = std::move(rep);
        } catch (const std::exception& e) {
          mr[t].error = e.what();
        }
      });
      rows.push_back({mval, "mse_at_max_rate", summarize(mr)});
    }
  }

  fs::create_directories(flags.out);
  std::ofstream out(flags.out + "/sweep.csv");
  out << "m,variant,mean_cost,std_cost,mean_iters,mean_time_s\n";
  char buf[240];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g,%.17g,%.17g\n", row.m,
                  row.variant.c_str(), row.s.mean_cost, row.s.std_cost,
                  row.s.mean_iters, row.s.mean_time_s);
    out << buf;
  }
  std::cout << "wrote " << flags.out << "/sweep.csv (" << rows.size()
            << " rows)\n";
  return 0;
}

// --- bench -------------------------------------------------------------

double median_iter_time(const OptimReport& rep) {
  if (rep.iterations < 2) return rep.iterations ? rep.iter_times_s[0] : 0.0;
  std::vector<double> t(rep.iter_times_s.begin() + 1,
                        rep.iter_times_s.begin() + rep.iterations);
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

int cmd_bench(const ScenarioFlags& sf, const RunFlags& flags,
              const std::vector<int>& m_values, int iters) {
  fs::create_directories(flags.out);
  std::ofstream out(flags.out + "/bench.csv");
  out << "m,variant,median_iter_s\n";
  char buf[160];
  for (int mval : m_values) {
    ScenarioFlags sfv = sf;
    sfv.m = mval;
    Scenario scn = sfv.resolve();
    MimoChannel ch = gen_channels(scn, flags.seed);
    LowRankReduction red = low_rank_reduce(ch);
    MimoChannel ch_red = reduced_channel(ch, red);

    OptimConfig cfg = flags.optim_config();
    cfg.eps = 1e-300;  // measure a fixed iteration count
    cfg.max_iters = iters;

    struct Variant {
      const char* name;
      const MimoChannel* ch;
      int dim;
      bool po;
    } variants[] = {
        {"full-po", &ch, scn.m, true},
        {"full-ls", &ch, scn.m, false},
        {"low-po", &ch_red, red.r, true},
        {"low-ls", &ch_red, red.r, false},
    };
    for (const auto& v : variants) {
      auto cost = make_cost(flags.cost, *v.ch);
      UsPoint u0 = random_point(v.dim, stream_key(flags.seed, 0x696e6974ULL));
      auto [u, rep] = v.po ? optimize_po(*cost, u0, cfg)
                           : optimize_ls(*cost, u0, cfg);
      std::snprintf(buf, sizeof(buf), "%d,%s,%.9g\n", mval, v.name,
                    median_iter_time(rep));
      out << buf;
    }
  }
  std::cout << "wrote " << flags.out << "/bench.csv\n";
  return 0;
}

// --- verify ------------------------------------------------------------

int cmd_verify() {
  int failures = 0;
  auto check = [&failures](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  // Manifold invariants over seeded operations.
  {
    bool ok = true;
    for (uint64_t s = 0; s < 40 && ok; ++s) {
      int n = 2 + static_cast<int>(s % 7);
      UsPoint u = random_point(n, s);
      ok = u.valid();
      if (!ok) break;
      CounterRng rng(stream_key(s, 11));
      RealSym r = RealSym::symmetrize(rng.gaussian_matrix(n, n));
      TangentDirection dir{&u, r};
      GeodesicFrame frame = geodesic_frame(u, dir);
      ok = geodesic_point(frame, RealVector(0.7 * frame.thetas)).valid() &&
           cayley(r).valid();
    }
    check("manifold invariants (retract, geodesic, cayley)", ok);
  }

  // Tangent membership and projection idempotence.
  {
    bool ok = true;
    for (uint64_t s = 0; s < 40 && ok; ++s) {
      int n = 2 + static_cast<int>(s % 5);
      UsPoint u = random_point(n, stream_key(s, 21));
      CounterRng rng(stream_key(s, 22));
      RealSym r = RealSym::symmetrize(rng.gaussian_matrix(n, n));
      TangentDirection dir{&u, r};
      CMatrix b = dir.ambient();
      double scale = std::max(1.0, r.norm()) * n;
      ok = (u.u.adjoint() * b + b.adjoint() * u.u).norm() <= 1e-9 * scale &&
           (b - b.transpose()).norm() <= 1e-9 * scale &&
           (project_tangent(u, b).ambient() - b).norm() <= 1e-9 * scale;
    }
    check("tangent space membership and projection idempotence", ok);
  }

  // Cayley round trip.
  {
    bool ok = true;
    for (uint64_t s = 0; s < 40 && ok; ++s) {
      int n = 2 + static_cast<int>(s % 5);
      CounterRng rng(stream_key(s, 31));
      RealSym b = RealSym::symmetrize(rng.gaussian_matrix(n, n));
      RealSym b2 = cayley_inv(cayley(b));
      ok = (b.full() - b2.full()).norm() <= 1e-9 * std::max(1.0, b.norm());
    }
    check("cayley round trip", ok);
  }

  // Gradient directional-derivative checks for the three costs.
  {
    bool ok = true;
    Scenario scn;
    scn.m = 12;
    for (uint64_t s = 0; s < 5 && ok; ++s) {
      MimoChannel ch = gen_channels(scn, s + 1);
      LowRankReduction red = low_rank_reduce(ch);
      MimoChannel chr = reduced_channel(ch, red);
      for (auto* cost_name : {"sumgain", "rate", "mse"}) {
        auto cost = make_cost(cost_name, chr);
        UsPoint u = random_point(red.r, stream_key(s, 41));
        CounterRng rng(stream_key(s, 42));
        RealSym r = RealSym::symmetrize(rng.gaussian_matrix(red.r, red.r));
        TangentDirection dir{&u, r};
        GeodesicFrame frame = geodesic_frame(u, dir);
        const double t = 1e-6;
        double fd = (cost->value(geodesic_point(frame, RealVector(t * frame.thetas))) -
                     cost->value(u)) / t;
        double ip = (cost->euclid_grad(u).adjoint() * dir.ambient())
                        .trace().real();
        if (std::abs(fd - ip) > 1e-4 * (1.0 + std::abs(ip))) ok = false;
      }
    }
    check("cost gradients vs finite differences", ok);
  }

  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian optimization of BD-RIS scattering matrices on the "
               "unitary-symmetric manifold"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate and persist channels");
  ScenarioFlags gen_sf;
  gen_sf.add_to(gen);
  uint64_t gen_seed = 1;
  std::string gen_out = "channels";
  gen->add_option("--seed", gen_seed, "Channel seed");
  gen->add_option("--out", gen_out, "Output directory");

  // run
  auto* run = app.add_subcommand("run", "Monte Carlo optimization runs");
  ScenarioFlags run_sf;
  run_sf.add_to(run);
  RunFlags run_flags;
  run_flags.add_to(run);
  run->add_flag("--audit", run_flags.audit,
                "Recompute summary from the trace file and cross-check");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep over surface sizes");
  ScenarioFlags sweep_sf;
  sweep_sf.add_to(sweep);
  RunFlags sweep_flags;
  sweep_flags.add_to(sweep);
  std::string sweep_param = "m";
  std::vector<int> sweep_values = {16, 32, 64};
  sweep->add_option("--param", sweep_param, "Swept parameter (m)");
  sweep->add_option("--values", sweep_values, "Swept values")->delimiter(',');

  // bench
  auto* bench = app.add_subcommand("bench", "Per-iteration timing");
  ScenarioFlags bench_sf;
  bench_sf.add_to(bench);
  RunFlags bench_flags;
  bench_flags.add_to(bench);
  std::vector<int> bench_m = {16, 32, 64};
  int bench_iters = 12;
  bench->add_option("--m-values", bench_m, "Surface sizes")->delimiter(',');
  bench->add_option("--iters", bench_iters, "Iterations per measurement");

  // verify
  app.add_subcommand("verify", "Run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_sf, gen_seed, gen_out);
    if (run->parsed()) return cmd_run(run_sf, run_flags);
    if (sweep->parsed())
      return cmd_sweep(sweep_sf, sweep_flags, sweep_param, sweep_values);
    if (bench->parsed())
      return cmd_bench(bench_sf, bench_flags, bench_m, bench_iters);
    return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
