// Experiment front end: single runs, noise sweeps, the Norma-reduction check
// and the mistake-bound check, with CSV output.
//
// Exit codes: 0 success / check holds, 1 check failed, 2 usage error,
// 3 numerical divergence.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oskm/eval.hpp"
#include "oskm/format.hpp"
#include "oskm/loss.hpp"
#include "oskm/norma.hpp"

namespace {

constexpr const char* kToolVersion = "oskm 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double_or_inf(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "inf" || t == "+inf" || t == "infinity")
    return std::numeric_limits<double>::infinity();
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != t.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ','))
    if (!field.empty()) out.push_back(parse_double_or_inf(field));
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

struct Options {
  std::string algo = "both";
  std::string regime = "nonstationary";
  std::string snr_db = "inf";
  std::string label_noise = "0";
  int seeds = 100;
  long seed = 1;
  int tau = 100;
  int tau_p = 10;
  int tau_e = 10;
  double lambda = 0.1;
  double rho = 0.1;
  double eta = 0.7;
  int admm_iters = 3;
  std::string kernel = "linear";
  double bandwidth = 1.0;
  int dim = 128;
  int block_len = 0;  // 0: regime default
  int n_samples = 500;
  double class_sep = 3.29;
  std::string out;
};

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--algo", o.algo)->check(CLI::IsMember({"oskm", "norma", "both"}));
  cmd->add_option("--regime", o.regime)->check(CLI::IsMember({"nonstationary", "stationary"}));
  cmd->add_option("--snr-db", o.snr_db);
  cmd->add_option("--label-noise", o.label_noise);
  cmd->add_option("--seeds", o.seeds);
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--tau", o.tau);
  cmd->add_option("--tau-p", o.tau_p);
  cmd->add_option("--tau-e", o.tau_e);
  cmd->add_option("--lambda", o.lambda);
  cmd->add_option("--rho", o.rho);
  cmd->add_option("--eta", o.eta);
  cmd->add_option("--admm-iters", o.admm_iters);
  cmd->add_option("--kernel", o.kernel)->check(CLI::IsMember({"linear", "gaussian"}));
  cmd->add_option("--bandwidth", o.bandwidth);
  cmd->add_option("--dim", o.dim);
  cmd->add_option("--block-len", o.block_len);
  cmd->add_option("--n-samples", o.n_samples);
  cmd->add_option("--class-sep", o.class_sep);
  cmd->add_option("--out", o.out);
}

oskm::KernelSpec make_kernel(const Options& o) {
  oskm::KernelSpec spec;
  spec.family = o.kernel == "gaussian" ? oskm::KernelFamily::Gaussian
                                       : oskm::KernelFamily::Linear;
  spec.bandwidth = o.bandwidth;
  return spec;
}

oskm::OskmConfig make_oskm_config(const Options& o, bool tau_e_given, bool tau_p_given) {
  oskm::OskmConfig cfg;
  cfg.lambda = o.lambda;
  cfg.rho = o.rho;
  cfg.eta = o.eta;
  cfg.tau = o.tau;
  cfg.tau_p = o.tau_p;
  // default tau_e follows tau_p unless set explicitly
  cfg.tau_e = tau_e_given ? o.tau_e : (tau_p_given ? o.tau_p : o.tau_e);
  cfg.admm_iters = o.admm_iters;
  cfg.spec = make_kernel(o);
  cfg.validate();
  return cfg;
}

oskm::StreamConfig make_stream_config(const Options& o, std::uint64_t seed,
                                      double snr_db, double flip) {
  oskm::StreamConfig cfg;
  cfg.dim = o.dim;
  cfg.block_len = o.block_len;
  cfg.n_samples = o.n_samples;
  cfg.regime = o.regime == "stationary" ? oskm::Regime::Stationary
                                        : oskm::Regime::NonStationary;
  cfg.class_separation = o.class_sep;
  cfg.snr_db = snr_db;
  cfg.label_flip_prob = flip;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void write_header(std::ostream& out, const std::string& subcommand, const Options& o,
                  const oskm::OskmConfig& cfg) {
  out << "# " << kToolVersion << " " << subcommand << "\n";
  out << "# algo=" << o.algo << " regime=" << o.regime << " snr_db=" << o.snr_db
      << " label_noise=" << o.label_noise << " seeds=" << o.seeds
      << " seed=" << o.seed << "\n";
  out << "# tau=" << cfg.tau << " tau_p=" << cfg.tau_p << " tau_e=" << cfg.tau_e
      << " lambda=" << oskm::format_double(cfg.lambda)
      << " rho=" << oskm::format_double(cfg.rho)
      << " eta=" << oskm::format_double(cfg.eta)
      << " admm_iters=" << cfg.admm_iters << " kernel=" << o.kernel
      << " bandwidth=" << oskm::format_double(o.bandwidth) << "\n";
  out << "# dim=" << o.dim << " block_len=" << o.block_len
      << " n_samples=" << o.n_samples
      << " class_sep=" << oskm::format_double(o.class_sep) << "\n";
}

std::vector<oskm::Algorithm> algo_list(const Options& o) {
  if (o.algo == "oskm") return {oskm::Algorithm::Oskm};
  if (o.algo == "norma") return {oskm::Algorithm::Norma};
  return {oskm::Algorithm::Oskm, oskm::Algorithm::Norma};
}

const char* algo_name(oskm::Algorithm a) {
  return a == oskm::Algorithm::Oskm ? "oskm" : "norma";
}

// Seed list: seed, seed+1, ..., seed+seeds-1.
std::vector<std::uint64_t> seed_list(const Options& o) {
  if (o.seeds < 1) throw UsageError("seeds must be >= 1");
  std::vector<std::uint64_t> seeds(static_cast<size_t>(o.seeds));
  for (int i = 0; i < o.seeds; ++i)
    seeds[static_cast<size_t>(i)] = static_cast<std::uint64_t>(o.seed + i);
  return seeds;
}

std::vector<oskm::RunTrace> run_all_seeds(oskm::Algorithm algo, const Options& o,
                                          const oskm::OskmConfig& cfg, double snr_db,
                                          double flip) {
  const auto seeds = seed_list(o);
  std::vector<oskm::RunTrace> traces(seeds.size());
  oskm::parallel_for_indexed(static_cast<int>(seeds.size()), [&](int i) {
    const auto stream =
        oskm::gen_stream(make_stream_config(o, seeds[static_cast<size_t>(i)], snr_db, flip));
    traces[static_cast<size_t>(i)] = oskm::run_experiment(algo, stream, cfg);
  });
  return traces;
}

int check_divergence(const std::vector<oskm::RunTrace>& traces, std::uint64_t seed0) {
  for (size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].diverged) {
      std::cerr << "divergence at seed " << (seed0 + i) << ": " << traces[i].diagnostic
                << "\n";
      return kExitDivergence;
    }
  }
  return kExitOk;
}

int cmd_run(const Options& o, const oskm::OskmConfig& cfg) {
  const std::string path = o.out.empty() ? "oskm_run.csv" : o.out;
  const auto algos = algo_list(o);
  const double snr = parse_double_or_inf(o.snr_db);
  const double flip = parse_double_or_inf(o.label_noise);
  if (flip < 0.0 || flip > 0.5) throw UsageError("label-noise must be in [0, 0.5]");

  std::vector<std::vector<oskm::RunTrace>> all;
  for (auto algo : algos) {
    all.push_back(run_all_seeds(algo, o, cfg, snr, flip));
    if (int rc = check_divergence(all.back(), static_cast<std::uint64_t>(o.seed)); rc != kExitOk)
      return rc;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  write_header(out, "run", o, cfg);
  out << "seed,algo,step,raw_score,predicted_label,y_noisy,y_clean,"
         "mistake_vs_clean,mistake_vs_noisy,update_made\n";
  for (size_t a = 0; a < algos.size(); ++a) {
    for (size_t s = 0; s < all[a].size(); ++s) {
      for (const oskm::StepRecord& r : all[a][s].steps) {
        out << (o.seed + static_cast<long>(s)) << ',' << algo_name(algos[a]) << ','
            << r.step << ',' << oskm::format_double(r.raw_score) << ','
            << r.predicted_label << ',' << r.y_noisy << ',' << r.y_clean << ','
            << (r.mistake_vs_clean ? 1 : 0) << ',' << (r.mistake_vs_noisy ? 1 : 0)
            << ',' << (r.update_made ? 1 : 0) << "\n";
      }
    }
  }
  out.close();

  for (size_t a = 0; a < algos.size(); ++a) {
    std::vector<double> accs;
    double updates = 0.0;
    for (const auto& t : all[a]) {
      accs.push_back(t.accuracy_vs_clean);
      updates += static_cast<double>(t.n_updates);
    }
    const oskm::MeanCi ci = oskm::mean_ci95(accs);
    std::cout << "algo=" << algo_name(algos[a])
              << " accuracy_vs_clean=" << oskm::format_double(ci.mean)
              << " ci_half_width=" << oskm::format_double(ci.ci_half_width)
              << " mean_updates=" << oskm::format_double(updates / static_cast<double>(all[a].size()))
              << " seeds=" << o.seeds << "\n";
  }
  std::cout << "trace written to " << path << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, const oskm::OskmConfig& cfg, bool snr_passed,
              bool noise_passed) {
  // The swept axis is the flag carrying a comma-separated list; a single
  // explicitly-passed flag also works. The other flag stays a fixed parameter.
  const bool snr_multi = o.snr_db.find(',') != std::string::npos;
  const bool noise_multi = o.label_noise.find(',') != std::string::npos;
  bool snr_given;
  if (snr_multi && noise_multi) {
    throw UsageError("sweep needs exactly one swept axis: pass a value list for "
                     "--snr-db or --label-noise, not both");
  } else if (snr_multi || noise_multi) {
    snr_given = snr_multi;
  } else if (snr_passed != noise_passed) {
    snr_given = snr_passed;
  } else {
    throw UsageError("sweep needs exactly one swept axis: pass --snr-db or --label-noise");
  }
  if (o.seeds < 2) throw UsageError("sweep requires --seeds >= 2");
  const std::string axis = snr_given ? "snr" : "label-noise";
  const std::vector<double> values =
      parse_double_list(snr_given ? o.snr_db : o.label_noise);
  if (!snr_given)
    for (double v : values)
      if (v < 0.0 || v > 0.5) throw UsageError("label-noise values must be in [0, 0.5]");
  const double fixed_snr = snr_given ? 0.0 : parse_double_or_inf(o.snr_db);
  const double fixed_flip = snr_given ? parse_double_or_inf(o.label_noise) : 0.0;
  if (snr_given && (fixed_flip < 0.0 || fixed_flip > 0.5))
    throw UsageError("label-noise must be in [0, 0.5]");
  (void)noise_passed;

  struct Point {
    double value;
    oskm::MeanCi oskm_ci, norma_ci;
    oskm::PairedResult paired;
  };
  std::vector<Point> points;
  for (double v : values) {
    const double snr = snr_given ? v : fixed_snr;
    const double flip = snr_given ? fixed_flip : v;
    auto traces_o = run_all_seeds(oskm::Algorithm::Oskm, o, cfg, snr, flip);
    if (int rc = check_divergence(traces_o, static_cast<std::uint64_t>(o.seed)); rc != kExitOk)
      return rc;
    auto traces_n = run_all_seeds(oskm::Algorithm::Norma, o, cfg, snr, flip);
    if (int rc = check_divergence(traces_n, static_cast<std::uint64_t>(o.seed)); rc != kExitOk)
      return rc;
    Point p;
    p.value = v;
    std::vector<double> ao, an;
    for (const auto& t : traces_o) ao.push_back(t.accuracy_vs_clean);
    for (const auto& t : traces_n) an.push_back(t.accuracy_vs_clean);
    p.oskm_ci = oskm::mean_ci95(ao);
    p.norma_ci = oskm::mean_ci95(an);
    p.paired = oskm::paired_compare_values(ao, an);
    points.push_back(p);
    std::cout << axis << "=" << oskm::format_double(v)
              << " oskm=" << oskm::format_double(p.oskm_ci.mean)
              << " norma=" << oskm::format_double(p.norma_ci.mean)
              << " diff=" << oskm::format_double(p.paired.mean_diff) << "+-"
              << oskm::format_double(p.paired.ci_half_width)
              << " significant=" << (p.paired.significant ? 1 : 0) << "\n";
  }

  const std::string path = o.out.empty() ? "oskm_sweep.csv" : o.out;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  write_header(out, "sweep", o, cfg);
  out << "axis_value,algo,mean_accuracy,ci_half_width,n_seeds,mean_diff,"
         "diff_ci_half_width,significant\n";
  for (const Point& p : points) {
    for (const std::string algo : {"oskm", "norma"}) {
      const oskm::MeanCi& ci = algo == "oskm" ? p.oskm_ci : p.norma_ci;
      out << oskm::format_double(p.value) << ',' << algo << ','
          << oskm::format_double(ci.mean) << ','
          << oskm::format_double(ci.ci_half_width) << ',' << ci.n << ','
          << oskm::format_double(p.paired.mean_diff) << ','
          << oskm::format_double(p.paired.ci_half_width) << ','
          << (p.paired.significant ? 1 : 0) << "\n";
    }
  }
  std::cout << "sweep written to " << path << "\n";
  return kExitOk;
}

int cmd_reduce_check(const Options& o, bool rho_given, bool tau_p_given,
                     bool iters_given, bool n_given) {
  if (rho_given && o.rho != 0.0)
    throw UsageError("reduce-check requires rho=0 (the consensus mechanism must be off)");
  if (tau_p_given && o.tau_p != 1) throw UsageError("reduce-check requires tau_p=1");
  if (iters_given && o.admm_iters != 1) throw UsageError("reduce-check requires admm-iters=1");

  Options ro = o;
  ro.rho = 0.0;
  ro.tau_p = 1;
  ro.tau_e = 1;
  ro.admm_iters = 1;
  // the identity is exact only while neither side truncates
  if (!n_given) ro.n_samples = ro.tau;
  const oskm::OskmConfig cfg = make_oskm_config(ro, true, true);
  const double snr = parse_double_or_inf(ro.snr_db);
  const double flip = parse_double_or_inf(ro.label_noise);
  if (flip < 0.0 || flip > 0.5) throw UsageError("label-noise must be in [0, 0.5]");

  const auto seeds = seed_list(ro);
  double global_max = 0.0;
  std::vector<double> max_diffs(seeds.size(), 0.0);
  std::vector<int> first_bad(seeds.size(), -1);
  oskm::parallel_for_indexed(static_cast<int>(seeds.size()), [&](int i) {
    const auto stream = oskm::gen_stream(make_stream_config(ro, seeds[static_cast<size_t>(i)], snr, flip));
    const auto to = oskm::run_experiment(oskm::Algorithm::Oskm, stream, cfg);
    const auto tn = oskm::run_experiment(oskm::Algorithm::Norma, stream, cfg);
    double m = 0.0;
    for (size_t t = 0; t < to.steps.size(); ++t) {
      const double d = std::abs(to.steps[t].raw_score - tn.steps[t].raw_score);
      if (d > m) m = d;
      if (d >= 1e-10 && first_bad[static_cast<size_t>(i)] < 0)
        first_bad[static_cast<size_t>(i)] = static_cast<int>(t) + 1;
    }
    max_diffs[static_cast<size_t>(i)] = m;
  });
  long bad_seed = -1;
  int bad_step = -1;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (max_diffs[i] > global_max) global_max = max_diffs[i];
    if (first_bad[i] >= 0 && bad_seed < 0) {
      bad_seed = static_cast<long>(seeds[i]);
      bad_step = first_bad[i];
    }
  }
  std::cout << "reduce-check: max |oskm - norma| score difference = "
            << oskm::format_double(global_max) << " over " << ro.seeds
            << " seeds x " << ro.n_samples << " samples\n";
  if (bad_seed >= 0) {
    std::cerr << "reduction identity violated at seed " << bad_seed << ", step "
              << bad_step << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_bound_check(const Options& o, const oskm::OskmConfig& cfg, bool algo_given) {
  if (cfg.spec.family != oskm::KernelFamily::Linear)
    throw UsageError("bound-check requires the linear kernel");
  const double snr = parse_double_or_inf(o.snr_db);
  const double flip = parse_double_or_inf(o.label_noise);
  if (flip < 0.0 || flip > 0.5) throw UsageError("label-noise must be in [0, 0.5]");
  if (algo_given && o.algo == "both")
    throw UsageError("bound-check needs --algo oskm or --algo norma");
  const oskm::Algorithm algo =
      o.algo == "norma" ? oskm::Algorithm::Norma : oskm::Algorithm::Oskm;

  const auto seeds = seed_list(o);
  const auto grid = oskm::default_rho_margin_grid();
  std::vector<oskm::BoundReport> reports(seeds.size());
  oskm::parallel_for_indexed(static_cast<int>(seeds.size()), [&](int i) {
    const auto scfg = make_stream_config(o, seeds[static_cast<size_t>(i)], snr, flip);
    const auto stream = oskm::gen_stream(scfg);
    const auto trace = oskm::run_experiment(algo, stream, cfg);
    if (trace.diverged) throw oskm::DivergenceError(trace.diagnostic);
    reports[static_cast<size_t>(i)] =
        oskm::mistake_bound(trace, stream, oskm::class_direction(scfg), grid, cfg.spec);
  });

  long violations = 0;
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (i < 3 || !r.holds) {
      std::cout << "seed " << seeds[i] << ": M_N=" << r.m_n
                << " bound=" << oskm::format_double(r.bound_value)
                << " best_rho=" << oskm::format_double(r.best_rho)
                << " holds=" << (r.holds ? 1 : 0) << "\n";
    }
    if (!r.holds) {
      std::cerr << "bound violated at seed " << seeds[i] << "\n";
      ++violations;
    }
  }
  std::cout << "bound-check: " << (reports.size() - static_cast<size_t>(violations))
            << "/" << reports.size() << " seeds hold\n";
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online stochastic kernel machine experiments"};
  app.require_subcommand(1);

  Options o;
  CLI::App* run = app.add_subcommand("run", "run experiments and write a per-step trace CSV");
  CLI::App* sweep = app.add_subcommand("sweep", "sweep one noise axis and write a summary CSV");
  CLI::App* bound = app.add_subcommand("bound-check", "verify the empirical mistake bound");
  CLI::App* reduce = app.add_subcommand("reduce-check",
                                        "verify the reduction to Norma with consensus off");
  for (CLI::App* cmd : {run, sweep, bound, reduce}) add_common_flags(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const bool tau_e_given = sub->count("--tau-e") > 0;
    const bool tau_p_given = sub->count("--tau-p") > 0;
    if (sub == reduce)
      return cmd_reduce_check(o, sub->count("--rho") > 0, tau_p_given,
                              sub->count("--admm-iters") > 0,
                              sub->count("--n-samples") > 0);
    const oskm::OskmConfig cfg = make_oskm_config(o, tau_e_given, tau_p_given);
    if (sub == run) return cmd_run(o, cfg);
    if (sub == sweep)
      return cmd_sweep(o, cfg, sub->count("--snr-db") > 0, sub->count("--label-noise") > 0);
    if (sub == bound) return cmd_bound_check(o, cfg, sub->count("--algo") > 0);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const oskm::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
