// Command-line front end: simulate sample paths, tabulate distributions,
// run the validation suite, and emit plot-ready data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracskellam/analytics.hpp"
#include "fracskellam/processes.hpp"
#include "fracskellam/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracskellam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

#ifndef FRACSKELLAM_VERSION
#define FRACSKELLAM_VERSION "unknown"
#endif

struct SpecFlags {
  std::string family = "skellam";
  double alpha = 1.0;
  double beta = 1.0;
  double theta = 0.0;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::string clock = "shared";

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "counting|skellam")
        ->check(CLI::IsMember({"counting", "skellam"}));
    cmd->add_option("--alpha", alpha, "time fractional index in (0,1]");
    cmd->add_option("--beta", beta, "space fractional index in (0,1]");
    cmd->add_option("--theta", theta, "tempering parameter, 0 = untempered");
    cmd->add_option("--lambda", lambda, "up-jump rates lambda_1,...,lambda_k")
        ->required()
        ->delimiter(',');
    cmd->add_option("--mu", mu, "down-jump rates mu_1,...,mu_k (skellam)")
        ->delimiter(',');
    cmd->add_option("--clock", clock,
                    "skellam time-change construction: shared|independent")
        ->check(CLI::IsMember({"shared", "independent"}));
  }

  ProcessSpec build() const {
    if (family == "counting" && !mu.empty())
      throw std::invalid_argument("--mu applies to the skellam family only");
    ProcessSpec s = family == "counting"
                        ? ProcessSpec::counting(alpha, beta, lambda, theta)
                        : ProcessSpec::skellam(alpha, beta, lambda, mu, theta);
    s.shared_clock = clock == "shared";
    return s;
  }

  json to_json() const {
    json j;
    j["family"] = family;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["theta"] = theta;
    j["lambda"] = lambda;
    if (family == "skellam") j["mu"] = mu;
    j["clock"] = clock;
    return j;
  }
};

void write_manifest(const fs::path& dir, const json& extra, int argc,
                    char** argv) {
  json j = extra;
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    cmd += argv[i];
  }
  j["command"] = cmd;
  j["version"] = FRACSKELLAM_VERSION;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::ios_base::failure("cannot write manifest.json");
  out << j.dump(2) << "\n";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create directory " + dir.string());
}

int cmd_simulate(const SpecFlags& flags, double t_max, double h,
                 std::size_t n_paths, double resolution, std::uint64_t seed,
                 const std::string& out, int argc, char** argv) {
  const ProcessSpec spec = flags.build();
  const TimeGrid grid = TimeGrid::from_step(t_max, h);
  ensure_dir(out);
  for (std::size_t i = 0; i < n_paths; ++i) {
    RngStream rng(seed, i);
    const CountPath path = process_path(spec, grid, rng, resolution);
    char name[64];
    std::snprintf(name, sizeof(name), "path_%03zu.csv", i);
    std::ofstream f(fs::path(out) / name);
    if (!f) throw std::ios_base::failure("cannot write path file");
    f << "t,value\n";
    for (std::size_t j = 0; j < path.values.size(); ++j)
      f << grid.time(j) << "," << path.values[j] << "\n";
  }
  json extra;
  extra["spec"] = flags.to_json();
  extra["grid"] = {{"t_max", t_max}, {"h", h}};
  extra["seed"] = seed;
  extra["n_paths"] = n_paths;
  extra["resolution"] = resolution;
  write_manifest(out, extra, argc, argv);
  return kExitOk;
}

int cmd_pmf(const SpecFlags& flags, double t, long long n_min, long long n_max,
            const std::string& method, const std::string& out, double tol,
            int argc, char** argv) {
  const ProcessSpec spec = flags.build();
  PmfOptions opt;
  opt.method =
      method == "remark32" ? PmfMethod::remark32 : PmfMethod::theorem31;
  opt.tol = tol;
  const PmfWindow win = pmf_window(spec, t, n_min, n_max, opt);
  const fs::path path(out);
  ensure_dir(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::ios_base::failure("cannot write " + out);
  f << "n,probability,truncation_bound\n";
  f.precision(17);
  for (const auto& v : win.values)
    f << v.n << "," << v.probability << "," << v.truncation_bound << "\n";
  json extra;
  extra["spec"] = flags.to_json();
  extra["t"] = t;
  extra["n_min"] = win.n_lo;
  extra["n_max"] = win.n_hi;
  extra["method"] = method;
  extra["window_sum"] = win.sum;
  extra["bound_sum"] = win.bound_sum;
  write_manifest(path.parent_path().empty() ? "." : path.parent_path(), extra,
                 argc, argv);
  return kExitOk;
}

int cmd_pgf(const SpecFlags& flags, double t, const std::vector<double>& us,
            const std::string& out) {
  const ProcessSpec spec = flags.build();
  std::ofstream f(out);
  if (!f) throw std::ios_base::failure("cannot write " + out);
  f << "u,pgf\n";
  f.precision(17);
  for (double u : us) f << u << "," << gstfsp_pgf(spec, t, u) << "\n";
  return kExitOk;
}

int cmd_moments(const SpecFlags& flags, double t, double s,
                const std::string& out) {
  const ProcessSpec spec = flags.build();
  const MomentSet m = moments(spec, t);
  json j;
  j["t"] = t;
  j["mean"] = m.mean;
  j["variance"] = m.variance;
  if (m.covariance_available && s > 0.0) j["covariance"] = m.covariance(s, t);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(out);
    if (!f) throw std::ios_base::failure("cannot write " + out);
    f << j.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_tails(const SpecFlags& flags, double t, const std::vector<double>& xs,
              const std::string& out) {
  const ProcessSpec spec = flags.build();
  std::ofstream f(out);
  if (!f) throw std::ios_base::failure("cannot write " + out);
  f << "x,asymptote,upper_bound,truncation_bound\n";
  f.precision(17);
  for (double x : xs) {
    const TailEstimate e = tail_asymptote(spec, t, x);
    f << x << "," << e.asymptote << ",";
    if (e.upper_bound)
      f << *e.upper_bound;
    else
      f << "nan";
    f << "," << e.truncation_bound << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& config_path, std::uint64_t seed,
                 bool seed_given, const std::string& out, int argc,
                 char** argv) {
  ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
  if (seed_given) cfg.seed = seed;
  if (!out.empty()) cfg.output_dir = out;
  const std::vector<ValidationReport> reports = run_experiment(cfg);

  if (!cfg.output_dir.empty()) {
    ensure_dir(cfg.output_dir);
    std::ofstream jl(fs::path(cfg.output_dir) / "reports.jsonl");
    if (!jl) throw std::ios_base::failure("cannot write reports.jsonl");
    for (const auto& r : reports) jl << report_json(r) << "\n";
    std::ofstream tbl(fs::path(cfg.output_dir) / "reports.txt");
    if (!tbl) throw std::ios_base::failure("cannot write reports.txt");
    tbl << report_table(reports);
    json extra;
    extra["config"] = config_path;
    extra["seed"] = cfg.seed;
    extra["checks"] = reports.size();
    write_manifest(cfg.output_dir, extra, argc, argv);
  }
  std::cout << report_table(reports);
  for (const auto& r : reports)
    if (!r.pass) return kExitValidationFailure;
  return kExitOk;
}

void write_gnuplot(const fs::path& file, const std::string& title,
                   const std::vector<std::string>& plots) {
  std::ofstream f(file);
  if (!f) throw std::ios_base::failure("cannot write " + file.string());
  f << "set datafile separator ','\n";
  f << "set key top left\n";
  f << "set title '" << title << "'\n";
  f << "plot ";
  for (std::size_t i = 0; i < plots.size(); ++i) {
    if (i) f << ", \\\n     ";
    f << plots[i];
  }
  f << "\n";
}

int cmd_figures(const std::string& out, std::uint64_t seed, int argc,
                char** argv) {
  ensure_dir(out);
  const fs::path dir(out);
  const std::vector<double> lam = {1, 3, 2, 2, 2};
  const std::vector<double> mu = {2, 2, 3, 3, 2};

  // Sample paths of the space-fractional family at two space indices.
  {
    std::vector<std::string> plots;
    int idx = 0;
    for (double beta : {0.4, 0.7}) {
      ProcessSpec spec = ProcessSpec::skellam(1.0, beta, lam, mu);
      RngStream rng(seed, 100 + idx);
      const TimeGrid grid = TimeGrid::from_step(10.0, 0.01);
      const CountPath path = process_path(spec, grid, rng);
      char name[64];
      std::snprintf(name, sizeof(name), "fig1_beta%02d.csv", int(beta * 100));
      std::ofstream f(dir / name);
      if (!f) throw std::ios_base::failure("cannot write figure data");
      f << "t,value\n";
      for (std::size_t j = 0; j < path.values.size(); ++j)
        f << grid.time(j) << "," << path.values[j] << "\n";
      plots.push_back(std::string("'") + name + "' using 1:2 with steps title 'beta=" +
                      std::to_string(beta).substr(0, 3) + "'");
      ++idx;
    }
    write_gnuplot(dir / "fig1.gp", "space-fractional Skellam sample paths", plots);
  }

  // Space-time fractional sample paths on the (alpha, beta) grid.
  {
    std::vector<std::string> plots;
    int idx = 0;
    for (double alpha : {0.3, 0.6}) {
      for (double beta : {0.4, 0.7}) {
        ProcessSpec spec = ProcessSpec::skellam(alpha, beta, lam, mu);
        RngStream rng(seed, 200 + idx);
        const TimeGrid grid = TimeGrid::from_step(10.0, 0.01);
        const CountPath path = process_path(spec, grid, rng);
        char name[64];
        std::snprintf(name, sizeof(name), "fig2_a%02d_b%02d.csv",
                      int(alpha * 100), int(beta * 100));
        std::ofstream f(dir / name);
        if (!f) throw std::ios_base::failure("cannot write figure data");
        f << "t,value\n";
        for (std::size_t j = 0; j < path.values.size(); ++j)
          f << grid.time(j) << "," << path.values[j] << "\n";
        char title[64];
        std::snprintf(title, sizeof(title), "a=%.1f b=%.1f", alpha, beta);
        plots.push_back(std::string("'") + name +
                        "' using 1:2 with steps title '" + title + "'");
        ++idx;
      }
    }
    write_gnuplot(dir / "fig2.gp", "space-time fractional Skellam sample paths",
                  plots);
  }

  // Pmf tables: alpha=0.6, beta=0.4, Lambda=50, T=100, five times.
  {
    std::vector<std::string> plots;
    ProcessSpec spec = ProcessSpec::skellam(0.6, 0.4, {50.0}, {100.0});
    PmfOptions opt;
    opt.tol = 1e-8;
    for (double t : {0.10, 0.25, 0.40, 0.55, 0.70}) {
      const PmfWindow win = pmf_window(spec, t, -60, 30, opt);
      char name[64];
      std::snprintf(name, sizeof(name), "fig3_t%03d.csv", int(t * 100 + 0.5));
      std::ofstream f(dir / name);
      if (!f) throw std::ios_base::failure("cannot write figure data");
      f << "n,probability,truncation_bound\n";
      f.precision(17);
      for (const auto& v : win.values)
        f << v.n << "," << v.probability << "," << v.truncation_bound << "\n";
      char title[32];
      std::snprintf(title, sizeof(title), "t=%.2f", t);
      plots.push_back(std::string("'") + name +
                      "' using 1:2 with linespoints title '" + title + "'");
    }
    write_gnuplot(dir / "fig3.gp", "pmf, alpha=0.6 beta=0.4 Lambda=50 T=100",
                  plots);
  }

  json extra;
  extra["seed"] = seed;
  extra["figures"] = {"fig1", "fig2", "fig3"};
  write_manifest(dir, extra, argc, argv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized space-time fractional Skellam process toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");

  // simulate
  SpecFlags sim_flags;
  double sim_tmax = 10.0, sim_h = 0.01, sim_res = 0.0;
  std::size_t sim_paths = 1;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "out";
  CLI::App* sim = app.add_subcommand("simulate", "simulate sample paths");
  sim->set_help_flag("--help", "print help");  // frees --h for the grid step
  sim_flags.attach(sim);
  sim->add_option("--t-max", sim_tmax, "horizon");
  sim->add_option("--h", sim_h, "grid step");
  sim->add_option("--n-paths", sim_paths, "number of paths");
  sim->add_option("--resolution", sim_res,
                  "inverse-stable stage resolution (default: grid step)");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "output directory");

  // pmf
  SpecFlags pmf_flags;
  double pmf_t = 1.0, pmf_tol = 1e-10;
  long long pmf_nmin = -20, pmf_nmax = 20;
  std::string pmf_method = "theorem31", pmf_out = "pmf.csv";
  CLI::App* pmf = app.add_subcommand("pmf", "tabulate the pmf");
  pmf_flags.attach(pmf);
  pmf->add_option("--t", pmf_t, "time");
  pmf->add_option("--n-min", pmf_nmin, "lowest state");
  pmf->add_option("--n-max", pmf_nmax, "highest state");
  pmf->add_option("--method", pmf_method, "theorem31|remark32")
      ->check(CLI::IsMember({"theorem31", "remark32"}));
  pmf->add_option("--tol", pmf_tol, "per-state truncation target");
  pmf->add_option("--out", pmf_out, "output csv");

  // pgf
  SpecFlags pgf_flags;
  double pgf_t = 1.0;
  std::vector<double> pgf_u = {0.5, 0.8, 1.0};
  std::string pgf_out = "pgf.csv";
  CLI::App* pgf = app.add_subcommand("pgf", "probability generating function");
  pgf_flags.attach(pgf);
  pgf->add_option("--t", pgf_t, "time");
  pgf->add_option("--u", pgf_u, "evaluation points in (0,1]")->delimiter(',');
  pgf->add_option("--out", pgf_out, "output csv");

  // moments
  SpecFlags mom_flags;
  double mom_t = 1.0, mom_s = 0.0;
  std::string mom_out;
  CLI::App* mom = app.add_subcommand("moments", "mean/variance (beta = 1)");
  mom_flags.attach(mom);
  mom->add_option("--t", mom_t, "time");
  mom->add_option("--s", mom_s, "second time for covariance (alpha = 1)");
  mom->add_option("--out", mom_out, "output json (default stdout)");

  // tails
  SpecFlags tail_flags;
  double tail_t = 1.0;
  std::vector<double> tail_x = {50, 100, 200};
  std::string tail_out = "tails.csv";
  CLI::App* tails = app.add_subcommand("tails", "tail asymptote and bound");
  tail_flags.attach(tails);
  tails->add_option("--t", tail_t, "time");
  tails->add_option("--x", tail_x, "thresholds")->delimiter(',');
  tails->add_option("--out", tail_out, "output csv");

  // validate
  std::string val_config, val_out;
  std::uint64_t val_seed = 0;
  CLI::App* val = app.add_subcommand("validate", "run a validation config");
  val->add_option("--config", val_config, "experiment config file")->required();
  CLI::Option* seed_opt = val->add_option("--seed", val_seed, "seed override");
  val->add_option("--out", val_out, "report output directory");

  // figures
  std::string fig_out = "figures";
  std::uint64_t fig_seed = 7;
  CLI::App* figs = app.add_subcommand("figures", "emit plot-ready figure data");
  figs->add_option("--out", fig_out, "output directory");
  figs->add_option("--seed", fig_seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the diagnostic
    return kExitUsage;
  }

  try {
    if (*sim)
      return cmd_simulate(sim_flags, sim_tmax, sim_h, sim_paths, sim_res,
                          sim_seed, sim_out, argc, argv);
    if (*pmf)
      return cmd_pmf(pmf_flags, pmf_t, pmf_nmin, pmf_nmax, pmf_method, pmf_out,
                     pmf_tol, argc, argv);
    if (*pgf) return cmd_pgf(pgf_flags, pgf_t, pgf_u, pgf_out);
    if (*mom) return cmd_moments(mom_flags, mom_t, mom_s, mom_out);
    if (*tails) return cmd_tails(tail_flags, tail_t, tail_x, tail_out);
    if (*val)
      return cmd_validate(val_config, val_seed, seed_opt->count() > 0, val_out,
                          argc, argv);
    if (*figs) return cmd_figures(fig_out, fig_seed, argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
