#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fracskellam/process_spec.hpp"
#include "fracskellam/rng.hpp"
#include "fracskellam/time_grid.hpp"

namespace fracskellam {

/// Exact tabulation of integer samples.
struct EmpiricalPmf {
  std::map<long long, std::size_t> counts;
  std::size_t n = 0;

  double prob(long long state) const {
    auto it = counts.find(state);
    return it == counts.end() ? 0.0 : double(it->second) / double(n);
  }
  double standard_error(long long state) const;
  std::map<long long, double> table() const;
};

EmpiricalPmf empirical_pmf(const std::vector<long long>& samples);

/// 1/2 sum |p - q| with missing states treated as 0.
double total_variation(const std::map<long long, double>& p,
                       const std::map<long long, double>& q);

/// Collapse all states with |n| > w into two overflow buckets at +-(w+1).
std::map<long long, double> lump_tails(const std::map<long long, double>& p,
                                       long long w);

double two_sample_ks(std::vector<double> a, std::vector<double> b);

/// One validation check outcome. `pass` holds iff the statistic met its
/// threshold; reports are reproducible from (seed, config).
struct ValidationReport {
  std::string check;
  std::string label;
  std::string statistic_name;  // tv | ks | chi2 | z | abs_err | ratio ...
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  std::string detail;
};

/// Monte-Carlo accumulator filled per replication. Replications are split
/// into fixed blocks, each with its own derived stream, and reduced in
/// block order: results are independent of the worker count.
struct McBlock {
  std::map<long long, long long> counts;
  double sum = 0.0;
  double sum2 = 0.0;
  std::vector<double> values;
  bool keep_values = false;

  void add_count(long long state) { ++counts[state]; }
  void add_value(double v) {
    sum += v;
    sum2 += v * v;
    if (keep_values) values.push_back(v);
  }
};

int resolve_threads(int requested);  // env FRACSKELLAM_THREADS caps

McBlock mc_run(std::size_t reps, std::uint64_t seed, std::uint64_t stream0,
               int threads, bool keep_values,
               const std::function<void(RngStream&, McBlock&)>& replicate);

/// Compensated-drift martingale check for the tempered family: couples the
/// process to its own subordinator path and z-tests
/// E[X(t) - sum_j j (l_j - m_j) D(t)] = 0 at each grid time.
ValidationReport martingale_drift_check(const ProcessSpec& spec,
                                        const TimeGrid& grid, std::size_t reps,
                                        std::uint64_t seed, int threads = 0);

/// Two-sample KS between X(t)/t^{alpha/beta} at large t and direct draws of
/// (Y_alpha(1))^{1/beta} D_beta(1) sum_j j (l_j - m_j).
ValidationReport limit_distribution_check(const ProcessSpec& spec,
                                          double t_large, std::size_t reps,
                                          std::uint64_t seed, double threshold,
                                          int threads = 0);

/// Config-driven experiment runner.
struct CheckConfig {
  std::string name;
  std::string label;
  std::map<std::string, std::string> params;
  int line = 0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output_dir;
  std::vector<CheckConfig> checks;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_file(const std::string& path);
};

/// Parse/validation failure with the offending line number.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::vector<ValidationReport> run_experiment(const ExperimentConfig& config);

std::string report_json(const ValidationReport& r);
std::string report_table(const std::vector<ValidationReport>& reports);

}  // namespace fracskellam
