#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drmdp/clt.hpp"
#include "drmdp/inventory.hpp"
#include "drmdp/mvsa.hpp"
#include "drmdp/serialize.hpp"

namespace drmdp::experiments {

enum class Kind { ApproxError, Convergence, Clt, QstarTable };

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);

/// A state-action coordinate. `level` addresses inventory levels and is resolved against the
/// builtin inventory model; otherwise `state` is a raw state index.
struct Coordinate {
  std::optional<int> level;
  Index state = 0;
  Index action = 0;
};

struct ExperimentConfig {
  Kind kind = Kind::QstarTable;
  /// Builtin inventory model unless mdp_path is set.
  inventory::InventoryParams inventory;
  std::optional<std::filesystem::path> mdp_path;
  std::vector<double> gammas{0.7};
  std::vector<double> deltas{0.1};
  double epsilon = 1e-6;
  mvsa::StepSchedule schedule = mvsa::StepSchedule::standard();
  long steps = 20000;
  int seed_count = 20;
  std::uint64_t root_seed = 1;
  /// Explicit run seeds; when empty, seeds are root_seed, root_seed + 1, ...
  std::vector<std::uint64_t> seeds;
  int checkpoint_count = 60;
  std::vector<Coordinate> coordinates{{0, 0, 2}, {0, 0, 3}};
  double level = 0.95;
  double tie_tol = 1e-8;
  double vi_tol = 1e-10;
  long vi_max_iter = 100000;
  double burn_in_fraction = 0.1;
  unsigned threads = 0;

  /// Defaults for each experiment kind (the benchmark settings).
  static ExperimentConfig defaults(Kind kind);
  /// Overlay a JSON document onto the kind's defaults.
  static ExperimentConfig from_json(Kind kind, const Json& j);
  Json to_json() const;

  void validate() const;
  std::vector<std::uint64_t> run_seeds() const;
  Mdp load_mdp(double gamma) const;
  Index resolve(const Coordinate& c, const Mdp& mdp) const;
  std::string label(const Coordinate& c) const;
};

/// Uniform grid of `count` points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int count);

/// Linear-interpolation quantile (the "type 7" definition) of unsorted data.
double quantile(std::vector<double> data, double q);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ApproxErrorRow {
  double gamma;
  double delta;
  double error;  // ||U* - Q*||_inf
  double lipschitz;
  bool certified;
  bool converged;
  double bound;  // gamma delta span(U*) / (1 - gamma)
};

struct ConvergenceResult {
  std::vector<mvsa::RunRecord> runs;
  std::vector<long> grid;
  std::vector<double> mean_error;
  std::vector<double> q01;
  std::vector<double> q99;
  double slope = 0.0;
  long burn_in = 0;
};

struct CltResult {
  clt::CltArtifacts artifacts;
  std::vector<mvsa::RunRecord> runs;
  std::vector<Index> coordinates;
  std::vector<std::string> labels;
  Matrix<double> scaled;  // runs x coordinates, sqrt(n/a) (U_n - U*_eps)
  Matrix<double> scaled_fast;
  double coverage = 0.0;
  double threshold = 0.0;
  Vector<double> sample_variance;
  Vector<double> theory_variance;
  Vector<double> sample_mean;
  Vector<double> fast_sample_variance;
  Vector<double> fast_theory_variance;
};

struct QstarResult {
  Mdp mdp;
  QFunction<double> u_star;
  GreedyPolicy<double> policy;
  StateValue<double> v_star;
  FixedPointReport<double> report;
  std::vector<int> state_labels;
};

std::vector<ApproxErrorRow> approx_error(const ExperimentConfig& cfg);
ConvergenceResult convergence(const ExperimentConfig& cfg);
CltResult clt_experiment(const ExperimentConfig& cfg);
QstarResult qstar_table(const ExperimentConfig& cfg);

/// Compute and write the experiment's files into `out`; returns the files written.
std::vector<std::filesystem::path> run_approx_error(const ExperimentConfig& cfg,
                                                    const std::filesystem::path& out);
std::vector<std::filesystem::path> run_convergence(const ExperimentConfig& cfg,
                                                   const std::filesystem::path& out);
std::vector<std::filesystem::path> run_clt(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out);
std::vector<std::filesystem::path> run_qstar_table(const ExperimentConfig& cfg,
                                                   const std::filesystem::path& out);

std::vector<std::filesystem::path> run(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out);

/// Warnings about theoretical conditions the configuration violates.
std::vector<std::string> config_warnings(const ExperimentConfig& cfg);

}  // namespace drmdp::experiments
