#pragma once

#include "fracsource/config.hpp"
#include "fracsource/invert.hpp"
#include "fracsource/observe.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracsource::experiment {

namespace fs = std::filesystem;

/// One column of the error tables.
struct Case {
  std::string label;
  double alpha;
  double beta;
  double t1;
};

struct ExperimentSpec {
  std::string preset;
  std::vector<Case> cases;
  double final_time = 1.0;
  double t0 = 0.5;  // mu = 1 on (0, t0), 0 afterwards
  spectral::Subdomain omega{0.0, 0.06};
  std::vector<double> epsilons{0.0, 0.001, 0.005, 0.01};
  std::vector<std::uint64_t> seeds{1};
  /// "ftrue1", "ftrue2", or an expression in x.
  std::string f_true = "ftrue1";
  std::size_t space_nodes = 201;
  std::size_t time_nodes = 401;
  std::size_t modes = 40;
  invert::BasisOptions basis;
  invert::LMSettings lm;
  observe::NoiseModel noise = observe::NoiseModel::symmetric;
  fs::path out_dir = "out";

  /// Throws config::ConfigError when a parameter leaves its range.
  void validate() const;
};

/// table1 (f_true = x^4 + x sin(pi x)) or table2 (exp(-pi x^2) + cos(2 pi x)),
/// cases a-d = (0.5, 0.7, 0.1), (0.5, 0.7, 0.3), (0.6, 0.8, 0.1), (0.6, 0.8, 0.3).
/// Throws config::ConfigError for other names.
ExperimentSpec preset(const std::string& name);

/// Applies recognised keys (see README); throws config::ConfigError on an
/// unknown key or malformed value. `preset` is ignored here.
void apply(ExperimentSpec& spec, const config::KeyValues& kv);

/// "ftrue1", "ftrue2" or an expression in x (optionally prefixed "expr:").
std::function<double(double)> source_shape(const std::string& selector);

struct CellResult {
  std::size_t case_index;
  double epsilon;
  std::uint64_t seed;
  double delta;
  double error;
  std::size_t stop_index;
  invert::StopReason reason;
  double final_residual;
  double previous_residual;  // E_{K-1}; E_0 when K = 1
  std::vector<double> f_k;   // on the space grid
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  /// Seed-averaged error, rows = epsilons, columns = cases.
  Eigen::MatrixXd table;
  std::string summary_csv;
};

/// Runs every (case, epsilon, seed) cell, writes
///   <out>/<case>/eps_<e>/seed_<s>/{trace.csv, reconstruction.csv, metadata.txt,
///                                  observation.csv, observation.meta}
///   <out>/summary.csv, <out>/figure_<case>.csv
/// and prints the error table to `log`. Files are skipped when write_files is
/// false.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream& log, bool write_files = true);

/// Forward-only run: u for phi, f (expressions in x) and mu on the default
/// grids, written as a field CSV.
struct ForwardSpec {
  double alpha = 0.5;
  double beta = 0.7;
  double final_time = 1.0;
  std::size_t space_nodes = 201;
  std::size_t time_nodes = 401;
  std::size_t modes = 40;
  std::string phi = "0";
  std::string f = "0";
  /// "window" (1 on (0, t0)), or an expression in t.
  std::string mu = "window";
  double t0 = 0.5;
  fs::path out_dir = "out";
};

ForwardSpec forward_spec(const config::KeyValues& kv);
/// Returns the path of the written field CSV.
fs::path run_forward(const ForwardSpec& spec);

}  // namespace fracsource::experiment
