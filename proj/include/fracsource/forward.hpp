#pragma once

#include "fracsource/fractional_integral.hpp"
#include "fracsource/mittag_leffler.hpp"
#include "fracsource/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace fracsource::forward {

using mlf::TimeGrid;
using spectral::Eigensystem;
using spectral::SpaceGrid;

/// Physical and discrete setup of
///   d_t^alpha (u - phi) + A^beta u = f(x) mu(t)  in (0,1) x (0,T),
///   u = 0 on the boundary.
/// beta is carried by the eigensystem.
struct ProblemConfig {
  double alpha = 0.5;
  std::shared_ptr<const Eigensystem> es;
  TimeGrid tgrid{1.0, 401};
  SpaceGrid sgrid{201};
  mlf::EvalOptions ml_options{};

  double final_time() const { return tgrid.final_time(); }
  double beta() const { return es->beta(); }

  /// Throws std::invalid_argument when alpha or beta leave (0, 1] or the
  /// eigensystem is missing.
  void validate() const;
};

/// Default setup: Dirichlet Laplacian with `modes` modes, uniform grids.
ProblemConfig make_config(double alpha, double beta, double final_time = 1.0,
                          std::size_t time_nodes = 401, std::size_t space_nodes = 201,
                          std::size_t modes = 40);

/// Temporal factor mu(t) of the source.
class TemporalSource {
 public:
  enum class Kind : std::uint8_t { constant_window, polynomial, power_law, sampled };

  /// mu = level on (0, cutoff), 0 on [cutoff, T].
  static TemporalSource constant_window(double cutoff, double level = 1.0);
  /// mu = sum_k c_k t^k.
  static TemporalSource polynomial(std::vector<double> coeffs);
  /// mu = coeff t^exponent, exponent > -1.
  static TemporalSource power_law(double coeff, double exponent);
  /// Samples at the nodes of `grid`, linearly interpolated in between.
  static TemporalSource sampled(const TimeGrid& grid, std::vector<double> values);
  /// mu = 0.
  static TemporalSource zero() { return polynomial({}); }

  Kind kind() const { return kind_; }
  double cutoff() const { return cutoff_; }

  double value(double t) const;

  /// mu at the midpoints of the cells of `grid`. Throws std::invalid_argument
  /// if mu is not defined on the grid span or a value is not finite.
  std::vector<double> cell_midpoint_values(const TimeGrid& grid) const;

  /// theta solving I^{1-alpha} theta = mu, when it is a power law
  /// theta = coeff t^exponent (available for the power_law kind).
  struct PowerLaw {
    double coeff;
    double exponent;
  };
  std::optional<PowerLaw> duhamel_kernel(double alpha) const;

 private:
  Kind kind_ = Kind::polynomial;
  double cutoff_ = 0.0;
  double level_ = 0.0;
  double exponent_ = 0.0;
  std::vector<double> coeffs_;
  std::vector<double> samples_;
  double sample_span_ = 0.0;
};

/// u(x_i, t_j) on the full space-time grid; rows are space nodes, columns are
/// time nodes.
struct SpaceTimeField {
  Eigen::MatrixXd values;
  SpaceGrid sgrid;
  TimeGrid tgrid;

  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

/// Spectral solver with the per-mode temporal responses cached for one
/// (config, mu) pair:
///   relax_n(t)  = E_{alpha,1}(-lambda_n^beta t^alpha)
///   source_n(t) = int_0^t mu(tau) (t - tau)^{alpha-1} E_{alpha,alpha}(-lambda_n^beta (t - tau)^alpha) dtau
/// source_n uses mu constant on each time cell (midpoint value) and the exact
/// cell weights from ml_decay_integral.
class SpectralSolver {
 public:
  SpectralSolver(ProblemConfig cfg, TemporalSource mu);

  const ProblemConfig& config() const { return cfg_; }
  const TemporalSource& mu() const { return mu_; }

  /// Relaxation and source responses; rows are modes, columns time nodes.
  const Eigen::MatrixXd& relax_response() const { return relax_; }
  const Eigen::MatrixXd& source_response() const { return source_; }
  /// phi_n(x_i); rows are space nodes, columns modes.
  const Eigen::MatrixXd& mode_samples() const { return modes_; }

  /// Full solution for initial value phi and source shape f sampled on the
  /// space grid. Throws std::invalid_argument on size mismatch and
  /// std::runtime_error on a non-finite result.
  SpaceTimeField solve(std::span<const double> phi, std::span<const double> f) const;

  /// Same solution from precomputed coefficients (phi_n), (f_n).
  SpaceTimeField solve_coefficients(const Eigen::VectorXd& phi_coeffs,
                                    const Eigen::VectorXd& f_coeffs) const;

 private:
  ProblemConfig cfg_;
  TemporalSource mu_;
  Eigen::MatrixXd relax_;
  Eigen::MatrixXd source_;
  Eigen::MatrixXd modes_;
};

/// One-shot convenience wrapper around SpectralSolver.
SpaceTimeField solve(const ProblemConfig& cfg, std::span<const double> phi,
                     std::span<const double> f, const TemporalSource& mu);

/// Relative L2(Omega x (0,T)) discrepancy between the direct solution with
/// phi = 0 and the Duhamel representation int_0^t theta(t-s) v(s) ds, where v
/// solves the homogeneous problem with v(0) = f and I^{1-alpha} theta = mu.
/// The convolution is integrated mode by mode on an 8x finer time grid.
/// Returns 0 when both sides vanish. Throws std::invalid_argument if theta is
/// not available in closed form for mu.
double duhamel_check(const ProblemConfig& cfg, std::span<const double> f, const TemporalSource& mu);

/// Space-time L2 norm over the full grid (Simpson in x, trapezoid in t).
double field_norm(const Eigen::MatrixXd& values, const SpaceGrid& sgrid, const TimeGrid& tgrid);

}  // namespace fracsource::forward
