#pragma once

#include "fracsource/forward.hpp"
#include "fracsource/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace fracsource::observe {

using forward::SpaceTimeField;
using spectral::Subdomain;

/// omega x (t1, t_end).
struct ObservationWindow {
  Subdomain omega{0.0, 0.06};
  double t1 = 0.1;
  double t_end = 1.0;

  /// Throws std::invalid_argument unless 0 < t1 < t_end.
  void validate() const;
};

/// Multiplicative noise u (1 + eps r) with r ~ U(-1, 1), or the formula as
/// printed, u (1 + eps (2 r - 1)).
enum class NoiseModel : std::uint8_t { symmetric, literal };

/// Node selection and quadrature weights of a window on given grids.
///
/// Space nodes are taken from [left, right), plus x = 1 when right = 1; time
/// nodes from (t1, t_end]. Endpoints are snapped to the nearest grid node.
/// Weights are the composite trapezoid rule on the snapped closed interval,
/// where the value at an excluded endpoint is linearly extrapolated from the
/// two nearest samples. The weights are positive and sum to the interval
/// length.
struct SubGrid {
  std::vector<std::size_t> space_index;
  std::vector<std::size_t> time_index;
  std::vector<double> space_weight;
  std::vector<double> time_weight;

  std::size_t rows() const { return space_index.size(); }
  std::size_t cols() const { return time_index.size(); }
};

/// Throws std::invalid_argument if the window selects no node in either
/// dimension or lies outside the grids.
SubGrid make_subgrid(const ObservationWindow& w, const spectral::SpaceGrid& sgrid,
                     const mlf::TimeGrid& tgrid);

struct ObservationData {
  ObservationWindow window;
  SubGrid grid;
  std::vector<double> x;  // node coordinates, one per row
  std::vector<double> t;  // one per column
  Eigen::MatrixXd samples;
  double delta = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  NoiseModel model = NoiseModel::symmetric;
};

/// Noiseless samples of u on the window.
ObservationData restrict_field(const SpaceTimeField& u, const ObservationWindow& w);

/// Adds noise sample by sample, time-major then space, from mt19937_64
/// seeded with `seed`; r = 2 U - 1 with U = (bits >> 11 + 1/2) 2^-53.
/// delta is the st_norm of the perturbation. Throws std::invalid_argument
/// for negative or non-finite epsilon, or if d already carries noise.
ObservationData add_noise(const ObservationData& d, double epsilon, std::uint64_t seed,
                          NoiseModel model = NoiseModel::symmetric);

/// Weighted inner product over the window; g and h are shaped like the
/// sub-grid.
double st_inner(const Eigen::MatrixXd& g, const Eigen::MatrixXd& h, const SubGrid& grid);

/// L2(omega x (t1, t_end)) norm.
double st_norm(const Eigen::MatrixXd& g, const SubGrid& grid);
inline double st_norm(const ObservationData& d) { return st_norm(d.samples, d.grid); }

/// Per-sample weights w_x w_t, column-major like Eigen storage.
Eigen::VectorXd sample_weights(const SubGrid& grid);

}  // namespace fracsource::observe
