#include "fracsource/observe.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fracsource::observe {
namespace {

constexpr double kSnap = 1e-9;

std::size_t snap(double v, double step, std::size_t last) {
  const double s = std::round(v / step);
  if (s < 0.0 || s > static_cast<double>(last))
    throw std::invalid_argument("observation window outside the grid");
  return static_cast<std::size_t>(s);
}

// Trapezoid weights on nodes lo..hi of a uniform grid, restricted to the
// selected [first, last]; a missing endpoint value is linearly extrapolated.
std::vector<double> window_weights(std::size_t lo, std::size_t hi, std::size_t first,
                                   std::size_t last, double h) {
  const std::size_t n = last - first + 1;
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = static_cast<double>(hi - lo) * h;
    if (w[0] == 0.0) w[0] = h;
    return w;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  // Extra cell [lo, first]: h/2 (p_lo + p_first), p_lo = 2 p_first - p_{first+1}.
  for (std::size_t c = lo; c < first; ++c) {
    w[0] += 1.5 * h;
    w[1] -= 0.5 * h;
  }
  for (std::size_t c = last; c < hi; ++c) {
    w[n - 1] += 1.5 * h;
    w[n - 2] -= 0.5 * h;
  }
  return w;
}

}  // namespace

void ObservationWindow::validate() const {
  if (!(t1 > 0.0 && t1 < t_end))
    throw std::invalid_argument("ObservationWindow: need 0 < T1 < T");
}

SubGrid make_subgrid(const ObservationWindow& w, const spectral::SpaceGrid& sgrid,
                     const mlf::TimeGrid& tgrid) {
  w.validate();
  if (w.t_end > tgrid.final_time() * (1.0 + kSnap))
    throw std::invalid_argument("ObservationWindow: T beyond the time grid");
  SubGrid g;

  const std::size_t xl = snap(w.omega.left, sgrid.step(), sgrid.size() - 1);
  const std::size_t xr = snap(w.omega.right, sgrid.step(), sgrid.size() - 1);
  const std::size_t x_last = (xr == sgrid.size() - 1) ? xr : xr - 1;
  if (xr <= xl) throw std::invalid_argument("ObservationWindow: omega selects no space node");
  for (std::size_t i = xl; i <= x_last; ++i) g.space_index.push_back(i);
  g.space_weight = window_weights(xl, xr, xl, x_last, sgrid.step());

  const std::size_t tl = snap(w.t1, tgrid.step(), tgrid.size() - 1);
  const std::size_t tr = snap(w.t_end, tgrid.step(), tgrid.size() - 1);
  if (tr <= tl) throw std::invalid_argument("ObservationWindow: (T1, T) selects no time node");
  for (std::size_t j = tl + 1; j <= tr; ++j) g.time_index.push_back(j);
  g.time_weight = window_weights(tl, tr, tl + 1, tr, tgrid.step());
  return g;
}

ObservationData restrict_field(const SpaceTimeField& u, const ObservationWindow& w) {
  ObservationData d;
  d.window = w;
  d.grid = make_subgrid(w, u.sgrid, u.tgrid);
  const auto rows = static_cast<Eigen::Index>(d.grid.rows());
  const auto cols = static_cast<Eigen::Index>(d.grid.cols());
  d.samples.resize(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      d.samples(r, c) = u.values(static_cast<Eigen::Index>(d.grid.space_index[static_cast<std::size_t>(r)]),
                                 static_cast<Eigen::Index>(d.grid.time_index[static_cast<std::size_t>(c)]));
  for (auto i : d.grid.space_index) d.x.push_back(u.sgrid.node(i));
  for (auto j : d.grid.time_index) d.t.push_back(u.tgrid.node(j));
  return d;
}

ObservationData add_noise(const ObservationData& d, double epsilon, std::uint64_t seed,
                          NoiseModel model) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("add_noise: epsilon must be finite and non-negative");
  if (d.epsilon != 0.0 || d.delta != 0.0)
    throw std::invalid_argument("add_noise: data already carries noise");
  ObservationData out = d;
  out.epsilon = epsilon;
  out.seed = seed;
  out.model = model;
  if (epsilon == 0.0) return out;

  std::mt19937_64 gen(seed);
  Eigen::MatrixXd perturbation(d.samples.rows(), d.samples.cols());
  for (Eigen::Index c = 0; c < d.samples.cols(); ++c) {
    for (Eigen::Index r = 0; r < d.samples.rows(); ++r) {
      const double unit = (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53;
      const double rnd = 2.0 * unit - 1.0;
      const double factor = model == NoiseModel::literal ? 2.0 * rnd - 1.0 : rnd;
      perturbation(r, c) = epsilon * d.samples(r, c) * factor;
    }
  }
  out.samples = d.samples + perturbation;
  out.delta = st_norm(perturbation, d.grid);
  return out;
}

double st_inner(const Eigen::MatrixXd& g, const Eigen::MatrixXd& h, const SubGrid& grid) {
  const auto rows = static_cast<Eigen::Index>(grid.rows());
  const auto cols = static_cast<Eigen::Index>(grid.cols());
  if (rows == 0 || cols == 0) throw std::invalid_argument("st_inner: empty window");
  if (g.rows() != rows || g.cols() != cols || h.rows() != rows || h.cols() != cols)
    throw std::invalid_argument("st_inner: samples do not match the window");
  double acc = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    double col = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r)
      col += grid.space_weight[static_cast<std::size_t>(r)] * g(r, c) * h(r, c);
    acc += grid.time_weight[static_cast<std::size_t>(c)] * col;
  }
  return acc;
}

double st_norm(const Eigen::MatrixXd& g, const SubGrid& grid) {
  return std::sqrt(st_inner(g, g, grid));
}

Eigen::VectorXd sample_weights(const SubGrid& grid) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.rows() * grid.cols()));
  Eigen::Index k = 0;
  for (double wt : grid.time_weight)
    for (double wx : grid.space_weight) w(k++) = wx * wt;
  return w;
}

}  // namespace fracsource::observe
