#include "fracsource/fractional_integral.hpp"

#include <cmath>
#include <stdexcept>

namespace fracsource::mlf {

TimeGrid::TimeGrid(double final_time, std::size_t node_count)
    : final_time_(final_time), count_(node_count) {
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw std::invalid_argument("TimeGrid: final time must be positive and finite");
  if (node_count < 2) throw std::invalid_argument("TimeGrid: need at least two nodes");
  step_ = final_time / static_cast<double>(node_count - 1);
}

double TimeGrid::node(std::size_t j) const {
  if (j + 1 == count_) return final_time_;
  return step_ * static_cast<double>(j);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(count_);
  for (std::size_t j = 0; j < count_; ++j) out[j] = node(j);
  return out;
}

std::vector<double> rl_integral(double alpha, const TimeGrid& grid, std::span<const double> g) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("rl_integral: alpha must lie in (0, 1]");
  if (g.size() != grid.size())
    throw std::invalid_argument("rl_integral: samples do not match the time grid");

  const std::size_t n = grid.size();
  // m^{alpha+1} for m = 0..n, shared by all weights.
  std::vector<double> pw(n + 1);
  for (std::size_t m = 0; m <= n; ++m) pw[m] = std::pow(static_cast<double>(m), alpha + 1.0);

  // Weights of the piecewise-linear product rule (fractional trapezoid):
  //   w_{0,j} = (j-1)^{a+1} - (j-1-a) j^a
  //   w_{i,j} = (j-i+1)^{a+1} - 2 (j-i)^{a+1} + (j-i-1)^{a+1},  0 < i < j
  //   w_{j,j} = 1
  // scaled by h^a / Gamma(a+2).
  std::vector<double> interior(n + 1, 0.0);
  for (std::size_t m = 1; m < n; ++m) interior[m] = pw[m + 1] - 2.0 * pw[m] + pw[m - 1];

  const double scale = std::pow(grid.step(), alpha) / std::tgamma(alpha + 2.0);
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    const double jd = static_cast<double>(j);
    double acc = (pw[j - 1] - (jd - 1.0 - alpha) * std::pow(jd, alpha)) * g[0];
    for (std::size_t i = 1; i < j; ++i) acc += interior[j - i] * g[i];
    acc += g[j];
    out[j] = scale * acc;
  }
  return out;
}

}  // namespace fracsource::mlf
