#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracsource::mlf {

/// Uniform grid 0 = t_0 < t_1 < ... < t_{J-1} = T.
class TimeGrid {
 public:
  TimeGrid(double final_time, std::size_t node_count);

  double final_time() const { return final_time_; }
  double step() const { return step_; }
  std::size_t size() const { return count_; }
  double node(std::size_t j) const;
  std::vector<double> nodes() const;

  /// Same span with the step halved.
  TimeGrid refined() const { return TimeGrid(final_time_, 2 * count_ - 1); }

 private:
  double final_time_;
  std::size_t count_;
  double step_;
};

/// Riemann-Liouville integral I^alpha g at every node of a uniform grid, by
/// product integration: g is replaced by its piecewise-linear interpolant and
/// integrated exactly against tau^{alpha-1} / Gamma(alpha). Node 0 maps to 0.
///
/// Throws std::domain_error if alpha is outside (0, 1], and
/// std::invalid_argument on a size mismatch.
std::vector<double> rl_integral(double alpha, const TimeGrid& grid, std::span<const double> g);

}  // namespace fracsource::mlf
