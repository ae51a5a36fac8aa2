#pragma once

#include "fracsource/forward.hpp"
#include "fracsource/observe.hpp"
#include "fracsource/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsource::invert {

using observe::ObservationData;
using observe::ObservationWindow;
using spectral::SubdomainUnion;

/// Finite-dimensional space {chi_n} on the reconstruction support.
class BasisSet {
 public:
  virtual ~BasisSet() = default;

  virtual std::size_t size() const = 0;
  virtual const SubdomainUnion& support() const = 0;
  /// chi_n(x), n is 0-based; zero outside the closure of the support.
  virtual double value(std::size_t n, double x) const = 0;
  /// Exact (chi_i, chi_j) over the support.
  virtual Eigen::MatrixXd gram() const = 0;

  /// sum_n a_n chi_n at the grid nodes.
  std::vector<double> synthesize(const Eigen::VectorXd& a, const spectral::SpaceGrid& grid) const;
};

/// Behaviour of a hat basis at the end of a support interval: `clamped`
/// forces the reconstruction to zero there, `free` adds a half hat.
enum class EndCondition : std::uint8_t { clamped, free };

/// Piecewise-linear hat functions on a uniform partition of each support
/// interval. interior_nodes are distributed over the intervals in proportion
/// to their length (at least one each). interface_end applies to ends shared
/// with omega, boundary_end to ends on x = 0 or x = 1.
class HatBasis final : public BasisSet {
 public:
  struct Options {
    std::size_t interior_nodes = 20;
    EndCondition interface_end = EndCondition::clamped;
    EndCondition boundary_end = EndCondition::clamped;
  };

  HatBasis(const SubdomainUnion& support, Options opt);

  std::size_t size() const override { return hats_.size(); }
  const SubdomainUnion& support() const override { return support_; }
  /// Half hats take the value 1 at their node.
  double value(std::size_t n, double x) const override;
  Eigen::MatrixXd gram() const override;

  const Options& options() const { return opt_; }
  /// Node of chi_n.
  double node(std::size_t n) const { return hats_.at(n).center; }

 private:
  struct Hat {
    double left;
    double center;
    double right;
  };
  SubdomainUnion support_;
  Options opt_;
  std::vector<Hat> hats_;
};

/// Legendre polynomials P_0..P_{d-1} mapped onto each support interval,
/// with the degrees d split over the intervals like HatBasis splits nodes.
class LegendreBasis final : public BasisSet {
 public:
  LegendreBasis(const SubdomainUnion& support, std::size_t count);

  std::size_t size() const override { return terms_.size(); }
  const SubdomainUnion& support() const override { return support_; }
  double value(std::size_t n, double x) const override;
  Eigen::MatrixXd gram() const override;

 private:
  struct Term {
    double left;
    double right;
    unsigned degree;
  };
  SubdomainUnion support_;
  std::vector<Term> terms_;
};

enum class BasisKind : std::uint8_t { hat, legendre };

struct BasisOptions {
  BasisKind kind = BasisKind::legendre;
  std::size_t count = 5;  // Legendre terms, or hat interior nodes
  EndCondition interface_end = EndCondition::clamped;
  EndCondition boundary_end = EndCondition::clamped;
};

std::shared_ptr<const BasisSet> make_basis(const SubdomainUnion& support, const BasisOptions& opt);

/// The map a -> u(.,.; sum a_n chi_n)|_{omega x (T1,T)} with phi = 0.
class ForwardMap {
 public:
  ForwardMap(forward::ProblemConfig cfg, forward::TemporalSource mu, ObservationWindow window,
             std::shared_ptr<const BasisSet> basis);

  const forward::ProblemConfig& config() const { return solver_.config(); }
  const BasisSet& basis() const { return *basis_; }
  const ObservationWindow& window() const { return window_; }
  const observe::SubGrid& subgrid() const { return subgrid_; }

  /// Noiseless observation for coefficients a.
  ObservationData operator()(const Eigen::VectorXd& a) const;

  /// Noiseless observation for a source shape sampled on the space grid.
  ObservationData observe_source(std::span<const double> f) const;

  /// Forward differences (F(a + tau e_n) - F(a)) / tau, one column per basis
  /// function, samples flattened column-major. Throws std::invalid_argument
  /// for tau <= 0 and std::runtime_error on a non-finite column.
  Eigen::MatrixXd jacobian_fd(const Eigen::VectorXd& a, double tau) const;

 private:
  forward::SpectralSolver solver_;
  ObservationWindow window_;
  std::shared_ptr<const BasisSet> basis_;
  observe::SubGrid subgrid_;
};

struct LMSettings {
  double gamma0 = 0.8;
  double k0 = 4.0;
  double eta = 1.01;
  std::size_t max_iterations = 40;
  double fd_step = 1e-3;
  bool recompute_jacobian = false;
  /// Abort once E_k exceeds this multiple of E_0.
  double divergence_factor = 10.0;

  void validate() const;
};

/// rho_k = 1 / (1 + exp(gamma0 (k - k0))).
double rho_schedule(std::size_t k, const LMSettings& s);

/// Thrown when Q + rho G cannot be factorized.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Solves (Q + rho G) da = W by Cholesky.
Eigen::VectorXd lm_solve(const Eigen::MatrixXd& q, const Eigen::MatrixXd& gram,
                         const Eigen::VectorXd& w, double rho);

/// Normal-equation step for Jacobian columns J, residual r = u^delta - F(a)
/// (both flattened) and per-sample quadrature weights.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& weights, const Eigen::MatrixXd& gram, double rho);

enum class StopReason : std::uint8_t { discrepancy, iteration_cap };

/// E <= eta delta; never met for delta = 0.
bool discrepancy_met(double residual, double delta, double eta);

/// First 1-based K with residuals[K-1] <= eta delta, or 0 if none.
std::size_t discrepancy_index(std::span<const double> residuals, double delta, double eta);

struct IterationRecord {
  std::size_t k;
  Eigen::VectorXd a;
  double residual;
  double rho;
  double error = std::numeric_limits<double>::quiet_NaN();
};

struct InversionTrace {
  double delta = 0.0;
  double initial_residual = 0.0;
  double initial_error = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd initial_a;
  std::vector<IterationRecord> records;  // k = 1..K
  std::size_t stop_index = 0;            // K
  StopReason reason = StopReason::iteration_cap;
};

/// Thrown by run when E_k > divergence_factor * E_0; carries the trace so far.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, InversionTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const InversionTrace& trace() const { return trace_; }

 private:
  InversionTrace trace_;
};

struct InversionResult {
  Eigen::VectorXd a;
  InversionTrace trace;
};

/// Levenberg-Marquardt iteration a^{k+1} = a^k + da^k with rho_{k+1} from the
/// schedule. Stops at the first K with E_K <= eta delta when delta > 0, else
/// after max_iterations. If f_true is given (grid samples), each record also
/// carries the relative error.
InversionResult run(const ForwardMap& fm, const ObservationData& data, const LMSettings& s,
                    const Eigen::VectorXd& a0, const std::vector<double>* f_true = nullptr);

/// ||f - f_true|| / ||f_true|| over the support. Throws std::invalid_argument
/// when f_true vanishes there.
double relative_error(std::span<const double> f, std::span<const double> f_true,
                      const SubdomainUnion& support, const spectral::SpaceGrid& grid);

double relative_error(const BasisSet& basis, const Eigen::VectorXd& a,
                      std::span<const double> f_true, const spectral::SpaceGrid& grid);

}  // namespace fracsource::invert
