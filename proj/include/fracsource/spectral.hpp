#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fracsource::spectral {

/// Uniform grid on [0, 1] with an odd node count (composite Simpson).
class SpaceGrid {
 public:
  explicit SpaceGrid(std::size_t node_count = 201);

  std::size_t size() const { return count_; }
  double step() const { return step_; }
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

 private:
  std::size_t count_;
  double step_;
};

/// Open interval (left, right) inside [0, 1].
struct Subdomain {
  double left = 0.0;
  double right = 1.0;

  Subdomain() = default;
  Subdomain(double l, double r);

  double length() const { return right - left; }
  bool contains(double x) const { return x > left && x < right; }
};

/// Union of at most two disjoint intervals, e.g. the complement of an
/// interior observation interval.
class SubdomainUnion {
 public:
  SubdomainUnion(Subdomain single);  // NOLINT: implicit by intent
  SubdomainUnion(Subdomain first, Subdomain second);

  /// [0, 1] minus the closure of `hole`; one or two pieces.
  static SubdomainUnion complement(const Subdomain& hole);

  std::span<const Subdomain> pieces() const { return {parts_.data(), count_}; }
  bool contains(double x) const;
  double length() const;

 private:
  std::array<Subdomain, 2> parts_{};
  std::size_t count_ = 0;
};

/// Eigensystem {(lambda_n, phi_n)} of a self-adjoint elliptic operator with
/// the spectral fractional power lambda_n^beta.
class Eigensystem {
 public:
  virtual ~Eigensystem() = default;

  virtual std::size_t mode_count() const = 0;
  virtual double beta() const = 0;
  /// n is 1-based.
  virtual double eigenvalue(std::size_t n) const = 0;
  virtual double eigenfunction(std::size_t n, double x) const = 0;

  /// lambda_n^beta computed as exp(beta log lambda_n).
  double fractional_eigenvalue(std::size_t n) const;
};

/// -d^2/dx^2 on (0, 1) with Dirichlet conditions:
/// lambda_n = (n pi)^2, phi_n(x) = sqrt(2) sin(n pi x).
class DirichletLaplacian final : public Eigensystem {
 public:
  DirichletLaplacian(std::size_t mode_count, double beta);

  std::size_t mode_count() const override { return modes_; }
  double beta() const override { return beta_; }
  double eigenvalue(std::size_t n) const override;
  double eigenfunction(std::size_t n, double x) const override;

 private:
  std::size_t modes_;
  double beta_;
};

/// Composite Simpson weights for the full grid.
std::vector<double> simpson_weights(const SpaceGrid& grid);

/// Coefficients f_n = (f, phi_n), n = 1..mode_count, by composite Simpson.
/// Throws std::invalid_argument when mode_count > size / 4 or on a size
/// mismatch.
std::vector<double> expand(std::span<const double> f, const Eigensystem& es, const SpaceGrid& grid);

/// Samples of sum_n c_n phi_n at the grid nodes.
std::vector<double> synthesize(std::span<const double> coeffs, const Eigensystem& es,
                               const SpaceGrid& grid);

/// Integral of g h over the subdomain. Whole cells use composite Simpson
/// (3/8 rule or trapezoid to close an odd tail); cells cut by an endpoint
/// use the trapezoid rule with linearly interpolated g and h.
double inner_product_on(const SubdomainUnion& sub, std::span<const double> g,
                        std::span<const double> h, const SpaceGrid& grid);

/// L2 norm over a subdomain.
double norm_on(const SubdomainUnion& sub, std::span<const double> g, const SpaceGrid& grid);

}  // namespace fracsource::spectral
