#include "fracsource/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracsource::spectral {
namespace {

constexpr double kSnap = 1e-9;

// sin(pi y) with exact zeros at integers, so that phi_n(0) = phi_n(1) = 0.
double sinpi(double y) {
  const double r = y - 2.0 * std::round(0.5 * y);
  if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
  return std::sin(std::numbers::pi * r);
}

double lerp_at(std::span<const double> v, const SpaceGrid& grid, double x) {
  const double s = x / grid.step();
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i + 1 >= grid.size()) return v[grid.size() - 1];
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * v[i] + w * v[i + 1];
}

// Composite rule over whole cells [x_lo, x_hi] of the product p = g h.
double whole_cells(std::span<const double> g, std::span<const double> h, double step,
                   std::size_t lo, std::size_t hi) {
  auto p = [&](std::size_t i) { return g[i] * h[i]; };
  const std::size_t cells = hi - lo;
  if (cells == 0) return 0.0;
  if (cells == 1) return 0.5 * step * (p(lo) + p(hi));
  std::size_t simpson_end = hi;
  double tail = 0.0;
  if (cells % 2 == 1) {
    // Simpson 3/8 on the last three cells.
    simpson_end = hi - 3;
    tail = 3.0 * step / 8.0 * (p(hi - 3) + 3.0 * p(hi - 2) + 3.0 * p(hi - 1) + p(hi));
  }
  double acc = 0.0;
  for (std::size_t i = lo; i + 2 <= simpson_end; i += 2) acc += p(i) + 4.0 * p(i + 1) + p(i + 2);
  return step / 3.0 * acc + tail;
}

double integrate_interval(const Subdomain& s, std::span<const double> g, std::span<const double> h,
                          const SpaceGrid& grid) {
  const double step = grid.step();
  const double first = std::ceil(s.left / step - kSnap);
  const double last = std::floor(s.right / step + kSnap);
  if (first > last) {
    const double ga = lerp_at(g, grid, s.left), ha = lerp_at(h, grid, s.left);
    const double gb = lerp_at(g, grid, s.right), hb = lerp_at(h, grid, s.right);
    return 0.5 * (s.right - s.left) * (ga * ha + gb * hb);
  }
  const auto lo = static_cast<std::size_t>(first);
  const auto hi = std::min(static_cast<std::size_t>(last), grid.size() - 1);
  double total = whole_cells(g, h, step, lo, hi);
  const double x_lo = grid.node(lo);
  if (s.left < x_lo - kSnap * step) {
    const double gv = lerp_at(g, grid, s.left), hv = lerp_at(h, grid, s.left);
    total += 0.5 * (x_lo - s.left) * (gv * hv + g[lo] * h[lo]);
  }
  const double x_hi = grid.node(hi);
  if (s.right > x_hi + kSnap * step) {
    const double gv = lerp_at(g, grid, s.right), hv = lerp_at(h, grid, s.right);
    total += 0.5 * (s.right - x_hi) * (gv * hv + g[hi] * h[hi]);
  }
  return total;
}

}  // namespace

SpaceGrid::SpaceGrid(std::size_t node_count) : count_(node_count) {
  if (node_count < 5 || node_count % 2 == 0)
    throw std::invalid_argument("SpaceGrid: node count must be odd and at least 5");
  step_ = 1.0 / static_cast<double>(node_count - 1);
}

double SpaceGrid::node(std::size_t i) const {
  if (i + 1 == count_) return 1.0;
  return step_ * static_cast<double>(i);
}

std::vector<double> SpaceGrid::nodes() const {
  std::vector<double> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = node(i);
  return out;
}

Subdomain::Subdomain(double l, double r) : left(l), right(r) {
  if (!(l >= 0.0 && r <= 1.0 && l < r))
    throw std::invalid_argument("Subdomain: need 0 <= left < right <= 1");
}

SubdomainUnion::SubdomainUnion(Subdomain single) : count_(1) { parts_[0] = single; }

SubdomainUnion::SubdomainUnion(Subdomain first, Subdomain second) : count_(2) {
  if (first.left > second.left) std::swap(first, second);
  if (first.right > second.left) throw std::invalid_argument("SubdomainUnion: pieces overlap");
  parts_ = {first, second};
}

SubdomainUnion SubdomainUnion::complement(const Subdomain& hole) {
  const bool has_left = hole.left > 0.0;
  const bool has_right = hole.right < 1.0;
  if (has_left && has_right)
    return SubdomainUnion(Subdomain(0.0, hole.left), Subdomain(hole.right, 1.0));
  if (has_left) return SubdomainUnion(Subdomain(0.0, hole.left));
  if (has_right) return SubdomainUnion(Subdomain(hole.right, 1.0));
  throw std::invalid_argument("SubdomainUnion::complement: hole covers the whole domain");
}

bool SubdomainUnion::contains(double x) const {
  for (const auto& p : pieces())
    if (p.contains(x)) return true;
  return false;
}

double SubdomainUnion::length() const {
  double total = 0.0;
  for (const auto& p : pieces()) total += p.length();
  return total;
}

double Eigensystem::fractional_eigenvalue(std::size_t n) const {
  return std::exp(beta() * std::log(eigenvalue(n)));
}

DirichletLaplacian::DirichletLaplacian(std::size_t mode_count, double beta)
    : modes_(mode_count), beta_(beta) {
  if (mode_count == 0) throw std::invalid_argument("DirichletLaplacian: need at least one mode");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("DirichletLaplacian: beta must lie in (0, 1]");
}

double DirichletLaplacian::eigenvalue(std::size_t n) const {
  const double k = std::numbers::pi * static_cast<double>(n);
  return k * k;
}

double DirichletLaplacian::eigenfunction(std::size_t n, double x) const {
  return std::numbers::sqrt2 * sinpi(static_cast<double>(n) * x);
}

std::vector<double> simpson_weights(const SpaceGrid& grid) {
  const std::size_t m = grid.size();
  std::vector<double> w(m);
  const double h3 = grid.step() / 3.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0 || i + 1 == m)
      w[i] = h3;
    else
      w[i] = (i % 2 == 1) ? 4.0 * h3 : 2.0 * h3;
  }
  return w;
}

std::vector<double> expand(std::span<const double> f, const Eigensystem& es, const SpaceGrid& grid) {
  if (f.size() != grid.size()) throw std::invalid_argument("expand: samples do not match the grid");
  if (4 * es.mode_count() > grid.size())
    throw std::invalid_argument("expand: mode count exceeds a quarter of the grid size");
  const auto w = simpson_weights(grid);
  std::vector<double> coeffs(es.mode_count(), 0.0);
  for (std::size_t n = 1; n <= es.mode_count(); ++n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      acc += w[i] * f[i] * es.eigenfunction(n, grid.node(i));
    coeffs[n - 1] = acc;
  }
  return coeffs;
}

std::vector<double> synthesize(std::span<const double> coeffs, const Eigensystem& es,
                               const SpaceGrid& grid) {
  if (coeffs.size() != es.mode_count())
    throw std::invalid_argument("synthesize: coefficient count does not match the eigensystem");
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    double acc = 0.0;
    for (std::size_t n = 1; n <= coeffs.size(); ++n) acc += coeffs[n - 1] * es.eigenfunction(n, x);
    out[i] = acc;
  }
  return out;
}

double inner_product_on(const SubdomainUnion& sub, std::span<const double> g,
                        std::span<const double> h, const SpaceGrid& grid) {
  if (g.size() != grid.size() || h.size() != grid.size())
    throw std::invalid_argument("inner_product_on: samples do not match the grid");
  double total = 0.0;
  for (const auto& piece : sub.pieces()) {
    if (!(piece.length() > 0.0)) throw std::invalid_argument("inner_product_on: empty subdomain");
    total += integrate_interval(piece, g, h, grid);
  }
  return total;
}

double norm_on(const SubdomainUnion& sub, std::span<const double> g, const SpaceGrid& grid) {
  return std::sqrt(std::max(0.0, inner_product_on(sub, g, g, grid)));
}

}  // namespace fracsource::spectral
