#include "fracsource/forward.hpp"

#include "fracsource/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace fracsource::forward {
namespace {

constexpr std::size_t kDuhamelRefinement = 8;

}  // namespace

void ProblemConfig::validate() const {
  if (!es) throw std::invalid_argument("ProblemConfig: missing eigensystem");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("ProblemConfig: alpha must lie in (0, 1]");
  if (!(es->beta() > 0.0 && es->beta() <= 1.0))
    throw std::invalid_argument("ProblemConfig: beta must lie in (0, 1]");
  if (4 * es->mode_count() > sgrid.size())
    throw std::invalid_argument("ProblemConfig: too many modes for the space grid");
}

ProblemConfig make_config(double alpha, double beta, double final_time, std::size_t time_nodes,
                          std::size_t space_nodes, std::size_t modes) {
  ProblemConfig cfg{alpha, std::make_shared<spectral::DirichletLaplacian>(modes, beta),
                    TimeGrid(final_time, time_nodes), SpaceGrid(space_nodes), {}};
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

TemporalSource TemporalSource::constant_window(double cutoff, double level) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("TemporalSource: cutoff must be positive");
  if (level == 0.0 || !std::isfinite(level))
    throw std::invalid_argument("TemporalSource: level must be finite and nonzero");
  TemporalSource s;
  s.kind_ = Kind::constant_window;
  s.cutoff_ = cutoff;
  s.level_ = level;
  return s;
}

TemporalSource TemporalSource::polynomial(std::vector<double> coeffs) {
  TemporalSource s;
  s.kind_ = Kind::polynomial;
  s.coeffs_ = std::move(coeffs);
  return s;
}

TemporalSource TemporalSource::power_law(double coeff, double exponent) {
  if (!(exponent > -1.0)) throw std::invalid_argument("TemporalSource: exponent must exceed -1");
  TemporalSource s;
  s.kind_ = Kind::power_law;
  s.level_ = coeff;
  s.exponent_ = exponent;
  return s;
}

TemporalSource TemporalSource::sampled(const TimeGrid& grid, std::vector<double> values) {
  if (values.size() != grid.size())
    throw std::invalid_argument("TemporalSource: samples do not match the time grid");
  TemporalSource s;
  s.kind_ = Kind::sampled;
  s.samples_ = std::move(values);
  s.sample_span_ = grid.final_time();
  return s;
}

double TemporalSource::value(double t) const {
  switch (kind_) {
    case Kind::constant_window:
      return (t >= 0.0 && t < cutoff_) ? level_ : 0.0;
    case Kind::polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
      return acc;
    }
    case Kind::power_law:
      return t <= 0.0 ? (exponent_ == 0.0 ? level_ : 0.0) : level_ * std::pow(t, exponent_);
    case Kind::sampled: {
      if (t < 0.0 || t > sample_span_ * (1.0 + 1e-12))
        throw std::invalid_argument("TemporalSource: time outside the sampled span");
      const double step = sample_span_ / static_cast<double>(samples_.size() - 1);
      const double s = std::min(t / step, static_cast<double>(samples_.size() - 1));
      const auto i = std::min(static_cast<std::size_t>(s), samples_.size() - 2);
      const double w = s - static_cast<double>(i);
      return (1.0 - w) * samples_[i] + w * samples_[i + 1];
    }
  }
  return 0.0;
}

std::vector<double> TemporalSource::cell_midpoint_values(const TimeGrid& grid) const {
  if (kind_ == Kind::sampled && std::abs(sample_span_ - grid.final_time()) > 1e-12 * sample_span_)
    throw std::invalid_argument("TemporalSource: sampled span differs from the solver time grid");
  std::vector<double> out(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double v = value(0.5 * (grid.node(i) + grid.node(i + 1)));
    if (!std::isfinite(v)) throw std::invalid_argument("TemporalSource: non-finite value");
    out[i] = v;
  }
  return out;
}

std::optional<TemporalSource::PowerLaw> TemporalSource::duhamel_kernel(double alpha) const {
  // I^{1-alpha} (c' t^q) = c' Gamma(q+1) / Gamma(q+2-alpha) t^{q+1-alpha}.
  double coeff = 0.0;
  double exponent = 0.0;
  if (kind_ == Kind::power_law) {
    coeff = level_;
    exponent = exponent_;
  } else if (kind_ == Kind::polynomial && coeffs_.size() == 1) {
    coeff = coeffs_[0];
  } else {
    return std::nullopt;
  }
  const double q = exponent + alpha - 1.0;
  if (!(q > -1.0)) return std::nullopt;
  return PowerLaw{coeff * std::tgamma(exponent + 1.0) / std::tgamma(exponent + alpha), q};
}

// ---------------------------------------------------------------------------

SpectralSolver::SpectralSolver(ProblemConfig cfg, TemporalSource mu)
    : cfg_(std::move(cfg)), mu_(std::move(mu)) {
  cfg_.validate();
  const auto& es = *cfg_.es;
  const std::size_t modes = es.mode_count();
  const std::size_t nt = cfg_.tgrid.size();
  const std::size_t nx = cfg_.sgrid.size();
  const double alpha = cfg_.alpha;
  const auto mu_mid = mu_.cell_midpoint_values(cfg_.tgrid);

  std::vector<double> t_pow(nt);
  for (std::size_t j = 0; j < nt; ++j) t_pow[j] = std::pow(cfg_.tgrid.node(j), alpha);

  relax_.resize(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(nt));
  source_.setZero(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(nt));

  parallel_for(modes, [&](std::size_t m) {
    const auto row = static_cast<Eigen::Index>(m);
    const double lam = es.fractional_eigenvalue(m + 1);
    for (std::size_t j = 0; j < nt; ++j)
      relax_(row, static_cast<Eigen::Index>(j)) =
          mlf::mittag_leffler({alpha, 1.0}, -lam * t_pow[j], cfg_.ml_options);

    // Exact cell weights on a uniform grid depend only on the lag j - i:
    //   w[l] = int_{t_{l-1}}^{t_l} s^{alpha-1} E_{alpha,alpha}(-lam s^alpha) ds.
    std::vector<double> w(nt, 0.0);
    for (std::size_t l = 1; l < nt; ++l)
      w[l] = (relax_(row, static_cast<Eigen::Index>(l - 1)) - relax_(row, static_cast<Eigen::Index>(l))) / lam;
    for (std::size_t j = 1; j < nt; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < j; ++i) acc += mu_mid[i] * w[j - i];
      source_(row, static_cast<Eigen::Index>(j)) = acc;
    }
  });

  modes_.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(modes));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t m = 0; m < modes; ++m)
      modes_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
          es.eigenfunction(m + 1, cfg_.sgrid.node(i));
}

SpaceTimeField SpectralSolver::solve_coefficients(const Eigen::VectorXd& phi_coeffs,
                                                  const Eigen::VectorXd& f_coeffs) const {
  if (phi_coeffs.size() != relax_.rows() || f_coeffs.size() != relax_.rows())
    throw std::invalid_argument("SpectralSolver: coefficient count does not match the modes");
  const Eigen::MatrixXd temporal =
      phi_coeffs.asDiagonal() * relax_ + f_coeffs.asDiagonal() * source_;
  SpaceTimeField field{modes_ * temporal, cfg_.sgrid, cfg_.tgrid};
  if (!field.values.allFinite()) throw std::runtime_error("SpectralSolver: non-finite solution");
  return field;
}

SpaceTimeField SpectralSolver::solve(std::span<const double> phi, std::span<const double> f) const {
  const auto pc = spectral::expand(phi, *cfg_.es, cfg_.sgrid);
  const auto fc = spectral::expand(f, *cfg_.es, cfg_.sgrid);
  return solve_coefficients(Eigen::Map<const Eigen::VectorXd>(pc.data(), static_cast<Eigen::Index>(pc.size())),
                            Eigen::Map<const Eigen::VectorXd>(fc.data(), static_cast<Eigen::Index>(fc.size())));
}

SpaceTimeField solve(const ProblemConfig& cfg, std::span<const double> phi,
                     std::span<const double> f, const TemporalSource& mu) {
  return SpectralSolver(cfg, mu).solve(phi, f);
}

double field_norm(const Eigen::MatrixXd& values, const SpaceGrid& sgrid, const TimeGrid& tgrid) {
  const auto wx = spectral::simpson_weights(sgrid);
  const double ht = tgrid.step();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const double wt = (j == 0 || j + 1 == values.cols()) ? 0.5 * ht : ht;
    double col = 0.0;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      col += wx[static_cast<std::size_t>(i)] * values(i, j) * values(i, j);
    acc += wt * col;
  }
  return std::sqrt(acc);
}

double duhamel_check(const ProblemConfig& cfg, std::span<const double> f, const TemporalSource& mu) {
  const auto kernel = mu.duhamel_kernel(cfg.alpha);
  if (!kernel) throw std::invalid_argument("duhamel_check: theta is not available for this mu");
  const double order = kernel->exponent + 1.0;
  if (!(order > 0.0 && order <= 1.0))
    throw std::invalid_argument("duhamel_check: theta exponent outside the supported range");
  cfg.validate();

  const std::vector<double> zeros(cfg.sgrid.size(), 0.0);
  const SpectralSolver direct(cfg, mu);
  const auto u = direct.solve(zeros, f);

  // v_n(s) = E_{alpha,1}(-lambda_n s^alpha) has a s^alpha cusp at 0, so the
  // convolution with theta is integrated per mode on a finer time grid.
  const auto& es = *cfg.es;
  const std::size_t modes = es.mode_count();
  const std::size_t nt = cfg.tgrid.size();
  const TimeGrid fine(cfg.final_time(), kDuhamelRefinement * (nt - 1) + 1);
  const auto fc = spectral::expand(f, es, cfg.sgrid);
  const double scale = kernel->coeff * std::tgamma(order);
  Eigen::MatrixXd temporal(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(nt));
  parallel_for(modes, [&](std::size_t m) {
    const double lam = es.fractional_eigenvalue(m + 1);
    std::vector<double> v(fine.size());
    for (std::size_t j = 0; j < fine.size(); ++j)
      v[j] = mlf::mittag_leffler({cfg.alpha, 1.0}, -lam * std::pow(fine.node(j), cfg.alpha), cfg.ml_options);
    const auto integral = mlf::rl_integral(order, fine, v);
    for (std::size_t j = 0; j < nt; ++j)
      temporal(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) =
          scale * fc[m] * integral[j * kDuhamelRefinement];
  });
  const Eigen::MatrixXd w = direct.mode_samples() * temporal;

  const double denom = field_norm(u.values, cfg.sgrid, cfg.tgrid);
  const double diff = field_norm(w - u.values, cfg.sgrid, cfg.tgrid);
  if (denom == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / denom;
}

}  // namespace fracsource::forward
