#include "fracsource/invert.hpp"

#include "fracsource/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracsource::invert {
namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

double condition_estimate(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Splits `total` over the support intervals by length, at least one each.
std::vector<std::size_t> split_by_length(const SubdomainUnion& support, std::size_t total) {
  const auto pieces = support.pieces();
  if (total < pieces.size())
    throw std::invalid_argument("basis: need at least one function per support interval");
  if (pieces.size() == 1) return {total};
  const double share = static_cast<double>(total) * pieces[0].length() / support.length();
  const auto first = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(share)), 1, total - 1);
  return {first, total - first};
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> BasisSet::synthesize(const Eigen::VectorXd& a, const spectral::SpaceGrid& grid) const {
  if (static_cast<std::size_t>(a.size()) != size())
    throw std::invalid_argument("basis: coefficient count does not match the basis");
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    double acc = 0.0;
    for (std::size_t n = 0; n < size(); ++n) acc += a(static_cast<Eigen::Index>(n)) * value(n, x);
    out[i] = acc;
  }
  return out;
}

HatBasis::HatBasis(const SubdomainUnion& support, Options opt) : support_(support), opt_(opt) {
  const auto pieces = support_.pieces();
  const auto counts = split_by_length(support_, opt.interior_nodes);

  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto& piece = pieces[p];
    const std::size_t n = counts[p];
    const double h = piece.length() / static_cast<double>(n + 1);
    auto node = [&](std::size_t i) { return i == n + 1 ? piece.right : piece.left + h * static_cast<double>(i); };
    const auto end_rule = [&](double x) {
      return (x == 0.0 || x == 1.0) ? opt.boundary_end : opt.interface_end;
    };
    if (end_rule(piece.left) == EndCondition::free) hats_.push_back({node(0), node(0), node(1)});
    for (std::size_t i = 1; i <= n; ++i) hats_.push_back({node(i - 1), node(i), node(i + 1)});
    if (end_rule(piece.right) == EndCondition::free) hats_.push_back({node(n), node(n + 1), node(n + 1)});
  }
}

double HatBasis::value(std::size_t n, double x) const {
  const Hat& hat = hats_.at(n);
  if (x == hat.center) return 1.0;
  if (x > hat.left && x < hat.center) return (x - hat.left) / (hat.center - hat.left);
  if (x > hat.center && x < hat.right) return (hat.right - x) / (hat.right - hat.center);
  return 0.0;
}

Eigen::MatrixXd HatBasis::gram() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Hat& h = hats_[static_cast<std::size_t>(i)];
    g(i, i) = (h.right - h.left) / 3.0;
    if (i + 1 < n) {
      const Hat& next = hats_[static_cast<std::size_t>(i + 1)];
      // Neighbours share the cell [center_i, center_{i+1}].
      if (next.left == h.center && next.center == h.right) {
        g(i, i + 1) = (h.right - h.center) / 6.0;
        g(i + 1, i) = g(i, i + 1);
      }
    }
  }
  return g;
}

LegendreBasis::LegendreBasis(const SubdomainUnion& support, std::size_t count) : support_(support) {
  const auto counts = split_by_length(support_, count);
  const auto pieces = support_.pieces();
  for (std::size_t p = 0; p < pieces.size(); ++p)
    for (unsigned d = 0; d < counts[p]; ++d) terms_.push_back({pieces[p].left, pieces[p].right, d});
}

double LegendreBasis::value(std::size_t n, double x) const {
  const Term& t = terms_.at(n);
  if (x < t.left || x > t.right) return 0.0;
  const double s = std::clamp(2.0 * (x - t.left) / (t.right - t.left) - 1.0, -1.0, 1.0);
  return std::legendre(t.degree, s);
}

Eigen::MatrixXd LegendreBasis::gram() const {
  // int_l^r P_d^2 = (r - l) / (2d + 1); distinct terms are orthogonal.
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Term& t = terms_[static_cast<std::size_t>(i)];
    g(i, i) = (t.right - t.left) / (2.0 * t.degree + 1.0);
  }
  return g;
}

std::shared_ptr<const BasisSet> make_basis(const SubdomainUnion& support, const BasisOptions& opt) {
  if (opt.kind == BasisKind::legendre) return std::make_shared<LegendreBasis>(support, opt.count);
  return std::make_shared<HatBasis>(support, HatBasis::Options{opt.count, opt.interface_end, opt.boundary_end});
}

// ---------------------------------------------------------------------------

ForwardMap::ForwardMap(forward::ProblemConfig cfg, forward::TemporalSource mu,
                       ObservationWindow window, std::shared_ptr<const BasisSet> basis)
    : solver_(std::move(cfg), std::move(mu)),
      window_(window),
      basis_(std::move(basis)),
      subgrid_(observe::make_subgrid(window_, solver_.config().sgrid, solver_.config().tgrid)) {}

ObservationData ForwardMap::observe_source(std::span<const double> f) const {
  const std::vector<double> zeros(solver_.config().sgrid.size(), 0.0);
  return observe::restrict_field(solver_.solve(zeros, f), window_);
}

ObservationData ForwardMap::operator()(const Eigen::VectorXd& a) const {
  const auto f = basis_->synthesize(a, solver_.config().sgrid);
  return observe_source(f);
}

Eigen::MatrixXd ForwardMap::jacobian_fd(const Eigen::VectorXd& a, double tau) const {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("jacobian_fd: step must be positive");
  const Eigen::VectorXd base = flatten((*this)(a).samples);
  const auto n = basis_->size();
  Eigen::MatrixXd jac(base.size(), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t col) {
    Eigen::VectorXd shifted = a;
    shifted(static_cast<Eigen::Index>(col)) += tau;
    jac.col(static_cast<Eigen::Index>(col)) = (flatten((*this)(shifted).samples) - base) / tau;
  });
  if (!jac.allFinite()) throw std::runtime_error("jacobian_fd: non-finite sensitivity");
  return jac;
}

// ---------------------------------------------------------------------------

void LMSettings::validate() const {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("LMSettings: gamma0 must be positive");
  if (!std::isfinite(k0)) throw std::invalid_argument("LMSettings: k0 must be finite");
  if (!(eta > 1.0)) throw std::invalid_argument("LMSettings: eta must exceed 1");
  if (max_iterations < 1) throw std::invalid_argument("LMSettings: need at least one iteration");
  if (!(fd_step > 0.0)) throw std::invalid_argument("LMSettings: fd_step must be positive");
  if (!(divergence_factor > 1.0))
    throw std::invalid_argument("LMSettings: divergence factor must exceed 1");
}

double rho_schedule(std::size_t k, const LMSettings& s) {
  return 1.0 / (1.0 + std::exp(s.gamma0 * (static_cast<double>(k) - s.k0)));
}

Eigen::VectorXd lm_solve(const Eigen::MatrixXd& q, const Eigen::MatrixXd& gram,
                         const Eigen::VectorXd& w, double rho) {
  if (q.rows() != q.cols() || gram.rows() != q.rows() || gram.cols() != q.cols() ||
      w.size() != q.rows())
    throw std::invalid_argument("lm_solve: inconsistent shapes");
  const Eigen::MatrixXd m = q + rho * gram;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    const double cond = condition_estimate(m);
    std::ostringstream msg;
    msg << "lm_solve: Q + rho G is not positive definite (condition estimate " << cond << ")";
    throw FactorizationError(msg.str(), cond);
  }
  Eigen::VectorXd da = llt.solve(w);
  if (!da.allFinite()) {
    const double cond = condition_estimate(m);
    throw FactorizationError("lm_solve: non-finite step", cond);
  }
  return da;
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& weights, const Eigen::MatrixXd& gram, double rho) {
  if (r.size() != jac.rows() || weights.size() != jac.rows())
    throw std::invalid_argument("lm_step: inconsistent shapes");
  const Eigen::MatrixXd wj = weights.asDiagonal() * jac;
  const Eigen::MatrixXd q = jac.transpose() * wj;
  const Eigen::VectorXd w = wj.transpose() * r;
  return lm_solve(q, gram, w, rho);
}

bool discrepancy_met(double residual, double delta, double eta) {
  return delta > 0.0 && residual <= eta * delta;
}

std::size_t discrepancy_index(std::span<const double> residuals, double delta, double eta) {
  for (std::size_t k = 0; k < residuals.size(); ++k)
    if (discrepancy_met(residuals[k], delta, eta)) return k + 1;
  return 0;
}

InversionResult run(const ForwardMap& fm, const ObservationData& data, const LMSettings& s,
                    const Eigen::VectorXd& a0, const std::vector<double>* f_true) {
  s.validate();
  if (!(data.delta >= 0.0)) throw std::invalid_argument("run: negative noise level");
  if (static_cast<std::size_t>(a0.size()) != fm.basis().size())
    throw std::invalid_argument("run: initial guess does not match the basis");
  const auto& sub = fm.subgrid();
  if (data.samples.rows() != static_cast<Eigen::Index>(sub.rows()) ||
      data.samples.cols() != static_cast<Eigen::Index>(sub.cols()))
    throw std::invalid_argument("run: data do not match the observation window");

  const auto& sgrid = fm.config().sgrid;
  auto error_of = [&](const Eigen::VectorXd& a) {
    return f_true ? relative_error(fm.basis(), a, *f_true, sgrid) : std::numeric_limits<double>::quiet_NaN();
  };

  const Eigen::MatrixXd gram = fm.basis().gram();
  const Eigen::VectorXd weights = observe::sample_weights(sub);
  const Eigen::VectorXd target = flatten(data.samples);

  InversionResult out;
  out.a = a0;
  auto& trace = out.trace;
  trace.delta = data.delta;
  trace.initial_a = a0;
  Eigen::VectorXd predicted = flatten(fm(a0).samples);
  trace.initial_residual = observe::st_norm(predicted.reshaped(data.samples.rows(), data.samples.cols()) - data.samples, sub);
  trace.initial_error = error_of(a0);

  if (discrepancy_met(trace.initial_residual, data.delta, s.eta)) {
    trace.reason = StopReason::discrepancy;
    return out;
  }

  Eigen::MatrixXd jac;
  for (std::size_t k = 0; k < s.max_iterations; ++k) {
    if (k == 0 || s.recompute_jacobian) jac = fm.jacobian_fd(out.a, s.fd_step);
    const double rho = rho_schedule(k + 1, s);
    out.a += lm_step(jac, target - predicted, weights, gram, rho);
    predicted = flatten(fm(out.a).samples);
    const Eigen::MatrixXd residual =
        predicted.reshaped(data.samples.rows(), data.samples.cols()) - data.samples;
    const double e = observe::st_norm(residual, sub);
    trace.records.push_back({k + 1, out.a, e, rho, error_of(out.a)});
    trace.stop_index = k + 1;
    if (!std::isfinite(e) || e > s.divergence_factor * trace.initial_residual) {
      std::ostringstream msg;
      msg << "run: residual " << e << " at iteration " << k + 1 << " exceeds "
          << s.divergence_factor << " E_0 = " << s.divergence_factor * trace.initial_residual;
      throw DivergenceError(msg.str(), trace);
    }
    if (discrepancy_met(e, data.delta, s.eta)) {
      trace.reason = StopReason::discrepancy;
      return out;
    }
  }
  trace.reason = StopReason::iteration_cap;
  return out;
}

double relative_error(std::span<const double> f, std::span<const double> f_true,
                      const SubdomainUnion& support, const spectral::SpaceGrid& grid) {
  if (f.size() != grid.size() || f_true.size() != grid.size())
    throw std::invalid_argument("relative_error: samples do not match the grid");
  const double denom = spectral::norm_on(support, f_true, grid);
  if (!(denom > 0.0)) throw std::invalid_argument("relative_error: f_true vanishes on the support");
  std::vector<double> diff(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) diff[i] = f[i] - f_true[i];
  return spectral::norm_on(support, diff, grid) / denom;
}

double relative_error(const BasisSet& basis, const Eigen::VectorXd& a,
                      std::span<const double> f_true, const spectral::SpaceGrid& grid) {
  return relative_error(basis.synthesize(a, grid), f_true, basis.support(), grid);
}

}  // namespace fracsource::invert
