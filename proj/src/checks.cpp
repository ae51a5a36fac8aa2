#include "fracsource/checks.hpp"

#include "fracsource/forward.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace fracsource::checks {
namespace {

using std::numbers::pi;

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// e^{x^2} erfc(x) = E_{1/2,1}(-x).
double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series, summed while the terms still decrease.
  const double inv = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = -term * (2.0 * k - 1.0) * inv;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum / (x * std::sqrt(pi));
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

CheckResult ml_sweep(const mlf::EvalOptions& ml) {
  struct Ref {
    mlf::MLParams p;
    double x_max;
    std::function<double(double)> z_of;  // argument for sweep value x
    std::function<double(double)> exact;
  };
  const std::vector<Ref> refs = {
      {{1.0, 1.0}, 100.0, [](double x) { return -x; }, [](double x) { return std::exp(-x); }},
      {{1.0, 2.0}, 100.0, [](double x) { return -x; },
       [](double x) { return x == 0.0 ? 1.0 : -std::expm1(-x) / x; }},
      {{0.5, 1.0}, 100.0, [](double x) { return -x; }, erfcx},
      {{2.0, 1.0}, 5.0, [](double x) { return -x * x; }, [](double x) { return std::cos(x); }},
  };
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& r : refs) {
    for (int m = 0; m / 10.0 <= r.x_max + 1e-12; ++m) {
      const double x = m / 10.0;
      const double v = mlf::mittag_leffler(r.p, r.z_of(x), ml);
      const double err = std::abs(v - r.exact(x));
      if (!(err <= worst)) worst = std::isnan(err) ? INFINITY : err;
      ++count;
    }
  }
  return {"ml_sweep", worst <= 1e-10,
          fmt("max abs error %.3g over ", worst) + std::to_string(count) + " closed-form points (tol 1e-10)"};
}

CheckResult heat_limit(const mlf::EvalOptions& ml) {
  auto cfg = forward::make_config(1.0, 1.0);
  cfg.ml_options = ml;
  const auto& es = *cfg.es;
  std::vector<double> phi(cfg.sgrid.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = es.eigenfunction(1, cfg.sgrid.node(i));
  const std::vector<double> zero(phi.size(), 0.0);
  const auto u = forward::solve(cfg, phi, zero, forward::TemporalSource::zero());
  double worst = 0.0;
  for (std::size_t j = 0; j < cfg.tgrid.size(); ++j) {
    const double decay = std::exp(-pi * pi * cfg.tgrid.node(j));
    for (std::size_t i = 0; i < phi.size(); ++i)
      worst = std::max(worst, std::abs(u(i, j) - decay * phi[i]));
  }
  return {"heat_limit", worst <= 1e-8, fmt("max abs error %.3g (tol 1e-8)", worst)};
}

CheckResult single_mode(const mlf::EvalOptions& ml) {
  const double alpha = 0.5;
  auto cfg = forward::make_config(alpha, 0.7);
  cfg.ml_options = ml;
  const auto& es = *cfg.es;
  std::vector<double> f(cfg.sgrid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = es.eigenfunction(1, cfg.sgrid.node(i));
  const std::vector<double> zero(f.size(), 0.0);
  const auto u = forward::solve(cfg, zero, f, forward::TemporalSource::polynomial({1.0}));
  const double lam = es.fractional_eigenvalue(1);
  Eigen::MatrixXd exact(u.values.rows(), u.values.cols());
  for (std::size_t j = 0; j < cfg.tgrid.size(); ++j) {
    const double t = cfg.tgrid.node(j);
    const double c = (1.0 - mlf::mittag_leffler({alpha, 1.0}, -lam * std::pow(t, alpha), ml)) / lam;
    for (std::size_t i = 0; i < f.size(); ++i)
      exact(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c * f[i];
  }
  const double rel = forward::field_norm(u.values - exact, cfg.sgrid, cfg.tgrid) /
                     forward::field_norm(exact, cfg.sgrid, cfg.tgrid);
  return {"single_mode", rel <= 1e-6, fmt("relative L2 error %.3g (tol 1e-6)", rel)};
}

CheckResult duhamel(const mlf::EvalOptions& ml) {
  const double alpha = 0.5;
  auto cfg = forward::make_config(alpha, 0.7);
  cfg.ml_options = ml;
  const auto mu = forward::TemporalSource::power_law(1.0 / std::tgamma(2.0 - alpha), 1.0 - alpha);
  auto sample = [](const forward::ProblemConfig& c) {
    std::vector<double> f(c.sgrid.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = c.es->eigenfunction(1, c.sgrid.node(i)) + c.es->eigenfunction(3, c.sgrid.node(i));
    return f;
  };
  const double coarse = forward::duhamel_check(cfg, sample(cfg), mu);
  auto fine_cfg = cfg;
  fine_cfg.tgrid = cfg.tgrid.refined();
  const double fine = forward::duhamel_check(fine_cfg, sample(fine_cfg), mu);
  const double ratio = coarse / fine;
  return {"duhamel", coarse <= 1e-3 && ratio >= 2.0,
          fmt("discrepancy %.3g (tol 1e-3), refinement ratio %.3g (min 2)", coarse, ratio)};
}

}  // namespace

CheckOptions inject_fault(const std::string& name) {
  CheckOptions opt;
  if (name == "ml-switch") {
    opt.ml.taylor_radius = 50.0;
    return opt;
  }
  throw std::invalid_argument("unknown fault '" + name + "'");
}

std::vector<CheckResult> run_checks(const CheckOptions& opt) {
  return {guarded("ml_sweep", [&] { return ml_sweep(opt.ml); }),
          guarded("heat_limit", [&] { return heat_limit(opt.ml); }),
          guarded("single_mode", [&] { return single_mode(opt.ml); }),
          guarded("duhamel", [&] { return duhamel(opt.ml); })};
}

bool report(const std::vector<CheckResult>& results, std::ostream& out) {
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace fracsource::checks
