#include "fracsource/mittag_leffler.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace fracsource::mlf {
namespace {

using boost::math::quadrature::tanh_sinh;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxAsymptoticTerms = 400;
constexpr int kMaxTaylorTerms = 20000;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with the argument reduced to [-1, 1] first, exact zero at integers.
double sinpi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);
  if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
  return std::sin(kPi * r);
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// |z|^k / Gamma(alpha k + beta) with sign, evaluated in log space once the
// Gamma argument grows past the overflow range of tgamma.
double taylor_term(double alpha, double beta, double x, int k) {
  const double arg = alpha * k + beta;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  if (k == 0) return rgamma(arg);
  if (arg < 20.0) return sign * std::pow(x, k) * rgamma(arg);
  return sign * std::exp(k * std::log(x) - std::lgamma(arg));
}

struct SeriesResult {
  double value;
  double max_term;
};

SeriesResult taylor_series(double alpha, double beta, double x) {
  CompensatedSum acc;
  double max_term = 0.0;
  // Terms peak near alpha k + beta ~ x^{1/alpha}; do not stop before that.
  const double peak_k = std::pow(x, 1.0 / alpha) / alpha;
  for (int k = 0; k < kMaxTaylorTerms; ++k) {
    const double t = taylor_term(alpha, beta, x, k);
    acc.add(t);
    max_term = std::max(max_term, std::abs(t));
    if (k > peak_k + 2 && std::abs(t) <= 1e-18 * std::max(1.0, std::abs(acc.value()))) break;
  }
  return {acc.value(), max_term};
}

// E_{alpha,beta}(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(beta - alpha k).
// Returns nullopt when the divergent series cannot reach the tolerance.
std::optional<double> asymptotic_series(double alpha, double beta, double x, double tol,
                                        bool accept_always) {
  CompensatedSum acc;
  const double log_x = std::log(x);
  double previous_envelope = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
    const double y = beta - alpha * k;
    double term = 0.0;
    double envelope = 0.0;
    if (y >= 0.5) {
      // Only for beta > 1 + alpha/2: Gamma(y) is positive and well behaved.
      term = std::exp(-k * log_x) * rgamma(y);
      envelope = std::abs(term);
    } else {
      // 1/Gamma(y) = sin(pi y) Gamma(1 - y) / pi, with Gamma(1 - y) > 0.
      const double log_mag = std::lgamma(1.0 - y) - k * log_x;
      envelope = std::exp(log_mag) / kPi;
      term = sinpi(y) * envelope;
    }
    if (k % 2 == 0) term = -term;
    if (envelope > previous_envelope && !accept_always) return std::nullopt;
    acc.add(term);
    if (envelope < tol) return acc.value();
    previous_envelope = envelope;
  }
  if (accept_always) return acc.value();
  return std::nullopt;
}

constexpr double kQuadTolerance = 1e-15;
// exp(-u) is below 1e-26 past u = 60.
constexpr double kExpCutoff = 60.0;

// tanh-sinh over [a, b]. The node is rebuilt from its distance to the nearer
// endpoint, which keeps integrable endpoint singularities resolved.
template <class F>
double integrate(F f, double a, double b) {
  thread_local tanh_sinh<double> rule;
  auto g = [&](double, double xc) { return f(xc < 0.0 ? a - xc : b - xc); };
  return rule.integrate(g, a, b, kQuadTolerance);
}

// Real-line integral representation valid for 0 < alpha < 1, beta < 1 + alpha,
// on the ray arg z = pi, after chi = u^alpha:
//   E_{alpha,beta}(-x) = (1/pi) int_0^inf u^{alpha-beta} e^{-u}
//       (u^alpha sin(pi(1-beta)) + x sin(pi(1-beta+alpha)))
//       / (u^{2 alpha} + 2 u^alpha x cos(alpha pi) + x^2) du.
// The denominator nearly vanishes at u = x^{1/alpha} as alpha -> 1, so the
// range is split there.
double integral_branch_fractional(double alpha, double beta, double x) {
  const double s1 = sinpi(1.0 - beta);
  const double s2 = sinpi(1.0 - beta + alpha);
  const double cs = std::cos(alpha * kPi);
  const double power = alpha - beta;
  auto kernel = [=](double u) {
    if (u <= 0.0) return power > 0.0 ? 0.0 : (power == 0.0 ? s2 / (kPi * x) : 0.0);
    const double ua = std::pow(u, alpha);
    const double num = ua * s1 + x * s2;
    const double den = ua * ua + 2.0 * ua * x * cs + x * x;
    return std::pow(u, power) * std::exp(-u) * num / (kPi * den);
  };
  const double peak = std::pow(x, 1.0 / alpha);
  if (peak >= kExpCutoff) return integrate(kernel, 0.0, kExpCutoff);
  return integrate(kernel, 0.0, peak) + integrate(kernel, peak, peak + kExpCutoff);
}

// alpha = 1: E_{1,beta}(-x) = (1/Gamma(beta)) [1 - x int_0^1 e^{-xs} (1-s)^{beta-1} ds],
// with 1 - s = v^{1/beta} removing the endpoint singularity (beta > 0).
double integral_branch_exponential(double beta, double x) {
  const double inv_beta = 1.0 / beta;
  auto integrand = [=](double v) { return std::exp(-x * (1.0 - std::pow(v, inv_beta))); };
  // Below `split` the integrand is under e^{-kExpCutoff}.
  const double split = x > kExpCutoff ? std::pow(1.0 - kExpCutoff / x, beta) : 0.0;
  const double integral = integrate(integrand, split, 1.0);
  return rgamma(beta) * (1.0 - x * inv_beta * integral);
}

double integral_branch(double alpha, double beta, double x) {
  if (alpha == 1.0) {
    if (beta <= 0.0) return rgamma(beta) - x * integral_branch(alpha, beta + 1.0, x);
    return integral_branch_exponential(beta, x);
  }
  if (beta >= 1.0 + alpha) {
    // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
    return (rgamma(beta - alpha) - integral_branch(alpha, beta - alpha, x)) / x;
  }
  return integral_branch_fractional(alpha, beta, x);
}

void validate(const MLParams& p, double z) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
    throw std::domain_error("mittag_leffler: alpha must be positive, got " + std::to_string(p.alpha));
  if (p.alpha > 2.0)
    throw std::domain_error("mittag_leffler: alpha > 2 is not supported");
  if (!std::isfinite(p.beta)) throw std::domain_error("mittag_leffler: beta must be finite");
  if (!std::isfinite(z)) throw std::domain_error("mittag_leffler: argument must be finite");
  if (z > 0.0)
    throw std::domain_error("mittag_leffler: only the negative real axis is supported, got z = " +
                            std::to_string(z));
}

}  // namespace

double rgamma(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 170.0) return std::exp(-std::lgamma(x));
  if (x < -170.0) {
    // Reflection; the magnitude overflows only for absurd arguments.
    return sinpi(x) * std::exp(std::lgamma(1.0 - x)) / kPi;
  }
  return 1.0 / std::tgamma(x);
}

double mittag_leffler(const MLParams& p, double z, const EvalOptions& opt) {
  validate(p, z);
  const double alpha = p.alpha;
  const double beta = p.beta;
  const double x = -z;
  if (x == 0.0) return rgamma(beta);

  if (alpha > 1.0 || opt.force == Branch::taylor) {
    const auto [value, max_term] = taylor_series(alpha, beta, x);
    if (alpha > 1.0 && max_term * 1e-16 > 1e-13)
      throw std::domain_error("mittag_leffler: |z| too large for alpha > 1");
    return value;
  }
  if (alpha == 1.0 && beta == 1.0) return std::exp(-x);

  switch (opt.force) {
    case Branch::asymptotic:
      return *asymptotic_series(alpha, beta, x, opt.asymptotic_tolerance, true);
    case Branch::integral:
      return integral_branch(alpha, beta, x);
    default:
      break;
  }

  if (x <= opt.taylor_radius) return taylor_series(alpha, beta, x).value;
  // For alpha = 1 the expansion misses a term of size x^{1-beta} e^{-x}.
  const bool exponential_negligible =
      alpha < 1.0 || std::exp(-x) * std::max(1.0, std::pow(x, 1.0 - beta)) < opt.asymptotic_tolerance;
  if (exponential_negligible) {
    if (auto v = asymptotic_series(alpha, beta, x, opt.asymptotic_tolerance, false)) return *v;
  }
  return integral_branch(alpha, beta, x);
}

double ml_decay_integral(double alpha, double lambda, double a, double b, const EvalOptions& opt) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("ml_decay_integral: alpha must lie in (0, 1]");
  if (!(lambda > 0.0)) throw std::domain_error("ml_decay_integral: lambda must be positive");
  if (!(a >= 0.0) || !(b >= a)) throw std::domain_error("ml_decay_integral: need 0 <= a <= b");
  if (a == b) return 0.0;
  const MLParams p{alpha, 1.0};
  const double ea = mittag_leffler(p, -lambda * std::pow(a, alpha), opt);
  const double eb = mittag_leffler(p, -lambda * std::pow(b, alpha), opt);
  return (ea - eb) / lambda;
}

}  // namespace fracsource::mlf
