#pragma once

#include <cstdint>

namespace fracsource::mlf {

/// Parameters (alpha, beta) of the two-parameter Mittag-Leffler function
/// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).
struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Evaluation route for E_{alpha,beta}(-x). `automatic` picks per argument.
enum class Branch : std::uint8_t { automatic, taylor, asymptotic, integral };

/// Knobs of the branch selection. The defaults are the production setting;
/// other values exist for diagnostics and fault injection.
struct EvalOptions {
  /// Taylor series is used for x <= taylor_radius (alpha <= 1).
  double taylor_radius = 1.0;
  /// The asymptotic expansion is accepted when its smallest retained term is
  /// below this absolute bound.
  double asymptotic_tolerance = 5e-16;
  Branch force = Branch::automatic;
};

/// 1 / Gamma(x). Returns exactly 0 at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// E_{alpha,beta}(z) on the closed negative real axis.
///
/// Supported: 0 < alpha <= 1 for any z <= 0, and 1 < alpha <= 2 where the
/// Taylor series is numerically safe (small |z|). Absolute accuracy is about
/// 1e-14 for |z| <= 1e4 in the supported range.
///
/// Throws std::domain_error for alpha <= 0, alpha > 2, z > 0, non-finite
/// input, or an (alpha, z) pair the Taylor series cannot resolve.
double mittag_leffler(const MLParams& p, double z, const EvalOptions& opt = {});

/// Integral of s^{alpha-1} E_{alpha,alpha}(-lambda s^alpha) over [a, b], in
/// closed form (E_{alpha,1}(-lambda a^alpha) - E_{alpha,1}(-lambda b^alpha)) / lambda.
double ml_decay_integral(double alpha, double lambda, double a, double b,
                         const EvalOptions& opt = {});

}  // namespace fracsource::mlf
