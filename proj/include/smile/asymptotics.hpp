#pragma once

// Evaluators for the asymptotic smile formulas: the generic tail ->
// implied-vol theorems and the model-specific closed forms, each tagged
// with the regime in which it is valid.

#include <cmath>
#include <string>

#include "smile/errors.hpp"
#include "smile/models.hpp"
#include "smile/quad.hpp"
#include "smile/quote.hpp"
#include "smile/specfun.hpp"
#include "smile/stable.hpp"

namespace smile {

/// Right-tail atypical deviations: sigma ~ (sqrt(L/k) - sqrt(L/k - 1))
/// sqrt(2k/t) with L = -log P(X_t > k); special form k/sqrt(2tL) when
/// L/k -> infinity.
inline AsymptoticQuote tail_to_vol_right(double kappa, double t,
                                         double log_tail, bool special) {
  if (!(kappa > 0.0) || !(t > 0.0))
    throw DomainError("tail_to_vol_right: requires kappa > 0, t > 0");
  if (!(log_tail < 0.0))
    throw DomainError("tail_to_vol_right: requires log_tail < 0");
  const double L = -log_tail;
  if (special) {
    return AsymptoticQuote{kappa / std::sqrt(2.0 * t * L), "thm2.2-special",
                           "-log Fbar / kappa -> infinity", kappa, t, L};
  }
  if (L < kappa)
    throw RegimeMismatchError(
        "tail_to_vol_right: general form needs -log Fbar >= kappa");
  const double value =
      std::sqrt(2.0 / t) * (std::sqrt(L) - std::sqrt(L - kappa));
  return AsymptoticQuote{value, "thm2.2-general",
                         "Fbar_t(kappa) -> 0, log Fbar + kappa <= 0", kappa, t,
                         L};
}

/// Left-tail atypical deviations: sigma ~ (sqrt(L/k + 1) - sqrt(L/k))
/// sqrt(2k/t) with L = -log P(X_t <= -k); no L/k restriction.
inline AsymptoticQuote tail_to_vol_left(double kappa, double t,
                                        double log_tail, bool special) {
  if (!(kappa > 0.0) || !(t > 0.0))
    throw DomainError("tail_to_vol_left: requires kappa > 0, t > 0");
  if (!(log_tail < 0.0))
    throw DomainError("tail_to_vol_left: requires log_tail < 0");
  const double L = -log_tail;
  if (special) {
    return AsymptoticQuote{kappa / std::sqrt(2.0 * t * L), "thm2.3-special",
                           "-log F / kappa -> infinity", kappa, t, L};
  }
  const double value =
      std::sqrt(2.0 / t) * (std::sqrt(L + kappa) - std::sqrt(L));
  return AsymptoticQuote{value, "thm2.3-general", "F_t(-kappa) -> 0", kappa, t,
                         L};
}

namespace detail {

// E[(Y - b)^+] for the standardized skewed stable law, by integrating
// the survival function.
inline double stable_mean_above(double alpha, double b) {
  const double bt = stable_btilde(alpha);
  const double y_hi = std::pow(45.0 / bt, (alpha - 1.0) / alpha);
  if (b >= y_hi) return 0.0;
  return quad::composite_gl16(
      [&](double y) { return stable_right_tail(y, alpha).value; }, b, y_hi,
      160);
}

// E[(Y + b)^-] = int_b^inf P(Y <= -y) dy, with the polynomial tail
// integrated in closed form beyond the quadrature switch.
inline double stable_mean_below(double alpha, double b) {
  const double cut = 15.0;
  double e = 0.0;
  if (b < cut)
    e += quad::composite_gl16(
        [&](double y) { return stable_cdf(-y, alpha); }, b, cut, 160);
  const double lo = std::max(b, cut);
  e += stable_left_c(alpha) * std::pow(lo, 1.0 - alpha) / (alpha - 1.0);
  return e;
}

}  // namespace detail

/// Typical deviations: sigma_imp(+-kappa, t) ~ C_{+-}(a) gamma_t/sqrt(t)
/// with a = kappa/gamma_t held fixed. C from the limit law:
/// a/D^-1(E[(Y -+ a)^{+-}]/a) for a > 0, sqrt(2 pi) E[Y^{+-}] at a = 0.
inline AsymptoticQuote typical_vol(const ModelSpec& m, double a, double t,
                                   TailSide side = TailSide::right) {
  if (!(a >= 0.0) || !(t > 0.0))
    throw DomainError("typical_vol: requires a >= 0, t > 0");
  const ScalingData sc = scaling_data(m);
  double c;
  if (auto* g = std::get_if<GaussianLaw>(&sc.limit_law)) {
    if (!(g->sd > 0.0)) throw DomainError("typical_vol: degenerate limit law");
    // Gaussian identity E[(Y - a)^+] = a D(a/sd): both tail sides give
    // C_{+-}(a) = sd; evaluated through D to keep the code honest about
    // the route, in logs so a/sd up to ~35 stays representable.
    c = a == 0.0 ? g->sd : a / d_inv_log(d_log(a / g->sd));
  } else {
    const auto& st = std::get<SkewedStableLaw>(sc.limit_law);
    const double s = st.scale, b = a / s;
    const double e = side == TailSide::right
                         ? s * detail::stable_mean_above(st.alpha, b)
                         : s * detail::stable_mean_below(st.alpha, b);
    if (!(e > 0.0))
      throw DomainError("typical_vol: vanishing limit-law expectation");
    c = a == 0.0 ? kSqrt2Pi * e : a / d_inv(e / a);
  }
  const double value = c * sc.gamma(t) / std::sqrt(t);
  return AsymptoticQuote{value, "thm2.4",
                         "kappa = a gamma_t, tails have positive limits",
                         (side == TailSide::right ? a : -a) * sc.gamma(t), t,
                         c};
}

/// Carr-Wu closed smile forms. Right: B_alpha (kappa/t)^{-(2-alpha)/
/// (2(alpha-1))}; left: the explicit log form with L = log(kappa^alpha/t).
inline AsymptoticQuote carrwu_smile(const CarrWuModel& m, double kappa,
                                    double t, TailSide side) {
  if (!(kappa > 0.0) || !(t > 0.0))
    throw DomainError("carrwu_smile: requires kappa > 0, t > 0");
  check_stable_alpha(m.alpha);
  const double alpha = m.alpha;
  if (side == TailSide::right) {
    double value;
    if (alpha == 2.0) {
      value = std::sqrt(2.0) * m.sigma;  // exact Black&Scholes limit
    } else {
      const double b_alpha =
          std::pow(alpha * m.sigma, 0.5 * alpha / (alpha - 1.0)) /
          (std::sqrt(2.0 * (alpha - 1.0)) *
           std::pow(std::abs(std::cos(kPi * alpha / 2.0)),
                    0.5 / (alpha - 1.0)));
      value = b_alpha *
              std::pow(kappa / t, -(2.0 - alpha) / (2.0 * (alpha - 1.0)));
    }
    return AsymptoticQuote{value, "cw-right", "kappa/t^{1/alpha} -> infinity",
                           kappa, t, alpha};
  }
  const double L = std::log(std::pow(kappa, alpha) / t);
  if (!(L > 0.0))
    throw RegimeMismatchError("carrwu_smile: left form needs kappa^alpha > t");
  AsymptoticQuote q = tail_to_vol_left(kappa, t, -L, false);
  q.formula = "cw-left";
  q.regime = "kappa/t^{1/alpha} -> infinity (left wing)";
  return q;
}

/// f(a) = min_n (n + a^2/(2 n delta^2)), in closed form through the
/// interval characterization n^2 - n <= (a/delta)^2/2 < n^2 + n.
inline double merton_f(double a, double delta) {
  if (!(a >= 0.0)) throw DomainError("merton_f: requires a >= 0");
  if (!(delta > 0.0)) throw DomainError("merton_f: requires delta > 0");
  if (a == 0.0) return 1.0;
  const double r = 0.5 * (a / delta) * (a / delta);
  double n = std::floor(0.5 + std::sqrt(0.25 + r));
  n = std::max(1.0, n);
  if (n * n - n > r) n -= 1.0;
  if (r >= n * n + n) n += 1.0;
  return n + r / n;
}

enum class MertonTailRegime { k2_scale, high_strike };

inline double merton_k1(double t) {
  if (!(t > 0.0) || !(t < 1.0)) throw DomainError("merton_k1: requires 0 < t < 1");
  return std::sqrt(t * std::log(1.0 / t));
}

inline double merton_k2(double t) {
  if (!(t > 0.0) || !(t < 1.0)) throw DomainError("merton_k2: requires 0 < t < 1");
  return std::sqrt(std::log(1.0 / t));
}

/// Asymptotic log-tail: -f(kappa/k2(t)) log(1/t) on the k2 scale;
/// -(kappa/delta) sqrt(2 log(kappa/t)) for kappa >> k2(t).
inline double merton_tail_logasym(const MertonModel& m, double kappa, double t,
                                  MertonTailRegime regime) {
  if (!(kappa > 0.0)) throw DomainError("merton_tail_logasym: requires kappa > 0");
  if (!(t > 0.0) || !(t < 1.0))
    throw DomainError("merton_tail_logasym: requires 0 < t < 1");
  if (regime == MertonTailRegime::k2_scale) {
    const double a = kappa / merton_k2(t);
    return -merton_f(a, m.delta) * std::log(1.0 / t);
  }
  const double lkt = std::log(kappa / t);
  if (!(lkt > 0.0))
    throw RegimeMismatchError("merton_tail_logasym: needs kappa > t");
  return -(kappa / m.delta) * std::sqrt(2.0 * lkt);
}

/// Merton smile: max{sigma, kappa/sqrt(2 t f(kappa/k2) log(kappa/t))} on
/// the k2 scale, crossing to sqrt(delta kappa/(2 t sqrt(2 log(kappa/t))))
/// for kappa >> k2(t). branch_threshold sets the finite-scale cutoff of
/// "kappa >> k2(t)".
inline AsymptoticQuote merton_smile(const MertonModel& m, double kappa,
                                    double t, double branch_threshold = 10.0) {
  if (!(kappa >= 0.0)) throw DomainError("merton_smile: requires kappa >= 0");
  if (!(t > 0.0) || !(t < 1.0))
    throw DomainError("merton_smile: requires 0 < t < 1");
  const double k2 = merton_k2(t);
  const double ratio = kappa / k2;
  if (ratio >= branch_threshold) {
    const double lkt = std::log(kappa / t);
    const double value =
        std::sqrt(m.delta * kappa / (2.0 * t * std::sqrt(2.0 * lkt)));
    return AsymptoticQuote{value, "merton-high", "kappa >> k2(t)", kappa, t,
                           ratio};
  }
  double val2 = 0.0, f = 0.0;
  if (kappa > 0.0 && std::log(kappa / t) > 0.0) {
    f = merton_f(ratio, m.delta);
    val2 = kappa / std::sqrt(2.0 * t * f * std::log(kappa / t));
  }
  if (val2 <= m.sigma) {
    return AsymptoticQuote{m.sigma, "merton-low", "0 <= kappa <= sigma k1(t)",
                           kappa, t, f};
  }
  return AsymptoticQuote{val2, "merton-mid",
                         "sigma k1(t) << kappa, kappa = O(k2(t))", kappa, t, f};
}

enum class HestonBranch { fixed_t, small_t, conjecture };

/// Heston smile wings: the fixed-t moment formula, the small-t rate
/// function form, and the conjectural interpolation sqrt(kappa/(2C)).
inline AsymptoticQuote heston_smile(const HestonModel& m, double kappa,
                                    double t, HestonBranch branch) {
  if (!(kappa > 0.0) || !(t > 0.0))
    throw DomainError("heston_smile: requires kappa > 0, t > 0");
  switch (branch) {
    case HestonBranch::fixed_t: {
      const double p = heston_explosion_moment(m, t);
      const double value =
          std::isfinite(p)
              ? std::sqrt(2.0 * kappa / t) / (std::sqrt(p) + std::sqrt(p - 1.0))
              : 0.0;
      return AsymptoticQuote{value, "heston-fixed-t",
                             "t fixed, kappa -> infinity", kappa, t, p};
    }
    case HestonBranch::small_t: {
      const double ls = heston_lambda_star(m, kappa);
      if (!(ls > 0.0))
        throw DomainError("heston_smile: Lambda*(kappa) not positive");
      return AsymptoticQuote{kappa / std::sqrt(2.0 * ls), "heston-small-t",
                             "kappa fixed, t -> 0", kappa, t, ls};
    }
    case HestonBranch::conjecture: {
      const double c = heston_c_const(m.rho, m.eta);
      const double value =
          std::isfinite(c) ? std::sqrt(kappa / (2.0 * c)) : 0.0;
      return AsymptoticQuote{value, "heston-conjecture",
                             "conjectural interpolation (not ground truth)",
                             kappa, t, c};
    }
  }
  throw InternalError("heston_smile: unknown branch");
}

}  // namespace smile
