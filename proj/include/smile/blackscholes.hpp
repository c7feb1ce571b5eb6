#pragma once

// Normalized Black&Scholes pricing (spot 1, zero rate), the inverse map
// to total implied volatility, and the universal price -> implied-vol
// asymptotic formulas. Deep out-of-the-money prices underflow double
// precision long before the asymptotic regimes become interesting, so
// every operation has a log-price twin.

#include <algorithm>
#include <cmath>
#include <string>

#include "smile/errors.hpp"
#include "smile/quad.hpp"
#include "smile/quote.hpp"
#include "smile/specfun.hpp"

namespace smile {

struct BsInputs {
  double kappa;
  double v;  ///< total volatility sigma*sqrt(t)
  double d1;
  double d2;
};

inline BsInputs bs_inputs(double kappa, double v) {
  if (!(v > 0.0)) throw DomainError("bs_inputs: requires v > 0");
  const double d1 = -kappa / v + 0.5 * v;
  return BsInputs{kappa, v, d1, d1 - v};
}

struct OptionPrice {
  double call;
  double put;
  double kappa;
  double t;
};

struct VolQuote {
  double sigma;      ///< annualized implied volatility
  double total_vol;  ///< v = sigma*sqrt(t)
  double kappa;
  double t;
};

namespace detail {

// U(a) - U(b) for 8 <= a < b without cancellation: when the gap is
// small relative to a, integrate -U'(z) = 1 - zU(z) (itself computed
// from the continued-fraction tail) over [a, b].
inline double mills_diff(double a, double b) {
  if (!(b > a)) throw InternalError("mills_diff: requires b > a");
  if (b - a > 0.5 * a) {
    const double ua = 1.0 / (a + mills_cf_tail(a));
    const double ub = 1.0 / (b + mills_cf_tail(b));
    return ua - ub;
  }
  return quad::composite_gl16([](double z) { return one_minus_zu(z); }, a, b, 8);
}

}  // namespace detail

inline double bs_call_price(double kappa, double v);

/// log of the call price; finite for every v > 0 even when the price
/// itself underflows. For kappa >= 0 and d1 < -8 it uses the
/// phi(d1)(U(-d1) - U(-d1+v)) representation.
inline double bs_call_log_price(double kappa, double v) {
  if (!(v >= 0.0)) throw DomainError("bs_call_log_price: requires v >= 0");
  if (!std::isfinite(kappa) || !std::isfinite(v))
    throw DomainError("bs_call_log_price: non-finite input");
  if (kappa < 0.0) return std::log(bs_call_price(kappa, v));
  if (v == 0.0) return -kInf;
  const double d1 = -kappa / v + 0.5 * v;
  if (d1 >= -8.0) {
    const double p =
        gauss_cdf(d1) - std::exp(kappa) * gauss_cdf(d1 - v);
    if (p > 0.0) return std::log(p);
  }
  return log_gauss_pdf(d1) + std::log(detail::mills_diff(-d1, -d1 + v));
}

/// C_BS(kappa, v) = Phi(d1) - e^kappa Phi(d2); (1 - e^kappa)^+ at v = 0.
/// kappa < 0 is reduced to kappa > 0 through the symmetry
/// C(kappa,v) = 1 - e^kappa + e^kappa C(-kappa,v).
inline double bs_call_price(double kappa, double v) {
  if (!std::isfinite(kappa) || !std::isfinite(v))
    throw DomainError("bs_call_price: non-finite input");
  if (v < 0.0) throw DomainError("bs_call_price: requires v >= 0");
  if (v == 0.0) return std::max(0.0, 1.0 - std::exp(kappa));
  if (kappa < 0.0)
    return 1.0 - std::exp(kappa) + std::exp(kappa) * bs_call_price(-kappa, v);
  const double d1 = -kappa / v + 0.5 * v;
  if (d1 < -8.0) return std::exp(bs_call_log_price(kappa, v));
  return gauss_cdf(d1) - std::exp(kappa) * gauss_cdf(d1 - v);
}

inline double bs_put_price(double kappa, double v) {
  // parity: c - p = 1 - e^kappa
  return bs_call_price(kappa, v) - (1.0 - std::exp(kappa));
}

inline OptionPrice bs_option_price(double kappa, double t, double v) {
  const double c = bs_call_price(kappa, v);
  return OptionPrice{c, c - (1.0 - std::exp(kappa)), kappa, t};
}

enum class BsAsymptoticRegime { d1_to_minus_infinity, v_to_zero };

/// log of the sharp small-price estimates for C_BS:
///   d1 -> -inf:  phi(d1) v / ((-d1)(-d1+v))
///   v  -> 0   :  -U'(-d1) phi(d1) v
inline double bs_call_asymptotic_log(double kappa, double v,
                                     BsAsymptoticRegime regime) {
  if (!(kappa >= 0.0)) throw DomainError("bs_call_asymptotic: requires kappa >= 0");
  if (!(v > 0.0)) throw DomainError("bs_call_asymptotic: requires v > 0");
  const double d1 = -kappa / v + 0.5 * v;
  if (regime == BsAsymptoticRegime::d1_to_minus_infinity) {
    if (d1 >= 0.0)
      throw RegimeMismatchError("bs_call_asymptotic: d1 >= 0 in d1->-inf regime");
    return log_gauss_pdf(d1) + std::log(v) - std::log(-d1) - std::log(-d1 + v);
  }
  // -U'(-d1) = 1 - (-d1) U(-d1), positive for every d1.
  const double z = -d1;
  const double mup = z >= 6.0 ? detail::one_minus_zu(z) : -mills_ratio(z).u_prime;
  return std::log(mup) + log_gauss_pdf(d1) + std::log(v);
}

inline double bs_call_asymptotic(double kappa, double v,
                                 BsAsymptoticRegime regime) {
  return std::exp(bs_call_asymptotic_log(kappa, v, regime));
}

/// V_BS for kappa >= 0 given log(c); root of bs_call_log_price(kappa, .) = lc.
inline double bs_invert_vol_log(double kappa, double lc) {
  if (!(kappa >= 0.0))
    throw DomainError("bs_invert_vol_log: requires kappa >= 0");
  if (!(lc < 0.0)) throw DomainError("bs_invert_vol_log: requires log c < 0");
  const double L = -lc;
  double s;
  if (kappa > 0.0) {
    s = 2.0 * kappa / (std::sqrt(2.0 * (L + kappa)) + std::sqrt(2.0 * L));
  } else {
    s = kSqrt2Pi * std::exp(lc);
  }
  s = std::max(s, 1e-12);
  double lo = s, hi = s;
  int guard = 0;
  while (bs_call_log_price(kappa, lo) > lc) {
    lo *= 0.5;
    if (++guard > 2200) throw InternalError("bs_invert_vol: bracket (low)");
  }
  guard = 0;
  while (bs_call_log_price(kappa, hi) < lc) {
    hi *= 2.0;
    if (++guard > 2200) throw InternalError("bs_invert_vol: bracket (high)");
  }
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 90; ++it) {
    const double lm = 0.5 * (llo + lhi);
    (bs_call_log_price(kappa, std::exp(lm)) < lc ? llo : lhi) = lm;
  }
  double vroot = std::exp(0.5 * (llo + lhi));
  // Newton polish: d(log C)/dv = phi(d1)/C.
  for (int it = 0; it < 3; ++it) {
    const double f = bs_call_log_price(kappa, vroot) - lc;
    const double d1 = -kappa / vroot + 0.5 * vroot;
    const double fp = std::exp(log_gauss_pdf(d1) -
                               bs_call_log_price(kappa, vroot));
    const double vn = vroot - f / fp;
    if (!(vn > 0.0) || !std::isfinite(vn)) break;
    vroot = vn;
    if (std::abs(f) < 1e-15) break;
  }
  return vroot;
}

/// V_BS(kappa, c): the total volatility v with C_BS(kappa, v) = c.
inline double bs_invert_vol(double kappa, double c) {
  if (!std::isfinite(kappa) || !std::isfinite(c))
    throw DomainError("bs_invert_vol: non-finite input");
  const double lower = std::max(0.0, 1.0 - std::exp(kappa));
  if (c >= 1.0 || c < lower - 1e-14 * std::max(1.0, lower))
    throw DomainError("bs_invert_vol: price outside [(1-e^kappa)^+, 1)");
  if (c <= lower) return 0.0;
  if (kappa >= 0.0) return bs_invert_vol_log(kappa, std::log(c));
  // kappa < 0: V(kappa, c) = V(-kappa, e^{-kappa}(c - (1 - e^kappa))).
  const double p = c - lower;
  return bs_invert_vol_log(-kappa, std::log(p) - kappa);
}

inline VolQuote implied_vol(double kappa, double t, double call) {
  if (!(t > 0.0)) throw DomainError("implied_vol: requires t > 0");
  const double v = bs_invert_vol(kappa, call);
  return VolQuote{v / std::sqrt(t), v, kappa, t};
}

/// Implied vol from the OTM put price at kappa < 0 (parity applied
/// analytically so tiny put prices survive).
inline VolQuote implied_vol_put(double kappa, double t, double put) {
  if (!(t > 0.0)) throw DomainError("implied_vol_put: requires t > 0");
  if (!(kappa < 0.0)) throw DomainError("implied_vol_put: requires kappa < 0");
  if (!(put > 0.0)) throw DomainError("implied_vol_put: requires put > 0");
  const double v = bs_invert_vol_log(-kappa, std::log(put) - kappa);
  return VolQuote{v / std::sqrt(t), v, kappa, t};
}

/// Same with the log of the OTM price (call for kappa > 0, put for
/// kappa < 0), for prices below the underflow threshold.
inline VolQuote implied_vol_from_log_otm(double kappa, double t,
                                         double log_price) {
  if (!(t > 0.0)) throw DomainError("implied_vol: requires t > 0");
  double v;
  if (kappa >= 0.0) {
    v = bs_invert_vol_log(kappa, log_price);
  } else {
    v = bs_invert_vol_log(-kappa, log_price - kappa);
  }
  return VolQuote{v / std::sqrt(t), v, kappa, t};
}

enum class PriceVolBranch { otm, small_strike, atm };

/// Universal price -> implied vol first-order formulas, taking the log
/// of the OTM option price.
inline AsymptoticQuote price_to_vol_asymptotic_log(double kappa, double t,
                                                   double log_price,
                                                   PriceVolBranch branch) {
  if (!(t > 0.0)) throw DomainError("price_to_vol_asymptotic: requires t > 0");
  if (!std::isfinite(log_price))
    throw DomainError("price_to_vol_asymptotic: non-finite log price");
  const double st = std::sqrt(t);
  switch (branch) {
    case PriceVolBranch::atm: {
      if (kappa != 0.0)
        throw RegimeMismatchError("atm branch requires kappa = 0");
      return AsymptoticQuote{kSqrt2Pi * std::exp(log_price) / st,
                             "price-to-vol-atm", "kappa = 0, price -> 0",
                             kappa, t, log_price};
    }
    case PriceVolBranch::small_strike: {
      if (kappa == 0.0)
        throw RegimeMismatchError("small-strike branch requires kappa != 0");
      const double ak = std::abs(kappa);
      const double z = d_inv_log(log_price - std::log(ak));
      return AsymptoticQuote{ak / (z * st), "price-to-vol-small-strike",
                             "price/|kappa| -> a in (0, inf)", kappa, t, z};
    }
    case PriceVolBranch::otm: {
      if (kappa == 0.0)
        throw RegimeMismatchError("otm branch requires kappa != 0");
      const double L = -log_price;
      if (!(L > 0.0))
        throw DomainError("price_to_vol_asymptotic: otm needs price < 1");
      double value;
      if (kappa > 0.0) {
        value = std::sqrt(2.0 / t) * (std::sqrt(L + kappa) - std::sqrt(L));
      } else {
        const double ak = -kappa;
        if (L < ak)
          throw RegimeMismatchError(
              "price_to_vol_asymptotic: put branch needs -log p >= -kappa");
        value = std::sqrt(2.0 / t) * (std::sqrt(L) - std::sqrt(L - ak));
      }
      return AsymptoticQuote{value, "price-to-vol-otm",
                             "kappa != 0, OTM price -> 0", kappa, t, L};
    }
  }
  throw InternalError("price_to_vol_asymptotic: unknown branch");
}

inline AsymptoticQuote price_to_vol_asymptotic(double kappa, double t,
                                               double price,
                                               PriceVolBranch branch) {
  if (!(price > 0.0))
    throw DomainError("price_to_vol_asymptotic: requires price > 0");
  return price_to_vol_asymptotic_log(kappa, t, std::log(price), branch);
}

}  // namespace smile
