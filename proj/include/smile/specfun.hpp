#pragma once

// Gaussian density/CDF, Mills ratio U and the D function with its inverse.
// Everything here is written so that deep tails keep relative accuracy:
// the CDF goes through erfc, and for large arguments U and D are evaluated
// through the Gaussian-tail continued fraction instead of subtracting
// nearly equal quantities.

#include <cmath>

#include "smile/errors.hpp"
#include "smile/quad.hpp"

namespace smile {

struct GaussPoint {
  double z;
  double pdf;
  double cdf;
};

struct MillsValue {
  double z;
  double u;        ///< U(z) = Phi(-z)/phi(z)
  double u_prime;  ///< U'(z) = z U(z) - 1
};

/// phi(z) = exp(-z^2/2)/sqrt(2 pi).
inline double gauss_pdf(double z) {
  if (!std::isfinite(z)) throw DomainError("gauss_pdf: non-finite input");
  return std::exp(-0.5 * z * z) / kSqrt2Pi;
}

inline double log_gauss_pdf(double z) {
  return -0.5 * z * z - std::log(kSqrt2Pi);
}

/// Phi(z), evaluated through erfc so that Phi(-z) for large z keeps
/// relative accuracy.
inline double gauss_cdf(double z) {
  if (!std::isfinite(z)) throw DomainError("gauss_cdf: non-finite input");
  return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

inline GaussPoint gauss_point(double z) {
  return GaussPoint{z, gauss_pdf(z), gauss_cdf(z)};
}

namespace detail {

// Tail of the Gaussian continued fraction:
//   U(z) = 1/(z + 1/(z + 2/(z + 3/(...)))),   r(z) := 1/U(z) - z,
// i.e. r = 1/(z + 2/(z + 3/(...))), evaluated by the modified Lentz
// algorithm with partial numerators a_k = k. Reliable for z >= ~6.
inline double mills_cf_tail(double z) {
  const double tiny = 1e-300;
  double f = tiny, c = f, d = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double a = static_cast<double>(k);
    d = z + a * d;
    if (d == 0.0) d = tiny;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return f;
  }
  throw InternalError("mills_cf_tail: continued fraction did not converge");
}

// 1 - z U(z) = r/(z + r), free of cancellation for large z.
inline double one_minus_zu(double z) {
  const double r = mills_cf_tail(z);
  return r / (z + r);
}

}  // namespace detail

/// Mills ratio U(z) = Phi(-z)/phi(z) with its derivative.
/// For z > 30 the continued-fraction branch is used (the direct ratio
/// loses relative accuracy once phi underflows the normal range).
inline MillsValue mills_ratio(double z) {
  if (!std::isfinite(z)) throw DomainError("mills_ratio: non-finite input");
  double u;
  if (z > 30.0) {
    u = 1.0 / (z + detail::mills_cf_tail(z));
  } else if (z >= -30.0) {
    u = gauss_cdf(-z) / gauss_pdf(z);
  } else {
    // Far left: U(z) = Phi(-z)/phi(z) ~ 1/phi(z); work in logs to
    // avoid premature overflow of the ratio.
    u = std::exp(std::log(gauss_cdf(-z)) - log_gauss_pdf(z));
  }
  return MillsValue{z, u, z * u - 1.0};
}

/// log Phi(-z), accurate for all z (large positive z via Mills ratio).
inline double log_gauss_sf(double z) {
  if (z <= 30.0) return std::log(gauss_cdf(-z));
  return log_gauss_pdf(z) - std::log(z + detail::mills_cf_tail(z));
}

/// D(z) = phi(z)/z - Phi(-z), z > 0. Strictly decreasing.
inline double d_fn(double z) {
  if (!(z > 0.0)) throw DomainError("d_fn: requires z > 0");
  if (z < 6.0) return gauss_pdf(z) / z - gauss_cdf(-z);
  // D = phi(z) (1/z - U(z)) = phi(z) r / (z (z + r)).
  const double r = detail::mills_cf_tail(z);
  return gauss_pdf(z) * r / (z * (z + r));
}

/// log D(z); usable far beyond the underflow point of D itself.
inline double d_log(double z) {
  if (!(z > 0.0)) throw DomainError("d_log: requires z > 0");
  if (z < 6.0) return std::log(d_fn(z));
  const double r = detail::mills_cf_tail(z);
  return log_gauss_pdf(z) + std::log(r) - std::log(z) - std::log(z + r);
}

namespace detail {

// Solve d_log(z) = ly by bracketed bisection. d_log is strictly
// decreasing from +inf (z->0+) to -inf.
inline double d_inv_log(double ly) {
  // Asymptotic seeds: D(z) ~ 1/(sqrt(2 pi) z) for small z and
  // D(z) ~ phi(z)/z^3 for large z, so D^-1(y) ~ sqrt(2(-log y)).
  double s;
  if (ly < std::log(0.3)) {
    s = std::sqrt(2.0 * (-ly));
  } else {
    s = std::exp(-ly) / kSqrt2Pi;
  }
  double lo = std::max(1e-307, s / 10.0), hi = 10.0 * s;
  int guard = 0;
  while (d_log(lo) < ly) {
    lo *= 0.1;
    if (++guard > 400) throw InternalError("d_inv: cannot bracket from below");
  }
  guard = 0;
  while (d_log(hi) > ly) {
    hi *= 2.0;
    if (++guard > 400) throw InternalError("d_inv: cannot bracket from above");
  }
  // Bisect in log z (the root may live anywhere in [1e-300, 40]).
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 90; ++it) {
    const double lm = 0.5 * (llo + lhi);
    (d_log(std::exp(lm)) > ly ? llo : lhi) = lm;
  }
  double z = std::exp(0.5 * (llo + lhi));
  // Newton polish on g(z) = d_log(z) - ly; g'(z) = D'(z)/D(z).
  for (int it = 0; it < 4; ++it) {
    const double g = d_log(z) - ly;
    const double gp = -std::exp(log_gauss_pdf(z) - 2.0 * std::log(z) - d_log(z));
    const double step = g / gp;
    const double zn = z - step;
    if (!(zn > 0.0) || !std::isfinite(zn)) break;
    z = zn;
    if (std::abs(step) < 1e-16 * z) break;
  }
  return z;
}

}  // namespace detail

/// D^-1(y): the z > 0 with D(z) = y, relative residual <= 1e-12.
inline double d_inv(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("d_inv: requires y > 0");
  return detail::d_inv_log(std::log(y));
}

/// D^-1 taking log(y) directly, for arguments far below the underflow
/// threshold of double precision.
inline double d_inv_log(double log_y) {
  if (!std::isfinite(log_y)) throw DomainError("d_inv_log: non-finite input");
  return detail::d_inv_log(log_y);
}

}  // namespace smile
