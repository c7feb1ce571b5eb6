#pragma once

// Exact price oracles independent of the asymptotic formulas:
// damped Fourier quadrature from the characteristic function, the
// Merton Poisson-Gaussian mixture sum, and seeded Monte Carlo.
//
// Deep out-of-the-money prices can sit hundreds of orders of magnitude
// below 1. The Fourier pricer therefore (i) picks its damping by
// minimizing the Legendre bound log mgf(1+a) - a kappa, which parks the
// integrand saddle at u = 0, and (ii) factors the integrand's magnitude
// at u = 0 out of the quadrature, so only log-prices need to be
// representable.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>

#include "smile/blackscholes.hpp"
#include "smile/errors.hpp"
#include "smile/models.hpp"
#include "smile/quad.hpp"
#include "smile/stable.hpp"

namespace smile {

enum class PriceMethod { fourier, closed_sum, monte_carlo };

struct PriceResult {
  double price = 0.0;
  double log_price = -kInf;
  PriceMethod method = PriceMethod::fourier;
  double abs_error_bound = 0.0;
  double log_error_bound = -kInf;  ///< log of the bound; survives underflow
  std::optional<double> mc_std_error;
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline double log_mgf_real(const ModelSpec& m, double z, double t) {
  return std::real(model_log_cf(m, cdouble(0.0, -z), t));
}

// Damping choice: minimize log mgf(1+a) - a*kappa over the admissible
// range. For kappa <= 0 the default 1/2 is kept (capped for Heston).
inline double fourier_damping(const ModelSpec& m, double kappa, double t) {
  double a_hi = 1e7;
  if (auto* h = std::get_if<HestonModel>(&m)) {
    const double pstar = heston_explosion_moment(*h, t);
    a_hi = std::isfinite(pstar) ? 0.9 * (pstar - 1.0) : 1e7;
    if (a_hi <= 0.0) throw DomainError("fourier_call: empty damping strip");
  }
  double a = std::min(0.5, a_hi);
  if (kappa <= 0.0) return a;
  auto obj = [&](double x) { return log_mgf_real(m, 1.0 + x, t) - x * kappa; };
  // Ternary search in log a; the objective is convex in a.
  double llo = std::log(1e-3), lhi = std::log(a_hi);
  for (int it = 0; it < 200; ++it) {
    const double l1 = llo + (lhi - llo) / 3.0, l2 = lhi - (lhi - llo) / 3.0;
    if (obj(std::exp(l1)) < obj(std::exp(l2))) lhi = l2; else llo = l1;
  }
  const double a_saddle = std::exp(0.5 * (llo + lhi));
  if (std::isfinite(obj(a_saddle)) && obj(a_saddle) < obj(a)) a = a_saddle;
  return a;
}

}  // namespace detail

/// Characteristic-function call price (Carr-Madan form with damping a):
///   c(k) = e^{-ak}/pi Int_0^inf Re[e^{-iuk} cf(u-(a+1)i) / Den(u)] du,
///   Den(u) = a^2 + a - u^2 + i(2a+1)u.
inline PriceResult fourier_call(const ModelSpec& m, double kappa, double t,
                                std::optional<double> damping = std::nullopt) {
  if (!(t > 0.0)) throw DomainError("fourier_call: requires t > 0");
  validate(m);
  const double a = damping ? *damping : detail::fourier_damping(m, kappa, t);
  if (!(a > 0.0)) throw DomainError("fourier_call: requires damping > 0");
  if (auto* h = std::get_if<HestonModel>(&m)) {
    const double pstar = heston_explosion_moment(*h, t);
    if (std::isfinite(pstar) && 1.0 + a >= pstar)
      throw DomainError("fourier_call: damping outside the Heston strip");
  }
  auto w = [&](double u) {
    return model_log_cf(m, cdouble(u, -(1.0 + a)), t);
  };
  const double w0r = std::real(w(0.0));
  const double scale_log = w0r - a * kappa;  // log of the factored magnitude
  auto integrand = [&](double u) {
    const cdouble den(a * a + a - u * u, (2.0 * a + 1.0) * u);
    const cdouble val =
        std::exp(w(u) - cdouble(0.0, u * kappa) - w0r) / den;
    return std::real(val);
  };
  // Residual oscillation after damping plus the denominator scale set
  // the panel width.
  const cdouble wp = (w(1e-3) - w(0.0)) / 1e-3;
  const double rate = std::abs(kappa - std::imag(wp)) + 1.0;
  const double h = std::min(2.0 * kPi / (6.0 * rate), 2.0);
  double total = 0.0, peak = 0.0, u0 = 0.0;
  int quiet = 0, panels = 0;
  for (; panels < 500000; ++panels) {
    const double part = quad::gl16(integrand, u0, u0 + h);
    total += part;
    peak = std::max(peak, std::abs(part));
    u0 += h;
    if (std::abs(part) < 1e-16 * std::max(peak, 1e-30)) {
      if (++quiet >= 4) break;
    } else {
      quiet = 0;
    }
  }
  if (panels >= 500000)
    throw AccuracyError("fourier_call: quadrature did not converge", peak);
  if (!(total > 0.0))
    throw AccuracyError("fourier_call: integral lost all significance",
                        std::abs(total));
  const double log_price = scale_log + std::log(total / kPi);
  const double price = std::exp(log_price);
  // Roundoff of the scaled integral dominates the truncation residue;
  // kept in logs since the factored scale can be far below underflow.
  const double log_abs_err =
      scale_log + std::log((1e-12 * peak + 1e-15) *
                           std::max(1.0, static_cast<double>(panels)) / kPi);
  PriceResult r;
  r.price = price;
  r.log_price = log_price;
  r.method = PriceMethod::fourier;
  r.abs_error_bound = std::exp(log_abs_err);
  r.log_error_bound = log_abs_err;
  return r;
}

inline double fourier_put(const ModelSpec& m, double kappa, double t) {
  return fourier_call(m, kappa, t).price - (1.0 - std::exp(kappa));
}

/// Truncated Merton mixture: conditioning on the jump count n gives a
/// lognormal with mean mu t + n alpha_j and variance sigma^2 t + n delta^2,
/// priced by the (deep-OTM safe) Black&Scholes routine.
inline PriceResult merton_series_price(const MertonModel& j, double kappa,
                                       double t, int M) {
  if (!(t > 0.0)) throw DomainError("merton_series_price: requires t > 0");
  if (M < 1) throw DomainError("merton_series_price: requires M >= 1");
  const double mu = j.mu();
  const double llt = std::log(j.lambda * t);
  std::vector<double> terms;
  terms.reserve(M + 1);
  for (int n = 0; n <= M; ++n) {
    const double mean = mu * t + n * j.alpha_j;
    const double var = j.sigma * j.sigma * t + n * j.delta * j.delta;
    const double lf = mean + 0.5 * var;  // log forward of the component
    const double kn = kappa - lf;        // component log-strike
    terms.push_back(-j.lambda * t + n * llt - std::lgamma(n + 1.0) + lf +
                    bs_call_log_price(kn, std::sqrt(var)));
  }
  const double log_price = log_sum_exp(terms);
  // Chernoff remainder with the payoff-weighted intensity
  // lambda' = lambda e^{alpha_j + delta^2/2}.
  const double lamp = j.lambda * std::exp(j.alpha_j + 0.5 * j.delta * j.delta);
  const double rem_log = M * (1.0 + std::log(lamp * t) -
                              std::log(static_cast<double>(M)));
  PriceResult r;
  r.price = std::exp(log_price);
  r.log_price = log_price;
  r.method = PriceMethod::closed_sum;
  r.abs_error_bound = std::exp(std::min(700.0, rem_log));
  r.log_error_bound = std::min(700.0, rem_log);
  return r;
}

/// Adaptive-M wrapper used as the Merton exact-price oracle.
inline PriceResult merton_series_price(const MertonModel& j, double kappa,
                                       double t) {
  int M = std::max(12, static_cast<int>(std::ceil(3.0 * std::exp(1.0) *
                                                  j.lambda * t)) + 5);
  for (;;) {
    PriceResult r = merton_series_price(j, kappa, t, M);
    if (r.log_error_bound <= r.log_price + std::log(1e-10)) return r;
    if (M >= 20000)
      throw AccuracyError("merton_series_price: truncation bound unattainable",
                          r.abs_error_bound);
    M *= 2;
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-free splitmix64 stream; one independent stream per path so
// results do not depend on scheduling.
struct PathRng {
  std::uint64_t state;
  PathRng(std::uint64_t seed, std::uint64_t path)
      : state(mix64(seed ^ mix64(path + 0x51ED2700E1D46A1BULL))) {}
  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() {  // in (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  int poisson(double mean) {
    if (mean > 60.0) {  // normal approximation far outside the paper regime
      return std::max(0, static_cast<int>(std::lround(
                             mean + std::sqrt(mean) * normal())));
    }
    const double limit = std::exp(-mean);
    double p = 1.0;
    int k = -1;
    do {
      p *= uniform();
      ++k;
    } while (p > limit);
    return k;
  }
};

inline double sample_log_return(const ModelSpec& m, double t, PathRng& rng,
                                int heston_steps) {
  if (auto* b = std::get_if<BlackScholesModel>(&m)) {
    return b->mu() * t + b->sigma * std::sqrt(t) * rng.normal();
  }
  if (auto* c = std::get_if<CarrWuModel>(&m)) {
    const double y = stable_sample(c->alpha, rng.uniform(), rng.uniform());
    return c->mu() * t + c->sigma * std::pow(t, 1.0 / c->alpha) * y;
  }
  if (auto* j = std::get_if<MertonModel>(&m)) {
    const int n = rng.poisson(j->lambda * t);
    double x = j->mu() * t + j->sigma * std::sqrt(t) * rng.normal();
    if (n > 0)
      x += n * j->alpha_j + j->delta * std::sqrt(static_cast<double>(n)) *
                                rng.normal();
    return x;
  }
  // Heston: full-truncation Euler.
  const auto& h = std::get<HestonModel>(m);
  const double dt = t / heston_steps, sdt = std::sqrt(dt);
  const double rr = std::sqrt(1.0 - h.rho * h.rho);
  double v = h.sigma0, x = 0.0;
  for (int k = 0; k < heston_steps; ++k) {
    const double vp = std::max(v, 0.0);
    const double sv = std::sqrt(vp);
    const double zv = rng.normal(), zx = rng.normal();
    x += -0.5 * vp * dt + sv * sdt * (h.rho * zv + rr * zx);
    v += -h.lambda_h * (vp - h.theta) * dt + h.eta * sv * sdt * zv;
  }
  return x;
}

}  // namespace detail

/// Monte Carlo call price; deterministic in (seed, n_paths), stream per
/// path derived from (seed, path index).
inline PriceResult mc_price(const ModelSpec& m, double kappa, double t,
                            std::uint64_t n_paths, std::uint64_t seed,
                            int heston_steps = 256) {
  if (!(t > 0.0)) throw DomainError("mc_price: requires t > 0");
  if (n_paths < 1) throw DomainError("mc_price: requires n_paths >= 1");
  validate(m);
  const double strike = std::exp(kappa);
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t i = 0; i < n_paths; ++i) {
    detail::PathRng rng(seed, i);
    const double x = detail::sample_log_return(m, t, rng, heston_steps);
    const double payoff = std::max(std::exp(x) - strike, 0.0);
    sum += payoff;
    sum2 += payoff * payoff;
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  const double se = std::sqrt(var / n);
  PriceResult r;
  r.price = mean;
  r.log_price = mean > 0.0 ? std::log(mean) : -kInf;
  r.method = PriceMethod::monte_carlo;
  r.abs_error_bound = 4.0 * se;
  r.log_error_bound = se > 0.0 ? std::log(4.0 * se) : -kInf;
  r.mc_std_error = se;
  r.seed = seed;
  return r;
}

}  // namespace smile
