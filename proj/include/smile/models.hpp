#pragma once

// The four risk-neutral models: parameterizations with the martingale
// drift fixing, characteristic/moment generating functions, exact or
// semi-exact tail probabilities, small-time scaling data, and the
// Heston moment-explosion analytics.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smile/errors.hpp"
#include "smile/quad.hpp"
#include "smile/specfun.hpp"
#include "smile/stable.hpp"
#include "smile/tail.hpp"

namespace smile {

using cdouble = std::complex<double>;

struct BlackScholesModel {
  double sigma;
  double mu() const { return -0.5 * sigma * sigma; }
};

/// Finite-moment logstable model: X_t = mu t + L_t with L alpha-stable,
/// beta = -1, and mu = sigma^alpha / cos(pi alpha / 2) (negative for
/// alpha < 2) so that e^X is a martingale.
struct CarrWuModel {
  double sigma;
  double alpha;  ///< in (1, 2]
  double mu() const { return std::pow(sigma, alpha) / std::cos(kPi * alpha / 2.0); }
};

/// Jump diffusion: X_t = mu t + sigma W_t + sum of N(alpha_j, delta^2)
/// jumps at Poisson(lambda) times. mu is fixed by the martingale
/// condition unless explicitly overridden.
struct MertonModel {
  double sigma;
  double lambda;
  double alpha_j;
  double delta;
  std::optional<double> mu_override;
  double mu() const {
    if (mu_override) return *mu_override;
    return -0.5 * sigma * sigma -
           lambda * (std::exp(alpha_j + 0.5 * delta * delta) - 1.0);
  }
};

/// dV = -lambda_h (V - theta) dt + eta sqrt(V) dB, V_0 = sigma0,
/// dX = -V/2 dt + sqrt(V) dW, d<W,B> = rho dt.
struct HestonModel {
  double lambda_h;
  double theta;
  double eta;
  double sigma0;  ///< initial variance V_0
  double rho;     ///< in [-1, 1]
};

using ModelSpec =
    std::variant<BlackScholesModel, CarrWuModel, MertonModel, HestonModel>;

inline std::string model_name(const ModelSpec& m) {
  switch (m.index()) {
    case 0: return "blackscholes";
    case 1: return "carrwu";
    case 2: return "merton";
    case 3: return "heston";
  }
  return "?";
}

inline void validate(const ModelSpec& m) {
  if (auto* b = std::get_if<BlackScholesModel>(&m)) {
    if (!(b->sigma > 0.0)) throw DomainError("blackscholes: sigma > 0 required");
  } else if (auto* c = std::get_if<CarrWuModel>(&m)) {
    if (!(c->sigma > 0.0)) throw DomainError("carrwu: sigma > 0 required");
    check_stable_alpha(c->alpha);
  } else if (auto* j = std::get_if<MertonModel>(&m)) {
    if (!(j->sigma > 0.0) || !(j->lambda > 0.0) || !(j->delta > 0.0))
      throw DomainError("merton: sigma, lambda, delta > 0 required");
  } else if (auto* h = std::get_if<HestonModel>(&m)) {
    if (!(h->lambda_h > 0.0) || !(h->theta > 0.0) || !(h->eta > 0.0) ||
        !(h->sigma0 > 0.0))
      throw DomainError("heston: lambda_h, theta, eta, sigma0 > 0 required");
    if (!(h->rho >= -1.0) || !(h->rho <= 1.0))
      throw DomainError("heston: rho in [-1, 1] required");
  }
}

// ---------------------------------------------------------------------------
// log characteristic function, on the complex strip where it is analytic
// (Im z <= 0 extends to all exponential moments a model owns).
// ---------------------------------------------------------------------------

namespace detail {

inline cdouble heston_log_cf(const HestonModel& h, cdouble z, double t) {
  const cdouble i(0.0, 1.0);
  const double eta2 = h.eta * h.eta;
  const cdouble xi = h.lambda_h - i * h.rho * h.eta * z;
  cdouble d = std::sqrt(xi * xi + eta2 * (i * z + z * z));
  if (std::abs(xi + d) < 1e-12 * std::abs(d)) d = -d;  // avoid g blow-up
  const cdouble g = (xi - d) / (xi + d);
  const cdouble emdt = std::exp(-d * t);
  const cdouble log_ratio = std::log((1.0 - g * emdt) / (1.0 - g));
  return (h.lambda_h * h.theta / eta2) * ((xi - d) * t - 2.0 * log_ratio) +
         (h.sigma0 / eta2) * (xi - d) * (1.0 - emdt) / (1.0 - g * emdt);
}

}  // namespace detail

/// log E[exp(izX_t)]. Real z gives the characteristic function; the
/// lower half-plane reaches the exponential moments used by the
/// damped Fourier pricer.
inline cdouble model_log_cf(const ModelSpec& m, cdouble z, double t) {
  if (!(t > 0.0)) throw DomainError("model_log_cf: requires t > 0");
  const cdouble i(0.0, 1.0);
  if (auto* b = std::get_if<BlackScholesModel>(&m)) {
    const double s2 = b->sigma * b->sigma;
    return t * (i * z * b->mu() - 0.5 * s2 * z * z);
  }
  if (auto* c = std::get_if<CarrWuModel>(&m)) {
    const cdouble iz = i * z;
    cdouble pw = (std::abs(iz) == 0.0) ? cdouble(0.0) : std::pow(iz, c->alpha);
    return t * (iz * c->mu() -
                std::pow(c->sigma, c->alpha) * pw / std::cos(kPi * c->alpha / 2.0));
  }
  if (auto* j = std::get_if<MertonModel>(&m)) {
    const cdouble iz = i * z;
    return t * (iz * j->mu() + 0.5 * j->sigma * j->sigma * iz * iz +
                j->lambda *
                    (std::exp(iz * j->alpha_j +
                              0.5 * j->delta * j->delta * iz * iz) -
                     1.0));
  }
  return detail::heston_log_cf(std::get<HestonModel>(m), z, t);
}

inline cdouble model_cf(const ModelSpec& m, double u, double t) {
  return std::exp(model_log_cf(m, cdouble(u, 0.0), t));
}

// ---------------------------------------------------------------------------
// Heston moment explosion
// ---------------------------------------------------------------------------

/// C(rho, eta): the constant in p*(t) ~ C/t. +infinity at rho = -1.
inline double heston_c_const(double rho, double eta) {
  if (rho >= 1.0) return 2.0 / eta;
  const double q = std::sqrt((1.0 - rho) * (1.0 + rho));
  if (q == 0.0) return kInf;  // rho = -1
  return 2.0 * std::atan2(q, rho) / (eta * q);
}

struct HestonExplosion {
  double p;
  double t_star;  ///< T*(p), +infinity when the moment never explodes
  double chi;
  double disc;
  double c_const;
};

/// T*(p): explosion time of E[S_t^p], exact three-branch formula.
inline HestonExplosion heston_explosion_time(const HestonModel& h, double p) {
  if (!(p > 1.0)) throw DomainError("heston_explosion_time: requires p > 1");
  const double chi = h.rho * h.eta * p - h.lambda_h;
  const double disc = chi * chi - h.eta * h.eta * (p * p - p);
  const double c = heston_c_const(h.rho, h.eta);
  double ts;
  if (disc >= 0.0) {
    if (chi < 0.0) {
      ts = kInf;
    } else if (chi > 0.0) {
      const double sd = std::sqrt(disc);
      ts = std::log((chi + sd) / (chi - sd)) / sd;
    } else {
      throw BoundaryCaseError(
          "heston_explosion_time: chi = 0 with disc >= 0 is not covered");
    }
  } else {
    const double sd = std::sqrt(-disc);
    // atan2 realizes arctan(sd/chi) + pi*[chi < 0] in one stroke.
    ts = 2.0 / sd * std::atan2(sd, chi);
  }
  return HestonExplosion{p, ts, chi, disc, c};
}

/// p*(t): the unique p > 1 with T*(p) = t; +infinity when rho = -1.
inline double heston_explosion_moment(const HestonModel& h, double t) {
  if (!(t > 0.0)) throw DomainError("heston_explosion_moment: requires t > 0");
  if (h.rho <= -1.0) return kInf;
  auto tstar = [&](double q) {  // q = p - 1
    return heston_explosion_time(h, 1.0 + q).t_star;
  };
  double qlo = 1e-11, qhi = 1.0;
  int guard = 0;
  while (tstar(qhi) >= t) {
    qhi *= 2.0;
    if (++guard > 80)
      throw InternalError("heston_explosion_moment: bracket failure");
  }
  if (tstar(qlo) < t)
    throw InternalError("heston_explosion_moment: T* below t near p = 1");
  double llo = std::log(qlo), lhi = std::log(qhi);
  for (int it = 0; it < 120; ++it) {
    const double lm = 0.5 * (llo + lhi);
    (tstar(std::exp(lm)) >= t ? llo : lhi) = lm;
  }
  return 1.0 + std::exp(0.5 * (llo + lhi));
}

/// Lambda(p): the limiting cumulant slope of the Heston small-time
/// regime; finite on [0, C), +infinity beyond.
inline double heston_lambda(const HestonModel& h, double p) {
  if (!(p >= 0.0)) throw DomainError("heston_lambda: requires p >= 0");
  if (p == 0.0) return 0.0;
  const double c = heston_c_const(h.rho, h.eta);
  if (p >= c) return kInf;
  const double q = std::sqrt((1.0 - h.rho) * (1.0 + h.rho));
  double denom_inner;  // q cot(eta p q / 2), with the |rho| = 1 limit
  const double x = 0.5 * h.eta * p * q;
  if (x < 1e-7) {
    denom_inner = 2.0 / (h.eta * p) - x * q / 3.0;
  } else {
    denom_inner = q * std::cos(x) / std::sin(x);
  }
  const double denom = h.eta * (denom_inner - h.rho);
  if (!(denom > 0.0)) return kInf;
  return h.sigma0 * p / denom;
}

/// Lambda*(kappa) = sup_p (p kappa - Lambda(p)), by ternary search on
/// the concave objective.
inline double heston_lambda_star(const HestonModel& h, double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("heston_lambda_star: requires kappa >= 0");
  if (kappa == 0.0) return 0.0;
  const double c = heston_c_const(h.rho, h.eta);
  const double hi = std::isfinite(c) ? c * (1.0 - 1e-12) : 1e8;
  auto g = [&](double p) { return p * kappa - heston_lambda(h, p); };
  double a = 0.0, b = hi;
  for (int it = 0; it < 300; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (g(m1) < g(m2)) a = m1; else b = m2;
  }
  return std::max(0.0, g(0.5 * (a + b)));
}

// ---------------------------------------------------------------------------
// moment generating function
// ---------------------------------------------------------------------------

/// E[exp(z X_t)] as an extended real; +infinity where the moment
/// explodes (CarrWu z < 0; Heston beyond the explosion boundary).
inline double model_mgf(const ModelSpec& m, double z, double t) {
  if (!(t > 0.0)) throw DomainError("model_mgf: requires t > 0");
  if (z == 0.0) return 1.0;
  if (auto* c = std::get_if<CarrWuModel>(&m)) {
    if (z < 0.0) return kInf;
    return std::exp(t * (z * c->mu() - std::pow(z * c->sigma, c->alpha) /
                                           std::cos(kPi * c->alpha / 2.0)));
  }
  if (auto* h = std::get_if<HestonModel>(&m)) {
    if (z == 1.0) return 1.0;  // martingale
    if (z < 0.0 || z > 1.0) {
      // explosion boundary; the T* formula applies verbatim whenever
      // z^2 - z > 0, i.e. on both wings.
      const double chi = h->rho * h->eta * z - h->lambda_h;
      const double disc = chi * chi - h->eta * h->eta * (z * z - z);
      double ts;
      if (disc >= 0.0) {
        if (chi >= 0.0 && chi * chi >= disc && chi > 0.0) {
          const double sd = std::sqrt(disc);
          ts = std::log((chi + sd) / (chi - sd)) / sd;
        } else {
          ts = kInf;
        }
      } else {
        const double sd = std::sqrt(-disc);
        ts = 2.0 / sd * std::atan2(sd, chi);
      }
      if (t >= ts) return kInf;
    }
    return std::exp(std::real(model_log_cf(m, cdouble(0.0, -z), t)));
  }
  // BlackScholes and Merton own all exponential moments.
  return std::exp(std::real(model_log_cf(m, cdouble(0.0, -z), t)));
}

// ---------------------------------------------------------------------------
// tail probabilities
// ---------------------------------------------------------------------------

namespace detail {

// Gil-Pelaez tail from the model cf:
//   P(X > kappa)  = 1/2 + (1/pi) int_0^inf Im[e^{-iu kappa} cf(u)]/u du
//   P(X <= -kappa) = 1/2 - (1/pi) int_0^inf Im[e^{ iu kappa} cf(u)]/u du
inline double gil_pelaez_tail(const ModelSpec& m, TailSide side, double kappa,
                              double t) {
  const double x = side == TailSide::right ? kappa : -kappa;
  auto integrand = [&](double u) {
    const cdouble v =
        std::exp(model_log_cf(m, cdouble(u, 0.0), t) - cdouble(0.0, u * x));
    return std::imag(v) / u;
  };
  // Oscillation rate: strike phase plus the cf's own drift phase.
  const double drift =
      std::abs(std::imag(model_log_cf(m, cdouble(1.0, 0.0), t)));
  const double h = 2.0 * kPi / (6.0 * (std::abs(x) + drift + 1.0));
  double total = 0.0, u0 = 1e-12;
  int quiet = 0;
  for (int k = 0; k < 400000; ++k) {
    const double part = quad::gl16(integrand, u0, u0 + h);
    total += part;
    u0 += h;
    if (std::abs(part) < 1e-15) {
      if (++quiet >= 4 && u0 > 20.0 * h) break;
    } else {
      quiet = 0;
    }
  }
  const double f_shift = total / kPi;
  return side == TailSide::right ? 0.5 + f_shift : 0.5 - f_shift;
}

// Merton truncated Poisson-Gaussian sum, in log space.
inline double merton_tail_log_sum(const MertonModel& j, TailSide side,
                                  double kappa, double t, int M) {
  const double mu = j.mu();
  const double llt = std::log(j.lambda * t);
  std::vector<double> terms;
  terms.reserve(M + 1);
  for (int n = 0; n <= M; ++n) {
    const double mean = mu * t + n * j.alpha_j;
    const double sd = std::sqrt(j.sigma * j.sigma * t + n * j.delta * j.delta);
    const double z = side == TailSide::right ? (kappa - mean) / sd
                                             : (kappa + mean) / sd;
    terms.push_back(-j.lambda * t + n * llt - std::lgamma(n + 1.0) +
                    log_gauss_sf(z));
  }
  return log_sum_exp(terms);
}

// log of the Chernoff remainder bound (e lam t / M)^M.
inline double merton_remainder_log(double lam, double t, int M) {
  return M * (1.0 + std::log(lam * t) - std::log(static_cast<double>(M)));
}

}  // namespace detail

/// Merton tail with explicit truncation point M (exposed for the
/// truncation-property checks; model_tail picks M adaptively).
inline TailEstimate merton_tail(const MertonModel& j, TailSide side,
                                double kappa, double t, int M) {
  if (!(kappa > 0.0) || !(t > 0.0))
    throw DomainError("merton_tail: requires kappa > 0, t > 0");
  const double lv = detail::merton_tail_log_sum(j, side, kappa, t, M);
  const double rem = std::exp(
      std::min(700.0, detail::merton_remainder_log(j.lambda, t, M)));
  return TailEstimate{std::exp(lv), lv, side, TailMethod::closed_sum, rem};
}

/// P(X_t > kappa) (right) or P(X_t <= -kappa) (left), kappa > 0.
inline TailEstimate model_tail(const ModelSpec& m, TailSide side, double kappa,
                               double t) {
  if (!(kappa > 0.0) || !(t > 0.0))
    throw DomainError("model_tail: requires kappa > 0, t > 0");
  if (auto* b = std::get_if<BlackScholesModel>(&m)) {
    const double sd = b->sigma * std::sqrt(t);
    const double z = side == TailSide::right ? (kappa - b->mu() * t) / sd
                                             : (kappa + b->mu() * t) / sd;
    const double lv = log_gauss_sf(z);
    return TailEstimate{std::exp(lv), lv, side, TailMethod::closed_sum, 1e-15};
  }
  if (auto* c = std::get_if<CarrWuModel>(&m)) {
    const double scale = c->sigma * std::pow(t, 1.0 / c->alpha);
    if (side == TailSide::right) {
      const double x = (kappa - c->mu() * t) / scale;
      if (!(x > 0.0))
        throw AccuracyError("model_tail: carrwu right tail needs kappa > mu t",
                            1.0);
      TailEstimate e = stable_right_tail(x, c->alpha);
      e.side = side;
      return e;
    }
    const double y = -(kappa + c->mu() * t) / scale;  // P(Y <= y)
    if (y < -15.0 && c->alpha < 2.0) {
      TailEstimate e = stable_left_tail(-y, c->alpha);
      e.side = side;
      return e;
    }
    const double p = stable_cdf(y, c->alpha);
    return TailEstimate{p, std::log(p), side, TailMethod::quadrature, 1e-10};
  }
  if (auto* j = std::get_if<MertonModel>(&m)) {
    const double elt = std::exp(1.0) * j->lambda * t;
    int M = std::max(10, static_cast<int>(std::ceil(3.0 * elt)) + 5);
    for (;;) {
      TailEstimate e = merton_tail(*j, side, kappa, t, M);
      const double rem_log = detail::merton_remainder_log(j->lambda, t, M);
      if (rem_log <= e.log_value + std::log(1e-9)) return e;
      if (M >= 20000)
        throw AccuracyError("model_tail: merton truncation bound unattainable",
                            e.abs_error_bound);
      M *= 2;
    }
  }
  // Heston: cf inversion; no usable closed tails.
  const double p = detail::gil_pelaez_tail(m, side, kappa, t);
  if (!(p > 0.0))
    throw AccuracyError("model_tail: heston tail below quadrature resolution",
                        1e-8);
  return TailEstimate{p, std::log(p), side, TailMethod::quadrature, 1e-8};
}

// ---------------------------------------------------------------------------
// small-time scaling data
// ---------------------------------------------------------------------------

struct GaussianLaw {
  double sd;
};
struct SkewedStableLaw {
  double alpha;
  double scale;
};
using LimitLaw = std::variant<GaussianLaw, SkewedStableLaw>;

struct ScalingData {
  std::function<double(double)> gamma;  ///< t -> gamma_t
  LimitLaw limit_law;
  std::function<double(double)> rv_index_right;  ///< rho -> I+(rho)
  std::function<double(double)> rv_index_left;   ///< rho -> I-(rho)
};

inline ScalingData scaling_data(const ModelSpec& m) {
  if (auto* b = std::get_if<BlackScholesModel>(&m)) {
    const double s = b->sigma;
    return ScalingData{[](double t) { return std::sqrt(t); }, GaussianLaw{s},
                       [](double r) { return r * r; },
                       [](double r) { return r * r; }};
  }
  if (auto* c = std::get_if<CarrWuModel>(&m)) {
    const double a = c->alpha, s = c->sigma;
    return ScalingData{[a](double t) { return std::pow(t, 1.0 / a); },
                       SkewedStableLaw{a, s},
                       [a](double r) { return std::pow(r, a / (a - 1.0)); },
                       [](double) { return 1.0; }};
  }
  if (auto* j = std::get_if<MertonModel>(&m)) {
    const double s = j->sigma;
    // I+ here is the high-strike index; the k2-scale regime uses
    // f(rho a)/f(a), available through merton_f in the asymptotics layer.
    return ScalingData{[](double t) { return std::sqrt(t); }, GaussianLaw{s},
                       [](double r) { return r; },
                       [](double r) { return r; }};
  }
  const auto& h = std::get<HestonModel>(m);
  const double sd = std::sqrt(h.sigma0);  // Y ~ N(0, sigma0)
  return ScalingData{[](double t) { return std::sqrt(t); }, GaussianLaw{sd},
                     [](double r) { return r; }, [](double r) { return r; }};
}

}  // namespace smile
