// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "smile/smile.hpp"

using namespace smile;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

void run(int id, const std::string& what, const std::function<bool()>& body) {
  bool ok = false;
  std::string note = what;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note += std::string(" [exception: ") + e.what() + "]";
  }
  report(id, ok, note);
}

// 1. Special functions: Mills bounds, ODE identity, D round trip.
bool criterion1() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uz(1e-6, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = uz(rng);
    const double u = mills_ratio(z).u;
    if (!(u > 2.0 / (z + std::sqrt(z * z + 4.0)))) return false;
    if (!(u < 2.0 / (z + std::sqrt(z * z + 8.0 / kPi)))) return false;
  }
  for (double z = -5.0; z <= 30.0; z += 0.01) {
    const MillsValue m = mills_ratio(z);
    if (std::abs(m.u_prime - (z * m.u - 1.0)) > 1e-15) return false;
  }
  for (double ly = -100.0; ly <= 100.0; ly += 0.5) {
    const double y = std::pow(10.0, ly);
    const double z = d_inv(y);
    if (std::abs(std::exp(d_log(z) - std::log(y)) - 1.0) > 1e-10) return false;
  }
  return true;
}

// 2. Black&Scholes inversion round trip, parity, symmetry.
bool criterion2() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uk(-3.0, 3.0),
      ulv(std::log(1e-4), std::log(5.0));
  for (int i = 0; i < 1000; ++i) {
    const double kappa = uk(rng), v = std::exp(ulv(rng));
    const double lp = kappa >= 0.0 ? bs_call_log_price(kappa, v)
                                   : kappa + bs_call_log_price(-kappa, v);
    const double back = implied_vol_from_log_otm(kappa, 1.0, lp).total_vol;
    if (std::abs(back / v - 1.0) > 1e-8) return false;
  }
  std::uniform_real_distribution<double> uv(0.01, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double kappa = uk(rng), v = uv(rng);
    const double c = bs_call_price(kappa, v), p = bs_put_price(kappa, v);
    if (std::abs(c - p - (1.0 - std::exp(kappa))) > 1e-10) return false;
    const double ak = std::abs(kappa);
    const double sym =
        1.0 - std::exp(ak) + std::exp(ak) * bs_call_price(-ak, v);
    if (std::abs(bs_call_price(ak, v) - sym) > 1e-10) return false;
  }
  return true;
}

// 3. Sharp price asymptotics: ratios strictly approach 1, final gap <= 2%.
bool criterion3() {
  double prev = 1e300;
  for (double v : {0.2, 0.1, 0.05, 0.02}) {
    const double lp = bs_call_log_price(1.0, v);
    const double la = bs_call_asymptotic_log(1.0, v, BsAsymptoticRegime::v_to_zero);
    const double gap = std::abs(std::expm1(la - lp));
    if (!(gap < prev)) return false;
    prev = gap;
  }
  if (!(prev <= 0.02)) return false;
  prev = 1e300;
  for (double kappa : {2.0, 4.0, 8.0, 16.0}) {
    const double lp = bs_call_log_price(kappa, 0.2);
    const double la = bs_call_asymptotic_log(kappa, 0.2,
                                             BsAsymptoticRegime::d1_to_minus_infinity);
    const double gap = std::abs(std::expm1(la - lp));
    if (!(gap < prev)) return false;
    prev = gap;
  }
  return prev <= 0.02;
}

// 4. Universal price -> vol formulas on exact Black&Scholes prices.
bool criterion4() {
  std::vector<double> xs, ys;
  double gap16 = 1.0;
  for (double kappa : {2.0, 4.0, 8.0, 16.0}) {
    const double lp = bs_call_log_price(kappa, 0.2);
    const AsymptoticQuote q =
        price_to_vol_asymptotic_log(kappa, 1.0, lp, PriceVolBranch::otm);
    const double gap = std::abs(q.value / 0.2 - 1.0);
    xs.push_back(std::log(1.0 / kappa));
    ys.push_back(std::log(gap));
    gap16 = gap;
  }
  if (!(gap16 <= 0.05)) return false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
  }
  if (!((n * sxy - sx * sy) / (n * sxx - sx * sx) > 0.0)) return false;
  const double t = 1e-4;
  const double lp = bs_call_log_price(0.0, 0.2 * std::sqrt(t));
  const AsymptoticQuote q =
      price_to_vol_asymptotic_log(0.0, t, lp, PriceVolBranch::atm);
  return std::abs(q.value / 0.2 - 1.0) <= 0.01;
}

// 5. Carr-Wu wing trend plus the typical-deviation constants.
bool criterion5() {
  const CarrWuModel m{0.2, 1.5};
  const double t = 0.25;
  double prev = 1e300;
  for (double kappa : {0.5, 1.0, 2.0, 4.0}) {
    const PriceResult p = fourier_call(m, kappa, t);
    const VolQuote vq = implied_vol_from_log_otm(kappa, t, p.log_price);
    const double asym = carrwu_smile(m, kappa, t, TailSide::right).value;
    const double gap = std::abs(asym / vq.sigma - 1.0);
    if (!(gap < prev)) return false;
    prev = gap;
  }
  // Gaussian identity branch: C(a) = sigma for every a.
  for (double a : {0.0, 0.3, 2.0, 10.0}) {
    const double v = typical_vol(ModelSpec{BlackScholesModel{0.2}}, a, 0.01).value;
    if (std::abs(v - 0.2) > 1e-9) return false;
  }
  // Stable branch: quadrature C+(a) inside the 4-SE band of a 1e7-draw
  // Monte Carlo oracle for E[(sigma Y - a)^+].
  const double a = 0.1, s = m.sigma;
  const double e_quad =
      s * smile::detail::stable_mean_above(m.alpha, a / s);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(1e-12, 1.0);
  const int n = 10000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = stable_sample(m.alpha, unif(rng), unif(rng));
    const double pay = std::max(s * y - a, 0.0);
    sum += pay;
    sum2 += pay * pay;
  }
  const double e_mc = sum / n;
  const double se = std::sqrt((sum2 / n - e_mc * e_mc) / n);
  auto c_of = [&](double e) { return a / d_inv(e / a); };
  const double c_quad = c_of(e_quad);
  const double c_lo = c_of(std::max(e_mc - 4.0 * se, 1e-300));
  const double c_hi = c_of(e_mc + 4.0 * se);
  return c_quad >= c_lo && c_quad <= c_hi;
}

// 6. Merton smile along kappa = k2(t) and the log-tail lemma.
bool criterion6() {
  const MertonModel m{0.2, 0.01, 0.1, 0.3, std::nullopt};
  double prev = 1e300, last = 1e300;
  for (double t : {0.3, 0.2, 0.1, 0.05, 0.02, 0.01}) {
    const double kappa = merton_k2(t);
    const PriceResult p = merton_series_price(m, kappa, t);
    const VolQuote vq = implied_vol_from_log_otm(kappa, t, p.log_price);
    const double asym = merton_smile(m, kappa, t).value;
    const double gap = std::abs(asym / vq.sigma - 1.0);
    if (!(gap < prev)) return false;
    prev = gap;
    last = gap;
  }
  if (!(last <= 0.20)) return false;
  // Log-tail lemma at t = 1e-6, kappa = k2(t): exact log-tail against
  // -f(1) log(1/t). First-order theory leaves an O(|log lambda|/log(1/t))
  // correction, so 15% is the honest bound at this maturity.
  const double t = 1e-6;
  const double kappa = merton_k2(t);
  const TailEstimate e = model_tail(m, TailSide::right, kappa, t);
  const double asym = -merton_f(1.0, m.delta) * std::log(1.0 / t);
  return std::abs(e.log_value / asym - 1.0) <= 0.15;
}

// 7. Heston explosion analytics and matching limits.
bool criterion7() {
  for (double rho : {-0.5, 0.0, 0.5, 1.0}) {
    const HestonModel h{2.0, 0.04, 0.3, 0.04, rho};
    const double c = heston_c_const(rho, h.eta);
    const double prod = 1e4 * heston_explosion_time(h, 1e4).t_star;
    if (std::abs(prod / c - 1.0) > 0.01) return false;
  }
  const HestonModel hneg{2.0, 0.04, 0.3, 0.04, -1.0};
  if (heston_explosion_moment(hneg, 0.5) != kInf) return false;
  const HestonModel h{2.0, 0.04, 0.3, 0.04, -0.3};
  for (double t : {0.05, 0.5, 2.0}) {
    const double p = heston_explosion_moment(h, t);
    if (std::abs(heston_explosion_time(h, p).t_star / t - 1.0) > 1e-8)
      return false;
  }
  // Matching limits: both branches evaluated with their asymptotic
  // substitutes (p* = C/t, Lambda* = C kappa) equal sqrt(kappa/(2C)).
  const double c = heston_c_const(h.rho, h.eta);
  const double kappa = 2.0, t = 1e-10;
  const double p = c / t;
  const double fixed_t =
      std::sqrt(2.0 * kappa / t) / (std::sqrt(p) + std::sqrt(p - 1.0));
  const double small_t = kappa / std::sqrt(2.0 * c * kappa);
  const double target = std::sqrt(kappa / (2.0 * c));
  return std::abs(fixed_t / target - 1.0) <= 1e-6 &&
         std::abs(small_t / target - 1.0) <= 1e-6;
}

// 8. Cross-oracle pricing on a 12-point smoke grid.
bool criterion8() {
  const std::uint64_t paths = 1000000;
  struct Point { ModelSpec m; double kappa; double t; };
  const BlackScholesModel bs{0.2};
  const CarrWuModel cw{0.2, 1.5};
  const MertonModel jd{0.1, 0.3, -0.1, 0.25, std::nullopt};
  const HestonModel he{2.0, 0.04, 0.3, 0.04, -0.3};
  const std::vector<Point> grid = {
      {bs, -0.3, 1.0}, {bs, 0.0, 1.0}, {bs, 0.3, 1.0},
      {cw, -0.3, 0.25}, {cw, 0.1, 0.25}, {cw, 0.3, 0.25},
      {jd, 0.0, 0.25}, {jd, 0.5, 0.25}, {jd, 1.0, 0.25},
      {he, -0.2, 0.5}, {he, 0.0, 0.5}, {he, 0.2, 0.5}};
  int idx = 0;
  for (const auto& pt : grid) {
    ++idx;
    double exact, exact_bound = 0.0;
    if (auto* b = std::get_if<BlackScholesModel>(&pt.m)) {
      exact = bs_call_price(pt.kappa, b->sigma * std::sqrt(pt.t));
      exact_bound = 1e-12;
    } else if (auto* j = std::get_if<MertonModel>(&pt.m)) {
      const PriceResult s = merton_series_price(*j, pt.kappa, pt.t);
      const PriceResult f = fourier_call(pt.m, pt.kappa, pt.t);
      if (std::abs(f.price - s.price) >
          f.abs_error_bound + s.abs_error_bound + 1e-12)
        return false;
      exact = s.price;
      exact_bound = s.abs_error_bound;
    } else {
      const PriceResult f = fourier_call(pt.m, pt.kappa, pt.t);
      exact = f.price;
      exact_bound = f.abs_error_bound;
    }
    const bool heston = std::holds_alternative<HestonModel>(pt.m);
    const int steps = 64;
    const PriceResult mc =
        mc_price(pt.m, pt.kappa, pt.t, paths, 800 + idx, steps);
    double allow = 4.0 * *mc.mc_std_error + exact_bound + 1e-12;
    if (heston) {
      // Discretization bias estimated by step halving on a thinner run.
      const PriceResult half =
          mc_price(pt.m, pt.kappa, pt.t, paths / 4, 900 + idx, steps / 2);
      const PriceResult same =
          mc_price(pt.m, pt.kappa, pt.t, paths / 4, 900 + idx, steps);
      allow += 2.0 * std::abs(half.price - same.price) +
               4.0 * *half.mc_std_error;
    }
    if (std::abs(mc.price - exact) > allow) return false;
  }
  return true;
}

// 9. End-to-end determinism of verify.
bool criterion9() {
  const std::string cfg =
      "model = carrwu\nsigma = 0.2\nalpha = 1.5\n"
      "family = fixed-t-kappa-grid\nregime = right-atypical\n"
      "t = 0.25\nkappas = 0.5 1 2 4\nformula = cw-right\nseed = 3\n";
  const Experiment ex = experiment_from_config(Config::parse(cfg));
  auto [r1, out1] = run_verify(ex);
  auto [r2, out2] = run_verify(ex);
  return !out1.empty() && out1 == out2;
}

}  // namespace

int main() {
  run(1, "special functions (Mills bounds, ODE identity, D round trip)",
      criterion1);
  run(2, "Black-Scholes inversion round trip, parity, symmetry", criterion2);
  run(3, "sharp price asymptotics approach the exact price", criterion3);
  run(4, "universal price-to-vol formulas on exact prices", criterion4);
  run(5, "Carr-Wu wing trend and typical-deviation constants", criterion5);
  run(6, "Merton smile on the k2 curve and log-tail lemma", criterion6);
  run(7, "Heston explosion analytics and matching limits", criterion7);
  run(8, "cross-oracle pricing smoke grid", criterion8);
  run(9, "verify output is deterministic", criterion9);
  return failures == 0 ? 0 : 1;
}
