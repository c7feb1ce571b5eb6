#pragma once

// Experiment runner: prices a (kappa, t) path family with the model's
// exact oracle, inverts to implied vol, evaluates the requested
// asymptotic formula, and reports per-point ratios plus a fitted
// convergence trend.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smile/asymptotics.hpp"
#include "smile/blackscholes.hpp"
#include "smile/config.hpp"
#include "smile/errors.hpp"
#include "smile/models.hpp"
#include "smile/pricing.hpp"

namespace smile {

enum class PathKind { fixed_t_kappa_grid, fixed_kappa_t_grid, curve };
enum class RegimeTag { right_atypical, left_atypical, typical, atm };

struct PathFamily {
  PathKind kind;
  std::vector<std::pair<double, double>> points;  ///< (kappa, t)
  RegimeTag regime_tag;
  std::optional<double> scaling_exponent;
};

inline void validate(const PathFamily& p) {
  if (p.points.empty()) throw DomainError("path family: no points");
  for (auto& [k, t] : p.points)
    if (!(t > 0.0)) throw DomainError("path family: requires t > 0");
  // Points must run in the limit direction: |kappa| nondecreasing for
  // kappa grids, t nonincreasing otherwise.
  for (std::size_t i = 1; i < p.points.size(); ++i) {
    if (p.kind == PathKind::fixed_t_kappa_grid) {
      if (std::abs(p.points[i].first) < std::abs(p.points[i - 1].first))
        throw DomainError("path family: kappa grid not ordered");
    } else if (p.points[i].second > p.points[i - 1].second) {
      throw DomainError("path family: t grid not ordered");
    }
  }
}

struct ExperimentRow {
  double kappa;
  double t;
  double exact_price;  ///< OTM price (call for kappa >= 0, put below); 0 if underflowed
  double exact_log_price;
  double exact_vol;
  double asym_vol;
  double ratio;
  std::string formula;
  bool capped;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  PathKind kind = PathKind::fixed_t_kappa_grid;
  std::string model;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct RunOptions {
  std::uint64_t seed = 0;
  double cap_fraction = 0.1;       ///< flag rows whose oracle error exceeds this
  double branch_threshold = 10.0;  ///< merton kappa >> k2 cutoff
};

namespace detail {

struct OtmPrice {
  double log_price;
  double log_error_bound;  ///< log of the oracle's error bound
};

// log of the OTM option price (call above the money, put below) from
// the model's exact oracle.
inline OtmPrice exact_otm_log_price(const ModelSpec& m, double kappa, double t) {
  if (auto* b = std::get_if<BlackScholesModel>(&m)) {
    const double v = b->sigma * std::sqrt(t);
    const double lp = kappa >= 0.0
                          ? bs_call_log_price(kappa, v)
                          : kappa + bs_call_log_price(-kappa, v);
    return OtmPrice{lp, lp + std::log(1e-14)};
  }
  if (auto* j = std::get_if<MertonModel>(&m)) {
    if (kappa >= 0.0) {
      PriceResult r = merton_series_price(*j, kappa, t);
      return OtmPrice{r.log_price, r.log_error_bound};
    }
    // Per-component parity: component put = e^kappa C_BS(-kappa_n, s_n).
    const double mu = j->mu();
    const double llt = std::log(j->lambda * t);
    const int M = std::max(
        64, static_cast<int>(std::ceil(3.0 * std::exp(1.0) * j->lambda * t)) + 5);
    std::vector<double> terms;
    for (int n = 0; n <= M; ++n) {
      const double mean = mu * t + n * j->alpha_j;
      const double var = j->sigma * j->sigma * t + n * j->delta * j->delta;
      const double kn = kappa - (mean + 0.5 * var);
      terms.push_back(-j->lambda * t + n * llt - std::lgamma(n + 1.0) + kappa +
                      bs_call_log_price(-kn, std::sqrt(var)));
    }
    const double lp = log_sum_exp(terms);
    const double lamp = j->lambda * std::exp(j->alpha_j + 0.5 * j->delta * j->delta);
    const double rem_log = M * (1.0 + std::log(lamp * t) - std::log(double(M)));
    return OtmPrice{lp, rem_log};
  }
  // CarrWu / Heston: Fourier.
  PriceResult c = fourier_call(m, kappa, t);
  if (kappa >= 0.0) return OtmPrice{c.log_price, c.log_error_bound};
  // Parity in price space adds an absolute 1e-15 roundoff floor.
  const double put = c.price - (1.0 - std::exp(kappa));
  const double lb = log_add_exp(c.log_error_bound, std::log(1e-15));
  if (!(put > 0.0))
    throw AccuracyError("exact_otm_log_price: put lost to parity cancellation",
                        std::exp(lb));
  return OtmPrice{std::log(put), lb};
}

inline AsymptoticQuote eval_formula(const ModelSpec& m, const std::string& id,
                                    double kappa, double t,
                                    const RunOptions& opt) {
  const double ak = std::abs(kappa);
  if (id == "thm2.2-general" || id == "thm2.2-special") {
    const TailEstimate e = model_tail(m, TailSide::right, kappa, t);
    return tail_to_vol_right(kappa, t, e.log_value, id == "thm2.2-special");
  }
  if (id == "thm2.3-general" || id == "thm2.3-special") {
    const TailEstimate e = model_tail(m, TailSide::left, ak, t);
    return tail_to_vol_left(ak, t, e.log_value, id == "thm2.3-special");
  }
  if (id == "thm2.4") {
    const ScalingData sc = scaling_data(m);
    const double a = ak / sc.gamma(t);
    return typical_vol(m, a, t,
                       kappa >= 0.0 ? TailSide::right : TailSide::left);
  }
  if (id == "cw-right")
    return carrwu_smile(std::get<CarrWuModel>(m), kappa, t, TailSide::right);
  if (id == "cw-left")
    return carrwu_smile(std::get<CarrWuModel>(m), ak, t, TailSide::left);
  if (id == "merton-low" || id == "merton-mid" || id == "merton-high") {
    const auto& j = std::get<MertonModel>(m);
    if (id == "merton-high") {
      const double lkt = std::log(kappa / t);
      if (!(lkt > 0.0))
        throw RegimeMismatchError("merton-high: needs kappa > t");
      return AsymptoticQuote{
          std::sqrt(j.delta * kappa / (2.0 * t * std::sqrt(2.0 * lkt))),
          "merton-high", "kappa >> k2(t)", kappa, t, 0.0};
    }
    if (id == "merton-low")
      return AsymptoticQuote{j.sigma, "merton-low", "kappa <= sigma k1(t)",
                             kappa, t, 0.0};
    // merton-mid: the max form on the k2 scale.
    AsymptoticQuote q = merton_smile(j, kappa, t, kInf);
    q.formula = "merton-mid";
    return q;
  }
  if (id == "heston-fixed-t")
    return heston_smile(std::get<HestonModel>(m), kappa, t,
                        HestonBranch::fixed_t);
  if (id == "heston-small-t")
    return heston_smile(std::get<HestonModel>(m), kappa, t,
                        HestonBranch::small_t);
  if (id == "heston-conjecture")
    return heston_smile(std::get<HestonModel>(m), kappa, t,
                        HestonBranch::conjecture);
  if (id == "price-to-vol-otm" || id == "price-to-vol-atm" ||
      id == "price-to-vol-small-strike") {
    const OtmPrice p = exact_otm_log_price(m, kappa, t);
    const PriceVolBranch br = id == "price-to-vol-atm"
                                  ? PriceVolBranch::atm
                                  : (id == "price-to-vol-otm"
                                         ? PriceVolBranch::otm
                                         : PriceVolBranch::small_strike);
    AsymptoticQuote q = price_to_vol_asymptotic_log(kappa, t, p.log_price, br);
    return q;
  }
  (void)opt;
  throw DomainError("run_experiment: unknown formula id: " + id);
}

inline void check_formula_regime(const ModelSpec& m, const std::string& id,
                                 RegimeTag tag) {
  auto need_model = [&](const char* name) {
    if (model_name(m) != name)
      throw RegimeMismatchError("formula " + id + " requires model " + name);
  };
  auto need_tag = [&](bool ok) {
    if (!ok)
      throw RegimeMismatchError("formula " + id +
                                " invalid for the declared regime");
  };
  if (id.rfind("cw-", 0) == 0) need_model("carrwu");
  if (id.rfind("merton-", 0) == 0) need_model("merton");
  if (id.rfind("heston-", 0) == 0) need_model("heston");
  if (id == "thm2.2-general" || id == "thm2.2-special" || id == "cw-right" ||
      id.rfind("merton-", 0) == 0 || id.rfind("heston-", 0) == 0)
    need_tag(tag == RegimeTag::right_atypical);
  else if (id == "thm2.3-general" || id == "thm2.3-special" || id == "cw-left")
    need_tag(tag == RegimeTag::left_atypical);
  else if (id == "thm2.4")
    need_tag(tag == RegimeTag::typical || tag == RegimeTag::atm);
  else if (id == "price-to-vol-atm")
    need_tag(tag == RegimeTag::atm);
  else if (id == "price-to-vol-otm" || id == "price-to-vol-small-strike")
    need_tag(tag == RegimeTag::right_atypical ||
             tag == RegimeTag::left_atypical);
}

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

inline ExperimentReport run_experiment(const ModelSpec& m,
                                       const PathFamily& path,
                                       const std::string& formula,
                                       const RunOptions& opt = {}) {
  validate(m);
  validate(path);
  detail::check_formula_regime(m, formula, path.regime_tag);
  ExperimentReport rep;
  rep.kind = path.kind;
  rep.model = model_name(m);
  rep.seed = opt.seed;
  for (auto& [kappa, t] : path.points) {
    const detail::OtmPrice p = detail::exact_otm_log_price(m, kappa, t);
    const VolQuote vq = implied_vol_from_log_otm(kappa, t, p.log_price);
    const AsymptoticQuote aq = detail::eval_formula(m, formula, kappa, t, opt);
    const bool capped =
        p.log_error_bound > p.log_price + std::log(opt.cap_fraction);
    ExperimentRow row;
    row.kappa = kappa;
    row.t = t;
    row.exact_price = std::exp(p.log_price);
    row.exact_log_price = p.log_price;
    row.exact_vol = vq.sigma;
    row.asym_vol = aq.value;
    row.ratio = aq.value / vq.sigma;
    row.formula = aq.formula;
    row.capped = capped;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

/// Limit variable of a row: a quantity tending to 0 along the family
/// (t for t-grids and curves, 1/|kappa| for kappa grids).
inline double limit_variable(PathKind kind, const ExperimentRow& row) {
  if (kind == PathKind::fixed_t_kappa_grid) return 1.0 / std::abs(row.kappa);
  return row.t;
}

struct ConvergenceMetric {
  double slope;     ///< LS slope of log|ratio-1| against log(limit variable)
  double last_gap;  ///< |ratio - 1| at the most extreme usable point
};

inline ConvergenceMetric convergence_metric(const ExperimentReport& rep) {
  if (rep.rows.size() < 3)
    throw DomainError("convergence_metric: needs >= 3 rows");
  std::vector<double> xs, ys;
  double last_gap = 0.0;
  bool have = false;
  for (const auto& r : rep.rows) {
    if (r.capped || r.ratio == 1.0 || !std::isfinite(r.ratio)) continue;
    xs.push_back(std::log(limit_variable(rep.kind, r)));
    ys.push_back(std::log(std::abs(r.ratio - 1.0)));
    last_gap = std::abs(r.ratio - 1.0);
    have = true;
  }
  if (!have || xs.size() < 2)
    throw AccuracyError("convergence_metric: degenerate (all rows dropped)",
                        0.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return ConvergenceMetric{slope, last_gap};
}

enum class EmitFormat { csv, tsv };

/// CSV/TSV report: header then one row per point, 12 significant digits.
inline std::string emit(const ExperimentReport& rep, EmitFormat fmt) {
  const char sep = fmt == EmitFormat::csv ? ',' : '\t';
  std::string out = "kappa";
  for (const char* col :
       {"t", "exact_price", "exact_vol", "asym_vol", "ratio", "formula",
        "capped"}) {
    out += sep;
    out += col;
  }
  out += '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (const auto& r : rep.rows) {
    out += num(r.kappa);
    out += sep;
    out += num(r.t);
    out += sep;
    out += num(r.exact_price);
    out += sep;
    out += num(r.exact_vol);
    out += sep;
    out += num(r.asym_vol);
    out += sep;
    out += num(r.ratio);
    out += sep;
    out += r.formula;
    out += sep;
    out += r.capped ? '1' : '0';
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// experiment config
// ---------------------------------------------------------------------------

struct Experiment {
  ModelSpec model;
  PathFamily path;
  std::string formula;
  RunOptions options;
  EmitFormat format = EmitFormat::csv;
  std::optional<double> max_last_gap;
  std::string config_hash;
};

inline Experiment experiment_from_config(const Config& cfg) {
  Experiment ex;
  ex.model = model_from_config(cfg);
  const std::string fam = cfg.get_string("family");
  const std::string regime = cfg.get_string("regime");
  PathFamily p;
  if (regime == "right-atypical") p.regime_tag = RegimeTag::right_atypical;
  else if (regime == "left-atypical") p.regime_tag = RegimeTag::left_atypical;
  else if (regime == "typical") p.regime_tag = RegimeTag::typical;
  else if (regime == "atm") p.regime_tag = RegimeTag::atm;
  else throw DomainError("config: unknown regime: " + regime);
  if (fam == "fixed-t-kappa-grid") {
    p.kind = PathKind::fixed_t_kappa_grid;
    const double t = cfg.get_double("t");
    for (double k : cfg.get_list("kappas")) p.points.emplace_back(k, t);
  } else if (fam == "fixed-kappa-t-grid") {
    p.kind = PathKind::fixed_kappa_t_grid;
    const double k = cfg.get_double("kappa");
    for (double t : cfg.get_list("ts")) p.points.emplace_back(k, t);
  } else if (fam == "curve") {
    p.kind = PathKind::curve;
    const std::string curve = cfg.get_string("curve");
    const double coef = cfg.get_double("coef", 1.0);
    for (double t : cfg.get_list("ts")) {
      double k;
      if (curve == "merton-k2") {
        k = coef * merton_k2(t);
      } else if (curve == "power") {
        const double e = cfg.get_double("exponent");
        k = coef * std::pow(t, e);
        p.scaling_exponent = e;
      } else {
        throw DomainError("config: unknown curve: " + curve);
      }
      p.points.emplace_back(k, t);
    }
  } else {
    throw DomainError("config: unknown family: " + fam);
  }
  ex.path = std::move(p);
  ex.formula = cfg.get_string("formula");
  ex.options.seed =
      static_cast<std::uint64_t>(cfg.get_double("seed", 0.0));
  ex.options.branch_threshold = cfg.get_double("branch_threshold", 10.0);
  const std::string fmt = cfg.get_string("format", "csv");
  if (fmt == "csv") ex.format = EmitFormat::csv;
  else if (fmt == "tsv") ex.format = EmitFormat::tsv;
  else throw DomainError("config: unknown format: " + fmt);
  if (cfg.has("max_last_gap")) ex.max_last_gap = cfg.get_double("max_last_gap");
  ex.config_hash = detail::fnv1a_hex(cfg.text());
  return ex;
}

/// Full `verify` pipeline: run, attach the config hash, emit.
inline std::pair<ExperimentReport, std::string> run_verify(const Experiment& ex) {
  ExperimentReport rep = run_experiment(ex.model, ex.path, ex.formula,
                                        ex.options);
  rep.config_hash = ex.config_hash;
  return {rep, emit(rep, ex.format)};
}

}  // namespace smile
