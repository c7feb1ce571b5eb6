// Command-line front end: price / impvol / tail / smile / verify.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "smile/smile.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw smile::DomainError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

smile::ModelSpec load_model(const std::string& path) {
  return smile::model_from_config(smile::Config::parse(read_file(path)));
}

void print_kv(const char* key, double v) {
  std::printf("%s = %.12g\n", key, v);
}

smile::PriceResult price_with(const smile::ModelSpec& m, double kappa,
                              double t, const std::string& method,
                              std::uint64_t paths, std::uint64_t seed, int M) {
  using namespace smile;
  if (method == "mc") return mc_price(m, kappa, t, paths, seed);
  if (method == "fourier") return fourier_call(m, kappa, t);
  if (method == "series") {
    auto* j = std::get_if<MertonModel>(&m);
    if (!j) throw DomainError("--method series requires the merton model");
    return M > 0 ? merton_series_price(*j, kappa, t, M)
                 : merton_series_price(*j, kappa, t);
  }
  if (method == "closed") {
    auto* b = std::get_if<BlackScholesModel>(&m);
    if (!b) throw DomainError("--method closed requires the blackscholes model");
    PriceResult r;
    r.log_price = bs_call_log_price(kappa, b->sigma * std::sqrt(t));
    r.price = std::exp(r.log_price);
    r.method = PriceMethod::closed_sum;
    r.abs_error_bound = 1e-14 * std::max(r.price, 1e-300);
    return r;
  }
  if (method == "auto") {
    if (std::holds_alternative<BlackScholesModel>(m))
      return price_with(m, kappa, t, "closed", paths, seed, M);
    if (std::holds_alternative<MertonModel>(m))
      return price_with(m, kappa, t, "series", paths, seed, M);
    return fourier_call(m, kappa, t);
  }
  throw DomainError("unknown method: " + method);
}

int run(int argc, char** argv) {
  using namespace smile;
  CLI::App app{"volatility smile asymptotics toolkit"};
  app.require_subcommand(1);

  std::string model_path, exp_path, side = "right", formula, method = "auto";
  std::string out_path;
  double kappa = 0.0, t = 1.0;
  std::uint64_t paths = 100000, seed = 1;
  int M = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model-config", model_path, "model config file")->required();
    sub->add_option("--kappa", kappa, "log-strike")->required();
    sub->add_option("--t", t, "maturity (years)")->required();
  };

  auto* p_price = app.add_subcommand("price", "option price");
  add_common(p_price);
  p_price->add_option("--method", method, "auto|closed|series|fourier|mc");
  p_price->add_option("--paths", paths, "MC paths");
  p_price->add_option("--seed", seed, "MC seed");
  p_price->add_option("--M", M, "series truncation (0 = adaptive)");

  auto* p_impvol = app.add_subcommand("impvol", "implied volatility");
  add_common(p_impvol);
  p_impvol->add_option("--method", method, "pricing method");

  auto* p_tail = app.add_subcommand("tail", "tail probability");
  add_common(p_tail);
  p_tail->add_option("--side", side, "right|left");

  auto* p_smile = app.add_subcommand("smile", "asymptotic smile formula");
  add_common(p_smile);
  p_smile->add_option("--formula", formula, "formula identifier")->required();

  auto* p_verify = app.add_subcommand("verify", "run an experiment config");
  p_verify->add_option("experiment-config", exp_path, "experiment file")
      ->required();
  p_verify->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (p_price->parsed()) {
    const ModelSpec m = load_model(model_path);
    const PriceResult r = price_with(m, kappa, t, method, paths, seed, M);
    print_kv("call", r.price);
    print_kv("put", r.price - (1.0 - std::exp(kappa)));
    print_kv("log_call", r.log_price);
    print_kv("abs_error_bound", r.abs_error_bound);
    if (r.mc_std_error) print_kv("mc_std_error", *r.mc_std_error);
    return 0;
  }
  if (p_impvol->parsed()) {
    const ModelSpec m = load_model(model_path);
    if (method == "auto" || method == "closed" || method == "series" ||
        method == "fourier") {
      const auto otm = smile::detail::exact_otm_log_price(m, kappa, t);
      const VolQuote q = implied_vol_from_log_otm(kappa, t, otm.log_price);
      print_kv("sigma", q.sigma);
      print_kv("total_vol", q.total_vol);
    } else {
      const PriceResult r = price_with(m, kappa, t, method, paths, seed, M);
      const VolQuote q = implied_vol(kappa, t, r.price);
      print_kv("sigma", q.sigma);
      print_kv("total_vol", q.total_vol);
    }
    return 0;
  }
  if (p_tail->parsed()) {
    const ModelSpec m = load_model(model_path);
    const TailSide s = side == "left" ? TailSide::left : TailSide::right;
    const TailEstimate e = model_tail(m, s, kappa, t);
    print_kv("value", e.value);
    print_kv("log_value", e.log_value);
    std::printf("method = %s\n", tail_method_name(e.method));
    print_kv("abs_error_bound", e.abs_error_bound);
    return 0;
  }
  if (p_smile->parsed()) {
    const ModelSpec m = load_model(model_path);
    const AsymptoticQuote q =
        smile::detail::eval_formula(m, formula, kappa, t, RunOptions{});
    print_kv("value", q.value);
    std::printf("formula = %s\nregime = %s\n", q.formula.c_str(),
                q.regime.c_str());
    print_kv("aux", q.aux);
    return 0;
  }
  // verify
  const Experiment ex =
      experiment_from_config(Config::parse(read_file(exp_path)));
  auto [rep, text] = run_verify(ex);
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
  const ConvergenceMetric cm = convergence_metric(rep);
  std::fprintf(stderr, "model = %s\nconfig_hash = %s\nslope = %.6g\nlast_gap = %.6g\n",
               rep.model.c_str(), rep.config_hash.c_str(), cm.slope,
               cm.last_gap);
  if (ex.max_last_gap && !(cm.last_gap <= *ex.max_last_gap))
    throw AccuracyError("verify: last_gap above configured bound", cm.last_gap);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const smile::RegimeMismatchError& e) {
    std::fprintf(stderr, "regime mismatch: %s\n", e.what());
    return 2;
  } catch (const smile::AccuracyError& e) {
    std::fprintf(stderr, "accuracy failure: %s (achieved %.3g)\n", e.what(),
                 e.achieved_bound);
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
