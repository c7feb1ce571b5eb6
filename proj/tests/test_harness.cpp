#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "smile/harness.hpp"

using namespace smile;

namespace {

ExperimentReport synthetic(double power) {
  ExperimentReport rep;
  rep.kind = PathKind::fixed_kappa_t_grid;
  for (double t : {0.1, 0.01, 0.001, 0.0001}) {
    ExperimentRow r;
    r.kappa = 1.0;
    r.t = t;
    r.exact_price = 0.1;
    r.exact_log_price = std::log(0.1);
    r.exact_vol = 0.2;
    r.ratio = 1.0 + std::pow(t, power);
    r.asym_vol = r.exact_vol * r.ratio;
    r.formula = "synthetic";
    r.capped = false;
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace

TEST_CASE("convergence metric recovers the decay order") {
  const ConvergenceMetric c1 = convergence_metric(synthetic(1.0));
  CHECK(c1.slope == Catch::Approx(1.0).margin(1e-6));
  CHECK(c1.last_gap == Catch::Approx(1e-4).epsilon(1e-9));
  const ConvergenceMetric c2 = convergence_metric(synthetic(2.0));
  CHECK(c2.slope == Catch::Approx(2.0).margin(1e-6));
  // Fewer than 3 rows is a domain error; all-capped is an accuracy error.
  ExperimentReport small = synthetic(1.0);
  small.rows.resize(2);
  CHECK_THROWS_AS(convergence_metric(small), DomainError);
  ExperimentReport capped = synthetic(1.0);
  for (auto& r : capped.rows) r.capped = true;
  CHECK_THROWS_AS(convergence_metric(capped), AccuracyError);
}

TEST_CASE("limit variable per family") {
  ExperimentRow r;
  r.kappa = 4.0;
  r.t = 0.25;
  CHECK(limit_variable(PathKind::fixed_t_kappa_grid, r) == 0.25);
  CHECK(limit_variable(PathKind::fixed_kappa_t_grid, r) == 0.25);
  CHECK(limit_variable(PathKind::curve, r) == 0.25);
  r.kappa = -5.0;
  CHECK(limit_variable(PathKind::fixed_t_kappa_grid, r) == 0.2);
}

TEST_CASE("path family validation") {
  PathFamily p;
  p.kind = PathKind::fixed_t_kappa_grid;
  p.regime_tag = RegimeTag::right_atypical;
  CHECK_THROWS_AS(validate(p), DomainError);  // empty
  p.points = {{1.0, 0.5}, {2.0, 0.5}, {0.5, 0.5}};
  CHECK_THROWS_AS(validate(p), DomainError);  // |kappa| not ordered
  p.points = {{1.0, 0.5}, {-2.0, 0.5}, {4.0, 0.5}};
  CHECK_NOTHROW(validate(p));
  p.kind = PathKind::fixed_kappa_t_grid;
  p.points = {{1.0, 0.1}, {1.0, 0.5}};
  CHECK_THROWS_AS(validate(p), DomainError);  // t not decreasing
  p.points = {{1.0, 0.5}, {1.0, 0.0}};
  CHECK_THROWS_AS(validate(p), DomainError);  // t <= 0
}

TEST_CASE("emit formats") {
  ExperimentReport rep;
  rep.kind = PathKind::fixed_t_kappa_grid;
  const std::string header =
      "kappa,t,exact_price,exact_vol,asym_vol,ratio,formula,capped\n";
  CHECK(emit(rep, EmitFormat::csv) == header);
  ExperimentRow r;
  r.kappa = 2.0;
  r.t = 0.25;
  r.exact_price = 1.23456789012345e-08;
  r.exact_log_price = std::log(r.exact_price);
  r.exact_vol = 0.2;
  r.asym_vol = 0.21;
  r.ratio = 1.05;
  r.formula = "cw-right";
  r.capped = true;
  rep.rows.push_back(r);
  CHECK(emit(rep, EmitFormat::csv) ==
        header + "2,0.25,1.23456789012e-08,0.2,0.21,1.05,cw-right,1\n");
  const std::string tsv = emit(rep, EmitFormat::tsv);
  CHECK(tsv.find(',') == std::string::npos);
  CHECK(tsv.find('\t') != std::string::npos);
}

TEST_CASE("experiment closes the loop on black-scholes") {
  const std::string text =
      "model = blackscholes\n"
      "sigma = 0.2\n"
      "family = fixed-t-kappa-grid\n"
      "regime = right-atypical\n"
      "t = 1\n"
      "kappas = 2 4 8 16\n"
      "formula = price-to-vol-otm\n";
  const Experiment ex = experiment_from_config(Config::parse(text));
  auto [rep, out] = run_verify(ex);
  REQUIRE(rep.rows.size() == 4);
  double prev_gap = 1e300;
  for (const auto& r : rep.rows) {
    // The oracle price and the inverted vol reproduce the inputs.
    CHECK(r.exact_log_price ==
          Catch::Approx(bs_call_log_price(r.kappa, 0.2)).epsilon(1e-10));
    CHECK(r.exact_vol == Catch::Approx(0.2).epsilon(1e-8));
    CHECK(!r.capped);
    const double gap = std::abs(r.ratio - 1.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  const ConvergenceMetric cm = convergence_metric(rep);
  CHECK(cm.last_gap < 0.03);
  CHECK(rep.config_hash.size() == 16);
  // Determinism: the emitted report is byte-identical across runs.
  auto [rep2, out2] = run_verify(ex);
  CHECK(out == out2);
}

TEST_CASE("regime checks reject mismatched formulas up front") {
  const ModelSpec bs = BlackScholesModel{0.2};
  PathFamily p;
  p.kind = PathKind::fixed_t_kappa_grid;
  p.regime_tag = RegimeTag::right_atypical;
  p.points = {{1.0, 0.5}, {2.0, 0.5}, {4.0, 0.5}};
  // Model-specific formula on the wrong model.
  CHECK_THROWS_AS(run_experiment(bs, p, "cw-right"), RegimeMismatchError);
  // Formula incompatible with the declared regime.
  CHECK_THROWS_AS(run_experiment(bs, p, "thm2.4"), RegimeMismatchError);
  p.regime_tag = RegimeTag::typical;
  CHECK_THROWS_AS(run_experiment(bs, p, "thm2.2-general"), RegimeMismatchError);
  // Unknown formula id.
  p.regime_tag = RegimeTag::right_atypical;
  CHECK_THROWS_AS(run_experiment(bs, p, "no-such-formula"), DomainError);
}

TEST_CASE("experiment config families") {
  const std::string curve =
      "model = merton\n"
      "sigma = 0.1\n"
      "lambda = 0.3\n"
      "alpha_j = -0.1\n"
      "delta = 0.25\n"
      "family = curve\n"
      "curve = merton-k2\n"
      "coef = 1.5\n"
      "ts = 0.1 0.05 0.01\n"
      "regime = right-atypical\n"
      "formula = merton-mid\n"
      "format = tsv\n"
      "seed = 11\n";
  const Experiment ex = experiment_from_config(Config::parse(curve));
  REQUIRE(ex.path.points.size() == 3);
  CHECK(ex.path.kind == PathKind::curve);
  CHECK(ex.path.points[2].first == Catch::Approx(1.5 * merton_k2(0.01)));
  CHECK(ex.options.seed == 11);
  CHECK(ex.format == EmitFormat::tsv);

  const std::string power =
      "model = blackscholes\nsigma = 0.2\n"
      "family = curve\ncurve = power\ncoef = 0.5\nexponent = 0.5\n"
      "ts = 0.25 0.04\nregime = typical\nformula = thm2.4\n";
  const Experiment ep = experiment_from_config(Config::parse(power));
  CHECK(ep.path.points[0].first == Catch::Approx(0.5 * 0.5));
  CHECK(ep.path.points[1].first == Catch::Approx(0.5 * 0.2));
  REQUIRE(ep.path.scaling_exponent.has_value());
  CHECK(*ep.path.scaling_exponent == 0.5);

  // Config hash is stable and content sensitive.
  const Experiment again = experiment_from_config(Config::parse(power));
  CHECK(ep.config_hash == again.config_hash);
  CHECK(ep.config_hash != ex.config_hash);

  CHECK_THROWS_AS(
      experiment_from_config(Config::parse(
          "model = blackscholes\nsigma = 0.2\nfamily = what\nregime = atm\n")),
      DomainError);
}

TEST_CASE("config parsing") {
  const Config c = Config::parse("a = 1.5\n# comment\nlist = 1 2 3\ns = text\n");
  CHECK(c.get_double("a") == 1.5);
  CHECK(c.get_list("list").size() == 3);
  CHECK(c.get_string("s") == "text");
  CHECK(c.get_double("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(c.get_double("missing"), DomainError);
  CHECK_THROWS_AS(c.get_double("s"), DomainError);
  CHECK_THROWS_AS(Config::parse("not a kv line\n"), DomainError);
  CHECK_THROWS_AS(Config::parse("key =\n"), DomainError);
}
