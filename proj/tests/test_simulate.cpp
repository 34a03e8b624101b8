// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "xbias/bounds.hpp"
#include "xbias/divergence.hpp"
#include "xbias/errors.hpp"
#include "xbias/simulate.hpp"

using namespace xbias;

namespace {
constexpr double kE = std::numbers::e;

ExperimentOptions quick(std::size_t trials, std::uint64_t seed) {
  ExperimentOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

bool within_3se(const ExperimentResult& r, double target = 0.0) {
  return std::abs(r.empirical_bias - target) <= 3.0 * r.stderr_of_bias;
}
}  // namespace

TEST_CASE("trial streams are reproducible and open-interval") {
  TrialStream a(5, 17);
  TrialStream b(5, 17);
  TrialStream c(5, 18);
  bool differs = false;
  for (int k = 0; k < 1000; ++k) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    if (x != c.uniform()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("heavy-tail quantile") {
  const auto m = MeasurementModel::heavy_tail(1, 3.0, 2.0, kE);
  CHECK(m.quantile(1e-15) == doctest::Approx(kE).epsilon(1e-12));
  const double target = oracle::bisect([](double x) { return x * x * x * std::log(x) * std::log(x) - 1000.0 * kE * kE * kE; },
                                       kE, 100.0);
  CHECK(target == doctest::Approx(14.2).epsilon(0.01));
  CHECK(m.quantile(1.0 - 1.0 / 1000.0) == doctest::Approx(target).epsilon(1e-10));
  for (double u : {0.01, 0.3, 0.9, 1.0 - 1e-9}) {
    const double x = m.quantile(u);
    const double survival = kE * kE * kE / (x * x * x * std::log(x) * std::log(x));
    CHECK(survival == doctest::Approx(1.0 - u).epsilon(1e-9));
  }
  CHECK_THROWS_AS((void)m.quantile(0.0), DomainError);
  CHECK_THROWS_AS(MeasurementModel::heavy_tail(1, 3.0, 2.0, 1.2), DomainError);
  CHECK_THROWS_AS(MeasurementModel::heavy_tail(1, 3.0, 1.0, kE), DomainError);
}

TEST_CASE("heavy-tail samples respect the support") {
  const auto m = MeasurementModel::heavy_tail(50, 3.0, 2.0, kE);
  for (std::uint64_t t = 0; t < 200; ++t) {
    TrialStream rng(3, t);
    for (double x : sample(m, rng)) CHECK(x >= kE);
  }
}

TEST_CASE("Gaussian sample mean") {
  const auto m = MeasurementModel::gaussian(1000, 0.0, 1.0);
  double total = 0.0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    TrialStream rng(9, t);
    for (double x : sample(m, rng)) total += x;
  }
  CHECK(std::abs(total / 1e6) <= 0.004);
}

TEST_CASE("heavy-tail moments") {
  const auto m3 = MeasurementModel::heavy_tail(1, 3.0, 2.0, kE);
  // E phi^3 = e^3 + 3 e^3 exactly.
  CHECK(heavy_tail_beta_norm(m3) == doctest::Approx(std::cbrt(4.0) * kE).epsilon(1e-10));
  CHECK(heavy_tail_beta_norm(m3) == doctest::Approx(4.3150034340).epsilon(1e-10));
  const auto m2 = MeasurementModel::heavy_tail(1, 2.0, 2.0, kE);
  CHECK(heavy_tail_beta_norm(m2) == doctest::Approx(std::sqrt(3.0) * kE).epsilon(1e-10));
  CHECK(heavy_tail_beta_norm(m2) >= kE);

  // E phi = x0 + e^3 int_1^inf e^{-2t} / t^2 dt after x = e^t.
  const double tail = oracle::simpson([](double t) { return std::exp(3.0 - 2.0 * t) / (t * t); }, 1.0, 40.0);
  CHECK(m3.mean() == doctest::Approx(kE + tail).epsilon(1e-9));

  // The heavy tail has a finite centered beta-norm only below beta.
  CHECK(std::isfinite(*m3.centered_beta_norm(2.0)));
  CHECK(std::isfinite(*m3.centered_beta_norm(3.0)));
  CHECK(std::isinf(*m3.centered_beta_norm(3.5)));
}

TEST_CASE("centered beta-norms of the light-tailed models") {
  const auto g = MeasurementModel::gaussian(1, 1.0, 2.0);
  CHECK(*g.centered_beta_norm(2.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(*g.centered_beta_norm(3.0) == doctest::Approx(2.0 * std::cbrt(2.0 * std::sqrt(2.0 / std::numbers::pi))).epsilon(1e-9));
  const auto e = MeasurementModel::exponential(1, 0.5);
  CHECK(*e.centered_beta_norm(2.0) == doctest::Approx(2.0).epsilon(1e-9));
  // E|X - 1|^3 for a unit exponential, by quadrature on a truncated range.
  const double m3 = oracle::simpson([](double x) { return std::pow(std::abs(x - 1.0), 3.0) * std::exp(-x); }, 0.0, 60.0);
  CHECK(*MeasurementModel::exponential(1, 1.0).centered_beta_norm(3.0) == doctest::Approx(std::cbrt(m3)).epsilon(1e-8));
}

TEST_CASE("extreme norming constants") {
  const auto m = MeasurementModel::heavy_tail(1, 3.0, 2.0, kE);
  CHECK(extreme_norming_constant(m, 1) == doctest::Approx(kE));
  const double a = extreme_norming_constant(m, 1000);
  const double residual = a * a * a * std::log(a) * std::log(a) / (1000.0 * kE * kE * kE) - 1.0;
  CHECK(std::abs(residual) < 1e-10);
  CHECK(a == doctest::Approx(14.2).epsilon(0.01));

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double n = 1e2; n <= 1e6; n *= 10.0) {
    const double an = extreme_norming_constant(m, static_cast<std::size_t>(n));
    const double scaled = an * std::pow(std::log(n), 2.0 / 3.0) / std::cbrt(n);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(lo > 1.0);
  CHECK(hi / lo < 2.0);
  CHECK_THROWS_AS(extreme_norming_constant(MeasurementModel::gaussian(1, 0, 1), 10), DomainError);
}

TEST_CASE("Frechet mean") {
  CHECK(frechet_limit(3.0) == doctest::Approx(std::tgamma(2.0 / 3.0)).epsilon(1e-12));
  CHECK(frechet_limit(3.0) == doctest::Approx(1.35412).epsilon(1e-5));
  CHECK(frechet_limit(2.0) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(frechet_limit(1e12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(frechet_limit(std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(frechet_limit(1.0), DomainError);
}

TEST_CASE("selection rules") {
  const std::vector<double> phi{0.5, 2.0, -1.0, 2.0};
  TrialStream rng(1, 1);
  CHECK(SelectionRule::argmax().select(phi, rng) == 1);
  CHECK(SelectionRule::argmin().select(phi, rng) == 2);
  CHECK(SelectionRule::fixed(3).select(phi, rng) == 3);
  const auto soft = SelectionRule::softmax(1.0).conditional(phi);
  double total = 0.0;
  for (double p : soft) total += p;
  CHECK(total == doctest::Approx(1.0));
  CHECK(soft[1] == doctest::Approx(std::exp(2.0) / (std::exp(0.5) + 2.0 * std::exp(2.0) + std::exp(-1.0))));
  const auto top = SelectionRule::top_k(2).conditional(phi);
  CHECK(top[1] == doctest::Approx(0.5));
  CHECK(top[3] == doctest::Approx(0.5));
  CHECK(top[0] == 0.0);

  CHECK(SelectionRule::parse("fixed:2", 4).name() == SelectionRule::fixed(2).name());
  CHECK(std::holds_alternative<SelectionRule::TopKUniform>(SelectionRule::parse("uniform", 4).kind()));
  CHECK_THROWS_AS(SelectionRule::parse("fixed:4", 4), DomainError);
  CHECK_THROWS_AS(SelectionRule::parse("topk:5", 4), DomainError);
  CHECK_THROWS_AS(SelectionRule::parse("softmax:0", 4), DomainError);
  CHECK_THROWS_AS(SelectionRule::parse("best", 4), DomainError);
  CHECK(SelectionRule::argmax().deterministic());
  CHECK_FALSE(SelectionRule::softmax(1.0).deterministic());
  CHECK_FALSE(SelectionRule::softmax(1.0).rank_based());
}

TEST_CASE("fixed index gives no bias") {
  for (const auto& model : {MeasurementModel::gaussian(10, 1.0, 2.0), MeasurementModel::exponential(10, 1.5),
                            MeasurementModel::heavy_tail(10, 3.0, 2.0, kE)}) {
    const auto r = run_experiment(model, SelectionRule::fixed(4), quick(20000, 31));
    CHECK(within_3se(r));
    CHECK(r.dependence.information == 0.0);
    CHECK(r.p_t[4] == 1.0);
    CHECK(*r.analytic_information == 0.0);
  }
}

TEST_CASE("Gaussian argmax mean matches numeric integration") {
  const double oracle_mean = oracle::gaussian_max_mean(100);
  CHECK(oracle_mean == doctest::Approx(2.5076).epsilon(1e-4));
  const auto r = run_experiment(MeasurementModel::gaussian(100, 0.0, 1.0), SelectionRule::argmax(), quick(40000, 7));
  CHECK(std::abs(r.selected_mean - oracle_mean) <= 4.0 * r.stderr_of_bias);
  CHECK(r.dependence_exact);
  CHECK(r.dependence.information == doctest::Approx(std::log(100.0)).epsilon(1e-12));
  CHECK(*r.analytic_information == doctest::Approx(std::log(100.0)).epsilon(1e-12));
  CHECK(r.probe.information <= std::log(100.0));
}

TEST_CASE("runs are identical for any worker count") {
  const auto model = MeasurementModel::heavy_tail(20, 3.0, 2.0, kE);
  for (const auto& rule : {SelectionRule::argmax(), SelectionRule::softmax(2.0)}) {
    auto o = quick(5000, 99);
    o.record_selections = true;
    const auto one = run_experiment(model, rule, o);
    o.workers = 3;
    const auto three = run_experiment(model, rule, o);
    CHECK(one.empirical_bias == three.empirical_bias);
    CHECK(one.stderr_of_bias == three.stderr_of_bias);
    CHECK(one.dependence.information == three.dependence.information);
    CHECK(one.dependence.alpha_information == three.dependence.alpha_information);
    CHECK(one.probe.information == three.probe.information);
    CHECK(one.selections == three.selections);
  }
}

TEST_CASE("increasing transforms leave the selections unchanged") {
  const auto g = MeasurementModel::gaussian(15, 0.0, 1.0);
  const auto lognormal = MeasurementModel::custom(
      15, [g](double u) { return std::exp(g.quantile(u)); }, std::exp(0.5), "lognormal");
  for (const auto& rule : {SelectionRule::argmax(), SelectionRule::argmin(), SelectionRule::top_k(3)}) {
    auto o = quick(3000, 4);
    o.record_selections = true;
    const auto a = run_experiment(g, rule, o);
    const auto b = run_experiment(lognormal, rule, o);
    CHECK(a.selections == b.selections);
    CHECK(a.dependence.information == b.dependence.information);
    CHECK(a.probe.information == b.probe.information);
    CHECK(a.probe.alpha_information == b.probe.alpha_information);
  }
}

TEST_CASE("uniform random index is independent of the measurements") {
  const std::size_t n = 8;
  auto o = quick(40000, 12);
  o.bins = 10;
  const auto r = run_experiment(MeasurementModel::exponential(n, 1.0), SelectionRule::top_k(n), o);
  CHECK(within_3se(r));
  CHECK(r.dependence.information == doctest::Approx(0.0).epsilon(1e-15));
  // Plug-in bias of the empirical mutual information is about (rows-1)(bins-1) / (2 trials).
  CHECK(r.probe.information <= 3.0 * (n - 1) * (o.bins - 1) / (2.0 * o.trials));
}

TEST_CASE("probe estimate grows with refined bins") {
  auto o = quick(20000, 8);
  o.bins = 4;
  const auto model = MeasurementModel::gaussian(5, 0.0, 1.0);
  const auto coarse = run_experiment(model, SelectionRule::argmax(), o);
  o.bins = 16;
  const auto fine = run_experiment(model, SelectionRule::argmax(), o);
  CHECK(coarse.probe.information <= fine.probe.information + 1e-15);
  CHECK(fine.probe.information <= std::log(5.0));
  CHECK(fine.probe.information > 0.1);
}

TEST_CASE("top-k and softmax dependence") {
  const std::size_t n = 10;
  auto o = quick(4000, 2);
  o.alphas = {1.5, 2.0};
  const auto top = run_experiment(MeasurementModel::gaussian(n, 0, 1), SelectionRule::top_k(3), o);
  CHECK(top.dependence_exact);
  CHECK(top.dependence.information == doctest::Approx(std::log(10.0 / 3.0)).epsilon(1e-12));
  for (const auto& [alpha, value] : top.dependence.alpha_information) {
    const double expected = 0.3 * std::pow(10.0 / 3.0 - 1.0, alpha) + 1.0 - 0.3;
    CHECK(value == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto soft = run_experiment(MeasurementModel::gaussian(n, 0, 1), SelectionRule::softmax(0.5), o);
  CHECK_FALSE(soft.dependence_exact);
  CHECK(soft.dependence.information > 0.0);
  CHECK(soft.dependence.information < std::log(10.0));
  CHECK(soft.information_stderr > 0.0);
  CHECK(soft.empirical_bias > 0.0);
}

TEST_CASE("experiment argument errors") {
  const auto m = MeasurementModel::gaussian(4, 0, 1);
  CHECK_THROWS_AS(run_experiment(m, SelectionRule::argmax(), quick(0, 1)), DomainError);
  auto o = quick(10, 1);
  o.bins = 1;
  CHECK_THROWS_AS(run_experiment(m, SelectionRule::argmax(), o), DomainError);
  o.bins = 0;
  o.probe = 4;
  CHECK_THROWS_AS(run_experiment(m, SelectionRule::argmax(), o), DomainError);
  CHECK_THROWS_AS(run_experiment(m, SelectionRule::fixed(9), quick(10, 1)), DomainError);
}

TEST_CASE("every applicable bound dominates the empirical bias") {
  int checked = 0;
  int violated = 0;
  const std::vector<MeasurementModel> models{MeasurementModel::gaussian(2, 0.5, 1.5), MeasurementModel::exponential(2, 2.0),
                                             MeasurementModel::heavy_tail(2, 3.0, 2.0, kE)};
  for (const auto& base : models) {
    for (std::size_t n : {2u, 10u, 50u}) {
      const auto model = base.with_size(n);
      for (const auto& rule : {SelectionRule::argmax(), SelectionRule::argmin(), SelectionRule::fixed(n - 1),
                               SelectionRule::softmax(1.0), SelectionRule::top_k((n + 1) / 2)}) {
        auto o = quick(4000, 100 + n);
        o.alphas = {1.5, 2.0};
        o.estimate_probe = false;
        const auto r = run_experiment(model, rule, o);
        const double slack = 3.0 * r.stderr_of_bias;
        if (auto env = model.cgf_envelope()) {
          const std::vector<CgfEnvelope> envs(n, *env);
          ++checked;
          if (mgf_bound(envs, r.p_t, r.dependence.information) < r.empirical_bias - slack) ++violated;
        }
        for (const auto& [alpha, value] : r.dependence.alpha_information) {
          const double beta = alpha / (alpha - 1.0);
          const auto norm = model.centered_beta_norm(beta);
          if (!norm || !std::isfinite(*norm)) continue;
          ++checked;
          const double b = pnorm_bound({std::vector<double>(n, *norm), beta}, r.p_t, value);
          if (b < std::abs(r.empirical_bias) - slack) ++violated;
        }
      }
    }
  }
  CHECK(checked > 60);
  CHECK(violated == 0);
}

TEST_CASE("tightness sweep rows and CSV") {
  const auto m = MeasurementModel::heavy_tail(2, 3.0, 2.0, kE);
  const std::vector<std::size_t> ns{10, 100};
  SweepOptions o;
  o.trials = 2000;
  const auto rows = tightness_sweep(m, ns, o);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.a_n == doctest::Approx(extreme_norming_constant(m, row.n)));
    CHECK(row.bound_pnorm >= row.empirical_bias);
    CHECK(std::isnan(row.bound_mgf));
    CHECK(row.ratio == doctest::Approx(row.bound_pnorm / row.empirical_bias));
  }
  CHECK(rows[0].bound_pnorm ==
        doctest::Approx(std::pow(2.0, 2.0 / 3.0) * heavy_tail_beta_norm(m) * std::cbrt(10.0)).epsilon(1e-12));
  const auto csv = sweep_csv(rows);
  CHECK(csv.rfind(std::string(kSweepCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const std::vector<std::size_t> bad{1};
  CHECK_THROWS_AS(tightness_sweep(m, bad, o), DomainError);
}
