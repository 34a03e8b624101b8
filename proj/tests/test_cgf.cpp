// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "xbias/cgf.hpp"
#include "xbias/errors.hpp"

using namespace xbias;

TEST_CASE("evaluate: closed forms and domain edges") {
  CHECK(evaluate(CgfEnvelope::sub_gaussian(2.0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(evaluate(CgfEnvelope::sub_exponential(1.0, 2.0), 0.0) == 0.0);
  CHECK(evaluate(CgfEnvelope::sub_gamma(4.0, 1.0), 0.0) == 0.0);
  CHECK(std::isinf(evaluate(CgfEnvelope::sub_gamma(4.0, 2.0), 0.5)));
  CHECK(std::isinf(evaluate(CgfEnvelope::sub_exponential(1.0, 2.0), 0.6)));
  CHECK(evaluate(CgfEnvelope::sub_gamma(4.0, 2.0), 0.25) == doctest::Approx(0.0625 * 4.0 / (2.0 * 0.5)));
  CHECK_THROWS_AS((void)evaluate(CgfEnvelope::sub_gaussian(1.0), -0.1), DomainError);
}

TEST_CASE("envelope factories reject bad parameters") {
  CHECK_THROWS_AS(CgfEnvelope::sub_gaussian(0.0), DomainError);
  CHECK_THROWS_AS(CgfEnvelope::sub_exponential(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(CgfEnvelope::sub_gamma(-1.0, 1.0), DomainError);
}

TEST_CASE("conjugate: closed form against a grid Legendre oracle") {
  const auto env = CgfEnvelope::sub_gaussian(1.0);
  CHECK(conjugate(env, 3.0) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(conjugate(env, 0.0) == 0.0);
  const double oracle = oracle::grid_conjugate([](double l) { return 0.5 * l * l; }, kInf, 3.0);
  CHECK(conjugate(env, 3.0) == doctest::Approx(oracle).epsilon(1e-6));

  const auto gamma = CgfEnvelope::sub_gamma(2.0, 0.5);
  for (double x : {0.1, 0.7, 2.0, 9.0}) {
    const double g = oracle::grid_conjugate([&](double l) { return evaluate(gamma, l); }, 2.0, x);
    CHECK(conjugate(gamma, x) == doctest::Approx(g).epsilon(1e-6));
  }
}

TEST_CASE("conjugate of a tabulated quadratic") {
  std::vector<double> lambda;
  std::vector<double> psi;
  for (int k = 0; k <= 1000; ++k) {
    const double l = 0.01 * k;
    lambda.push_back(l);
    psi.push_back(l * l);
  }
  const auto env = CgfEnvelope::tabulated(lambda, psi);
  CHECK(conjugate(env, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::isinf(evaluate(env, 10.5)));
  CHECK(evaluate(env, 0.005) == doctest::Approx(0.00005));
}

TEST_CASE("tabulated validation names the violated invariant") {
  CHECK_THROWS_AS(CgfEnvelope::tabulated({0.0, 1.0}, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(CgfEnvelope::tabulated({0.0, 1.0, 2.0}, {0.1, 1.0, 4.0}), DomainError);
  CHECK_THROWS_AS(CgfEnvelope::tabulated({0.0, 1.0, 2.0}, {0.0, 3.0, 4.0}), DomainError);  // concave
  CHECK_THROWS_AS(CgfEnvelope::tabulated({0.0, 2.0, 1.0}, {0.0, 1.0, 4.0}), DomainError);  // unordered
  CHECK_THROWS_AS(CgfEnvelope::tabulated({0.0, 0.1, 0.2, 0.3}, {0.0, 0.1, 0.2, 0.31}), DomainError);  // slope at 0
}

TEST_CASE("tabulated envelope loads from CSV") {
  const auto path = std::filesystem::temp_directory_path() / "xbias_env_test.csv";
  {
    std::ofstream out(path);
    out << "lambda,psi\n0,0\n0.5,0.125\n1,0.5\n1.5,1.125\n2,2\n";
  }
  const auto env = CgfEnvelope::load_csv(path);
  CHECK(evaluate(env, 1.0) == doctest::Approx(0.5));
  CHECK(env.domain_sup() == 2.0);
  {
    std::ofstream out(path);
    out << "lambda,psi\n0,0\n0.5,abc\n";
  }
  CHECK_THROWS_AS(CgfEnvelope::load_csv(path), DomainError);
  std::filesystem::remove(path);
}

TEST_CASE("inverse_conjugate: closed forms") {
  CHECK(inverse_conjugate(CgfEnvelope::sub_gaussian(2.0), 2.0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(inverse_conjugate(CgfEnvelope::sub_gaussian(2.0), 0.0) == 0.0);
  CHECK(inverse_conjugate(CgfEnvelope::sub_gamma(4.0, 1.0), 2.0) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(inverse_conjugate(CgfEnvelope::sub_gamma(4.0, 1.0), 0.0) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sd(0.1, 5.0);
  for (int k = 0; k < 40; ++k) {
    const double s = sd(rng);
    const double c = sd(rng);
    for (double info : {1e-6, 1e-3, 0.5, 3.0, 10.0}) {
      CHECK(inverse_conjugate(CgfEnvelope::sub_gaussian(s), info) ==
            doctest::Approx(s * std::sqrt(2.0 * info)).epsilon(1e-6));
      CHECK(inverse_conjugate(CgfEnvelope::sub_gamma(s * s, c), info) ==
            doctest::Approx(s * std::sqrt(2.0 * info) + c * info).epsilon(1e-6));
    }
  }
}

TEST_CASE("sub-exponential: piecewise form versus direct minimization") {
  CHECK(paper_subexponential_bound(1.0, 1.0, 0.25) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(paper_subexponential_bound(1.0, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(paper_subexponential_bound(1.0, 1.0, 0.0) == 0.0);
  // Direct minimization of (lambda^2 s^2 / 2 + I) / lambda over [0, 1/b).
  for (double b : {0.5, 1.0, 2.0}) {
    for (double info : {0.01, 0.1, 0.3, 1.0, 4.0}) {
      const double s = 1.3;
      const double direct = oracle::grid_inverse_conjugate([&](double l) { return 0.5 * l * l * s * s; }, 1.0 / b, info);
      CHECK(inverse_conjugate(CgfEnvelope::sub_exponential(s, b), info) == doctest::Approx(direct).epsilon(1e-6));
      const double derived = info <= s * s / (2.0 * b * b) ? s * std::sqrt(2.0 * info) : b * info + s * s / (2.0 * b);
      CHECK(direct == doctest::Approx(derived).epsilon(1e-6));
    }
  }
}

TEST_CASE("Fenchel-Young holds on a grid and is tight at the maximizer") {
  const std::vector<CgfEnvelope> envs = {CgfEnvelope::sub_gaussian(1.7), CgfEnvelope::sub_gamma(1.0, 0.4),
                                         CgfEnvelope::sub_exponential(0.8, 1.5)};
  for (const auto& env : envs) {
    const double top = std::isfinite(env.domain_sup()) ? env.domain_sup() : 10.0;
    for (int i = 0; i < 40; ++i) {
      const double l = top * i / 40.0;
      for (int j = 0; j <= 30; ++j) {
        const double x = 0.2 * j;
        CHECK(evaluate(env, l) + conjugate(env, x) >= l * x - 1e-9 * std::max(1.0, l * x));
      }
    }
  }
  const auto g = CgfEnvelope::sub_gaussian(1.7);
  const double x = 2.0;
  const double lstar = x / (1.7 * 1.7);
  CHECK(evaluate(g, lstar) + conjugate(g, x) == doctest::Approx(lstar * x).epsilon(1e-12));
}

TEST_CASE("inverse_conjugate undoes conjugate on the increasing branch") {
  const std::vector<CgfEnvelope> envs = {CgfEnvelope::sub_gaussian(0.6), CgfEnvelope::sub_gamma(2.0, 0.3),
                                         CgfEnvelope::sub_exponential(1.0, 0.5)};
  for (const auto& env : envs) {
    for (double x : {0.05, 0.4, 1.0, 2.5, 7.0}) {
      CHECK(inverse_conjugate(env, conjugate(env, x)) == doctest::Approx(x).epsilon(1e-6));
    }
  }
}

TEST_CASE("inverse_conjugate is nondecreasing and concave in I") {
  const std::vector<CgfEnvelope> envs = {CgfEnvelope::sub_gaussian(1.0), CgfEnvelope::sub_gamma(1.0, 1.0),
                                         CgfEnvelope::sub_exponential(1.0, 2.0)};
  for (const auto& env : envs) {
    std::vector<double> v;
    for (int k = 0; k <= 60; ++k) v.push_back(inverse_conjugate(env, 0.1 * k));
    for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] >= v[k - 1] - 1e-12);
    for (std::size_t k = 1; k + 1 < v.size(); ++k) CHECK(v[k + 1] - 2.0 * v[k] + v[k - 1] <= 1e-7);
  }
}

TEST_CASE("mixtures of identical components equal the component") {
  const auto env = CgfEnvelope::sub_gamma(1.5, 0.7);
  const MixedEnvelope mix({0.2, 0.3, 0.5}, {env, env, env});
  for (double l : {0.0, 0.3, 1.0, 1.4}) CHECK(evaluate(mix, l) == doctest::Approx(evaluate(env, l)).epsilon(1e-14));
  for (double x : {0.0, 0.5, 3.0}) CHECK(conjugate(mix, x) == doctest::Approx(conjugate(env, x)).epsilon(1e-9));
  for (double i : {0.0, 0.5, 3.0}) {
    CHECK(inverse_conjugate(mix, i) == doctest::Approx(inverse_conjugate(env, i)).epsilon(1e-9));
  }
  CHECK(mix.domain_sup() == doctest::Approx(1.0 / 0.7));
}

TEST_CASE("mixed envelope invariants") {
  const auto a = CgfEnvelope::sub_gaussian(1.0);
  const auto b = CgfEnvelope::sub_gamma(1.0, 2.0);
  CHECK_THROWS_AS(MixedEnvelope({0.5, 0.4}, {a, b}), DomainError);
  CHECK_THROWS_AS(MixedEnvelope({1.0}, {a, b}), DomainError);
  const MixedEnvelope m({0.25, 0.75}, {a, b});
  CHECK(m.domain_sup() == 0.5);
  CHECK(evaluate(m, 0.3) == doctest::Approx(0.25 * evaluate(a, 0.3) + 0.75 * evaluate(b, 0.3)).epsilon(1e-15));
  CHECK_FALSE(m.sub_gaussian_sigma().has_value());
  const MixedEnvelope g({0.5, 0.5}, {CgfEnvelope::sub_gaussian(1.0), CgfEnvelope::sub_gaussian(std::sqrt(3.0))});
  REQUIRE(g.sub_gaussian_sigma().has_value());
  CHECK(*g.sub_gaussian_sigma() == doctest::Approx(std::sqrt(2.0)));
  CHECK(inverse_conjugate(g, 1.0) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("max envelope takes the pointwise maximum") {
  const MaxEnvelope m({CgfEnvelope::sub_gaussian(1.0), CgfEnvelope::sub_gaussian(2.0)});
  CHECK(inverse_conjugate(m, std::log(9.0)) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(9.0))).epsilon(1e-8));
}
