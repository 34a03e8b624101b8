// SPDX-License-Identifier: Apache-2.0
#include "xbias/orlicz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "golden.hpp"
#include "xbias/cgf.hpp"
#include "xbias/csv.hpp"
#include "xbias/divergence.hpp"
#include "xbias/errors.hpp"

namespace xbias {

namespace {

struct Scaled {
  std::vector<double> magnitude;  // |x| / scale, zero-probability atoms dropped
  std::vector<double> weight;
  double scale = 0.0;
};

Scaled normalize(std::span<const double> values, std::span<const double> probabilities) {
  if (values.size() != probabilities.size()) throw DomainError("orlicz norm: values and probabilities differ in length");
  Scaled s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) throw DomainError("orlicz norm: non-finite value");
    if (probabilities[k] > 0.0) s.scale = std::max(s.scale, std::abs(values[k]));
  }
  if (s.scale == 0.0) return s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (probabilities[k] > 0.0 && values[k] != 0.0) {
      s.magnitude.push_back(std::abs(values[k]) / s.scale);
      s.weight.push_back(probabilities[k]);
    }
  }
  return s;
}

double expectation(const Scaled& s, const OrliczFunction& psi, double factor) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.magnitude.size(); ++k) {
    const double v = psi(s.magnitude[k] * factor);
    if (!std::isfinite(v)) return kInf;
    acc += s.weight[k] * v;
  }
  return acc;
}

double luxemburg_impl(const Scaled& s, const OrliczFunction& psi) {
  if (s.scale == 0.0) return 0.0;
  auto g = [&](double sigma) { return expectation(s, psi, 1.0 / sigma); };
  double hi = 1.0;
  while (g(hi) > 1.0) {
    hi *= 2.0;
    if (hi > 1e300) throw DivergenceError("Luxemburg norm of '" + psi.name() + "' diverges");
  }
  double lo = hi;
  while (g(lo) <= 1.0) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) <= 1.0 ? hi : lo) = mid;
  }
  return s.scale * hi;
}

double amemiya_impl(const Scaled& s, const OrliczFunction& psi) {
  if (s.scale == 0.0) return 0.0;
  auto h = [&](double log_t) {
    const double t = std::exp(log_t);
    return (1.0 + expectation(s, psi, t)) / t;
  };
  constexpr int kScan = 64;
  const double log_lo = std::log(1e-8);
  const double log_hi = std::log(1e8);
  const double step = (log_hi - log_lo) / (kScan - 1);
  std::array<double, kScan> values{};
  int best = -1;
  for (int k = 0; k < kScan; ++k) {
    values[k] = h(log_lo + k * step);
    if (std::isfinite(values[k]) && (best < 0 || values[k] < values[best])) best = k;
  }
  if (best < 0) throw DivergenceError("Amemiya norm of '" + psi.name() + "' diverges on the whole scan");
  const double a = log_lo + std::max(best - 1, 0) * step;
  const double b = log_lo + std::min(best + 1, kScan - 1) * step;
  const double refined =
      detail::golden_minimize(h, a, b, [](double lo, double hi) { return hi - lo <= 1e-12; }, 200);
  return s.scale * std::min(values[best], refined);
}

std::vector<double> equal_weights(std::size_t n) {
  if (n == 0) throw DomainError("orlicz norm: no samples");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

}  // namespace

// ---------------------------------------------------------------------------
// OrliczFunction

OrliczFunction::OrliczFunction(Evaluator psi, Evaluator conjugate, std::string name, double domain_sup)
    : psi_(std::move(psi)), conjugate_(std::move(conjugate)), name_(std::move(name)), domain_sup_(domain_sup) {}

OrliczFunction OrliczFunction::power(double p, double coefficient) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("power Orlicz function needs p >= 1");
  if (!(coefficient > 0.0) || !std::isfinite(coefficient)) throw DomainError("power Orlicz coefficient must be positive");
  Evaluator psi = [p, coefficient](double u) { return coefficient * std::pow(u, p); };
  Evaluator conj;
  if (p == 1.0) {
    conj = [coefficient](double v) { return v <= coefficient ? 0.0 : kInf; };
  } else {
    conj = [p, coefficient](double v) {
      const double u = std::pow(v / (coefficient * p), 1.0 / (p - 1.0));
      return u * v * (1.0 - 1.0 / p);
    };
  }
  std::string name = "power:" + csv::format_double(p);
  if (coefficient != 1.0) name += ":" + csv::format_double(coefficient);
  return {std::move(psi), std::move(conj), std::move(name), kInf};
}

OrliczFunction OrliczFunction::exponential() {
  return {[](double u) { return std::expm1(u); },
          [](double v) { return v <= 1.0 ? 0.0 : v * std::log(v) - v + 1.0; }, "exp", kInf};
}

OrliczFunction OrliczFunction::tabulated(std::vector<double> u, std::vector<double> psi) {
  if (u.size() != psi.size() || u.size() < 2) throw DomainError("tabulated Orlicz function: need >= 2 matching knots");
  if (u.front() != 0.0 || psi.front() != 0.0) throw DomainError("tabulated Orlicz function: must pass through (0, 0)");
  double previous_slope = 0.0;
  for (std::size_t k = 1; k < u.size(); ++k) {
    if (!(u[k] > u[k - 1])) throw DomainError("tabulated Orlicz function: knots must be strictly increasing");
    const double slope = (psi[k] - psi[k - 1]) / (u[k] - u[k - 1]);
    if (slope < -1e-12 || slope < previous_slope - 1e-9 * std::max(1.0, std::abs(slope))) {
      throw DomainError("tabulated Orlicz function: must be nondecreasing and convex");
    }
    previous_slope = slope;
  }
  if (psi.back() <= 0.0) throw DomainError("tabulated Orlicz function: identically zero");
  const double sup = u.back();
  Evaluator eval = [u = std::move(u), psi = std::move(psi)](double x) {
    if (x > u.back()) return kInf;
    if (x == u.back()) return psi.back();
    const auto it = std::upper_bound(u.begin(), u.end(), x);
    const auto k = static_cast<std::size_t>(it - u.begin());
    const double t = (x - u[k - 1]) / (u[k] - u[k - 1]);
    return psi[k - 1] + t * (psi[k] - psi[k - 1]);
  };
  return {std::move(eval), nullptr, "tabulated", sup};
}

OrliczFunction OrliczFunction::load_csv(const std::filesystem::path& path) {
  const auto records = csv::read_file(path);
  std::vector<double> u;
  std::vector<double> psi;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (r == 0 && !csv::looks_numeric(rec.fields.front())) continue;
    if (rec.fields.size() != 2) {
      throw DomainError(path.string() + ":" + std::to_string(rec.line) + ": expected 2 columns");
    }
    u.push_back(csv::to_double(rec.fields[0], rec.line));
    psi.push_back(csv::to_double(rec.fields[1], rec.line));
  }
  auto f = tabulated(std::move(u), std::move(psi));
  f.name_ = path.string();
  return f;
}

OrliczFunction OrliczFunction::custom(Evaluator psi, Evaluator conjugate, std::string name, double domain_sup) {
  if (!psi) throw DomainError("custom Orlicz function: empty evaluator");
  if (psi(0.0) != 0.0) throw DomainError("custom Orlicz function '" + name + "': psi(0) != 0");
  return {std::move(psi), std::move(conjugate), std::move(name), domain_sup};
}

OrliczFunction OrliczFunction::parse(std::string_view spec) {
  if (spec == "exp") return exponential();
  if (spec.substr(0, 6) == "power:") {
    const auto rest = spec.substr(6);
    const auto colon = rest.find(':');
    const double p = csv::to_double(rest.substr(0, colon), 0);
    const double a = colon == std::string_view::npos ? 1.0 : csv::to_double(rest.substr(colon + 1), 0);
    return power(p, a);
  }
  if (std::filesystem::exists(std::filesystem::path(spec))) return load_csv(std::filesystem::path(spec));
  throw DomainError("unknown Orlicz function '" + std::string(spec) + "' (expected power:p[:a], exp, or a CSV path)");
}

double OrliczFunction::operator()(double u) const {
  if (!(u >= 0.0)) throw DomainError("Orlicz function evaluated at negative argument");
  if (u == 0.0) return 0.0;
  return psi_(u);
}

double OrliczFunction::conjugate(double v) const {
  if (!(v >= 0.0)) throw DomainError("Orlicz conjugate evaluated at negative argument");
  if (conjugate_) return conjugate_(v);
  return legendre::sup_transform(psi_, domain_sup_, v);
}

OrliczFunction OrliczFunction::conjugate_function() const {
  const OrliczFunction self = *this;
  return {[self](double v) { return self.conjugate(v); }, psi_, "conj(" + name_ + ")", kInf};
}

double OrliczFunction::inverse(double y) const {
  if (!(y >= 0.0)) throw DomainError("Orlicz inverse of a negative level");
  if (y == 0.0) return 0.0;
  double hi = 1.0;
  while ((*this)(hi) < y) {
    hi *= 2.0;
    if (hi > 1e300) throw DivergenceError("Orlicz inverse: '" + name_ + "' never reaches the level");
  }
  double lo = 0.0;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) >= y ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Norms

double luxemburg_norm(std::span<const double> values, std::span<const double> probabilities,
                      const OrliczFunction& psi) {
  check_probability_vector(probabilities, "orlicz norm probabilities");
  return luxemburg_impl(normalize(values, probabilities), psi);
}

double luxemburg_norm(std::span<const double> samples, const OrliczFunction& psi) {
  const auto w = equal_weights(samples.size());
  return luxemburg_impl(normalize(samples, w), psi);
}

double amemiya_norm(std::span<const double> values, std::span<const double> probabilities,
                    const OrliczFunction& psi) {
  check_probability_vector(probabilities, "orlicz norm probabilities");
  return amemiya_impl(normalize(values, probabilities), psi);
}

double amemiya_norm(std::span<const double> samples, const OrliczFunction& psi) {
  const auto w = equal_weights(samples.size());
  return amemiya_impl(normalize(samples, w), psi);
}

double theorem4_bound(double sigma, const DiscreteJoint& joint, const OrliczFunction& psi) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("Orlicz bound: sigma must be positive");
  const auto product = joint.product_of_marginals();
  const auto p = joint.probabilities();
  std::vector<double> deviation;
  std::vector<double> weight;
  deviation.reserve(p.size());
  weight.reserve(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (product[k] > 0.0) {
      deviation.push_back(std::abs(p[k] / product[k] - 1.0));
      weight.push_back(product[k]);
    } else if (p[k] > 0.0) {
      return kInf;
    }
  }
  return sigma * amemiya_impl(normalize(deviation, weight), psi.conjugate_function());
}

HolderCheck holder_check(std::span<const double> x, std::span<const double> y, std::span<const double> probabilities,
                         const OrliczFunction& psi) {
  if (x.size() != y.size() || x.size() != probabilities.size()) throw DomainError("Hoelder check: length mismatch");
  check_probability_vector(probabilities, "Hoelder check probabilities");
  double lhs = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) lhs += probabilities[k] * x[k] * y[k];
  const double rhs = luxemburg_norm(x, probabilities, psi) * amemiya_norm(y, probabilities, psi.conjugate_function());
  const double slack = rhs - lhs;
  return {slack >= -1e-12 * std::max(1.0, std::abs(rhs)), lhs, rhs, slack};
}

}  // namespace xbias
