// SPDX-License-Identifier: Apache-2.0
#include "xbias/cgf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "golden.hpp"
#include "xbias/csv.hpp"
#include "xbias/errors.hpp"

namespace xbias {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("envelope evaluated at negative lambda");
}

bool narrow_enough(double lo, double hi, const legendre::Tolerances& tol) {
  const double scale = std::max(1.0, std::abs(hi));
  const double width = hi - lo;
  return width <= tol.bracket * std::min(1.0, std::max(hi, 1e-300)) ||
         width <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

template <class F>
double golden_minimize(F&& f, double lo, double hi, const legendre::Tolerances& tol) {
  return detail::golden_minimize(
      std::forward<F>(f), lo, hi, [&](double a, double b) { return narrow_enough(a, b, tol); },
      tol.max_iterations);
}

// Past this the objective is treated as increasing without bound.
constexpr double kUnboundedLambda = 1e150;

}  // namespace

// ---------------------------------------------------------------------------
// CgfEnvelope

CgfEnvelope CgfEnvelope::sub_gaussian(double sigma) {
  require_positive(sigma, "sub-Gaussian sigma");
  return {SubGaussian{sigma}, kInf};
}

CgfEnvelope CgfEnvelope::sub_exponential(double sigma, double b) {
  require_positive(sigma, "sub-exponential sigma");
  require_positive(b, "sub-exponential b");
  return {SubExponential{sigma, b}, 1.0 / b};
}

CgfEnvelope CgfEnvelope::sub_gamma(double variance_factor, double scale) {
  require_positive(variance_factor, "sub-gamma variance factor");
  require_positive(scale, "sub-gamma scale");
  return {SubGamma{variance_factor, scale}, 1.0 / scale};
}

CgfEnvelope CgfEnvelope::tabulated(std::vector<double> lambda, std::vector<double> psi) {
  if (lambda.size() != psi.size()) throw DomainError("tabulated envelope: column lengths differ");
  if (lambda.size() < 3) throw DomainError("tabulated envelope: need at least 3 grid points");
  if (lambda.front() != 0.0) throw DomainError("tabulated envelope: grid must start at lambda = 0");
  if (std::abs(psi.front()) > 1e-15) throw DomainError("tabulated envelope: psi(0) must be 0");
  psi.front() = 0.0;

  std::vector<double> slopes;
  slopes.reserve(lambda.size() - 1);
  for (std::size_t k = 1; k < lambda.size(); ++k) {
    if (!(lambda[k] > lambda[k - 1]) || !std::isfinite(lambda[k])) {
      throw DomainError("tabulated envelope: lambda grid must be strictly increasing and finite");
    }
    if (!std::isfinite(psi[k])) throw DomainError("tabulated envelope: psi values must be finite");
    slopes.push_back((psi[k] - psi[k - 1]) / (lambda[k] - lambda[k - 1]));
  }
  const double slope_scale = std::max(1.0, std::abs(slopes.back()));
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (slopes[k] < -1e-12 * slope_scale) throw DomainError("tabulated envelope: psi must be nondecreasing");
    if (k > 0 && slopes[k] < slopes[k - 1] - 1e-9 * slope_scale) {
      throw DomainError("tabulated envelope: psi must be convex (secant slopes decrease at lambda = " +
                        std::to_string(lambda[k]) + ")");
    }
  }
  // Extrapolate the first two secant slopes (located at the interval midpoints)
  // back to lambda = 0 to check that psi(lambda)/lambda -> 0.
  const double m1 = 0.5 * lambda[1];
  const double m2 = 0.5 * (lambda[1] + lambda[2]);
  const double slope_at_zero = slopes[0] - (slopes[1] - slopes[0]) * m1 / (m2 - m1);
  if (slope_at_zero > 1e-6 + 1e-3 * slope_scale) {
    throw DomainError("tabulated envelope: right derivative at 0 must vanish");
  }

  const double sup = lambda.back();
  return {Tabulated{std::move(lambda), std::move(psi)}, sup};
}

CgfEnvelope CgfEnvelope::load_csv(const std::filesystem::path& path) {
  const auto records = csv::read_file(path);
  if (records.empty()) throw DomainError(path.string() + ": empty envelope table");
  std::vector<double> lambda;
  std::vector<double> psi;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 2) {
      throw DomainError(path.string() + ":" + std::to_string(rec.line) + ": expected 2 columns");
    }
    lambda.push_back(csv::to_double(rec.fields[0], rec.line));
    psi.push_back(csv::to_double(rec.fields[1], rec.line));
  }
  return tabulated(std::move(lambda), std::move(psi));
}

double CgfEnvelope::operator()(double lambda) const {
  require_lambda(lambda);
  if (lambda == 0.0) return 0.0;
  if (lambda >= domain_sup_) return kInf;
  return std::visit(
      Overloaded{
          [&](const SubGaussian& e) { return 0.5 * lambda * lambda * e.sigma * e.sigma; },
          [&](const SubExponential& e) { return 0.5 * lambda * lambda * e.sigma * e.sigma; },
          [&](const SubGamma& e) {
            return lambda * lambda * e.variance_factor / (2.0 * (1.0 - e.scale * lambda));
          },
          [&](const Tabulated& e) {
            const auto it = std::upper_bound(e.lambda.begin(), e.lambda.end(), lambda);
            const auto k = static_cast<std::size_t>(it - e.lambda.begin());
            const double t = (lambda - e.lambda[k - 1]) / (e.lambda[k] - e.lambda[k - 1]);
            return e.psi[k - 1] + t * (e.psi[k] - e.psi[k - 1]);
          },
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Mixtures

MixedEnvelope::MixedEnvelope(std::vector<double> weights, std::vector<CgfEnvelope> components)
    : weights_(std::move(weights)), components_(std::move(components)), domain_sup_(kInf) {
  if (weights_.size() != components_.size()) {
    throw DomainError("mixed envelope: " + std::to_string(weights_.size()) + " weights for " +
                      std::to_string(components_.size()) + " envelopes");
  }
  if (components_.empty()) throw DomainError("mixed envelope: no components");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("mixed envelope: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("mixed envelope: weights must sum to 1");
  for (const auto& c : components_) domain_sup_ = std::min(domain_sup_, c.domain_sup());
}

double MixedEnvelope::operator()(double lambda) const {
  require_lambda(lambda);
  if (lambda == 0.0) return 0.0;
  if (lambda >= domain_sup_) return kInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (weights_[i] > 0.0) acc += weights_[i] * components_[i](lambda);
  }
  return acc;
}

std::optional<double> MixedEnvelope::sub_gaussian_sigma() const {
  double second_moment = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto* sg = std::get_if<CgfEnvelope::SubGaussian>(&components_[i].kind());
    if (sg == nullptr) return std::nullopt;
    second_moment += weights_[i] * sg->sigma * sg->sigma;
  }
  return std::sqrt(second_moment);
}

MaxEnvelope::MaxEnvelope(std::vector<CgfEnvelope> components)
    : components_(std::move(components)), domain_sup_(kInf) {
  if (components_.empty()) throw DomainError("max envelope: no components");
  for (const auto& c : components_) domain_sup_ = std::min(domain_sup_, c.domain_sup());
}

double MaxEnvelope::operator()(double lambda) const {
  require_lambda(lambda);
  double acc = 0.0;
  for (const auto& c : components_) acc = std::max(acc, c(lambda));
  return acc;
}

// ---------------------------------------------------------------------------
// Legendre machinery

namespace legendre {

double sup_transform(const Function& f, double domain_sup, double x, Tolerances tol) {
  if (!(x >= 0.0)) throw DomainError("conjugate evaluated at negative argument");
  if (x == 0.0) return 0.0;
  const bool bounded = std::isfinite(domain_sup);
  const double cap = bounded ? endpoint(domain_sup) : kInf;
  // Concave in t; infeasible points map to -inf.
  auto objective = [&](double t) {
    const double v = f(t);
    return std::isfinite(v) ? t * x - v : -kInf;
  };
  auto neg = [&](double t) { return -objective(t); };

  double prev = 0.0;
  double t = std::min(1.0, cap);
  double ft = objective(t);
  while (true) {
    const double next = std::min(2.0 * t, cap);
    if (next == t) {
      // Objective still nondecreasing at the domain endpoint.
      return std::max(ft, -golden_minimize(neg, prev, t, tol));
    }
    const double fn = objective(next);
    if (fn < ft) return std::max(ft, -golden_minimize(neg, prev, next, tol));
    prev = t;
    t = next;
    ft = fn;
    if (t > kUnboundedLambda) return kInf;
  }
}

double inf_ratio(const Function& f, double domain_sup, double y, Tolerances tol) {
  if (!(y >= 0.0)) throw DomainError("inverse conjugate evaluated at negative argument");
  if (y == 0.0) return 0.0;
  const bool bounded = std::isfinite(domain_sup);
  const double cap = bounded ? endpoint(domain_sup) : kInf;
  // Quasi-convex in t: lambda psi'(lambda) - psi(lambda) is nondecreasing.
  auto ratio = [&](double t) {
    const double v = f(t);
    return std::isfinite(v) ? (v + y) / t : kInf;
  };

  double t = bounded ? std::min(1.0, 0.5 * cap) : 1.0;
  double gt = ratio(t);
  const double up = std::min(2.0 * t, cap);
  if (ratio(up) < gt) {
    double prev = t;
    t = up;
    gt = ratio(t);
    while (true) {
      const double next = std::min(2.0 * t, cap);
      if (next == t) return std::min(gt, golden_minimize(ratio, prev, t, tol));
      const double gn = ratio(next);
      if (gn >= gt) return std::min(gt, golden_minimize(ratio, prev, next, tol));
      prev = t;
      t = next;
      gt = gn;
      if (t > kUnboundedLambda) return gt;
    }
  }
  while (true) {
    const double half = 0.5 * t;
    const double gh = ratio(half);
    if (gh >= gt) return std::min(gt, golden_minimize(ratio, half, std::min(2.0 * t, cap), tol));
    t = half;
    gt = gh;
    if (t < 1e-300) throw DivergenceError("inverse conjugate: no minimum above lambda = 0");
  }
}

}  // namespace legendre

// ---------------------------------------------------------------------------
// Public operations

double evaluate(const CgfEnvelope& env, double lambda) { return env(lambda); }
double evaluate(const MixedEnvelope& env, double lambda) { return env(lambda); }

double conjugate(const CgfEnvelope& env, double x) {
  if (!(x >= 0.0)) throw DomainError("conjugate evaluated at negative argument");
  if (const auto* sg = std::get_if<CgfEnvelope::SubGaussian>(&env.kind())) {
    return x * x / (2.0 * sg->sigma * sg->sigma);
  }
  return legendre::sup_transform([&](double l) { return env(l); }, env.domain_sup(), x);
}

double conjugate(const MixedEnvelope& env, double x) {
  if (!(x >= 0.0)) throw DomainError("conjugate evaluated at negative argument");
  if (const auto sigma = env.sub_gaussian_sigma()) return x * x / (2.0 * *sigma * *sigma);
  return legendre::sup_transform([&](double l) { return env(l); }, env.domain_sup(), x);
}

double inverse_conjugate(const CgfEnvelope& env, double information) {
  return legendre::inf_ratio([&](double l) { return env(l); }, env.domain_sup(), information);
}

double inverse_conjugate(const MixedEnvelope& env, double information) {
  return legendre::inf_ratio([&](double l) { return env(l); }, env.domain_sup(), information);
}

double inverse_conjugate(const MaxEnvelope& env, double information) {
  return legendre::inf_ratio([&](double l) { return env(l); }, env.domain_sup(), information);
}

double paper_subexponential_bound(double sigma, double b, double information) {
  require_positive(sigma, "sigma");
  require_positive(b, "b");
  if (!(information >= 0.0)) throw DomainError("information must be nonnegative");
  if (information <= sigma * sigma / (2.0 * b)) return sigma * std::sqrt(2.0 * information);
  return b * information + sigma * sigma / (2.0 * b * b);
}

}  // namespace xbias
