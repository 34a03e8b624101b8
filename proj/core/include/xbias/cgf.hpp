// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace xbias {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Upper envelopes psi(lambda) for the cumulant generating function of a
/// centered measurement, defined for lambda in [0, domain_sup).
///
/// Every envelope satisfies psi(0) = 0, psi'(0+) = 0, and is convex and
/// nondecreasing on its domain. Evaluation at or beyond domain_sup is +inf.
class CgfEnvelope {
 public:
  struct SubGaussian {
    double sigma;
  };
  /// lambda^2 sigma^2 / 2 on [0, 1/b).
  struct SubExponential {
    double sigma;
    double b;
  };
  /// lambda^2 v / (2 (1 - c lambda)) on [0, 1/c).
  struct SubGamma {
    double variance_factor;
    double scale;
  };
  /// Piecewise-linear through (lambda_k, psi_k); lambda_0 = 0 and psi_0 = 0.
  struct Tabulated {
    std::vector<double> lambda;
    std::vector<double> psi;
  };
  using Kind = std::variant<SubGaussian, SubExponential, SubGamma, Tabulated>;

  static CgfEnvelope sub_gaussian(double sigma);
  static CgfEnvelope sub_exponential(double sigma, double b);
  static CgfEnvelope sub_gamma(double variance_factor, double scale);
  static CgfEnvelope tabulated(std::vector<double> lambda, std::vector<double> psi);
  /// Two-column CSV (lambda, psi) with a one-line header.
  static CgfEnvelope load_csv(const std::filesystem::path& path);

  [[nodiscard]] double operator()(double lambda) const;
  [[nodiscard]] double domain_sup() const noexcept { return domain_sup_; }
  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

 private:
  CgfEnvelope(Kind kind, double domain_sup) : kind_(std::move(kind)), domain_sup_(domain_sup) {}

  Kind kind_;
  double domain_sup_;
};

/// Weighted mixture sum_i w_i psi_i(lambda), the expected envelope under the
/// law of the selection index. Its domain is the smallest component domain.
class MixedEnvelope {
 public:
  MixedEnvelope(std::vector<double> weights, std::vector<CgfEnvelope> components);

  [[nodiscard]] double operator()(double lambda) const;
  [[nodiscard]] double domain_sup() const noexcept { return domain_sup_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::span<const CgfEnvelope> components() const noexcept { return components_; }

  /// Sub-Gaussian parameter sqrt(sum w_i sigma_i^2) if every component is sub-Gaussian.
  [[nodiscard]] std::optional<double> sub_gaussian_sigma() const;

 private:
  std::vector<double> weights_;
  std::vector<CgfEnvelope> components_;
  double domain_sup_;
};

/// Pointwise maximum max_i psi_i(lambda) over a family of envelopes.
class MaxEnvelope {
 public:
  explicit MaxEnvelope(std::vector<CgfEnvelope> components);

  [[nodiscard]] double operator()(double lambda) const;
  [[nodiscard]] double domain_sup() const noexcept { return domain_sup_; }

 private:
  std::vector<CgfEnvelope> components_;
  double domain_sup_;
};

double evaluate(const CgfEnvelope& env, double lambda);
double evaluate(const MixedEnvelope& env, double lambda);

/// psi*(x) = sup_{0 <= lambda < domain_sup} (lambda x - psi(lambda)).
double conjugate(const CgfEnvelope& env, double x);
double conjugate(const MixedEnvelope& env, double x);

/// (psi*)^{-1}(I) = inf_{0 < lambda < domain_sup} (psi(lambda) + I) / lambda.
double inverse_conjugate(const CgfEnvelope& env, double information);
double inverse_conjugate(const MixedEnvelope& env, double information);
double inverse_conjugate(const MaxEnvelope& env, double information);

/// Piecewise sub-exponential closed form: sigma sqrt(2I) when I <= sigma^2/(2b),
/// else b I + sigma^2/(2 b^2). Agrees with inverse_conjugate only at b = 1.
double paper_subexponential_bound(double sigma, double b, double information);

/// Generic numeric Legendre machinery shared with the Orlicz module.
namespace legendre {

using Function = std::function<double(double)>;

struct Tolerances {
  /// Width at which golden-section search stops (absolute below 1, relative above).
  double bracket = 1e-10;
  int max_iterations = 400;
};

/// sup over t in [0, domain_sup) of (t x - f(t)) for convex f with f(0) = 0.
/// Returns +inf when the objective keeps increasing without bound.
double sup_transform(const Function& f, double domain_sup, double x, Tolerances tol = {});

/// inf over t in (0, domain_sup) of (f(t) + y) / t for convex f with f(0) = 0, y > 0.
double inf_ratio(const Function& f, double domain_sup, double y, Tolerances tol = {});

/// Largest evaluation point used for a finite domain endpoint.
inline double endpoint(double domain_sup) { return domain_sup * (1.0 - 1e-9); }

}  // namespace legendre

}  // namespace xbias
