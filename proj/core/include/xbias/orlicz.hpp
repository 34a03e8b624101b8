// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xbias {

class DiscreteJoint;

/// Convex function on [0, inf) vanishing at zero, not identically 0 or inf.
/// Carries its convex conjugate either in closed form or through the
/// numeric Legendre transform of the cgf module.
class OrliczFunction {
 public:
  using Evaluator = std::function<double(double)>;

  /// coefficient * u^p, p >= 1.
  static OrliczFunction power(double p, double coefficient = 1.0);
  /// e^u - 1.
  static OrliczFunction exponential();
  /// Piecewise-linear through (u_k, psi_k) with u_0 = 0, +inf past the last knot.
  static OrliczFunction tabulated(std::vector<double> u, std::vector<double> psi);
  static OrliczFunction load_csv(const std::filesystem::path& path);
  /// Conjugate is computed numerically when `conjugate` is empty.
  static OrliczFunction custom(Evaluator psi, Evaluator conjugate, std::string name, double domain_sup);
  /// "power:p", "power:p:a", "exp", or a path to a two-column CSV.
  static OrliczFunction parse(std::string_view spec);

  [[nodiscard]] double operator()(double u) const;
  /// psi*(v) = sup_{u >= 0} (u v - psi(u)).
  [[nodiscard]] double conjugate(double v) const;
  /// The conjugate as an Orlicz function in its own right (its conjugate is psi).
  [[nodiscard]] OrliczFunction conjugate_function() const;
  /// Smallest u with psi(u) >= y.
  [[nodiscard]] double inverse(double y) const;
  [[nodiscard]] double domain_sup() const noexcept { return domain_sup_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] bool has_closed_form_conjugate() const noexcept { return static_cast<bool>(conjugate_); }

 private:
  OrliczFunction(Evaluator psi, Evaluator conjugate, std::string name, double domain_sup);

  Evaluator psi_;
  Evaluator conjugate_;
  std::string name_;
  double domain_sup_;
};

/// inf{sigma > 0 : E psi(|X| / sigma) <= 1} for a discrete law of X.
double luxemburg_norm(std::span<const double> values, std::span<const double> probabilities,
                      const OrliczFunction& psi);
/// Same with equally weighted samples.
double luxemburg_norm(std::span<const double> samples, const OrliczFunction& psi);

/// inf_{t > 0} (1 + E psi(t |X|)) / t for a discrete law of X.
double amemiya_norm(std::span<const double> values, std::span<const double> probabilities,
                    const OrliczFunction& psi);
double amemiya_norm(std::span<const double> samples, const OrliczFunction& psi);

/// sigma times the Amemiya psi*-norm of (dP_{T,Y} / dP_T dP_Y - 1) under P_T x P_Y.
double theorem4_bound(double sigma, const DiscreteJoint& joint, const OrliczFunction& psi);

struct HolderCheck {
  bool holds;
  double lhs;    // E[XY]
  double rhs;    // ||X||_psi ||Y||^A_{psi*}
  double slack;  // rhs - lhs
};

/// Generalized Hoelder inequality E[XY] <= ||X||_psi ||Y||^A_{psi*} on paired values.
HolderCheck holder_check(std::span<const double> x, std::span<const double> y,
                         std::span<const double> probabilities, const OrliczFunction& psi);

}  // namespace xbias
