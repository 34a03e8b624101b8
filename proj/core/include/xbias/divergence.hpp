// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace xbias {

/// Joint probability table of a selection index (rows) and a binned
/// measurement (columns), stored row-major with cached marginals.
class DiscreteJoint {
 public:
  DiscreteJoint(std::size_t rows, std::size_t cols, std::vector<double> probabilities);
  /// Normalizes a table of nonnegative counts.
  static DiscreteJoint from_counts(std::size_t rows, std::size_t cols, std::span<const double> counts);
  /// The product of two marginals.
  static DiscreteJoint product(std::span<const double> row_marginal, std::span<const double> col_marginal);

  /// CSV matrix: header ",c0,c1,..." then one "label,p..." line per row.
  static DiscreteJoint load_csv(const std::filesystem::path& path);
  static DiscreteJoint read_csv(std::istream& in, const std::string& source = "<stream>");
  void write_csv(std::ostream& out) const;

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return p_[r * cols_ + c]; }
  [[nodiscard]] std::span<const double> probabilities() const noexcept { return p_; }
  [[nodiscard]] std::span<const double> row_marginal() const noexcept { return row_marginal_; }
  [[nodiscard]] std::span<const double> col_marginal() const noexcept { return col_marginal_; }
  [[nodiscard]] const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
  [[nodiscard]] const std::vector<std::string>& col_labels() const noexcept { return col_labels_; }

  /// Flattened table of p_T(r) p_phi(c), same layout as probabilities().
  [[nodiscard]] std::vector<double> product_of_marginals() const;
  /// True when every column has at most one nonzero entry (T is a function of the column).
  [[nodiscard]] bool row_is_function_of_column() const;
  /// Joint with columns a and b merged into column min(a, b).
  [[nodiscard]] DiscreteJoint merge_columns(std::size_t a, std::size_t b) const;

  void set_labels(std::vector<std::string> row_labels, std::vector<std::string> col_labels);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> p_;
  std::vector<double> row_marginal_;
  std::vector<double> col_marginal_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
};

/// Convex generator phi with phi(1) = 0.
class PhiGenerator {
 public:
  struct AbsPower {
    double alpha;  // phi(t) = |t - 1|^alpha
  };
  struct KullbackLeibler {};  // phi(t) = t ln t - t + 1
  struct Custom {
    std::function<double(double)> phi;
    double phi_at_zero;
    /// lim phi(t)/t as t -> inf; +inf for superlinear generators.
    double slope_at_infinity;
    std::string name;
  };
  using Kind = std::variant<AbsPower, KullbackLeibler, Custom>;

  static PhiGenerator abs_power(double alpha);
  static PhiGenerator kl();
  /// Validates phi(1) = 0 and convexity on a sampled grid.
  static PhiGenerator custom(std::function<double(double)> phi, double phi_at_zero,
                             double slope_at_infinity, std::string name);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double at_zero() const;
  [[nodiscard]] double slope_at_infinity() const;
  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

 private:
  explicit PhiGenerator(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// sum_x Q(x) phi(P(x)/Q(x)) with 0 phi(0/0) = 0 and P(x) * slope_at_infinity
/// where Q(x) = 0 < P(x).
double phi_divergence(std::span<const double> p, std::span<const double> q, const PhiGenerator& gen);

/// D_phi(P_{T,Y} || P_T P_Y).
double phi_mutual_information(const DiscreteJoint& joint, const PhiGenerator& gen);
/// Shannon mutual information in nats.
double mutual_information(const DiscreteJoint& joint);
/// I_alpha = D_{|t-1|^alpha}(P_{T,Y} || P_T P_Y), alpha >= 1.
double alpha_mutual_information(const DiscreteJoint& joint, double alpha);

/// 1 + sum_x p(x)^2 (|1/p(x) - 1|^alpha - 1); exact when T is a function of Y.
double lemma1_bound(std::span<const double> p_t, double alpha);
/// ((n-1)/n) ((n-1)^{alpha-1} + 1) for 1 <= alpha <= 2.
double lemma1_cardinality_bound(std::size_t n, double alpha);
/// phi(0) (1 - sum p^2) + sum p^2 phi(1/p), the general phi-information cap.
double general_phi_mi_bound(std::span<const double> p_t, const PhiGenerator& gen);

/// Shannon entropy in nats.
double entropy(std::span<const double> p);

/// Validates a probability vector (nonnegative, sums to 1 within 1e-12).
void check_probability_vector(std::span<const double> p, const char* what = "probability vector");
/// Single-column CSV; a non-numeric first line is taken as a header.
std::vector<double> load_probability_vector(const std::filesystem::path& path);

}  // namespace xbias
