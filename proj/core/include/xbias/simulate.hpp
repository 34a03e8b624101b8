// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "xbias/cgf.hpp"

namespace xbias {

/// Per-trial random substream keyed by (seed, trial index), so results do not
/// depend on how trials are scheduled across workers.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
};

/// IID measurement vector (phi_1, ..., phi_n) sampled through a strictly
/// increasing quantile function, with known common mean mu.
class MeasurementModel {
 public:
  struct Gaussian {
    double mean;
    double sigma;
  };
  struct Exponential {
    double rate;
  };
  /// Survival x0^beta (ln x0)^c / (x^beta (ln x)^c) for x >= x0 > e^{1/beta}, c > 1.
  struct HeavyTail {
    double beta;
    double c;
    double x0;
  };
  struct Custom {
    std::function<double(double)> quantile;
    double mean;
    std::string name;
  };
  using Kind = std::variant<Gaussian, Exponential, HeavyTail, Custom>;

  static MeasurementModel gaussian(std::size_t n, double mean, double sigma);
  static MeasurementModel exponential(std::size_t n, double rate);
  static MeasurementModel heavy_tail(std::size_t n, double beta, double c, double x0);
  static MeasurementModel custom(std::size_t n, std::function<double(double)> quantile, double mean,
                                 std::string name);

  [[nodiscard]] MeasurementModel with_size(std::size_t n) const;

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string name() const;

  /// Inverse CDF; strictly increasing on (0, 1).
  [[nodiscard]] double quantile(double u) const;
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] std::vector<double> known_means() const { return std::vector<double>(n_, mean_); }

  /// CGF envelope of phi_i - mu_i when one exists in closed form.
  [[nodiscard]] std::optional<CgfEnvelope> cgf_envelope() const;
  /// ||phi_i - mu_i||_beta, +inf when the moment does not exist; empty if unknown.
  [[nodiscard]] std::optional<double> centered_beta_norm(double beta) const;

  /// Scale a_n of the maximum of n draws and the location subtracted before
  /// dividing by it (mu for Gaussian, 0 otherwise).
  [[nodiscard]] double extreme_scale(std::size_t n) const;
  [[nodiscard]] double extreme_location() const;

 private:
  MeasurementModel(std::size_t n, Kind kind, double mean);

  std::size_t n_;
  Kind kind_;
  double mean_;
};

/// One draw of the measurement vector.
std::vector<double> sample(const MeasurementModel& model, TrialStream& rng);

/// Map from a measurement vector to an index T. Ties go to the lowest index.
class SelectionRule {
 public:
  struct ArgMax {};
  struct ArgMin {};
  struct FixedIndex {
    std::size_t index;
  };
  /// P(T = i | phi) proportional to exp(phi_i / temperature).
  struct SoftMax {
    double temperature;
  };
  /// Uniform over the k largest measurements; k = n gives an independent uniform index.
  struct TopKUniform {
    std::size_t k;
  };
  using Kind = std::variant<ArgMax, ArgMin, FixedIndex, SoftMax, TopKUniform>;

  static SelectionRule argmax() { return SelectionRule(ArgMax{}); }
  static SelectionRule argmin() { return SelectionRule(ArgMin{}); }
  static SelectionRule fixed(std::size_t index) { return SelectionRule(FixedIndex{index}); }
  static SelectionRule softmax(double temperature);
  static SelectionRule top_k(std::size_t k);
  /// "argmax", "argmin", "fixed:i", "softmax:tau", "topk:k", "uniform".
  static SelectionRule parse(const std::string& spec, std::size_t n);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string name() const;
  /// T is a deterministic function of the measurements.
  [[nodiscard]] bool deterministic() const noexcept;
  /// Decisions depend only on the ordering of the measurements.
  [[nodiscard]] bool rank_based() const noexcept;
  /// Throws DomainError when the rule is not defined for n measurements.
  void validate(std::size_t n) const;

  [[nodiscard]] std::size_t select(std::span<const double> phi, TrialStream& rng) const;
  /// Conditional law P(T = . | phi).
  [[nodiscard]] std::vector<double> conditional(std::span<const double> phi) const;

 private:
  explicit SelectionRule(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

struct ExperimentOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  /// Equal-mass bins for the probe plug-in joint; 0 selects ceil(trials^{1/3}).
  std::size_t bins = 0;
  std::vector<double> alphas = {1.0, 2.0};
  std::size_t workers = 1;
  /// Coordinate j whose binned value forms the plug-in joint with T.
  std::size_t probe = 0;
  bool estimate_probe = true;
  /// Keep the realized index of every trial in ExperimentResult::selections.
  bool record_selections = false;
};

struct DependenceValues {
  double information = 0.0;
  std::vector<std::pair<double, double>> alpha_information;  // (alpha, I_alpha)
};

struct ExperimentResult {
  double empirical_bias = 0.0;  // mean of phi_T - mu_T
  double stderr_of_bias = 0.0;  // sample std / sqrt(trials)
  double selected_mean = 0.0;   // mean of phi_T
  std::vector<double> p_t;      // law of T
  /// I(T; phi) and I_alpha(T; phi) from the conditional law of T given phi:
  /// exact for rank-based rules, a Monte Carlo average otherwise.
  DependenceValues dependence;
  double information_stderr = 0.0;
  bool dependence_exact = false;
  /// ln n for deterministic rules on continuous IID models.
  std::optional<double> analytic_information;
  /// Plug-in estimate from the empirical joint of T and the binned probe coordinate.
  DependenceValues probe;
  std::size_t probe_coordinate = 0;
  std::size_t bins = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> selections;
};

ExperimentResult run_experiment(const MeasurementModel& model, const SelectionRule& rule,
                                const ExperimentOptions& options);

/// Root of x^beta (ln x)^c = n x0^beta (ln x0)^c, i.e. F^{<-}(1 - 1/n).
double extreme_norming_constant(const MeasurementModel& model, std::size_t n);
/// (E phi^beta)^{1/beta} for the heavy-tail model at its own beta.
double heavy_tail_beta_norm(const MeasurementModel& model);
/// Gamma(1 - 1/beta), the mean of the Frechet law Phi_beta.
double frechet_limit(double beta);

struct SweepRow {
  std::size_t n;
  double empirical_bias;
  double stderr_of_bias;
  double selected_mean;
  double a_n;
  double frechet_ratio;  // (E[phi_T] - location) / a_n
  double bound_pnorm;    // selection-free beta-norm bound; NaN when no finite beta-norm
  double bound_mgf;      // (psi)^{*-1}(ln n); NaN without a CGF envelope
  double ratio;          // bound_pnorm / empirical_bias
};

struct SweepOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  /// Norm index for bound_pnorm; defaults to the model's own beta for the
  /// heavy-tail model and 2 otherwise.
  std::optional<double> beta;
};

std::vector<SweepRow> tightness_sweep(const MeasurementModel& model, std::span<const std::size_t> n_list,
                                      const SweepOptions& options);

inline constexpr const char* kSweepCsvHeader = "n,empirical_bias,stderr,a_n,frechet_ratio,bound_pnorm,bound_mgf,ratio";
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace xbias
