// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace xbias {

/// Whether a bound controls |E[phi_T - mu_T]| or only the signed upper tail.
enum class BoundSemantics { absolute, upper };

enum class Verdict { dominates, violated };

const char* to_string(BoundSemantics s);
const char* to_string(Verdict v);

using ReportValue = std::variant<std::string, double, std::int64_t, bool>;
using ReportFields = std::vector<std::pair<std::string, ReportValue>>;

struct BoundEntry {
  std::string name;
  double value;
  BoundSemantics semantics;
};

struct EmpiricalSummary {
  double bias;
  double stderr_of_bias;
};

/// One experiment's empirical bias, dependence measures, every applicable
/// bound, and the derived dominance verdicts and tightness ratios.
class BoundReport {
 public:
  void set_meta(const std::string& key, ReportValue value);
  void set_empirical(double bias, double stderr_of_bias);
  void set_information(double information);
  void set_alpha_information(double alpha, double value);
  /// Extra key/value pairs rendered as an object under "dependence".
  void set_dependence_detail(const std::string& key, ReportValue value);
  /// Extra top-level object, e.g. model-specific quantities.
  void set_section_value(const std::string& section, const std::string& key, ReportValue value);

  /// Throws DomainError on a negative or NaN value.
  void add_bound(std::string name, double value, BoundSemantics semantics);

  [[nodiscard]] const std::vector<BoundEntry>& bounds() const noexcept { return bounds_; }
  [[nodiscard]] const std::optional<EmpiricalSummary>& empirical() const noexcept { return empirical_; }
  [[nodiscard]] std::optional<double> information() const noexcept { return information_; }
  [[nodiscard]] const std::vector<std::pair<double, double>>& alpha_information() const noexcept {
    return alpha_information_;
  }
  [[nodiscard]] const ReportFields& meta() const noexcept { return meta_; }

  /// value >= bias - 3 stderr (|bias| for absolute bounds); empty without empirical data.
  [[nodiscard]] std::optional<Verdict> verdict(const BoundEntry& bound) const;
  /// bound / bias, present only when the bias exceeds three standard errors.
  [[nodiscard]] std::vector<std::pair<std::string, double>> ratios() const;
  [[nodiscard]] bool all_dominate() const;

  /// Stable JSON document; key order is insertion order, numbers round-trip.
  [[nodiscard]] std::string to_json(int indent = 2) const;
  [[nodiscard]] std::string csv_header() const;
  [[nodiscard]] std::string csv_row() const;

 private:
  ReportFields meta_;
  std::optional<EmpiricalSummary> empirical_;
  std::optional<double> information_;
  std::vector<std::pair<double, double>> alpha_information_;
  ReportFields dependence_detail_;
  std::vector<std::pair<std::string, ReportFields>> sections_;
  std::vector<BoundEntry> bounds_;
};

}  // namespace xbias
