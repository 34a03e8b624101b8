// SPDX-License-Identifier: Apache-2.0
#include "xbias/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "xbias/cgf.hpp"
#include "xbias/csv.hpp"
#include "xbias/errors.hpp"

namespace xbias {

namespace {

constexpr double kMassTolerance = 1e-12;

// |t - 1|^alpha with the removable point t = 1 short-circuited.
double abs_dev_power(double t, double alpha) {
  const double d = std::abs(t - 1.0);
  if (d == 0.0) return 0.0;
  if (alpha == 1.0) return d;
  if (alpha == 2.0) return d * d;
  return std::exp(alpha * std::log(d));
}

void require_alpha(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw DomainError("alpha must be a finite real >= 1");
}

std::string cell_name(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + ", " + std::to_string(c) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteJoint

DiscreteJoint::DiscreteJoint(std::size_t rows, std::size_t cols, std::vector<double> probabilities)
    : rows_(rows), cols_(cols), p_(std::move(probabilities)), row_marginal_(rows, 0.0), col_marginal_(cols, 0.0) {
  if (rows_ == 0 || cols_ == 0) throw DomainError("joint: table must have at least one row and one column");
  if (p_.size() != rows_ * cols_) {
    throw DomainError("joint: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                      std::to_string(p_.size()));
  }
  double total = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      const double v = p_[r * cols_ + c];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError("joint: entry " + cell_name(r, c) + " violates nonnegativity");
      }
      row_marginal_[r] += v;
      col_marginal_[c] += v;
      total += v;
    }
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "joint: total mass " << total << " violates the unit-mass invariant (tolerance 1e-12)";
    throw DomainError(msg.str());
  }
  row_labels_.reserve(rows_);
  col_labels_.reserve(cols_);
  for (std::size_t r = 0; r < rows_; ++r) row_labels_.push_back("t" + std::to_string(r));
  for (std::size_t c = 0; c < cols_; ++c) col_labels_.push_back("y" + std::to_string(c));
}

DiscreteJoint DiscreteJoint::from_counts(std::size_t rows, std::size_t cols, std::span<const double> counts) {
  double total = 0.0;
  for (double v : counts) {
    if (!(v >= 0.0)) throw DomainError("joint: negative count");
    total += v;
  }
  if (!(total > 0.0)) throw DomainError("joint: counts sum to zero");
  std::vector<double> p(counts.begin(), counts.end());
  for (double& v : p) v /= total;
  return {rows, cols, std::move(p)};
}

DiscreteJoint DiscreteJoint::product(std::span<const double> row_marginal, std::span<const double> col_marginal) {
  check_probability_vector(row_marginal, "row marginal");
  check_probability_vector(col_marginal, "column marginal");
  std::vector<double> p;
  p.reserve(row_marginal.size() * col_marginal.size());
  for (double a : row_marginal) {
    for (double b : col_marginal) p.push_back(a * b);
  }
  return {row_marginal.size(), col_marginal.size(), std::move(p)};
}

DiscreteJoint DiscreteJoint::read_csv(std::istream& in, const std::string& source) {
  const auto records = csv::read(in);
  if (records.empty()) throw DomainError(source + ": empty joint table");

  std::size_t first_row = 0;
  std::vector<std::string> col_labels;
  const auto& head = records.front();
  const bool has_header =
      std::any_of(head.fields.begin() + 1, head.fields.end(), [](const std::string& f) { return !csv::looks_numeric(f); }) ||
      (head.fields.size() > 1 && head.fields.front().empty());
  if (has_header) {
    col_labels.assign(head.fields.begin() + 1, head.fields.end());
    first_row = 1;
  }

  std::vector<std::string> row_labels;
  std::vector<double> values;
  std::size_t cols = col_labels.size();
  for (std::size_t r = first_row; r < records.size(); ++r) {
    const auto& rec = records[r];
    const bool labelled = has_header || !csv::looks_numeric(rec.fields.front());
    const std::size_t width = rec.fields.size() - (labelled ? 1 : 0);
    if (cols == 0) cols = width;
    if (width != cols) {
      throw DomainError(source + ":" + std::to_string(rec.line) + ": expected " + std::to_string(cols) +
                        " probabilities, got " + std::to_string(width));
    }
    row_labels.push_back(labelled ? rec.fields.front() : "t" + std::to_string(row_labels.size()));
    for (std::size_t c = labelled ? 1 : 0; c < rec.fields.size(); ++c) {
      values.push_back(csv::to_double(rec.fields[c], rec.line));
    }
  }
  if (row_labels.empty()) throw DomainError(source + ": joint table has no rows");
  DiscreteJoint joint(row_labels.size(), cols, std::move(values));
  if (col_labels.empty()) col_labels = joint.col_labels();
  joint.set_labels(std::move(row_labels), std::move(col_labels));
  return joint;
}

DiscreteJoint DiscreteJoint::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path.string() + "'");
  return read_csv(in, path.string());
}

void DiscreteJoint::write_csv(std::ostream& out) const {
  out << "T";
  for (const auto& label : col_labels_) out << ',' << label;
  out << '\n';
  for (std::size_t r = 0; r < rows_; ++r) {
    out << row_labels_[r];
    for (std::size_t c = 0; c < cols_; ++c) out << ',' << csv::format_double((*this)(r, c));
    out << '\n';
  }
}

void DiscreteJoint::set_labels(std::vector<std::string> row_labels, std::vector<std::string> col_labels) {
  if (row_labels.size() != rows_ || col_labels.size() != cols_) throw DomainError("joint: label count mismatch");
  row_labels_ = std::move(row_labels);
  col_labels_ = std::move(col_labels);
}

std::vector<double> DiscreteJoint::product_of_marginals() const {
  std::vector<double> q(rows_ * cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) q[r * cols_ + c] = row_marginal_[r] * col_marginal_[c];
  }
  return q;
}

bool DiscreteJoint::row_is_function_of_column() const {
  for (std::size_t c = 0; c < cols_; ++c) {
    std::size_t nonzero = 0;
    for (std::size_t r = 0; r < rows_; ++r) nonzero += (*this)(r, c) > 0.0 ? 1 : 0;
    if (nonzero > 1) return false;
  }
  return true;
}

DiscreteJoint DiscreteJoint::merge_columns(std::size_t a, std::size_t b) const {
  if (a >= cols_ || b >= cols_ || a == b) throw DomainError("joint: invalid column merge");
  const std::size_t keep = std::min(a, b);
  const std::size_t drop = std::max(a, b);
  std::vector<double> p;
  p.reserve(rows_ * (cols_ - 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c == drop) continue;
      p.push_back(c == keep ? (*this)(r, keep) + (*this)(r, drop) : (*this)(r, c));
    }
  }
  DiscreteJoint merged(rows_, cols_ - 1, std::move(p));
  auto labels = col_labels_;
  labels[keep] += "+" + labels[drop];
  labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(drop));
  merged.set_labels(row_labels_, std::move(labels));
  return merged;
}

// ---------------------------------------------------------------------------
// PhiGenerator

PhiGenerator PhiGenerator::abs_power(double alpha) {
  require_alpha(alpha);
  return PhiGenerator(AbsPower{alpha});
}

PhiGenerator PhiGenerator::kl() { return PhiGenerator(KullbackLeibler{}); }

PhiGenerator PhiGenerator::custom(std::function<double(double)> phi, double phi_at_zero, double slope_at_infinity,
                                  std::string name) {
  if (!phi) throw DomainError("custom generator: empty evaluator");
  if (std::abs(phi(1.0)) > 1e-12) throw DomainError("custom generator '" + name + "': phi(1) != 0");
  if (!std::isfinite(phi_at_zero)) throw DomainError("custom generator '" + name + "': phi(0) must be finite");
  // Second differences on a grid over [0, 8], with phi(0) taken as declared.
  constexpr int kPoints = 161;
  constexpr double kStep = 8.0 / (kPoints - 1);
  auto at = [&](int k) { return k == 0 ? phi_at_zero : phi(k * kStep); };
  for (int k = 1; k + 1 < kPoints; ++k) {
    const double a = at(k - 1);
    const double b = at(k);
    const double c = at(k + 1);
    const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
    if (a - 2.0 * b + c < -1e-9 * scale) {
      throw DomainError("custom generator '" + name + "': not convex near t = " + std::to_string(k * kStep));
    }
  }
  return PhiGenerator(Custom{std::move(phi), phi_at_zero, slope_at_infinity, std::move(name)});
}

double PhiGenerator::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("generator evaluated at negative ratio");
  if (const auto* ap = std::get_if<AbsPower>(&kind_)) return abs_dev_power(t, ap->alpha);
  if (std::holds_alternative<KullbackLeibler>(kind_)) return t == 0.0 ? 1.0 : t * std::log(t) - t + 1.0;
  const auto& c = std::get<Custom>(kind_);
  return t == 0.0 ? c.phi_at_zero : c.phi(t);
}

double PhiGenerator::at_zero() const {
  if (const auto* c = std::get_if<Custom>(&kind_)) return c->phi_at_zero;
  return 1.0;
}

double PhiGenerator::slope_at_infinity() const {
  if (const auto* ap = std::get_if<AbsPower>(&kind_)) return ap->alpha == 1.0 ? 1.0 : kInf;
  if (std::holds_alternative<KullbackLeibler>(kind_)) return kInf;
  return std::get<Custom>(kind_).slope_at_infinity;
}

// ---------------------------------------------------------------------------
// Divergences

double phi_divergence(std::span<const double> p, std::span<const double> q, const PhiGenerator& gen) {
  if (p.size() != q.size()) {
    throw DomainError("phi divergence: shape mismatch (" + std::to_string(p.size()) + " vs " +
                      std::to_string(q.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0) || !(q[k] >= 0.0)) throw DomainError("phi divergence: negative entry");
    if (q[k] > 0.0) {
      acc += q[k] * gen(p[k] / q[k]);
    } else if (p[k] > 0.0) {
      const double slope = gen.slope_at_infinity();
      if (std::isinf(slope)) return kInf;
      acc += p[k] * slope;
    }
  }
  return std::max(acc, 0.0);
}

double phi_mutual_information(const DiscreteJoint& joint, const PhiGenerator& gen) {
  return phi_divergence(joint.probabilities(), joint.product_of_marginals(), gen);
}

double mutual_information(const DiscreteJoint& joint) {
  const auto pt = joint.row_marginal();
  const auto py = joint.col_marginal();
  double acc = 0.0;
  for (std::size_t r = 0; r < joint.rows(); ++r) {
    for (std::size_t c = 0; c < joint.cols(); ++c) {
      const double v = joint(r, c);
      if (v > 0.0) acc += v * std::log(v / (pt[r] * py[c]));
    }
  }
  return std::max(acc, 0.0);
}

double alpha_mutual_information(const DiscreteJoint& joint, double alpha) {
  require_alpha(alpha);
  return phi_mutual_information(joint, PhiGenerator::abs_power(alpha));
}

double lemma1_bound(std::span<const double> p_t, double alpha) {
  require_alpha(alpha);
  check_probability_vector(p_t, "T marginal");
  double acc = 1.0;
  for (double p : p_t) {
    if (p > 0.0) acc += p * p * (abs_dev_power(1.0 / p, alpha) - 1.0);
  }
  return std::max(acc, 0.0);
}

double lemma1_cardinality_bound(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("alphabet size must be at least 1");
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw DomainError("cardinality form of the I_alpha cap requires 1 <= alpha <= 2");
  const double m = static_cast<double>(n);
  return (m - 1.0) / m * (std::pow(m - 1.0, alpha - 1.0) + 1.0);
}

double general_phi_mi_bound(std::span<const double> p_t, const PhiGenerator& gen) {
  check_probability_vector(p_t, "T marginal");
  double squares = 0.0;
  double acc = 0.0;
  for (double p : p_t) {
    if (p > 0.0) {
      squares += p * p;
      acc += p * p * gen(1.0 / p);
    }
  }
  return gen.at_zero() * (1.0 - squares) + acc;
}

double entropy(std::span<const double> p) {
  double acc = 0.0;
  for (double v : p) {
    if (v > 0.0) acc -= v * std::log(v);
  }
  return acc;
}

void check_probability_vector(std::span<const double> p, const char* what) {
  if (p.empty()) throw DomainError(std::string(what) + ": empty");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + ": negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw DomainError(std::string(what) + ": entries sum to " + csv::format_double(total) + ", not 1");
  }
}

std::vector<double> load_probability_vector(const std::filesystem::path& path) {
  const auto records = csv::read_file(path);
  std::vector<double> p;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (r == 0 && !csv::looks_numeric(rec.fields.front())) continue;
    if (rec.fields.size() != 1) {
      throw DomainError(path.string() + ":" + std::to_string(rec.line) + ": expected a single column");
    }
    p.push_back(csv::to_double(rec.fields.front(), rec.line));
  }
  check_probability_vector(p);
  return p;
}

}  // namespace xbias
