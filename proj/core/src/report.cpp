// SPDX-License-Identifier: Apache-2.0
#include "xbias/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "xbias/csv.hpp"
#include "xbias/errors.hpp"

namespace xbias {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDominanceStdErrs = 3.0;

Json to_json_value(const ReportValue& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

Json to_json_object(const ReportFields& fields) {
  Json obj = Json::object();
  for (const auto& [k, v] : fields) obj[k] = to_json_value(v);
  return obj;
}

void upsert(ReportFields& fields, const std::string& key, ReportValue value) {
  for (auto& [k, v] : fields) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  fields.emplace_back(key, std::move(value));
}

std::string csv_cell(const ReportValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return csv::format_double(x, 17);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return std::to_string(x);
        }
      },
      v);
}

}  // namespace

const char* to_string(BoundSemantics s) { return s == BoundSemantics::absolute ? "absolute" : "upper"; }
const char* to_string(Verdict v) { return v == Verdict::dominates ? "DOMINATES" : "VIOLATED"; }

void BoundReport::set_meta(const std::string& key, ReportValue value) { upsert(meta_, key, std::move(value)); }

void BoundReport::set_empirical(double bias, double stderr_of_bias) {
  if (!(stderr_of_bias >= 0.0)) throw DomainError("report: standard error must be nonnegative");
  empirical_ = EmpiricalSummary{bias, stderr_of_bias};
}

void BoundReport::set_information(double information) { information_ = information; }

void BoundReport::set_alpha_information(double alpha, double value) {
  for (auto& [a, v] : alpha_information_) {
    if (a == alpha) {
      v = value;
      return;
    }
  }
  alpha_information_.emplace_back(alpha, value);
}

void BoundReport::set_dependence_detail(const std::string& key, ReportValue value) {
  upsert(dependence_detail_, key, std::move(value));
}

void BoundReport::set_section_value(const std::string& section, const std::string& key, ReportValue value) {
  for (auto& [name, fields] : sections_) {
    if (name == section) {
      upsert(fields, key, std::move(value));
      return;
    }
  }
  sections_.emplace_back(section, ReportFields{{key, std::move(value)}});
}

void BoundReport::add_bound(std::string name, double value, BoundSemantics semantics) {
  if (!(value >= 0.0)) throw DomainError("report: bound '" + name + "' is negative or NaN");
  bounds_.push_back({std::move(name), value, semantics});
}

std::optional<Verdict> BoundReport::verdict(const BoundEntry& bound) const {
  if (!empirical_) return std::nullopt;
  const double bias = bound.semantics == BoundSemantics::absolute ? std::abs(empirical_->bias) : empirical_->bias;
  return bound.value >= bias - kDominanceStdErrs * empirical_->stderr_of_bias ? Verdict::dominates
                                                                              : Verdict::violated;
}

std::vector<std::pair<std::string, double>> BoundReport::ratios() const {
  std::vector<std::pair<std::string, double>> out;
  if (!empirical_ || !(empirical_->bias > kDominanceStdErrs * empirical_->stderr_of_bias)) return out;
  for (const auto& b : bounds_) out.emplace_back(b.name, b.value / empirical_->bias);
  return out;
}

bool BoundReport::all_dominate() const {
  for (const auto& b : bounds_) {
    if (verdict(b) == Verdict::violated) return false;
  }
  return true;
}

std::string BoundReport::to_json(int indent) const {
  Json doc = Json::object();
  doc["meta"] = to_json_object(meta_);
  if (empirical_) {
    doc["empirical"] = {{"bias", empirical_->bias}, {"stderr", empirical_->stderr_of_bias}};
  } else {
    doc["empirical"] = nullptr;
  }
  Json dependence = Json::object();
  dependence["I"] = information_ ? Json(*information_) : Json(nullptr);
  Json alpha = Json::object();
  for (const auto& [a, v] : alpha_information_) alpha[csv::format_double(a)] = v;
  dependence["I_alpha"] = alpha;
  for (const auto& [k, v] : dependence_detail_) dependence[k] = to_json_value(v);
  doc["dependence"] = dependence;

  Json bounds = Json::array();
  for (const auto& b : bounds_) {
    Json entry = {{"name", b.name}, {"value", b.value}, {"semantics", to_string(b.semantics)}};
    if (const auto v = verdict(b)) entry["verdict"] = to_string(*v);
    bounds.push_back(entry);
  }
  doc["bounds"] = bounds;

  Json ratios = Json::array();
  for (const auto& [name, value] : this->ratios()) ratios.push_back({{"name", name}, {"value", value}});
  doc["ratios"] = ratios;

  for (const auto& [name, fields] : sections_) doc[name] = to_json_object(fields);
  return doc.dump(indent);
}

std::string BoundReport::csv_header() const {
  std::ostringstream out;
  bool first = true;
  auto cell = [&](const std::string& s) {
    if (!first) out << ',';
    out << s;
    first = false;
  };
  for (const auto& [k, v] : meta_) cell(k);
  cell("bias");
  cell("stderr");
  cell("I");
  for (const auto& [a, v] : alpha_information_) cell("I_alpha_" + csv::format_double(a));
  for (const auto& b : bounds_) cell(b.name);
  for (const auto& [name, fields] : sections_) {
    for (const auto& [k, v] : fields) cell(name + "." + k);
  }
  return out.str();
}

std::string BoundReport::csv_row() const {
  std::ostringstream out;
  bool first = true;
  auto cell = [&](const std::string& s) {
    if (!first) out << ',';
    out << s;
    first = false;
  };
  for (const auto& [k, v] : meta_) cell(csv_cell(v));
  cell(empirical_ ? csv::format_double(empirical_->bias, 17) : "");
  cell(empirical_ ? csv::format_double(empirical_->stderr_of_bias, 17) : "");
  cell(information_ ? csv::format_double(*information_, 17) : "");
  for (const auto& [a, v] : alpha_information_) cell(csv::format_double(v, 17));
  for (const auto& b : bounds_) cell(csv::format_double(b.value, 17));
  for (const auto& [name, fields] : sections_) {
    for (const auto& [k, v] : fields) cell(csv_cell(v));
  }
  return out.str();
}

}  // namespace xbias
