// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xbias/bounds.hpp"
#include "xbias/cgf.hpp"
#include "xbias/csv.hpp"
#include "xbias/divergence.hpp"
#include "xbias/errors.hpp"
#include "xbias/orlicz.hpp"

namespace xbias::cli {

namespace {

constexpr std::size_t kDefaultTrials = 10000;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double spec_real(const std::string& text, const std::string& spec) {
  if (text == "e") return std::exp(1.0);
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("model '" + spec + "': bad number '" + text + "'");
}

std::string label(const char* name, double parameter) {
  return std::string(name) + "[" + csv::format_double(parameter) + "]";
}

std::vector<double> alphas_or_default(const RunConfig& c) {
  return c.alphas.empty() ? std::vector<double>{1.0, 2.0} : c.alphas;
}

double require(const std::optional<double>& v, const char* key, const char* command) {
  if (!v) throw ConfigError(std::string(command) + ": missing required key '" + key + "'");
  return *v;
}

// For beta < 2 there is no selection-free cap on I_alpha, so the bound is only
// as good as the supplied dependence value.
constexpr const char* kNoUniformCap = "data-dependent only";

void stamp(BoundReport& report, const RunConfig& c) {
  report.set_meta("command", c.command);
  report.set_meta("seed", static_cast<std::int64_t>(c.seed));
}

std::optional<DiscreteJoint> load_joint(const RunConfig& c) {
  if (c.joint.empty()) return std::nullopt;
  return DiscreteJoint::load_csv(c.joint);
}

// Law of T from, in order: an explicit file, the joint's row marginal, or uniform over n.
std::vector<double> resolve_p_t(const RunConfig& c, const std::optional<DiscreteJoint>& joint) {
  if (!c.p_t.empty()) return load_probability_vector(c.p_t);
  if (joint) return {joint->row_marginal().begin(), joint->row_marginal().end()};
  if (c.n) {
    if (*c.n == 0) throw ConfigError("n must be at least 1");
    return std::vector<double>(*c.n, 1.0 / static_cast<double>(*c.n));
  }
  throw ConfigError("law of T unknown: give p_t, joint, or n");
}

std::optional<double> resolve_information(const RunConfig& c, const std::optional<DiscreteJoint>& joint) {
  if (c.information) return c.information;
  if (joint) return mutual_information(*joint);
  return std::nullopt;
}

void bound_envelope_family(const RunConfig& c, BoundReport& r, const std::optional<DiscreteJoint>& joint) {
  const auto information = resolve_information(c, joint);
  if (!information) throw ConfigError("bound: family '" + c.family + "' needs information or joint");
  r.set_information(*information);
  const double sigma = c.sigma.value_or(1.0);
  std::optional<CgfEnvelope> envelope;
  if (c.family == "gaussian") {
    r.add_bound("gaussian", gaussian_bound(sigma, *information), BoundSemantics::upper);
    envelope = CgfEnvelope::sub_gaussian(sigma);
  } else if (c.family == "subgamma") {
    const double scale = require(c.scale, "scale", "bound");
    r.add_bound("subgamma", subgamma_bound(sigma * sigma, scale, *information), BoundSemantics::upper);
    envelope = CgfEnvelope::sub_gamma(sigma * sigma, scale);
  } else if (c.family == "subexponential") {
    const double b = require(c.scale, "scale", "bound");
    const auto both = subexponential_bounds(sigma, b, *information);
    r.add_bound("subexponential", both.numeric, BoundSemantics::upper);
    r.add_bound("subexponential_piecewise", both.published, BoundSemantics::upper);
    r.set_section_value("subexponential", "piecewise_minus_numeric", both.published - both.numeric);
    envelope = CgfEnvelope::sub_exponential(sigma, b);
  } else {
    if (c.envelope.empty()) throw ConfigError("bound: family 'cgf' needs an envelope file");
    envelope = CgfEnvelope::load_csv(c.envelope);
    r.add_bound("cgf", inverse_conjugate(*envelope, *information), BoundSemantics::upper);
  }
  if (c.n) {
    const std::vector<CgfEnvelope> all(*c.n, *envelope);
    r.add_bound("max_baseline", hard_max_cgf_bound(all, *c.n), BoundSemantics::upper);
  }
}

void bound_pnorm_family(const RunConfig& c, BoundReport& r, const std::optional<DiscreteJoint>& joint) {
  const double beta = require(c.beta, "beta", "bound");
  const double sigma = require(c.sigma, "sigma", "bound");
  const auto p_t = resolve_p_t(c, joint);
  const BetaNormTail tail{std::vector<double>(p_t.size(), sigma), beta};
  const double alpha = conjugate_exponent(beta);
  if (c.uniform) {
    const auto u = pnorm_uniform_bound(tail, p_t, p_t.size());
    r.add_bound("pnorm_uniform", u.value, BoundSemantics::absolute);
    r.add_bound("pnorm_uniform_loose", u.loose, BoundSemantics::absolute);
  }
  std::optional<double> i_alpha = c.alpha_information;
  if (!i_alpha && joint) i_alpha = alpha_mutual_information(*joint, alpha);
  if (i_alpha) {
    r.set_alpha_information(alpha, *i_alpha);
    r.add_bound("pnorm", pnorm_bound(tail, p_t, *i_alpha), BoundSemantics::absolute);
    if (beta < 2.0) r.set_section_value("pnorm_cap", "pnorm", std::string(kNoUniformCap));
  }
  if (!c.uniform && !i_alpha) throw ConfigError("bound: family 'pnorm' needs uniform, alpha_information, or joint");
  if (const auto information = resolve_information(c, joint)) r.set_information(*information);
  if (c.n) r.add_bound("max_baseline", hard_max_beta_bound(sigma, beta, *c.n), BoundSemantics::upper);
}

void bound_orlicz_family(const RunConfig& c, BoundReport& r, const std::optional<DiscreteJoint>& joint) {
  if (c.psi.empty()) throw ConfigError("bound: family 'orlicz' needs psi");
  const double sigma = require(c.sigma, "sigma", "bound");
  const OrliczFunction psi = OrliczFunction::parse(c.psi);
  r.set_meta("psi", psi.name());
  if (!joint) throw ConfigError("bound: family 'orlicz' needs a joint file");
  r.set_information(mutual_information(*joint));
  r.add_bound("orlicz", theorem4_bound(sigma, *joint, psi), BoundSemantics::absolute);
  if (c.n) r.add_bound("max_baseline", hard_max_orlicz_bound(sigma, psi, *c.n), BoundSemantics::upper);
}

void write_output(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw ConfigError(c.out + ": cannot open output file");
  file << text;
  if (!file) throw ConfigError(c.out + ": write failed");
}

std::string summary(const BoundReport& r) {
  std::string s;
  char buf[160];
  if (const auto& e = r.empirical()) {
    std::snprintf(buf, sizeof buf, "empirical bias %.6g +- %.6g\n", e->bias, e->stderr_of_bias);
    s += buf;
  }
  if (const auto i = r.information()) {
    std::snprintf(buf, sizeof buf, "I = %.6g\n", *i);
    s += buf;
  }
  for (const auto& b : r.bounds()) {
    const auto v = r.verdict(b);
    std::snprintf(buf, sizeof buf, "%s = %.6g%s%s\n", b.name.c_str(), b.value, v ? "  " : "", v ? to_string(*v) : "");
    s += buf;
  }
  return s;
}

}  // namespace

MeasurementModel parse_model(const std::string& spec, std::size_t n) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw ConfigError("empty model spec");
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i, double fallback) {
    return i < parts.size() ? spec_real(parts[i], spec) : fallback;
  };
  if (kind == "gaussian" && parts.size() <= 3) return MeasurementModel::gaussian(n, arg(1, 0.0), arg(2, 1.0));
  if (kind == "exponential" && parts.size() <= 2) return MeasurementModel::exponential(n, arg(1, 1.0));
  if (kind == "heavytail" && parts.size() <= 4) {
    return MeasurementModel::heavy_tail(n, arg(1, 3.0), arg(2, 2.0), arg(3, std::exp(1.0)));
  }
  throw ConfigError("unknown model '" + spec + "' (gaussian[:mu[:sigma]], exponential[:rate], heavytail[:beta[:c[:x0]]])");
}

BoundReport cmd_bound(const RunConfig& c) {
  BoundReport r;
  stamp(r, c);
  if (c.family.empty()) throw ConfigError("bound: missing required key 'family'");
  r.set_meta("family", c.family);
  const auto joint = load_joint(c);
  if (c.family == "gaussian" || c.family == "subgamma" || c.family == "subexponential" || c.family == "cgf") {
    bound_envelope_family(c, r, joint);
  } else if (c.family == "pnorm") {
    bound_pnorm_family(c, r, joint);
  } else if (c.family == "orlicz") {
    bound_orlicz_family(c, r, joint);
  } else {
    throw ConfigError("bound: unknown family '" + c.family + "' (gaussian, subgamma, subexponential, cgf, pnorm, orlicz)");
  }
  return r;
}

BoundReport cmd_simulate(const RunConfig& c) {
  const std::size_t n = c.n.value_or(100);
  const std::string model_spec = c.model.empty() ? "gaussian" : c.model;
  const MeasurementModel model = parse_model(model_spec, n);
  const SelectionRule rule = SelectionRule::parse(c.rule.empty() ? "argmax" : c.rule, n);

  ExperimentOptions opt;
  opt.trials = c.trials.value_or(kDefaultTrials);
  opt.seed = c.seed;
  opt.bins = c.bins.value_or(0);
  opt.alphas = alphas_or_default(c);
  opt.workers = c.workers.value_or(1);
  opt.probe = c.probe.value_or(0);
  const ExperimentResult res = run_experiment(model, rule, opt);

  BoundReport r;
  stamp(r, c);
  r.set_meta("model", model.name());
  r.set_meta("rule", rule.name());
  r.set_meta("n", static_cast<std::int64_t>(n));
  r.set_meta("trials", static_cast<std::int64_t>(res.trials));
  r.set_meta("bins", static_cast<std::int64_t>(res.bins));
  r.set_empirical(res.empirical_bias, res.stderr_of_bias);
  r.set_information(res.dependence.information);
  for (const auto& [a, v] : res.dependence.alpha_information) r.set_alpha_information(a, v);
  r.set_dependence_detail("exact", res.dependence_exact);
  if (!res.dependence_exact) r.set_dependence_detail("I_stderr", res.information_stderr);
  if (res.analytic_information) r.set_dependence_detail("analytic_I", *res.analytic_information);
  r.set_dependence_detail("probe_coordinate", static_cast<std::int64_t>(res.probe_coordinate));
  r.set_dependence_detail("probe_I", res.probe.information);
  for (const auto& [a, v] : res.probe.alpha_information) {
    r.set_dependence_detail("probe_I_alpha_" + csv::format_double(a), v);
  }

  r.set_section_value("experiment", "selected_mean", res.selected_mean);
  r.set_section_value("experiment", "mu", model.mean());

  if (const auto env = model.cgf_envelope()) {
    const std::vector<CgfEnvelope> envs(n, *env);
    r.add_bound("cgf", mgf_bound(envs, res.p_t, res.dependence.information), BoundSemantics::upper);
    if (const auto* g = std::get_if<MeasurementModel::Gaussian>(&model.kind())) {
      r.add_bound("gaussian", gaussian_bound(g->sigma, res.dependence.information), BoundSemantics::upper);
    } else if (const auto* e = std::get_if<MeasurementModel::Exponential>(&model.kind())) {
      r.add_bound("subgamma", subgamma_bound(1.0 / (e->rate * e->rate), 1.0 / e->rate, res.dependence.information),
                  BoundSemantics::upper);
    }
  }
  for (const auto& [a, i_alpha] : res.dependence.alpha_information) {
    if (a <= 1.0) continue;
    const double beta = a / (a - 1.0);
    const auto norm = model.centered_beta_norm(beta);
    if (!norm || !std::isfinite(*norm)) continue;
    const BetaNormTail tail{std::vector<double>(n, *norm), beta};
    r.add_bound(label("pnorm_alpha", a), pnorm_bound(tail, res.p_t, i_alpha), BoundSemantics::absolute);
    if (a > 2.0) r.set_section_value("pnorm_cap", label("pnorm_alpha", a), std::string(kNoUniformCap));
  }
  std::vector<double> uniform_betas = {2.0};
  const auto* heavy = std::get_if<MeasurementModel::HeavyTail>(&model.kind());
  if (heavy != nullptr && heavy->beta > 2.0) uniform_betas.push_back(heavy->beta);
  for (const double beta : uniform_betas) {
    const auto norm = model.centered_beta_norm(beta);
    if (!norm || !std::isfinite(*norm)) continue;
    const BetaNormTail tail{std::vector<double>(n, *norm), beta};
    r.add_bound(label("pnorm_uniform_beta", beta), pnorm_uniform_bound(tail, res.p_t, n).value,
                BoundSemantics::absolute);
  }

  if (heavy != nullptr) {
    const double a_n = extreme_norming_constant(model, n);
    r.set_section_value("heavy_tail", "a_n", a_n);
    r.set_section_value("heavy_tail", "beta_norm", heavy_tail_beta_norm(model));
    r.set_section_value("heavy_tail", "frechet_limit", frechet_limit(heavy->beta));
    r.set_section_value("heavy_tail", "frechet_ratio", res.selected_mean / a_n);
  } else if (n >= 2) {
    const double a_n = model.extreme_scale(n);
    r.set_section_value("experiment", "a_n", a_n);
    r.set_section_value("experiment", "max_ratio", (res.selected_mean - model.extreme_location()) / a_n);
  }
  return r;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& c) {
  if (c.n_list.empty()) throw ConfigError("sweep: missing required key 'n_list'");
  const MeasurementModel model = parse_model(c.model.empty() ? "heavytail" : c.model, 2);
  SweepOptions opt;
  opt.trials = c.trials.value_or(kDefaultTrials);
  opt.seed = c.seed;
  opt.workers = c.workers.value_or(1);
  opt.beta = c.beta;
  return tightness_sweep(model, c.n_list, opt);
}

BoundReport cmd_estimate(const RunConfig& c) {
  const auto joint = load_joint(c);
  if (!joint) throw ConfigError("estimate: missing required key 'joint'");
  BoundReport r;
  stamp(r, c);
  r.set_meta("rows", static_cast<std::int64_t>(joint->rows()));
  r.set_meta("cols", static_cast<std::int64_t>(joint->cols()));
  const double information = mutual_information(*joint);
  r.set_information(information);
  const bool deterministic = joint->row_is_function_of_column();
  r.set_dependence_detail("deterministic", deterministic);
  const auto p_t = joint->row_marginal();
  for (const double a : alphas_or_default(c)) {
    const double i_alpha = alpha_mutual_information(*joint, a);
    const double cap = lemma1_bound(p_t, a);
    r.set_alpha_information(a, i_alpha);
    const std::string suffix = "_alpha_" + csv::format_double(a);
    r.set_section_value("lemma1", "bound" + suffix, cap);
    r.set_section_value("lemma1", "equal" + suffix, std::abs(i_alpha - cap) <= 1e-12 * std::max(1.0, cap));
    if (a <= 2.0) r.set_section_value("lemma1", "cardinality" + suffix, lemma1_cardinality_bound(joint->rows(), a));
  }
  r.set_section_value("kl", "entropy_T", entropy(p_t));
  r.set_section_value("kl", "general_phi_bound", general_phi_mi_bound(p_t, PhiGenerator::kl()));
  return r;
}

BoundReport cmd_norms(const RunConfig& c) {
  if (c.values.empty()) throw ConfigError("norms: missing required key 'values'");
  const OrliczFunction psi = OrliczFunction::parse(c.psi.empty() ? "power:2" : c.psi);
  const auto records = csv::read_file(c.values);
  std::vector<double> values;
  std::vector<double> probs;
  bool weighted = false;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& rec = records[k];
    if (k == 0 && !rec.fields.empty() && !csv::looks_numeric(rec.fields[0])) continue;
    if (rec.fields.empty() || rec.fields.size() > 2) {
      throw DomainError(c.values + ":" + std::to_string(rec.line) + ": expected 'value' or 'value,probability'");
    }
    values.push_back(csv::to_double(rec.fields[0], rec.line));
    if (rec.fields.size() == 2) {
      weighted = true;
      probs.push_back(csv::to_double(rec.fields[1], rec.line));
    } else {
      probs.push_back(-1.0);
    }
  }
  if (values.empty()) throw DomainError(c.values + ": no values");
  if (weighted) {
    for (const double p : probs) {
      if (p < 0.0) throw DomainError(c.values + ": mix of weighted and unweighted rows");
    }
  } else {
    probs.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  }
  const OrliczFunction dual = psi.conjugate_function();
  BoundReport r;
  stamp(r, c);
  r.set_meta("psi", psi.name());
  r.set_meta("count", static_cast<std::int64_t>(values.size()));
  const double lux = luxemburg_norm(values, probs, psi);
  const double ame = amemiya_norm(values, probs, psi);
  r.set_section_value("norms", "luxemburg", lux);
  r.set_section_value("norms", "amemiya", ame);
  r.set_section_value("norms", "conjugate_luxemburg", luxemburg_norm(values, probs, dual));
  r.set_section_value("norms", "conjugate_amemiya", amemiya_norm(values, probs, dual));
  r.set_section_value("norms", "equivalence_holds", lux <= ame * (1.0 + 1e-9) && ame <= 2.0 * lux * (1.0 + 1e-9));
  return r;
}

namespace {

struct Rendered {
  std::string text;
  std::string summary;  // 6 significant digits for terminal display
};

Rendered render_both(const RunConfig& c) {
  const std::string format = c.format.empty() ? (c.command == "sweep" ? "csv" : "json") : c.format;
  if (format != "json" && format != "csv") throw ConfigError("format must be json or csv, got '" + format + "'");
  if (c.command == "sweep") {
    const auto rows = cmd_sweep(c);
    std::string brief;
    char buf[160];
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof buf, "n=%zu bias %.6g +- %.6g frechet_ratio %.6g ratio %.6g\n", row.n,
                    row.empirical_bias, row.stderr_of_bias, row.frechet_ratio, row.ratio);
      brief += buf;
    }
    if (format == "csv") return {sweep_csv(rows), brief};
    nlohmann::ordered_json doc;
    doc["meta"] = {{"command", "sweep"},
                   {"model", parse_model(c.model.empty() ? "heavytail" : c.model, 2).name()},
                   {"trials", c.trials.value_or(kDefaultTrials)},
                   {"seed", c.seed}};
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      auto num = [](double v) { return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v); };
      arr.push_back({{"n", row.n},
                     {"empirical_bias", num(row.empirical_bias)},
                     {"stderr", num(row.stderr_of_bias)},
                     {"selected_mean", num(row.selected_mean)},
                     {"a_n", num(row.a_n)},
                     {"frechet_ratio", num(row.frechet_ratio)},
                     {"bound_pnorm", num(row.bound_pnorm)},
                     {"bound_mgf", num(row.bound_mgf)},
                     {"ratio", num(row.ratio)}});
    }
    doc["rows"] = arr;
    return {doc.dump(2) + "\n", brief};
  }
  BoundReport report;
  if (c.command == "bound") {
    report = cmd_bound(c);
  } else if (c.command == "simulate") {
    report = cmd_simulate(c);
  } else if (c.command == "estimate") {
    report = cmd_estimate(c);
  } else if (c.command == "norms") {
    report = cmd_norms(c);
  } else {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  if (format == "csv") return {report.csv_header() + "\n" + report.csv_row() + "\n", summary(report)};
  return {report.to_json(2) + "\n", summary(report)};
}

}  // namespace

std::string render(const RunConfig& c) { return render_both(c).text; }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information-theoretic bounds on exploration bias", "xbias"};
  app.require_subcommand(1);
  app.fallthrough();

  // Every flag is captured as text and applied through the config parser so
  // file values and flags share one validation path.
  struct Flag {
    std::string key;
    CLI::Option* option;
    std::string value;
  };
  std::vector<std::unique_ptr<Flag>> flags;
  auto add = [&](CLI::App* target, const std::string& names, const std::string& key, const std::string& help) {
    auto f = std::make_unique<Flag>();
    f->key = key;
    f->option = target->add_option(names, f->value, help);
    flags.push_back(std::move(f));
  };

  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value config file");
  add(&app, "--seed", "seed", "Random seed (default 1)");
  add(&app, "--out", "out", "Write the report here instead of stdout");
  add(&app, "--format", "format", "json or csv");
  add(&app, "--workers", "workers", "Worker threads for Monte Carlo trials");

  bool uniform = false;
  std::string joint_positional;
  auto* bound = app.add_subcommand("bound", "Evaluate bias bounds from tail and dependence inputs");
  add(bound, "--family", "family", "gaussian, subgamma, subexponential, cgf, pnorm, orlicz");
  add(bound, "--sigma", "sigma", "Scale parameter sigma");
  add(bound, "--scale,--c,--b", "scale", "c for sub-gamma, b for sub-exponential");
  add(bound, "--I", "information", "Mutual information I(T; phi) in nats");
  add(bound, "--I-alpha", "alpha_information", "I_alpha(T; phi) with alpha conjugate to beta");
  add(bound, "--beta", "beta", "Norm index beta > 1");
  add(bound, "--psi", "psi", "Orlicz function: power:p[:a], exp, or CSV path");
  add(bound, "--envelope", "envelope", "Tabulated CGF envelope CSV");
  add(bound, "--n", "n", "Number of measurements");
  add(bound, "--p-t", "p_t", "CSV with the law of T");
  add(bound, "--joint", "joint", "DiscreteJoint CSV");
  bound->add_flag("--uniform", uniform, "Selection-free beta-norm bound");

  auto* simulate = app.add_subcommand("simulate", "Run a seeded experiment and check every applicable bound");
  add(simulate, "--model", "model", "gaussian[:mu[:sigma]], exponential[:rate], heavytail[:beta[:c[:x0]]]");
  add(simulate, "--rule", "rule", "argmax, argmin, fixed:i, softmax:tau, topk:k, uniform");
  add(simulate, "--n", "n", "Number of measurements (default 100)");
  add(simulate, "--trials", "trials", "Monte Carlo trials (default 10000)");
  add(simulate, "--bins", "bins", "Equal-mass bins for the probe estimate");
  add(simulate, "--alpha", "alphas", "Comma-separated alpha values (default 1,2)");
  add(simulate, "--probe", "probe", "Probe coordinate for the plug-in estimate");

  auto* sweep = app.add_subcommand("sweep", "Extreme-value tightness sweep under argmax");
  add(sweep, "--model", "model", "Model (default heavytail)");
  add(sweep, "--n-list", "n_list", "Comma-separated list of n");
  add(sweep, "--trials", "trials", "Monte Carlo trials per n (default 10000)");
  add(sweep, "--beta", "beta", "Norm index for bound_pnorm");

  auto* estimate = app.add_subcommand("estimate", "Dependence measures of a joint table");
  add(estimate, "--joint", "joint", "DiscreteJoint CSV");
  add(estimate, "--alpha", "alphas", "Comma-separated alpha values (default 1,2)");
  estimate->add_option("joint_file", joint_positional, "DiscreteJoint CSV");

  auto* norms = app.add_subcommand("norms", "Luxemburg and Amemiya norms of a sample");
  add(norms, "--values", "values", "CSV of value or value,probability rows");
  add(norms, "--psi", "psi", "Orlicz function (default power:2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    for (const auto& f : flags) {
      if (f->option->count() > 0) assign(config, f->key, f->value, f->option->get_name() + ": ");
    }
    if (uniform) config.uniform = true;
    if (!joint_positional.empty()) config.joint = joint_positional;
    config.command = app.get_subcommands().front()->get_name();

    const Rendered result = render_both(config);
    write_output(config, result.text, out);
    if (!config.out.empty()) out << result.summary << "wrote " << config.out << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const DivergenceError& e) {
    err << "numeric divergence: " << e.what() << "\n";
    return kNumericDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace xbias::cli
