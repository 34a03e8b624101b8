// SPDX-License-Identifier: Apache-2.0
#include "xbias/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "golden.hpp"
#include "xbias/bounds.hpp"
#include "xbias/csv.hpp"
#include "xbias/divergence.hpp"
#include "xbias/errors.hpp"

namespace xbias {

namespace {

constexpr double kQuadratureTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double half_line_integral(const std::function<double(double)>& f, double a) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double y) { return f(y + a); }, 0.0, std::numeric_limits<double>::infinity(),
                              kQuadratureTol);
}

double interval_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, kQuadratureTol);
}

// ln K for K = x0^beta (ln x0)^c.
double heavy_log_k(const MeasurementModel::HeavyTail& h) {
  return h.beta * std::log(h.x0) + h.c * std::log(std::log(h.x0));
}

// Root y >= ln x0 of beta y + c ln y = target. The left side is concave and
// increasing, so Newton from the left endpoint converges monotonically.
double heavy_log_root(const MeasurementModel::HeavyTail& h, double target) {
  double y = std::log(h.x0);
  for (int it = 0; it < 200; ++it) {
    const double g = h.beta * y + h.c * std::log(y) - target;
    if (g >= 0.0) break;
    const double step = -g / (h.beta + h.c / y);
    y += step;
    if (step <= 4e-16 * y) break;
  }
  return y;
}

double heavy_survival(const MeasurementModel::HeavyTail& h, double x) {
  if (x <= h.x0) return 1.0;
  return std::exp(heavy_log_k(h) - h.beta * std::log(x) - h.c * std::log(std::log(x)));
}

double heavy_mean(const MeasurementModel::HeavyTail& h) {
  const double log_k = heavy_log_k(h);
  const double tail = half_line_integral(
      [&](double y) { return std::exp(log_k + (1.0 - h.beta) * y - h.c * std::log(y)); }, std::log(h.x0));
  return h.x0 + tail;
}

double gaussian_abs_moment_factor(double beta) {
  // E|Z|^beta for Z ~ N(0, 1).
  return std::pow(2.0, beta / 2.0) * boost::math::tgamma((beta + 1.0) / 2.0) /
         boost::math::constants::root_pi<double>();
}

double heavy_centered_norm(const MeasurementModel::HeavyTail& h, double mean, double p) {
  if (std::isinf(p) || p > h.beta) return kInf;
  const double log_k = heavy_log_k(h);
  const double lower = interval_integral(
      [&](double x) { return p * std::pow(mean - x, p - 1.0) * (1.0 - heavy_survival(h, x)); }, h.x0, mean);
  const double ly = std::log(mean);
  double upper;
  if (p < h.beta) {
    upper = half_line_integral(
        [&](double y) {
          return p * std::pow(1.0 - mean * std::exp(-y), p - 1.0) *
                 std::exp(log_k + (p - h.beta) * y - h.c * std::log(y));
        },
        ly);
  } else {
    const double leading = p * std::exp(log_k) * std::pow(ly, 1.0 - h.c) / (h.c - 1.0);
    const double correction = half_line_integral(
        [&](double y) {
          return p * std::exp(log_k - h.c * std::log(y)) * -std::expm1((p - 1.0) * std::log1p(-mean * std::exp(-y)));
        },
        ly);
    upper = leading - correction;
  }
  return std::pow(lower + upper, 1.0 / p);
}

double log_n(std::size_t n) { return std::log(static_cast<double>(n)); }

}  // namespace

// ---------------------------------------------------------------------------
// TrialStream

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  engine_.seed(seq);
}

double TrialStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// MeasurementModel

MeasurementModel::MeasurementModel(std::size_t n, Kind kind, double mean)
    : n_(n), kind_(std::move(kind)), mean_(mean) {
  if (n_ == 0) throw DomainError("measurement model needs n >= 1");
}

MeasurementModel MeasurementModel::gaussian(std::size_t n, double mean, double sigma) {
  if (!std::isfinite(mean)) throw DomainError("gaussian model: mean must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian model: sigma must be positive");
  return {n, Gaussian{mean, sigma}, mean};
}

MeasurementModel MeasurementModel::exponential(std::size_t n, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential model: rate must be positive");
  return {n, Exponential{rate}, 1.0 / rate};
}

MeasurementModel MeasurementModel::heavy_tail(std::size_t n, double beta, double c, double x0) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("heavy-tail model: beta must be a finite value > 1");
  if (!(c > 1.0) || !std::isfinite(c)) throw DomainError("heavy-tail model: c must exceed 1");
  if (!(x0 > std::exp(1.0 / beta)) || !std::isfinite(x0)) {
    throw DomainError("heavy-tail model: x0 must exceed e^{1/beta}");
  }
  const HeavyTail h{beta, c, x0};
  return {n, h, heavy_mean(h)};
}

MeasurementModel MeasurementModel::custom(std::size_t n, std::function<double(double)> quantile, double mean,
                                          std::string name) {
  if (!quantile) throw DomainError("custom model: quantile function is empty");
  if (!std::isfinite(mean)) throw DomainError("custom model: mean must be finite");
  return {n, Custom{std::move(quantile), mean, std::move(name)}, mean};
}

MeasurementModel MeasurementModel::with_size(std::size_t n) const {
  MeasurementModel m = *this;
  if (n == 0) throw DomainError("measurement model needs n >= 1");
  m.n_ = n;
  return m;
}

std::string MeasurementModel::name() const {
  const auto fmt = [](double v) { return csv::format_double(v); };
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return "gaussian:" + fmt(g.mean) + ":" + fmt(g.sigma); },
                        [&](const Exponential& e) { return "exponential:" + fmt(e.rate); },
                        [&](const HeavyTail& h) {
                          return "heavytail:" + fmt(h.beta) + ":" + fmt(h.c) + ":" + fmt(h.x0);
                        },
                        [&](const Custom& c) { return c.name.empty() ? std::string("custom") : c.name; },
                    },
                    kind_);
}

double MeasurementModel::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile needs u in (0, 1)");
  return std::visit(Overloaded{
                        [&](const Gaussian& g) {
                          return g.mean - g.sigma * boost::math::constants::root_two<double>() *
                                              boost::math::erfc_inv(2.0 * u);
                        },
                        [&](const Exponential& e) { return -std::log1p(-u) / e.rate; },
                        [&](const HeavyTail& h) {
                          return std::exp(heavy_log_root(h, heavy_log_k(h) - std::log1p(-u)));
                        },
                        [&](const Custom& c) { return c.quantile(u); },
                    },
                    kind_);
}

std::optional<CgfEnvelope> MeasurementModel::cgf_envelope() const {
  if (const auto* g = std::get_if<Gaussian>(&kind_)) return CgfEnvelope::sub_gaussian(g->sigma);
  if (const auto* e = std::get_if<Exponential>(&kind_)) {
    return CgfEnvelope::sub_gamma(1.0 / (e->rate * e->rate), 1.0 / e->rate);
  }
  return std::nullopt;
}

std::optional<double> MeasurementModel::centered_beta_norm(double beta) const {
  if (!(beta >= 1.0)) throw DomainError("beta-norm needs beta >= 1");
  return std::visit(Overloaded{
                        [&](const Gaussian& g) -> std::optional<double> {
                          if (std::isinf(beta)) return kInf;
                          return g.sigma * std::pow(gaussian_abs_moment_factor(beta), 1.0 / beta);
                        },
                        [&](const Exponential& e) -> std::optional<double> {
                          if (std::isinf(beta)) return kInf;
                          // E|E - 1|^beta for a unit exponential E.
                          const double below = interval_integral(
                              [&](double x) { return std::pow(1.0 - x, beta) * std::exp(-x); }, 0.0, 1.0);
                          const double above = std::exp(-1.0) * boost::math::tgamma(beta + 1.0);
                          return std::pow(below + above, 1.0 / beta) / e.rate;
                        },
                        [&](const HeavyTail& h) -> std::optional<double> {
                          return heavy_centered_norm(h, mean_, beta);
                        },
                        [&](const Custom&) -> std::optional<double> { return std::nullopt; },
                    },
                    kind_);
}

double MeasurementModel::extreme_scale(std::size_t n) const {
  if (n == 0) throw DomainError("extreme scale needs n >= 1");
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return g.sigma * std::sqrt(2.0 * log_n(n)); },
                        [&](const Exponential& e) { return log_n(n) / e.rate; },
                        [&](const HeavyTail&) { return extreme_norming_constant(*this, n); },
                        [&](const Custom& c) {
                          if (n == 1) throw DomainError("custom model: extreme scale needs n >= 2");
                          return c.quantile(1.0 - 1.0 / static_cast<double>(n));
                        },
                    },
                    kind_);
}

double MeasurementModel::extreme_location() const {
  if (const auto* g = std::get_if<Gaussian>(&kind_)) return g->mean;
  return 0.0;
}

std::vector<double> sample(const MeasurementModel& model, TrialStream& rng) {
  std::vector<double> phi(model.size());
  for (double& v : phi) v = model.quantile(rng.uniform());
  return phi;
}

// ---------------------------------------------------------------------------
// SelectionRule

SelectionRule SelectionRule::softmax(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DomainError("softmax rule: temperature must be positive");
  }
  return SelectionRule(SoftMax{temperature});
}

SelectionRule SelectionRule::top_k(std::size_t k) {
  if (k == 0) throw DomainError("top-k rule: k must be at least 1");
  return SelectionRule(TopKUniform{k});
}

SelectionRule SelectionRule::parse(const std::string& spec, std::size_t n) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need_arg = [&]() {
    if (arg.empty()) throw DomainError("selection rule '" + spec + "' needs an argument");
  };
  auto parse_count = [&]() -> std::size_t {
    need_arg();
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != arg.size() || arg.front() == '-') throw DomainError("selection rule '" + spec + "': bad integer");
    return static_cast<std::size_t>(v);
  };
  SelectionRule rule = argmax();
  if (head == "argmax" && arg.empty()) {
    rule = argmax();
  } else if (head == "argmin" && arg.empty()) {
    rule = argmin();
  } else if (head == "uniform" && arg.empty()) {
    rule = top_k(n);
  } else if (head == "fixed") {
    rule = fixed(parse_count());
  } else if (head == "topk") {
    rule = top_k(parse_count());
  } else if (head == "softmax") {
    need_arg();
    std::size_t pos = 0;
    double t = 0.0;
    try {
      t = std::stod(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != arg.size()) throw DomainError("selection rule '" + spec + "': bad temperature");
    rule = softmax(t);
  } else {
    throw DomainError("unknown selection rule '" + spec + "' (argmax, argmin, fixed:i, softmax:tau, topk:k, uniform)");
  }
  rule.validate(n);
  return rule;
}

std::string SelectionRule::name() const {
  return std::visit(Overloaded{
                        [](const ArgMax&) { return std::string("argmax"); },
                        [](const ArgMin&) { return std::string("argmin"); },
                        [](const FixedIndex& f) { return "fixed:" + std::to_string(f.index); },
                        [](const SoftMax& s) {
                          char buf[40];
                          std::snprintf(buf, sizeof buf, "softmax:%.17g", s.temperature);
                          return std::string(buf);
                        },
                        [](const TopKUniform& t) { return "topk:" + std::to_string(t.k); },
                    },
                    kind_);
}

bool SelectionRule::deterministic() const noexcept {
  return std::holds_alternative<ArgMax>(kind_) || std::holds_alternative<ArgMin>(kind_) ||
         std::holds_alternative<FixedIndex>(kind_);
}

bool SelectionRule::rank_based() const noexcept { return !std::holds_alternative<SoftMax>(kind_); }

void SelectionRule::validate(std::size_t n) const {
  if (n == 0) throw DomainError("selection rule needs n >= 1");
  if (const auto* f = std::get_if<FixedIndex>(&kind_); f && f->index >= n) {
    throw DomainError("fixed rule: index " + std::to_string(f->index) + " out of range for n = " + std::to_string(n));
  }
  if (const auto* t = std::get_if<TopKUniform>(&kind_); t && t->k > n) {
    throw DomainError("top-k rule: k = " + std::to_string(t->k) + " exceeds n = " + std::to_string(n));
  }
}

namespace {

// Index of the k-th draw among the top k values (k >= 1), chosen by v in (0, 1).
// The candidate set is ordered by index so the choice is canonical.
std::size_t pick_top_k(std::span<const double> x, std::size_t k, double v, std::vector<std::size_t>& scratch) {
  const std::size_t n = x.size();
  if (k == n) return std::min(n - 1, static_cast<std::size_t>(v * static_cast<double>(n)));
  scratch.resize(n);
  std::iota(scratch.begin(), scratch.end(), std::size_t{0});
  auto higher = [&](std::size_t a, std::size_t b) { return x[a] > x[b] || (x[a] == x[b] && a < b); };
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end(), higher);
  std::sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
  return scratch[std::min(k - 1, static_cast<std::size_t>(v * static_cast<double>(k)))];
}

std::size_t arg_extreme(std::span<const double> x, bool maximum) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (maximum ? x[i] > x[best] : x[i] < x[best]) best = i;
  }
  return best;
}

// Normalized exp(phi / tau) into w; returns nothing on an empty input.
void softmax_weights(std::span<const double> phi, double temperature, std::vector<double>& w) {
  w.resize(phi.size());
  const double top = *std::max_element(phi.begin(), phi.end());
  for (std::size_t i = 0; i < phi.size(); ++i) w[i] = std::exp((phi[i] - top) / temperature);
  const double total = detail::pairwise_sum(w.begin(), w.end());
  for (double& v : w) v /= total;
}

std::size_t draw_from(std::span<const double> w, double v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (v < acc) return i;
  }
  // Rounding left v above the accumulated mass; fall back to the last positive weight.
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

}  // namespace

std::size_t SelectionRule::select(std::span<const double> phi, TrialStream& rng) const {
  validate(phi.size());
  std::vector<std::size_t> scratch;
  std::vector<double> w;
  return std::visit(Overloaded{
                        [&](const ArgMax&) { return arg_extreme(phi, true); },
                        [&](const ArgMin&) { return arg_extreme(phi, false); },
                        [&](const FixedIndex& f) { return f.index; },
                        [&](const SoftMax& s) {
                          softmax_weights(phi, s.temperature, w);
                          return draw_from(w, rng.uniform());
                        },
                        [&](const TopKUniform& t) { return pick_top_k(phi, t.k, rng.uniform(), scratch); },
                    },
                    kind_);
}

std::vector<double> SelectionRule::conditional(std::span<const double> phi) const {
  validate(phi.size());
  const std::size_t n = phi.size();
  std::vector<double> out(n, 0.0);
  std::visit(Overloaded{
                 [&](const ArgMax&) { out[arg_extreme(phi, true)] = 1.0; },
                 [&](const ArgMin&) { out[arg_extreme(phi, false)] = 1.0; },
                 [&](const FixedIndex& f) { out[f.index] = 1.0; },
                 [&](const SoftMax& s) { softmax_weights(phi, s.temperature, out); },
                 [&](const TopKUniform& t) {
                   std::vector<std::size_t> idx(n);
                   std::iota(idx.begin(), idx.end(), std::size_t{0});
                   auto higher = [&](std::size_t a, std::size_t b) {
                     return phi[a] > phi[b] || (phi[a] == phi[b] && a < b);
                   };
                   std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t.k - 1), idx.end(), higher);
                   for (std::size_t j = 0; j < t.k; ++j) out[idx[j]] = 1.0 / static_cast<double>(t.k);
                 },
             },
             kind_);
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct TrialBuffers {
  std::vector<double> deviation;           // phi_T - mu
  std::vector<double> value;               // phi_T
  std::vector<std::size_t> selected;       // T
  std::vector<std::uint32_t> probe_bin;    // bin of the probe coordinate
  std::vector<double> kl;                  // sum_i w_i ln(n w_i), SoftMax only
  std::vector<std::vector<double>> alpha;  // sum_i (1/n) |n w_i - 1|^alpha, SoftMax only
};

struct TrialContext {
  const MeasurementModel& model;
  const SelectionRule& rule;
  const ExperimentOptions& options;
  std::size_t bins;
  bool softmax;
};

void run_trials(const TrialContext& ctx, TrialBuffers& out, std::size_t begin, std::size_t end) {
  const std::size_t n = ctx.model.size();
  const double mu = ctx.model.mean();
  const double n_real = static_cast<double>(n);
  std::vector<double> u(n);
  std::vector<double> phi;
  std::vector<double> w;
  std::vector<std::size_t> scratch;
  std::vector<double> terms(n);
  for (std::size_t trial = begin; trial < end; ++trial) {
    TrialStream rng(ctx.options.seed, trial);
    for (double& x : u) x = rng.uniform();
    std::size_t t = 0;
    double value = 0.0;
    if (ctx.softmax) {
      const double tau = std::get<SelectionRule::SoftMax>(ctx.rule.kind()).temperature;
      phi.resize(n);
      for (std::size_t i = 0; i < n; ++i) phi[i] = ctx.model.quantile(u[i]);
      softmax_weights(phi, tau, w);
      t = draw_from(w, rng.uniform());
      value = phi[t];
      for (std::size_t i = 0; i < n; ++i) terms[i] = w[i] > 0.0 ? w[i] * std::log(n_real * w[i]) : 0.0;
      out.kl[trial] = detail::pairwise_sum(terms.begin(), terms.end());
      for (std::size_t a = 0; a < ctx.options.alphas.size(); ++a) {
        const double alpha = ctx.options.alphas[a];
        for (std::size_t i = 0; i < n; ++i) terms[i] = std::pow(std::abs(n_real * w[i] - 1.0), alpha) / n_real;
        out.alpha[a][trial] = detail::pairwise_sum(terms.begin(), terms.end());
      }
    } else {
      // Rank-based rules see only the ordering, which the quantile map preserves,
      // so they act on the latent uniforms and invert only the selected coordinate.
      t = std::visit(Overloaded{
                         [&](const SelectionRule::ArgMax&) { return arg_extreme(u, true); },
                         [&](const SelectionRule::ArgMin&) { return arg_extreme(u, false); },
                         [&](const SelectionRule::FixedIndex& f) { return f.index; },
                         [&](const SelectionRule::SoftMax&) { return std::size_t{0}; },
                         [&](const SelectionRule::TopKUniform& k) {
                           return pick_top_k(u, k.k, rng.uniform(), scratch);
                         },
                     },
                     ctx.rule.kind());
      value = ctx.model.quantile(u[t]);
    }
    out.value[trial] = value;
    out.deviation[trial] = value - mu;
    out.selected[trial] = t;
    if (ctx.bins > 0) {
      const auto b = static_cast<std::size_t>(u[ctx.options.probe] * static_cast<double>(ctx.bins));
      out.probe_bin[trial] = static_cast<std::uint32_t>(std::min(b, ctx.bins - 1));
    }
  }
}

double mean_of(const std::vector<double>& v) {
  return detail::pairwise_sum(v.begin(), v.end()) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = detail::pairwise_sum(sq.begin(), sq.end()) / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

ExperimentResult run_experiment(const MeasurementModel& model, const SelectionRule& rule,
                                const ExperimentOptions& options) {
  if (options.trials == 0) throw DomainError("experiment needs trials >= 1");
  rule.validate(model.size());
  for (double a : options.alphas) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw DomainError("alpha values must be finite and >= 1");
  }
  const std::size_t n = model.size();
  std::size_t bins = 0;
  if (options.estimate_probe) {
    if (options.probe >= n) {
      throw DomainError("probe coordinate " + std::to_string(options.probe) + " out of range for n = " +
                        std::to_string(n));
    }
    bins = options.bins == 0
               ? static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(options.trials)) - 1e-9))
               : options.bins;
    if (bins < 2) throw DomainError("dependence estimation needs at least 2 bins");
  }

  const bool softmax = std::holds_alternative<SelectionRule::SoftMax>(rule.kind());
  const std::size_t trials = options.trials;
  TrialBuffers buf;
  buf.deviation.resize(trials);
  buf.value.resize(trials);
  buf.selected.resize(trials);
  if (bins > 0) buf.probe_bin.resize(trials);
  if (softmax) {
    buf.kl.resize(trials);
    buf.alpha.assign(options.alphas.size(), std::vector<double>(trials));
  }

  const TrialContext ctx{model, rule, options, bins, softmax};
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, trials));
  if (workers == 1) {
    run_trials(ctx, buf, 0, trials);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(trials, w * chunk);
      const std::size_t end = std::min(trials, begin + chunk);
      threads.emplace_back([&, w, begin, end]() {
        try {
          run_trials(ctx, buf, begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ExperimentResult r;
  r.n = n;
  r.trials = trials;
  r.seed = options.seed;
  r.bins = bins;
  r.probe_coordinate = options.probe;
  r.empirical_bias = mean_of(buf.deviation);
  r.stderr_of_bias = stderr_of(buf.deviation, r.empirical_bias);
  r.selected_mean = mean_of(buf.value);

  const double nd = static_cast<double>(n);
  if (const auto* f = std::get_if<SelectionRule::FixedIndex>(&rule.kind())) {
    r.p_t.assign(n, 0.0);
    r.p_t[f->index] = 1.0;
  } else {
    r.p_t.assign(n, 1.0 / nd);  // IID models and symmetric rules
  }

  r.dependence_exact = !softmax;
  std::visit(Overloaded{
                 [&](const SelectionRule::ArgMax&) {
                   r.dependence.information = std::log(nd);
                   for (double a : options.alphas) r.dependence.alpha_information.emplace_back(a, lemma1_bound(r.p_t, a));
                 },
                 [&](const SelectionRule::ArgMin&) {
                   r.dependence.information = std::log(nd);
                   for (double a : options.alphas) r.dependence.alpha_information.emplace_back(a, lemma1_bound(r.p_t, a));
                 },
                 [&](const SelectionRule::FixedIndex&) {
                   r.dependence.information = 0.0;
                   for (double a : options.alphas) r.dependence.alpha_information.emplace_back(a, 0.0);
                 },
                 [&](const SelectionRule::TopKUniform& t) {
                   const double q = static_cast<double>(t.k) / nd;
                   r.dependence.information = -std::log(q);
                   for (double a : options.alphas) {
                     r.dependence.alpha_information.emplace_back(a, q * std::pow(1.0 / q - 1.0, a) + 1.0 - q);
                   }
                 },
                 [&](const SelectionRule::SoftMax&) {
                   r.dependence.information = std::max(0.0, mean_of(buf.kl));
                   r.information_stderr = stderr_of(buf.kl, mean_of(buf.kl));
                   for (std::size_t a = 0; a < options.alphas.size(); ++a) {
                     r.dependence.alpha_information.emplace_back(options.alphas[a], mean_of(buf.alpha[a]));
                   }
                 },
             },
             rule.kind());
  if (rule.deterministic()) r.analytic_information = entropy(r.p_t);

  if (bins > 0) {
    std::vector<double> counts(n * bins, 0.0);
    for (std::size_t i = 0; i < trials; ++i) counts[buf.selected[i] * bins + buf.probe_bin[i]] += 1.0;
    const DiscreteJoint joint = DiscreteJoint::from_counts(n, bins, counts);
    r.probe.information = mutual_information(joint);
    for (double a : options.alphas) r.probe.alpha_information.emplace_back(a, alpha_mutual_information(joint, a));
  }
  if (options.record_selections) r.selections = std::move(buf.selected);
  return r;
}

// ---------------------------------------------------------------------------
// Extreme-value quantities

double extreme_norming_constant(const MeasurementModel& model, std::size_t n) {
  const auto* h = std::get_if<MeasurementModel::HeavyTail>(&model.kind());
  if (h == nullptr) throw DomainError("extreme norming constant is defined for the heavy-tail model");
  if (n == 0) throw DomainError("extreme norming constant needs n >= 1");
  if (n == 1) return h->x0;
  return std::exp(heavy_log_root(*h, heavy_log_k(*h) + log_n(n)));
}

double heavy_tail_beta_norm(const MeasurementModel& model) {
  const auto* h = std::get_if<MeasurementModel::HeavyTail>(&model.kind());
  if (h == nullptr) throw DomainError("heavy-tail beta-norm needs the heavy-tail model");
  // E phi^beta = int_0^x0 beta x^{beta-1} dx + int_x0^inf beta x^{beta-1} P(phi >= x) dx;
  // with y = ln x the tail integrand is beta K y^{-c}.
  const double log_k = heavy_log_k(*h);
  const double tail =
      half_line_integral([&](double y) { return h->beta * std::exp(log_k - h->c * std::log(y)); }, std::log(h->x0));
  return std::pow(std::pow(h->x0, h->beta) + tail, 1.0 / h->beta);
}

double frechet_limit(double beta) {
  if (!(beta > 1.0)) throw DomainError("Frechet mean needs beta > 1");
  if (std::isinf(beta)) return 1.0;
  return boost::math::tgamma(1.0 - 1.0 / beta);
}

std::vector<SweepRow> tightness_sweep(const MeasurementModel& model, std::span<const std::size_t> n_list,
                                      const SweepOptions& options) {
  const auto* heavy = std::get_if<MeasurementModel::HeavyTail>(&model.kind());
  const double beta = options.beta.value_or(heavy != nullptr ? heavy->beta : 2.0);
  if (!(beta >= 2.0)) throw DomainError("sweep bound needs beta >= 2");
  std::optional<double> norm;
  if (heavy != nullptr && beta == heavy->beta) {
    norm = heavy_tail_beta_norm(model);
  } else {
    norm = model.centered_beta_norm(beta);
  }
  const auto envelope = model.cgf_envelope();

  std::vector<SweepRow> rows;
  rows.reserve(n_list.size());
  for (const std::size_t n : n_list) {
    if (n < 2) throw DomainError("sweep needs every n >= 2");
    const MeasurementModel sized = model.with_size(n);
    ExperimentOptions eo;
    eo.trials = options.trials;
    eo.seed = options.seed;
    eo.workers = options.workers;
    eo.alphas = {};
    eo.estimate_probe = false;
    const ExperimentResult r = run_experiment(sized, SelectionRule::argmax(), eo);

    SweepRow row{};
    row.n = n;
    row.empirical_bias = r.empirical_bias;
    row.stderr_of_bias = r.stderr_of_bias;
    row.selected_mean = r.selected_mean;
    row.a_n = sized.extreme_scale(n);
    row.frechet_ratio = (r.selected_mean - sized.extreme_location()) / row.a_n;
    row.bound_pnorm = std::numeric_limits<double>::quiet_NaN();
    if (norm && std::isfinite(*norm)) {
      const std::vector<double> p(n, 1.0 / static_cast<double>(n));
      row.bound_pnorm = pnorm_uniform_bound(BetaNormTail{std::vector<double>(n, *norm), beta}, p, n).loose;
    }
    row.bound_mgf = envelope ? inverse_conjugate(*envelope, log_n(n)) : std::numeric_limits<double>::quiet_NaN();
    row.ratio = row.bound_pnorm / row.empirical_bias;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  char buf[64];
  auto num = [&](double v) {
    if (std::isnan(v)) {
      out << "nan";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf;
    }
  };
  for (const auto& r : rows) {
    out << r.n << ',';
    num(r.empirical_bias);
    out << ',';
    num(r.stderr_of_bias);
    out << ',';
    num(r.a_n);
    out << ',';
    num(r.frechet_ratio);
    out << ',';
    num(r.bound_pnorm);
    out << ',';
    num(r.bound_mgf);
    out << ',';
    num(r.ratio);
    out << '\n';
  }
  return out.str();
}

}  // namespace xbias
