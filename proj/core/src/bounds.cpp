// SPDX-License-Identifier: Apache-2.0
#include "xbias/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xbias/divergence.hpp"
#include "xbias/errors.hpp"

namespace xbias {

namespace {

void require_information(double information) {
  if (!(information >= 0.0)) throw DomainError("dependence measure must be nonnegative");
}

void require_count(std::size_t n) {
  if (n == 0) throw DomainError("number of measurements must be at least 1");
}

}  // namespace

void validate(const BetaNormTail& tail) {
  if (tail.sigma.empty()) throw DomainError("beta-norm tail: no sigma values");
  for (double s : tail.sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("beta-norm tail: sigma_i must be positive and finite");
  }
  if (!(tail.beta > 1.0)) throw DomainError("beta-norm tail: beta must exceed 1");
}

double conjugate_exponent(double beta) {
  if (!(beta > 1.0)) throw DomainError("Hoelder exponent beta must exceed 1");
  if (std::isinf(beta)) return 1.0;
  return beta / (beta - 1.0);
}

double sigma_norm(std::span<const double> sigma, std::span<const double> p_t, double beta) {
  if (sigma.size() != p_t.size()) {
    throw DomainError("sigma has " + std::to_string(sigma.size()) + " entries but p_T has " +
                      std::to_string(p_t.size()));
  }
  check_probability_vector(p_t, "p_T");
  if (std::isinf(beta)) {
    double m = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (p_t[i] > 0.0) m = std::max(m, sigma[i]);
    }
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) acc += p_t[i] * std::pow(sigma[i], beta);
  return std::pow(acc, 1.0 / beta);
}

double mgf_bound(std::span<const CgfEnvelope> envelopes, std::span<const double> p_t, double information) {
  require_information(information);
  if (envelopes.size() != p_t.size()) {
    throw DomainError("mgf bound: " + std::to_string(envelopes.size()) + " envelopes but p_T has " +
                      std::to_string(p_t.size()) + " entries");
  }
  const MixedEnvelope mixed(std::vector<double>(p_t.begin(), p_t.end()),
                            std::vector<CgfEnvelope>(envelopes.begin(), envelopes.end()));
  return inverse_conjugate(mixed, information);
}

double pnorm_bound(const BetaNormTail& tail, std::span<const double> p_t, double alpha_information) {
  validate(tail);
  require_information(alpha_information);
  const double alpha = conjugate_exponent(tail.beta);
  const double norm = sigma_norm(tail.sigma, p_t, tail.beta);
  if (alpha_information == 0.0) return 0.0;
  return norm * std::pow(alpha_information, 1.0 / alpha);
}

UniformPnormBound pnorm_uniform_bound(const BetaNormTail& tail, std::span<const double> p_t, std::size_t n) {
  validate(tail);
  require_count(n);
  if (tail.beta < 2.0) {
    throw DomainError("selection-free beta-norm bound needs beta >= 2; for 1 < beta < 2 only the I_alpha form exists");
  }
  const double norm = sigma_norm(tail.sigma, p_t, tail.beta);
  const double m = static_cast<double>(n);
  if (tail.beta == 2.0) {
    const double v = norm * std::sqrt(m - 1.0);
    return {v, v};
  }
  const double alpha = conjugate_exponent(tail.beta);
  const double value = norm * std::pow(1.0 + std::pow(m, alpha - 1.0), 1.0 / alpha);
  const double loose = std::pow(2.0, 1.0 / alpha) * norm * (std::isinf(tail.beta) ? 1.0 : std::pow(m, 1.0 / tail.beta));
  return {value, loose};
}

double gaussian_bound(double sigma, double information) {
  require_information(information);
  if (!(sigma > 0.0)) throw DomainError("gaussian bound: sigma must be positive");
  return sigma * std::sqrt(2.0 * information);
}

double subgamma_bound(double variance_factor, double scale, double information) {
  require_information(information);
  if (!(variance_factor > 0.0) || !(scale > 0.0)) throw DomainError("sub-gamma bound: parameters must be positive");
  return std::sqrt(variance_factor) * std::sqrt(2.0 * information) + scale * information;
}

SubExponentialBounds subexponential_bounds(double sigma, double b, double information) {
  require_information(information);
  return {paper_subexponential_bound(sigma, b, information),
          inverse_conjugate(CgfEnvelope::sub_exponential(sigma, b), information)};
}

double corollary_bound(CorollaryKind kind, const CorollaryParams& params, double information) {
  switch (kind) {
    case CorollaryKind::gaussian:
      return gaussian_bound(params.sigma, information);
    case CorollaryKind::subgamma:
      return subgamma_bound(params.sigma * params.sigma, params.scale, information);
    case CorollaryKind::subexponential:
      return subexponential_bounds(params.sigma, params.scale, information).numeric;
  }
  throw DomainError("unknown corollary kind");
}

double hard_max_cgf_bound(std::span<const CgfEnvelope> envelopes, std::size_t n) {
  require_count(n);
  const MaxEnvelope envelope(std::vector<CgfEnvelope>(envelopes.begin(), envelopes.end()));
  return inverse_conjugate(envelope, std::log(static_cast<double>(n)));
}

double hard_max_beta_bound(double max_beta_norm, double beta, std::size_t n) {
  require_count(n);
  if (!(beta >= 1.0)) throw DomainError("hard beta-norm baseline needs beta >= 1");
  if (!(max_beta_norm >= 0.0)) throw DomainError("beta-norm must be nonnegative");
  if (std::isinf(beta)) return max_beta_norm;
  return std::pow(static_cast<double>(n), 1.0 / beta) * max_beta_norm;
}

double hard_max_orlicz_bound(double sigma, const OrliczFunction& psi, std::size_t n) {
  require_count(n);
  if (!(sigma > 0.0)) throw DomainError("Orlicz baseline: sigma must be positive");
  return sigma * psi.inverse(static_cast<double>(n));
}

}  // namespace xbias
