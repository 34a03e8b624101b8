// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "xbias/cgf.hpp"
#include "xbias/orlicz.hpp"

namespace xbias {

/// Per-index CGF envelopes of the centered measurements.
struct EnvelopeTail {
  std::vector<CgfEnvelope> envelopes;
};

/// Per-index bounds sigma_i on ||phi_i - mu_i||_beta, 1 < beta <= inf.
struct BetaNormTail {
  std::vector<double> sigma;
  double beta;
};

/// Common bound sigma on the Luxemburg psi-norm of every centered measurement.
struct OrliczTail {
  double sigma;
  OrliczFunction psi;
};

using TailSpec = std::variant<EnvelopeTail, BetaNormTail, OrliczTail>;

/// Throws DomainError unless sigma_i > 0, beta > 1, and the list is nonempty.
void validate(const BetaNormTail& tail);

/// Hoelder conjugate alpha of beta (1/alpha + 1/beta = 1); beta = inf gives 1.
double conjugate_exponent(double beta);

/// ||sigma_T||_beta under the law p_T; beta = inf gives the max over the support of p_T.
double sigma_norm(std::span<const double> sigma, std::span<const double> p_t, double beta);

/// (psi_bar)^{*-1}(I) with psi_bar = sum_i p_T(i) psi_i. Bounds E[phi_T - mu_T] from above.
double mgf_bound(std::span<const CgfEnvelope> envelopes, std::span<const double> p_t, double information);

/// ||sigma_T||_beta I_alpha^{1/alpha}. Bounds |E[phi_T - mu_T]|.
double pnorm_bound(const BetaNormTail& tail, std::span<const double> p_t, double alpha_information);

struct UniformPnormBound {
  double value;  // sqrt(n-1) form at beta = 2, (1 + n^{alpha-1})^{1/alpha} form above
  double loose;  // 2^{1/alpha} ||sigma_T||_beta n^{1/beta}; equals value at beta = 2
};

/// Selection-rule-free cap, valid for beta >= 2.
UniformPnormBound pnorm_uniform_bound(const BetaNormTail& tail, std::span<const double> p_t, std::size_t n);

// Closed-form corollaries.
double gaussian_bound(double sigma, double information);
double subgamma_bound(double variance_factor, double scale, double information);

struct SubExponentialBounds {
  double published;  // piecewise closed form, see paper_subexponential_bound
  double numeric;    // inverse conjugate of the sub-exponential envelope
};
SubExponentialBounds subexponential_bounds(double sigma, double b, double information);

enum class CorollaryKind { gaussian, subgamma, subexponential };

struct CorollaryParams {
  double sigma = 1.0;  // sigma (gaussian, subexponential) or sqrt of the variance factor (subgamma)
  double scale = 1.0;  // c (subgamma) or b (subexponential)
};

/// Closed forms; for subexponential this is the numeric value, with the
/// piecewise expression available through subexponential_bounds.
double corollary_bound(CorollaryKind kind, const CorollaryParams& params, double information);

// Classical maximal-inequality baselines for E max_i Z_i.
/// (max_i psi_i)^{*-1}(ln n).
double hard_max_cgf_bound(std::span<const CgfEnvelope> envelopes, std::size_t n);
/// n^{1/beta} max_i ||Z_i||_beta.
double hard_max_beta_bound(double max_beta_norm, double beta, std::size_t n);
/// sigma psi^{-1}(n) when E psi(|Z_i| / sigma) <= 1 for every i.
double hard_max_orlicz_bound(double sigma, const OrliczFunction& psi, std::size_t n);

}  // namespace xbias
