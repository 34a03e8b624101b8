// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xbias::cli {

/// Bad configuration input; the message is anchored at "source:line:" when
/// the problem comes from a config file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Every parameter any subcommand accepts. Strings are unset when empty.
struct RunConfig {
  std::string command;
  std::string model;   // gaussian[:mu[:sigma]], exponential[:rate], heavytail[:beta:c:x0]
  std::string rule;    // argmax, argmin, fixed:i, softmax:tau, topk:k, uniform
  std::string family;  // gaussian, subgamma, subexponential, cgf, pnorm, orlicz
  std::optional<double> sigma;
  std::optional<double> scale;  // c for sub-gamma, b for sub-exponential
  std::optional<double> beta;
  std::string psi;       // Orlicz function spec
  std::string envelope;  // tabulated CGF envelope CSV
  std::optional<double> information;
  std::optional<double> alpha_information;
  std::vector<double> alphas;
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_list;
  bool uniform = false;
  std::string p_t;     // probability vector CSV
  std::string joint;   // DiscreteJoint CSV
  std::string values;  // value[,probability] CSV for norms
  std::optional<std::size_t> trials;
  std::optional<std::size_t> bins;
  std::optional<std::size_t> probe;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> workers;
  std::string out;
  std::string format;  // json or csv; empty means the command default

  bool operator==(const RunConfig&) const = default;
};

/// Flat "key = value" text; '#' starts a comment line. Lists are comma-separated.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

/// Sets one key from its textual value, throwing ConfigError with `where` as prefix.
void assign(RunConfig& config, const std::string& key, const std::string& value, const std::string& where);

std::vector<double> parse_real_list(const std::string& text, const std::string& what);
std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& what);

}  // namespace xbias::cli
