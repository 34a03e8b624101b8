// SPDX-License-Identifier: Apache-2.0
#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "xbias/csv.hpp"

namespace xbias::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || std::isnan(v)) {
    throw ConfigError(where + "expected a number, got '" + text + "'");
  }
  return v;
}

std::size_t to_count(const std::string& text, const std::string& where) {
  unsigned long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError(where + "expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& text, const std::string& where) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError(where + "expected a 64-bit unsigned integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(where + "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + csv::format_double(v[i]);
  return s;
}

std::string join_counts(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <class M>
Field text_field(const char* key, M member) {
  return {key, [member](RunConfig& c, const std::string& v, const std::string&) { c.*member = v; },
          [member](const RunConfig& c) -> std::optional<std::string> {
            if ((c.*member).empty()) return std::nullopt;
            return c.*member;
          }};
}

template <class M>
Field real_field(const char* key, M member) {
  return {key, [member](RunConfig& c, const std::string& v, const std::string& w) { c.*member = to_real(v, w); },
          [member](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return csv::format_double(*(c.*member));
          }};
}

template <class M>
Field count_field(const char* key, M member) {
  return {key, [member](RunConfig& c, const std::string& v, const std::string& w) { c.*member = to_count(v, w); },
          [member](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return std::to_string(*(c.*member));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      text_field("command", &RunConfig::command),
      text_field("model", &RunConfig::model),
      text_field("rule", &RunConfig::rule),
      text_field("family", &RunConfig::family),
      real_field("sigma", &RunConfig::sigma),
      real_field("scale", &RunConfig::scale),
      real_field("beta", &RunConfig::beta),
      text_field("psi", &RunConfig::psi),
      text_field("envelope", &RunConfig::envelope),
      real_field("information", &RunConfig::information),
      real_field("alpha_information", &RunConfig::alpha_information),
      {"alphas",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.alphas = parse_real_list(v, w + "alphas"); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (c.alphas.empty()) return std::nullopt;
         return join_reals(c.alphas);
       }},
      count_field("n", &RunConfig::n),
      {"n_list",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.n_list = parse_count_list(v, w + "n_list"); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (c.n_list.empty()) return std::nullopt;
         return join_counts(c.n_list);
       }},
      {"uniform", [](RunConfig& c, const std::string& v, const std::string& w) { c.uniform = to_bool(v, w); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.uniform) return std::nullopt;
         return std::string("true");
       }},
      text_field("p_t", &RunConfig::p_t),
      text_field("joint", &RunConfig::joint),
      text_field("values", &RunConfig::values),
      count_field("trials", &RunConfig::trials),
      count_field("bins", &RunConfig::bins),
      count_field("probe", &RunConfig::probe),
      {"seed", [](RunConfig& c, const std::string& v, const std::string& w) { c.seed = to_u64(v, w); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.seed); }},
      count_field("workers", &RunConfig::workers),
      text_field("out", &RunConfig::out),
      text_field("format", &RunConfig::format),
  };
  return table;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_real(item, what + ": "));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(to_count(item, what + ": "));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

void assign(RunConfig& config, const std::string& key, const std::string& value, const std::string& where) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
  if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
  it->set(config, value, where + key + ": ");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::vector<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(line) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key before '='");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(where + "key '" + key + "' given twice");
    }
    seen.push_back(key);
    assign(config, key, value, where);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse_config(in, path.string());
}

std::string serialize(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    if (const auto v = f.get(config)) out += std::string(f.key) + " = " + *v + "\n";
  }
  return out;
}

}  // namespace xbias::cli
