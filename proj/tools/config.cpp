#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>

#include "cli.hpp"
#include "probmorph/errors.hpp"

namespace pmorph {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "seed",       "kernel",   "sigma",     "scale",     "x_labels", "x_coords", "x_dim",     "y_labels",
      "y_coords",   "y_dim",    "trials",    "max_size",  "fixture",  "data",     "truth",     "gamma",
      "restarts",   "max_iters", "step_size", "tol",      "operator_norm", "warm_start", "bound", "n",
      "eps",        "delta",    "c_m",       "a",         "b",        "out",      "x_weights",
  };
  return keys;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!known_keys().count(key)) {
      throw UsageError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("missing setting '" + key + "' (" + origin_ + ")");
  return it->second;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const { return parse_double(key, text(key)); }

double Config::number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::uint64_t Config::count(const std::string& key) const {
  const std::string v = text(key);
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError("'" + key + "' expects a nonnegative integer, got '" + v + "'");
  return out;
}

std::uint64_t Config::count_or(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? count(key) : fallback;
}

bool Config::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  const std::string v = text(key);
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw UsageError("'" + key + "' has an empty list item");
    out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) out.push_back(parse_double(key, item));
  return out;
}

std::uint64_t Config::seed() const {
  if (!has("seed")) throw UsageError("a seed is mandatory: set 'seed' in the config or pass --seed");
  return count("seed");
}

std::optional<probmorph::FiniteSpace> optional_space(const Config& c, const std::string& prefix) {
  const std::string lk = prefix + "_labels", ck = prefix + "_coords", dk = prefix + "_dim";
  if (!c.has(lk) && !c.has(ck)) return std::nullopt;
  std::vector<std::string> labels;
  if (c.has(lk)) labels = c.list(lk);
  try {
    if (!c.has(ck)) return probmorph::FiniteSpace(labels);
    const auto flat = c.numbers(ck);
    const auto dim = c.count_or(dk, 1);
    if (dim == 0 || flat.size() % dim != 0) {
      throw UsageError("'" + ck + "' holds " + std::to_string(flat.size()) + " numbers, not a multiple of " + dk);
    }
    std::vector<std::vector<double>> coords;
    for (std::size_t i = 0; i < flat.size(); i += dim) coords.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                                                                         flat.begin() + static_cast<std::ptrdiff_t>(i + dim));
    if (labels.empty()) {
      if (dim == 1) return probmorph::FiniteSpace::line(flat);
      for (std::size_t i = 0; i < coords.size(); ++i) labels.push_back(prefix + std::to_string(i));
    }
    return probmorph::FiniteSpace(labels, coords);
  } catch (const probmorph::DomainError& e) {
    throw UsageError("space '" + prefix + "': " + e.what());
  }
}

probmorph::FiniteSpace space_from_config(const Config& c, const std::string& prefix) {
  auto s = optional_space(c, prefix);
  if (!s) throw UsageError("the config must declare " + prefix + "_labels or " + prefix + "_coords");
  return *s;
}

probmorph::KernelSpec kernel_from_config(const Config& c) {
  try {
    probmorph::KernelSpec k{probmorph::parse_kernel_kind(c.text_or("kernel", "gaussian")), c.number_or("sigma", 1.0),
                            c.number_or("scale", 1.0)};
    k.validate();
    return k;
  } catch (const probmorph::DomainError& e) {
    throw UsageError(e.what());
  }
}

}  // namespace pmorph
