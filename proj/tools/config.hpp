#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "probmorph/kernels.hpp"
#include "probmorph/spaces.hpp"

namespace pmorph {

/// Flat `key = value` settings; `#` starts a comment. Command-line flags are
/// layered on top with set().
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key) const;
  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  /// Comma-separated items, trimmed.
  std::vector<std::string> list(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  std::uint64_t seed() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_ = "command line";
};

/// Space named by `prefix` ("x" or "y"): `<prefix>_labels`, `<prefix>_coords`
/// (flattened row-major) and `<prefix>_dim` (default 1).
probmorph::FiniteSpace space_from_config(const Config& c, const std::string& prefix);
std::optional<probmorph::FiniteSpace> optional_space(const Config& c, const std::string& prefix);

/// `kernel`, `sigma`, `scale`; gaussian with sigma 1 when absent.
probmorph::KernelSpec kernel_from_config(const Config& c);

}  // namespace pmorph
