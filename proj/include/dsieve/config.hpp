#pragma once

// Run configuration: "[section]" headers and "key = value" lines, flattened to
// "section.key". Comments start with '#' or ';'.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dsieve/schedule.hpp"
#include "dsieve/sequence.hpp"
#include "dsieve/sieve.hpp"

namespace dsieve {

class Config {
 public:
  /// Throws ConfigError anchored at "source:line" for syntax errors and unknown keys.
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  /// Sets or replaces a key, recording `origin` for diagnostics.
  void set(const std::string& key, const std::string& value, const std::string& origin = "override");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  mpq_class rational(const std::string& key) const;
  mpq_class rational_or(const std::string& key, const mpq_class& fallback) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sorted "key=value" lines, leaving out output.dir and run.threads.
  std::string canonical() const;
  /// SHA-256 of canonical().
  std::string fingerprint() const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origin_;
};

bool is_known_key(const std::string& key);

struct RunSettings {
  std::int64_t N = 10;
  std::string mode = "full";  // full | path
  PickPolicy pick = PickPolicy::leftmost;
  unsigned long seed = 0;
  bool strict = true;
  std::size_t max_nodes = 1'000'000;
  unsigned precision = kDefaultPrecision;
  std::string output_dir = "out";
};

RunSettings run_settings(const Config& c);
SequenceSpec sequence_from(const Config& c);
Schedule schedule_from(const Config& c, const SequenceSpec& spec, std::int64_t N);
DeltaShape shape_from(const Config& c);

}  // namespace dsieve
