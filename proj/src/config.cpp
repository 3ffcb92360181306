#include "dsieve/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"
#include "dsieve/serialize.hpp"

namespace dsieve {

namespace {

constexpr std::array kKnownKeys = {
    "sequence.kind",     "sequence.q",           "sequence.first",    "sequence.slope",   "sequence.offset",
    "sequence.gamma",    "sequence.beta",        "sequence.scale",    "sequence.primes",  "sequence.terms",
    "sequence.tau",      "schedule.preset",      "schedule.eta",      "schedule.kappa",   "schedule.h.const",
    "schedule.delta.const", "schedule.delta.shape", "schedule.delta.beta", "schedule.beta", "schedule.gamma",
    "schedule.c1",       "schedule.c2",          "schedule.probe",    "run.N",            "run.mode",
    "run.pick",          "run.strict",           "run.max_nodes",     "run.threads",      "output.dir",
    "precision.bits",    "dimension.source",     "dimension.nu",      "dimension.epsilon", "dimension.k_max",
    "dimension.sigma",   "dimension.m",          "oracle.budget",     "oracle.max_listed",
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::string t = unquote(trim(cur));
    if (!t.empty()) out.push_back(std::move(t));
    cur.clear();
  };
  for (char ch : s) {
    if (ch == ',' || ch == '[' || ch == ']' || std::isspace(static_cast<unsigned char>(ch)))
      flush();
    else
      cur += ch;
  }
  flush();
  return out;
}

}  // namespace

bool is_known_key(const std::string& key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

Config Config::parse(std::string_view text, const std::string& source) {
  Config c;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!is_known_key(full)) throw ConfigError(where + ": unknown key '" + full + "'");
    if (c.has(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
    c.values_[full] = unquote(value);
    c.origin_[full] = where;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  if (!is_known_key(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
  values_[key] = value;
  origin_[key] = origin;
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

void Config::fail(const std::string& key, const std::string& message) const {
  auto it = origin_.find(key);
  const std::string where = it == origin_.end() ? "<default>" : it->second;
  throw ConfigError(where + ": " + key + ": " + message);
}

mpq_class Config::rational(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError("missing required key '" + key + "'");
  try {
    return parse_rational(*v);
  } catch (const ParameterError& e) {
    fail(key, e.what());
  }
}

mpq_class Config::rational_or(const std::string& key, const mpq_class& fallback) const {
  return has(key) ? rational(key) : fallback;
}

std::int64_t Config::integer_or(const std::string& key, std::int64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long x = std::stoll(*v, &used);
    if (used != v->size()) fail(key, "expected an integer, got '" + *v + "'");
    return x;
  } catch (const std::logic_error&) {
    fail(key, "expected an integer, got '" + *v + "'");
  }
}

bool Config::boolean_or(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(key, "expected true or false, got '" + *v + "'");
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_)
    if (k != "output.dir" && k != "run.threads") out += k + "=" + v + "\n";
  return out;
}

std::string Config::fingerprint() const { return sha256_hex(canonical()); }

RunSettings run_settings(const Config& c) {
  RunSettings r;
  r.N = c.integer_or("run.N", r.N);
  if (r.N < 1) c.fail("run.N", "must be >= 1");
  r.mode = c.get_or("run.mode", r.mode);
  if (r.mode != "full" && r.mode != "path") c.fail("run.mode", "expected full or path");
  const std::string pick = c.get_or("run.pick", "left");
  if (pick == "left" || pick == "leftmost") {
    r.pick = PickPolicy::leftmost;
  } else if (pick == "middle") {
    r.pick = PickPolicy::middle;
  } else if (pick.rfind("random", 0) == 0) {
    r.pick = PickPolicy::random;
    if (pick.size() > 6) {
      if (pick[6] != ':') c.fail("run.pick", "expected random:<seed>");
      try {
        r.seed = std::stoul(pick.substr(7));
      } catch (const std::logic_error&) {
        c.fail("run.pick", "bad seed in '" + pick + "'");
      }
    }
  } else {
    c.fail("run.pick", "expected left, middle or random:<seed>");
  }
  r.strict = c.boolean_or("run.strict", r.strict);
  const std::int64_t nodes = c.integer_or("run.max_nodes", static_cast<std::int64_t>(r.max_nodes));
  if (nodes < 1) c.fail("run.max_nodes", "must be >= 1");
  r.max_nodes = static_cast<std::size_t>(nodes);
  const std::int64_t bits = c.integer_or("precision.bits", r.precision);
  if (bits < 32 || bits > kMaxPrecision) c.fail("precision.bits", "must lie in [32, 4096]");
  r.precision = static_cast<unsigned>(bits);
  r.output_dir = c.get_or("output.dir", r.output_dir);
  return r;
}

SequenceSpec sequence_from(const Config& c) {
  const auto kind = c.get("sequence.kind");
  if (!kind) throw ConfigError("missing required key 'sequence.kind'");
  SequenceSpec spec;
  if (*kind == "geometric") {
    spec.kind = Geometric{c.rational("sequence.q"), c.rational_or("sequence.first", 1)};
  } else if (*kind == "affine") {
    spec.kind = Affine{c.rational_or("sequence.slope", 1), c.rational_or("sequence.offset", 0)};
  } else if (*kind == "sublacunary") {
    spec.kind = Sublacunary{c.rational("sequence.gamma"), c.rational("sequence.beta"), c.rational_or("sequence.first", 1)};
  } else if (*kind == "subexponential") {
    spec.kind = Subexponential{c.rational("sequence.beta"), c.rational_or("sequence.scale", 1)};
  } else if (*kind == "smooth" || *kind == "smooth-numbers") {
    SmoothNumbers s;
    if (const auto primes = c.get("sequence.primes")) {
      s.primes.clear();
      for (const auto& p : split_list(*primes)) {
        try {
          s.primes.push_back(std::stoul(p));
        } catch (const std::logic_error&) {
          c.fail("sequence.primes", "bad prime '" + p + "'");
        }
      }
    }
    spec.kind = s;
  } else if (*kind == "explicit" || *kind == "explicit-list") {
    ExplicitList e;
    const auto terms = c.get("sequence.terms");
    if (!terms) throw ConfigError("sequence.kind=explicit requires 'sequence.terms'");
    for (const auto& t : split_list(*terms)) {
      try {
        e.terms.push_back(parse_rational(t));
      } catch (const ParameterError& err) {
        c.fail("sequence.terms", err.what());
      }
    }
    spec.kind = e;
  } else {
    c.fail("sequence.kind", "unknown kind '" + *kind + "'");
  }
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    c.fail("sequence.kind", e.what());
  }
  return spec;
}

DeltaShape shape_from(const Config& c) {
  const std::string name = c.get_or("schedule.delta.shape", "inv-sqrt-log");
  if (name == "const" || name == "constant") return shape_constant();
  if (name == "inv-sqrt-log") return shape_inv_sqrt_log();
  if (name == "inv-log") return shape_inv_log();
  if (name == "inv-pow-log") return shape_inv_pow_log(c.rational("schedule.delta.beta"));
  c.fail("schedule.delta.shape", "expected const, inv-sqrt-log, inv-log or inv-pow-log");
}

Schedule schedule_from(const Config& c, const SequenceSpec& spec, std::int64_t N) {
  const std::string preset = c.get_or("schedule.preset", "constant");
  const mpq_class eta = c.rational("schedule.eta");
  if (!(eta > 0 && eta < 1)) c.fail("schedule.eta", "must lie in (0, 1)");
  if (preset == "constant") {
    const std::int64_t h = c.integer_or("schedule.h.const", 0);
    if (h < 1) c.fail("schedule.h.const", "required and must be >= 1");
    const mpq_class delta = c.rational("schedule.delta.const");
    if (!(delta > 0)) c.fail("schedule.delta.const", "must be positive");
    return constant_schedule(h, delta, eta);
  }
  if (preset == "example-a") {
    const auto* sub = std::get_if<Sublacunary>(&spec.kind);
    SublacunaryParams p;
    p.eta = eta;
    p.beta = c.has("schedule.beta") || !sub ? c.rational("schedule.beta") : sub->beta;
    p.gamma = c.has("schedule.gamma") || !sub ? c.rational("schedule.gamma") : sub->gamma;
    if (c.has("schedule.c1") || c.has("schedule.c2"))
      return sublacunary_schedule(p.beta, eta, c.rational("schedule.c1"), c.rational("schedule.c2"));
    return preset_example_a(p, spec, c.integer_or("schedule.probe", N));
  }
  if (preset == "custom-kappa") {
    const DeltaShape shape = shape_from(c);
    const std::string kappa = c.get_or("schedule.kappa", "auto");
    if (kappa == "auto") return autotune_kappa(spec, shape, eta, N);
    return kappa_schedule(spec, shape, c.rational("schedule.kappa"), eta, N);
  }
  c.fail("schedule.preset", "expected constant, example-a or custom-kappa");
}

}  // namespace dsieve
