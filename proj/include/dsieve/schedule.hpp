#pragma once

// Parameter schedules (h, delta, eta), checkpoint chains n_k = n_{k+1} - h(n_{k+1}),
// and the hypothesis checker that licenses a sieve run.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsieve/real_interval.hpp"
#include "dsieve/sequence.hpp"

namespace dsieve {

/// Significant bits kept when an irrational delta formula is rounded up to a dyadic.
inline constexpr unsigned kDeltaBits = 64;

struct ScheduleInfo {
  std::string preset;                         // "constant", "example-a", "custom-kappa"
  std::map<std::string, std::string> params;  // exact strings, for reports and fingerprints
  std::optional<std::int64_t> constant_h;
  std::optional<mpq_class> constant_delta;
};

/// delta values are exact positive rationals. Shapes defined by irrational
/// formulas are rounded upward to kDeltaBits-bit dyadics, so a certificate
/// against the stored delta also holds against the formula.
struct Schedule {
  std::function<std::int64_t(std::int64_t)> h;
  std::function<mpq_class(std::int64_t)> delta;
  mpq_class eta;
  ScheduleInfo info;
};

Schedule constant_schedule(std::int64_t h, const mpq_class& delta, const mpq_class& eta);

/// Schedule backed by explicit tables for n = 1..size; indices past the end throw.
Schedule tabulated_schedule(std::vector<std::int64_t> h, std::vector<mpq_class> delta, const mpq_class& eta, ScheduleInfo info);

/// Values of h and delta for n = 1..N, index 0 unused.
struct ScheduleTable {
  std::vector<std::int64_t> h;
  std::vector<mpq_class> delta;
  std::int64_t size() const { return static_cast<std::int64_t>(h.size()) - 1; }
};

ScheduleTable tabulate(const Schedule& s, std::int64_t n_max);

struct CheckpointChain {
  std::vector<std::int64_t> nodes;  // n_0 < n_1 < ... < n_K

  std::size_t blocks() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  std::int64_t top() const { return nodes.back(); }
};

/// Descends from N by n <- n - h(n) while the result stays >= 1.
CheckpointChain build_chain(const Schedule& s, std::int64_t N);

struct ConditionResult {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::optional<std::int64_t> first_failing;
  std::string lhs;  // exact rational strings of the failed inequality lhs <= rhs (or lhs >= rhs)
  std::string rhs;
  std::string relation;
  std::int64_t checked = 0;
};

enum class CheckMode { chain, universal };

/// Condition names:
///   growth         h(n) >= H(n - h(n), 1/delta(n - h(n)))
///   block-sum      sum of delta over the interior of each block <= (1-eta)eta/4
///   initial-sum    sum_{v <= n_0} delta(v) <= (1-eta)/16
///   monotone-gap   n - h(n) non-decreasing where n > h(n)
///   monotone-delta delta non-increasing
/// In universal mode growth/block-sum run over every n <= N with n > h(n) and
/// initial-sum over every n <= N with n <= h(n).
struct ConditionReport {
  CheckMode mode = CheckMode::chain;
  std::vector<ConditionResult> results;
  mpq_class block_limit;
  mpq_class initial_limit;

  bool all_pass() const;
  const ConditionResult& get(const std::string& name) const;
  /// First non-passing condition, if any.
  const ConditionResult* binding() const;
};

ConditionReport check_conditions(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                                 CheckMode mode = CheckMode::chain, unsigned precision = kDefaultPrecision);

/// Parameters of the sublacunary schedule
///   h(n) = max(1, floor(c1 n^b log(n + c2)))
///   delta(n) = (1-b)(1-eta)eta / (32 c1 (n+c2)^b log(n+c2)).
struct SublacunaryParams {
  mpq_class beta;
  mpq_class gamma;
  mpq_class eta;
};

struct ConstantSearch {
  unsigned max_c1_doublings = 8;
  unsigned max_c2_doublings = 16;
};

Schedule sublacunary_schedule(const mpq_class& beta, const mpq_class& eta, const mpq_class& c1, const mpq_class& c2);

/// Doubling search for the smallest (c1, c2) whose schedule passes every
/// condition in universal mode up to n_probe.
Schedule preset_example_a(const SublacunaryParams& params, const SequenceSpec& spec, std::int64_t n_probe,
                          ConstantSearch budget = {});

/// A positive non-increasing shape g with delta(n) = kappa * g(n).
struct DeltaShape {
  std::string name;
  std::function<RealInterval(std::int64_t n, unsigned precision)> g;
};

DeltaShape shape_constant();
DeltaShape shape_inv_sqrt_log();      // 1 / (sqrt(n+1) log(n+2))
DeltaShape shape_inv_log();           // 1 / log(n+2)
DeltaShape shape_inv_pow_log(const mpq_class& beta);  // 1 / ((n+1)^b log(n+2))

/// Schedule with delta = kappa * g and h chosen minimally against the growth
/// condition: n - h(n) is the largest m with t_n * delta(m) >= t_m.
Schedule kappa_schedule(const SequenceSpec& spec, const DeltaShape& shape, const mpq_class& kappa, const mpq_class& eta,
                        std::int64_t N);

/// Largest kappa = 2^-m (m = 0..64) for which kappa_schedule passes every
/// condition in universal mode up to N.
Schedule autotune_kappa(const SequenceSpec& spec, const DeltaShape& shape, const mpq_class& eta, std::int64_t N);

}  // namespace dsieve
