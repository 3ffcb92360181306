#pragma once

// The dyadic exclusion sieve.
//
// For each n the exclusion sets E(n,a) = [(a - delta(n))/t_n, (a + delta(n))/t_n],
// 0 <= a <= ceil(t_n), are covered by closed cells of the grid 2^-l_n with
// l_n = floor(log2(t_n / (2 delta(n)))). Survivors are the cells that avoid every
// cover so far. Full mode tracks the whole survivor set and checks the measure
// bounds along the checkpoint chain; path mode follows a single nested cell per
// checkpoint and produces a witness alpha.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsieve/run_set.hpp"
#include "dsieve/schedule.hpp"
#include "dsieve/sequence.hpp"

namespace dsieve {

/// floor(log2(t / (2 delta))). Throws PrecisionCeiling if the enclosure of t
/// straddles a power-of-two boundary.
unsigned level(const TermEnclosure& t, const mpq_class& delta);
/// Same, raising the sequence precision until the floor is decided.
unsigned level(Sequence& seq, std::int64_t n, const mpq_class& delta);

/// Minimal level-l cover of the union of E(n,a) with [0,1]. Boundary contact
/// counts as overlap, and an enclosed t widens each E to the union over the
/// enclosure. With a window only exclusions meeting those cells are generated
/// and the result is clipped to the window.
RunSet exclusion_cover(const TermEnclosure& t, const mpq_class& delta, unsigned l,
                       const std::optional<CellRun>& window = std::nullopt);

struct SieveOptions {
  /// Throw InternalBoundBreach when a cover, initial, or proven overlap/block
  /// bound fails. The per-checkpoint measure bound is always enforced. Misses of
  /// the nominal overlap/block limits are recorded but never thrown.
  bool strict = true;
  unsigned precision = kDefaultPrecision;
};

struct CheckpointRecord {
  std::int64_t n = 0;
  unsigned level = 0;
  mpz_class cells;
  std::size_t runs = 0;
  mpq_class measure;
  mpq_class bound;  // eta^(k+1)
  bool within = true;
};

/// mu(S ∩ A_n) / mu(S) with S the survivors after index n - h(n). The nominal
/// limit is 4 delta(n). Since t_n 2^-l_n lies in [2 delta(n), 4 delta(n)) the
/// counting argument only yields 8 delta(n), which is proven_limit.
struct OverlapRecord {
  std::int64_t n = 0;
  std::int64_t frozen_at = 0;
  mpq_class ratio;
  mpq_class limit;
  bool within = true;
  mpq_class proven_limit;
  bool within_proven = true;
};

/// mu(S_{n_{k+1}}) / mu(S_{n_k}) against 1 - (c/eta) sum_{v=n_k+1}^{n_{k+1}-1} delta(v),
/// with c = 4 for the nominal limit and c = 8 for proven_limit.
struct BlockRecord {
  std::int64_t from = 0;
  std::int64_t to = 0;
  mpq_class ratio;
  mpq_class limit;
  bool within = true;
  mpq_class proven_limit;
  bool within_proven = true;
};

/// mu(A_n) <= 16 delta(n) for t_n >= 2, <= 24 delta(n) below.
struct CoverRecord {
  std::int64_t n = 0;
  unsigned level = 0;
  mpq_class measure;
  mpq_class limit;
  bool within = true;
};

struct SieveTrace {
  std::vector<CheckpointRecord> checkpoints;
  std::vector<OverlapRecord> overlaps;
  std::vector<BlockRecord> blocks;
  std::vector<CoverRecord> covers;
  mpq_class initial_measure;
  mpq_class initial_bound;  // 1 - 16 sum_{v <= n_0} delta(v)
  bool initial_within = true;
  mpq_class final_measure;
  mpq_class theorem_bound;  // eta^(K+1)
  RunSet survivors;

  /// Every record meets its nominal limit.
  bool all_within() const;
  /// Every cover, initial, checkpoint and proven overlap/block bound holds.
  bool all_proven() const;
};

SieveTrace run_sieve_full(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                          const SieveOptions& options = {});

enum class PickPolicy { leftmost, middle, random };

struct PathOptions {
  PickPolicy pick = PickPolicy::leftmost;
  unsigned long seed = 0;
  /// When false the search runs without the hypothesis gate; any witness found
  /// is still verified margin by margin.
  bool require_conditions = true;
  std::size_t max_nodes = 1'000'000;
  unsigned precision = kDefaultPrecision;
};

struct MarginRecord {
  std::int64_t n = 0;
  mpq_class distance;  // certified lower bound on ||t_n alpha||
  mpq_class delta;
  bool ok = true;
};

struct MarginReport {
  Verdict verdict = Verdict::pass;
  std::optional<std::int64_t> first_failure;
  mpq_class min_margin;  // min over n of the certified ||t_n alpha||
  std::int64_t min_at = 0;
  std::vector<MarginRecord> margins;
};

/// Certified check of ||t_n alpha|| > delta(n) for n = 1..N.
MarginReport verify_certificate(const SequenceSpec& spec, const mpq_class& alpha,
                                const std::function<mpq_class(std::int64_t)>& delta, std::int64_t N,
                                unsigned precision = kDefaultPrecision);

struct PathStage {
  std::int64_t n = 0;
  unsigned level = 0;
  mpz_class cell;        // chosen cell at this level
  mpz_class survivors;   // surviving cells inside the parent (whole grid for stage 0)
  mpq_class guaranteed;  // eta * 2^(l_{n_k} - l_{n_{k-1}}), zero for stage 0
};

struct Certificate {
  mpz_class numerator;  // alpha = numerator / 2^bits
  unsigned long bits = 0;
  mpq_class alpha;
  std::vector<PathStage> stages;
  MarginReport margins;
  std::string schedule_preset;
  std::map<std::string, std::string> schedule_params;
  std::size_t nodes_explored = 0;
  std::size_t backtracks = 0;

  /// "0." followed by exactly `bits` binary digits of alpha.
  std::string binary_expansion() const;
};

Certificate extract_witness(const SequenceSpec& spec, const Schedule& schedule, const CheckpointChain& chain,
                            const PathOptions& options = {});

}  // namespace dsieve
