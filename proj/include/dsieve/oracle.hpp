#pragma once

// Brute-force reference for small exact instances: the set of alpha in [0,1]
// with ||t_n alpha|| > delta(n) for every n <= N, as an explicit union of
// intervals with rational endpoints.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dsieve/run_set.hpp"
#include "dsieve/sequence.hpp"

namespace dsieve {

/// Interval [lo/D, hi/D] with per-endpoint openness, D the union's denominator.
struct Piece {
  mpz_class lo;
  mpz_class hi;
  bool lo_closed = true;
  bool hi_closed = true;
};

class IntervalUnion {
 public:
  IntervalUnion() = default;
  IntervalUnion(mpz_class denominator, std::vector<Piece> pieces);

  /// The closed unit interval.
  static IntervalUnion unit();

  const mpz_class& denominator() const { return den_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  mpq_class lower(std::size_t i) const;
  mpq_class upper(std::size_t i) const;
  mpq_class measure() const;

  /// True when the closed interval [lo, hi] lies inside a single component.
  bool contains_closed(const mpq_class& lo, const mpq_class& hi) const;
  /// Removes the closed interval [lo, hi].
  IntervalUnion subtract(const mpq_class& lo, const mpq_class& hi) const;

  /// Pieces sorted, non-empty, pairwise disjoint and not touching, inside [0,1].
  bool well_formed() const;

  friend bool operator==(const IntervalUnion& a, const IntervalUnion& b);

 private:
  IntervalUnion rescaled(const mpz_class& den) const;

  mpz_class den_ = 1;
  std::vector<Piece> pieces_;
};

using DeltaFn = std::function<mpq_class(std::int64_t)>;

/// [0,1] minus every closed E(n,a) = [(a - delta(n))/t_n, (a + delta(n))/t_n],
/// n <= N, 0 <= a <= ceil(t_n). Exact sequences only. Throws BudgetExceeded
/// when the number of exclusions exceeds `budget`.
IntervalUnion exact_bad_set(const SequenceSpec& spec, const DeltaFn& delta, std::int64_t N,
                            std::size_t budget = 10'000'000);

/// Instance data used to name the exclusion responsible for a violation.
struct OracleInstance {
  SequenceSpec spec;
  DeltaFn delta;
  std::int64_t N = 0;
};

struct Comparison {
  bool contained = true;
  mpq_class exact_measure;
  mpq_class sieve_measure;
  mpq_class slack;  // exact - sieve
  std::optional<mpz_class> bad_cell;
  std::optional<std::int64_t> bad_n;
  std::optional<mpz_class> bad_a;
};

/// Checks every survivor cell lies inside the exact bad set.
Comparison compare_with_sieve(const IntervalUnion& exact, const RunSet& survivors,
                              const std::optional<OracleInstance>& instance = std::nullopt);

}  // namespace dsieve
