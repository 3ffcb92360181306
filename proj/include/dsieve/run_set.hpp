#pragma once

// Sets of closed dyadic cells [b/2^l, (b+1)/2^l] inside [0,1], stored as
// sorted maximal runs of cell indices.

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace dsieve {

/// Inclusive range of cell indices.
struct CellRun {
  mpz_class first;
  mpz_class last;

  mpz_class size() const { return last - first + 1; }
  friend bool operator==(const CellRun&, const CellRun&) = default;
};

class RunSet {
 public:
  RunSet() = default;
  explicit RunSet(unsigned level) : level_(level) {}

  /// All 2^level cells.
  static RunSet full(unsigned level);
  /// Sorts, clips to the grid and merges overlapping or adjacent runs.
  static RunSet from_runs(unsigned level, std::vector<CellRun> runs);

  unsigned level() const { return level_; }
  const std::vector<CellRun>& runs() const { return runs_; }
  const mpz_class& count() const { return count_; }
  bool empty() const { return runs_.empty(); }
  mpq_class measure() const;

  bool contains(const mpz_class& cell) const;
  /// The index-th cell in increasing order (0-based), if it exists.
  std::optional<mpz_class> nth_cell(const mpz_class& index) const;

  /// Every run [a,b] becomes [a*2^d, (b+1)*2^d - 1], d = new_level - level.
  RunSet refined(unsigned new_level) const;
  RunSet minus(const RunSet& other) const;
  RunSet intersect(const RunSet& other) const;

  /// True when runs are sorted, disjoint, non-adjacent and inside the grid,
  /// and the cached count matches.
  bool well_formed() const;

  friend bool operator==(const RunSet& a, const RunSet& b) { return a.level_ == b.level_ && a.runs_ == b.runs_; }

  /// Appends runs in non-decreasing order of `first`, merging on the fly.
  class Builder {
   public:
    explicit Builder(unsigned level);
    void add(mpz_class first, mpz_class last);
    RunSet finish() &&;

   private:
    unsigned level_;
    mpz_class max_cell_;
    std::vector<CellRun> runs_;
  };

 private:
  unsigned level_ = 0;
  std::vector<CellRun> runs_;
  mpz_class count_ = 0;
};

RunSet refine(const RunSet& s, unsigned new_level);
RunSet subtract(const RunSet& survivors, const RunSet& cover);
mpq_class measure(const RunSet& s);

}  // namespace dsieve
