#pragma once

// Hausdorff-dimension lower bounds from Cantor-like nested constructions.
//
// Two series are supported:
//   Eggleston   term_k = (D_{k-1}/D_k) / (R_k D_k^nu),  D_0 = 1
//   checkpoint  term_k = eta^-k (t_{n_k}/delta(n_k))^nu / (t_{n_{k-1}}/delta(n_{k-1}))
// Convergence is only certified for sources with a closed-form stationary
// term ratio; everything else is reported as inconclusive with diagnostics.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dsieve/schedule.hpp"
#include "dsieve/sequence.hpp"
#include "dsieve/sieve.hpp"

namespace dsieve {

struct EgglestonStage {
  mpq_class width;     // D_k
  mpz_class count;     // R_k
  mpz_class children;  // N_k
};

/// D_k = sigma^-k, R_k = m^k.
struct GeometricFamily {
  mpz_class sigma;
  mpz_class m;
};

struct EgglestonData {
  std::vector<EgglestonStage> stages;  // k = 1, 2, ...
  std::optional<GeometricFamily> family;

  /// R_{k+1} = R_k N_{k+1}, R_1 = N_1, and widths strictly decrease below 1.
  bool well_formed() const;
};

EgglestonData eggleston_geometric(const mpz_class& sigma, const mpz_class& m, std::size_t stages);

/// Stage k+1 is the k-th checkpoint of the path: width 2^-l, N = surviving
/// children observed inside the chosen parent.
EgglestonData harvest(const Certificate& cert);

struct ChainSource {
  SequenceSpec spec;
  Schedule schedule;
  CheckpointChain chain;
};

using SeriesSource = std::variant<EgglestonData, ChainSource>;

enum class SeriesVerdict { convergent, divergent, inconclusive };
std::string to_string(SeriesVerdict v);

struct SeriesTerm {
  std::size_t k = 0;
  mpq_class lower;
  mpq_class upper;
  std::optional<mpq_class> ratio_lower;  // term_k / term_{k-1}
  std::optional<mpq_class> ratio_upper;
  mpq_class partial_lower;
  mpq_class partial_upper;
};

struct SeriesReport {
  mpq_class nu;
  std::vector<SeriesTerm> terms;
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  std::string family;  // "eggleston-geometric", "stationary-chain", or "none"
  std::optional<mpq_class> closed_ratio_lower;
  std::optional<mpq_class> closed_ratio_upper;
  std::optional<std::size_t> k0;
  std::optional<mpq_class> q;
  std::optional<mpq_class> tail_bound;  // bound on the full sum when convergent
  std::string note;
};

SeriesReport series_terms(const SeriesSource& source, const mpq_class& nu, std::size_t k_max,
                          unsigned precision = kDefaultPrecision);

struct DimensionProbe {
  mpq_class nu;
  SeriesVerdict verdict;
};

struct DimensionReport {
  mpq_class nu_star;   // largest probed nu with a certified-convergent series, 0 if none
  mpq_class nu_upper;  // smallest probed nu not certified convergent
  std::vector<DimensionProbe> probes;
  std::vector<mpq_class> inconclusive;
  mpq_class epsilon;
};

/// Bisection over (0, 1] until nu_upper - nu_star <= epsilon. Inconclusive
/// probes shrink the upper end and are listed, never treated as convergent.
DimensionReport dimension_lower_bound(const SeriesSource& source, const mpq_class& epsilon, std::size_t k_max,
                                      unsigned precision = kDefaultPrecision);

/// Columns k, term, ratio, partial_sum with 20 significant digits.
std::string series_csv(const SeriesReport& report);

}  // namespace dsieve
