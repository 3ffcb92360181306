#pragma once

// Increasing sequences t_1 < t_2 < ... with certified term enclosures, the
// 3-smooth (and general p-smooth) generator, the growth index
// H(n, tau) = min{k : t_{n+k}/t_n >= tau}, and growth-class verification.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dsieve/real_interval.hpp"

namespace dsieve {

/// Terms supplied verbatim (exact rationals).
struct ExplicitList {
  std::vector<mpq_class> terms;
};

/// t_n = first * ratio^(n-1).
struct Geometric {
  mpq_class ratio;
  mpq_class first{1};
};

/// t_n = slope * n + offset.
struct Affine {
  mpq_class slope{1};
  mpq_class offset{0};
};

/// t_1 = first, t_{n+1} = t_n * (1 + gamma * n^(-beta)), 0 <= beta < 1.
struct Sublacunary {
  mpq_class gamma;
  mpq_class beta;
  mpq_class first{1};
};

/// t_n = scale * exp(n^beta), 0 < beta < 1.
struct Subexponential {
  mpq_class beta;
  mpq_class scale{1};
};

/// Increasing enumeration of the integers whose prime factors all lie in `primes`.
struct SmoothNumbers {
  std::vector<unsigned long> primes{2, 3};
};

struct SequenceSpec {
  std::variant<ExplicitList, Geometric, Affine, Sublacunary, Subexponential, SmoothNumbers> kind;

  /// Throws ParameterError if parameters are outside their documented range.
  void validate() const;
  /// True when every term is an exact rational.
  bool exact() const;
  std::string kind_name() const;
  std::string describe() const;
};

/// Certified bounds lower <= t_n <= upper. Exact kinds have lower == upper.
struct TermEnclosure {
  mpq_class lower;
  mpq_class upper;
  unsigned precision = kDefaultPrecision;

  bool exact() const { return lower == upper; }
};

/// Streaming k-way merge producing p-smooth numbers in increasing order.
/// Memory is proportional to the number of values produced so far.
class SmoothGenerator {
 public:
  explicit SmoothGenerator(std::vector<unsigned long> primes = {2, 3});
  const mpz_class& next();
  std::size_t produced() const { return out_.size(); }
  const std::vector<mpz_class>& values() const { return out_; }

 private:
  std::vector<unsigned long> primes_;
  std::vector<std::size_t> cursor_;
  std::vector<mpz_class> candidate_;
  std::vector<mpz_class> out_;
};

/// Memoizing view of a sequence at a working precision. Not thread-safe; each
/// computation owns its own instance.
class Sequence {
 public:
  explicit Sequence(SequenceSpec spec, unsigned precision = kDefaultPrecision);

  const SequenceSpec& spec() const { return spec_; }
  unsigned precision() const { return precision_; }
  bool exact() const { return exact_; }

  const TermEnclosure& at(std::int64_t n);
  /// Doubles the working precision and drops cached enclosures. Throws
  /// PrecisionCeiling past kMaxPrecision.
  void raise_precision();

 private:
  void extend_to(std::int64_t n);

  SequenceSpec spec_;
  unsigned precision_;
  bool exact_;
  std::vector<TermEnclosure> cache_;  // cache_[n-1]
  std::optional<SmoothGenerator> smooth_;
  std::optional<RealInterval> running_;  // sublacunary running product
};

TermEnclosure term(const SequenceSpec& spec, std::int64_t n, unsigned precision = kDefaultPrecision);

/// Minimal k >= 1 with certified t_{n+k} / t_n >= tau, raising precision until
/// each comparison is decidable. Throws PrecisionCeiling or BudgetExceeded.
std::int64_t growth_index(Sequence& seq, std::int64_t n, const mpq_class& tau, std::int64_t max_steps = 10'000'000);
std::int64_t growth_index(const SequenceSpec& spec, std::int64_t n, const mpq_class& tau);

struct SmoothCount {
  std::size_t count;
};
struct SmoothBound {
  mpz_class bound;
};

std::vector<mpz_class> smooth_terms(SmoothCount limit, const std::vector<unsigned long>& primes = {2, 3});
std::vector<mpz_class> smooth_terms(SmoothBound limit, const std::vector<unsigned long>& primes = {2, 3});

/// t_{n+1}/t_n >= 1 + gamma * n^(-beta).
struct SublacunaryClass {
  mpq_class gamma;
  mpq_class beta;
};

/// gamma1 * exp(n^beta) <= t_n <= gamma2 * exp(n^beta); an absent bound is not checked.
struct SubexponentialClass {
  std::optional<mpq_class> gamma1;
  std::optional<mpq_class> gamma2;
  mpq_class beta;
};

using GrowthClass = std::variant<SublacunaryClass, SubexponentialClass>;

enum class Verdict { pass, fail, undecidable };
std::string to_string(Verdict v);

struct GrowthReport {
  Verdict verdict = Verdict::pass;
  std::optional<std::int64_t> first_violation;
  std::string violated_side;  // "ratio", "lower", "upper"
  /// Tightest certified constants over the range. Sublacunary: fitted[0] is the
  /// largest gamma that holds everywhere. Subexponential: certified lower bound of
  /// min t_n e^{-n^b} and upper bound of max t_n e^{-n^b}.
  std::vector<mpq_class> fitted;
};

GrowthReport verify_growth_class(const SequenceSpec& spec, const GrowthClass& cls, std::int64_t n_lo, std::int64_t n_hi,
                                 unsigned precision = kDefaultPrecision);

}  // namespace dsieve
