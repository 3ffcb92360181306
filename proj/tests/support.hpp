#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>

#include "dsieve/schedule.hpp"
#include "dsieve/sequence.hpp"

namespace testing {

/// Seeded generator for property tests; every suite gets a fixed seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }
  /// Uniform p/q with 1 <= q <= max_den and lo <= p/q <= hi.
  mpq_class rational(const mpq_class& lo, const mpq_class& hi, long max_den = 64) {
    const long q = integer(1, max_den);
    const mpz_class p_lo = ceil_z(lo * q);
    const mpz_class p_hi = floor_z(hi * q);
    if (p_lo > p_hi) return lo;
    const std::int64_t span = mpz_class(p_hi - p_lo).get_si();
    mpq_class r(p_lo + integer(0, span), q);
    r.canonicalize();
    return r;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  static mpz_class floor_z(const mpq_class& x) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
  }
  static mpz_class ceil_z(const mpq_class& x) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
  }
  std::mt19937_64 rng_;
};

inline dsieve::SequenceSpec geometric(const mpq_class& q, const mpq_class& first = 1) {
  return dsieve::SequenceSpec{dsieve::Geometric{q, first}};
}

inline dsieve::SequenceSpec smooth() { return dsieve::SequenceSpec{dsieve::SmoothNumbers{}}; }

inline dsieve::SequenceSpec explicit_list(std::vector<mpq_class> terms) {
  return dsieve::SequenceSpec{dsieve::ExplicitList{std::move(terms)}};
}

/// t_n = 4^n with h = 5, delta = 1/256, eta = 1/2.
inline dsieve::SequenceSpec toy_spec() { return geometric(4, 4); }
inline dsieve::Schedule toy_schedule(const mpq_class& delta = mpq_class(1, 256), const mpq_class& eta = mpq_class(1, 2)) {
  return dsieve::constant_schedule(5, delta, eta);
}

}  // namespace testing
