#pragma once

// Directed-rounding interval arithmetic over MPFR. Every irrational quantity in
// the library (exp(n^b), logarithms, fractional powers) is carried as a
// RealInterval whose endpoints are exact dyadic rationals.

#include <gmpxx.h>
#include <mpfr.h>

#include <utility>

namespace dsieve {

inline constexpr unsigned kDefaultPrecision = 128;
inline constexpr unsigned kMaxPrecision = 4096;

/// Outcome of a conservative comparison.
enum class Tri { no, yes, unknown };

/// Owning wrapper around mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(unsigned precision) { mpfr_init2(v_, static_cast<mpfr_prec_t>(precision)); }
  Mpfr(const Mpfr& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Mpfr& operator=(Mpfr o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }

  /// Exact rational value (MPFR numbers are dyadic). Must be finite.
  mpq_class to_mpq() const;

 private:
  mpfr_t v_;
};

class RealInterval {
 public:
  explicit RealInterval(unsigned precision = kDefaultPrecision);

  /// Tightest enclosure of q at the given precision.
  static RealInterval of(const mpq_class& q, unsigned precision = kDefaultPrecision);
  static RealInterval of(long v, unsigned precision = kDefaultPrecision);
  static RealInterval hull(const mpq_class& lo, const mpq_class& hi, unsigned precision = kDefaultPrecision);

  mpq_class lower() const { return lo_.to_mpq(); }
  mpq_class upper() const { return hi_.to_mpq(); }
  mpfr_srcptr lo() const { return lo_.get(); }
  mpfr_srcptr hi() const { return hi_.get(); }
  unsigned precision() const { return lo_.precision(); }

  bool contains(const mpq_class& q) const;
  bool is_point() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }
  /// (hi - lo) / lo as a double; for diagnostics and width assertions.
  double relative_width() const;

  friend RealInterval operator+(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator-(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator*(const RealInterval& a, const RealInterval& b);
  /// Divisor must be strictly positive or strictly negative.
  friend RealInterval operator/(const RealInterval& a, const RealInterval& b);

  RealInterval exp() const;
  /// Natural logarithm; requires a strictly positive interval.
  RealInterval log() const;
  /// x^e for a strictly positive interval and exact rational exponent.
  RealInterval pow(const mpq_class& e) const;
  RealInterval sqrt() const;

 private:
  RealInterval(Mpfr lo, Mpfr hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}
  Mpfr lo_;
  Mpfr hi_;
};

/// Certified a >= b: yes if a.lo >= b.hi, no if a.hi < b.lo.
Tri certainly_ge(const RealInterval& a, const RealInterval& b);
Tri certainly_ge(const RealInterval& a, const mpq_class& b);
Tri certainly_le(const RealInterval& a, const mpq_class& b);

}  // namespace dsieve
