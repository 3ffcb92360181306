#include "dsieve/real_interval.hpp"

#include <algorithm>
#include <array>

#include "dsieve/errors.hpp"
#include "dsieve/rational.hpp"

namespace dsieve {

mpq_class Mpfr::to_mpq() const {
  if (!mpfr_number_p(v_)) throw PrecisionCeiling("non-finite MPFR value in enclosure");
  if (mpfr_zero_p(v_)) return mpq_class(0);
  mpz_class m;
  const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
  mpq_class r(m);
  r *= pow2(static_cast<long>(e));
  r.canonicalize();
  return r;
}

RealInterval::RealInterval(unsigned precision) : lo_(precision), hi_(precision) {
  mpfr_set_zero(lo_.get(), 1);
  mpfr_set_zero(hi_.get(), 1);
}

RealInterval RealInterval::of(const mpq_class& q, unsigned precision) {
  Mpfr lo(precision), hi(precision);
  mpfr_set_q(lo.get(), q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.get(), q.get_mpq_t(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval RealInterval::of(long v, unsigned precision) { return of(mpq_class(v), precision); }

RealInterval RealInterval::hull(const mpq_class& lo_q, const mpq_class& hi_q, unsigned precision) {
  if (lo_q > hi_q) throw ParameterError("interval hull with lo > hi");
  Mpfr lo(precision), hi(precision);
  mpfr_set_q(lo.get(), lo_q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.get(), hi_q.get_mpq_t(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

bool RealInterval::contains(const mpq_class& q) const {
  return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
}

double RealInterval::relative_width() const {
  Mpfr w(precision());
  mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  mpfr_div(w.get(), w.get(), lo_.get(), MPFR_RNDU);
  return mpfr_get_d(w.get(), MPFR_RNDU);
}

namespace {

unsigned prec_of(const RealInterval& a, const RealInterval& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
  const unsigned p = prec_of(a, b);
  Mpfr lo(p), hi(p);
  mpfr_add(lo.get(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_add(hi.get(), a.hi(), b.hi(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval operator-(const RealInterval& a, const RealInterval& b) {
  const unsigned p = prec_of(a, b);
  Mpfr lo(p), hi(p);
  mpfr_sub(lo.get(), a.lo(), b.hi(), MPFR_RNDD);
  mpfr_sub(hi.get(), a.hi(), b.lo(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
  const unsigned p = prec_of(a, b);
  const std::array<std::pair<mpfr_srcptr, mpfr_srcptr>, 4> corners{{{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}}};
  Mpfr lo(p), hi(p), t(p);
  bool first = true;
  for (const auto& [x, y] : corners) {
    mpfr_mul(t.get(), x, y, MPFR_RNDD);
    if (first || mpfr_less_p(t.get(), lo.get())) mpfr_set(lo.get(), t.get(), MPFR_RNDD);
    mpfr_mul(t.get(), x, y, MPFR_RNDU);
    if (first || mpfr_greater_p(t.get(), hi.get())) mpfr_set(hi.get(), t.get(), MPFR_RNDU);
    first = false;
  }
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval operator/(const RealInterval& a, const RealInterval& b) {
  if (mpfr_sgn(b.lo()) <= 0 && mpfr_sgn(b.hi()) >= 0) throw ParameterError("interval division by an interval containing zero");
  const unsigned p = prec_of(a, b);
  const std::array<std::pair<mpfr_srcptr, mpfr_srcptr>, 4> corners{{{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}}};
  Mpfr lo(p), hi(p), t(p);
  bool first = true;
  for (const auto& [x, y] : corners) {
    mpfr_div(t.get(), x, y, MPFR_RNDD);
    if (first || mpfr_less_p(t.get(), lo.get())) mpfr_set(lo.get(), t.get(), MPFR_RNDD);
    mpfr_div(t.get(), x, y, MPFR_RNDU);
    if (first || mpfr_greater_p(t.get(), hi.get())) mpfr_set(hi.get(), t.get(), MPFR_RNDU);
    first = false;
  }
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval RealInterval::exp() const {
  Mpfr lo(precision()), hi(precision());
  mpfr_exp(lo.get(), lo_.get(), MPFR_RNDD);
  mpfr_exp(hi.get(), hi_.get(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval RealInterval::log() const {
  if (mpfr_sgn(lo_.get()) <= 0) throw ParameterError("log of a non-positive interval");
  Mpfr lo(precision()), hi(precision());
  mpfr_log(lo.get(), lo_.get(), MPFR_RNDD);
  mpfr_log(hi.get(), hi_.get(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval RealInterval::sqrt() const {
  if (mpfr_sgn(lo_.get()) < 0) throw ParameterError("sqrt of a negative interval");
  Mpfr lo(precision()), hi(precision());
  mpfr_sqrt(lo.get(), lo_.get(), MPFR_RNDD);
  mpfr_sqrt(hi.get(), hi_.get(), MPFR_RNDU);
  return RealInterval(std::move(lo), std::move(hi));
}

RealInterval RealInterval::pow(const mpq_class& e) const {
  if (mpfr_sgn(lo_.get()) <= 0) throw ParameterError("pow of a non-positive interval");
  const unsigned p = precision();
  // x^e is monotone in x for fixed e and monotone in e for fixed x > 0, so the
  // extremes sit at the corners of [x] x [e].
  Mpfr e_lo(p + 64), e_hi(p + 64);
  mpfr_set_q(e_lo.get(), e.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(e_hi.get(), e.get_mpq_t(), MPFR_RNDU);
  const std::array<std::pair<mpfr_srcptr, mpfr_srcptr>, 4> corners{{{lo_.get(), e_lo.get()}, {lo_.get(), e_hi.get()}, {hi_.get(), e_lo.get()}, {hi_.get(), e_hi.get()}}};
  Mpfr lo(p), hi(p), t(p);
  bool first = true;
  for (const auto& [x, y] : corners) {
    mpfr_pow(t.get(), x, y, MPFR_RNDD);
    if (first || mpfr_less_p(t.get(), lo.get())) mpfr_set(lo.get(), t.get(), MPFR_RNDD);
    mpfr_pow(t.get(), x, y, MPFR_RNDU);
    if (first || mpfr_greater_p(t.get(), hi.get())) mpfr_set(hi.get(), t.get(), MPFR_RNDU);
    first = false;
  }
  return RealInterval(std::move(lo), std::move(hi));
}

Tri certainly_ge(const RealInterval& a, const RealInterval& b) {
  if (mpfr_greaterequal_p(a.lo(), b.hi())) return Tri::yes;
  if (mpfr_less_p(a.hi(), b.lo())) return Tri::no;
  return Tri::unknown;
}

Tri certainly_ge(const RealInterval& a, const mpq_class& b) {
  if (mpfr_cmp_q(a.lo(), b.get_mpq_t()) >= 0) return Tri::yes;
  if (mpfr_cmp_q(a.hi(), b.get_mpq_t()) < 0) return Tri::no;
  return Tri::unknown;
}

Tri certainly_le(const RealInterval& a, const mpq_class& b) {
  if (mpfr_cmp_q(a.hi(), b.get_mpq_t()) <= 0) return Tri::yes;
  if (mpfr_cmp_q(a.lo(), b.get_mpq_t()) > 0) return Tri::no;
  return Tri::unknown;
}

}  // namespace dsieve
