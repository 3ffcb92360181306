#include "dsieve/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <mpfr.h>

#include "dsieve/errors.hpp"

namespace dsieve {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) digits.remove_prefix(1);
  if (!all_digits(digits)) throw ParameterError("malformed rational: '" + std::string(whole) + "'");
  std::string text(s.front() == '+' ? s.substr(1) : s);
  return mpz_class(text, 10);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

mpq_class parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ParameterError("empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(trim(s.substr(0, slash)), s);
    mpz_class den = parse_integer(trim(s.substr(slash + 1)), s);
    if (den == 0) throw ParameterError("zero denominator in '" + std::string(s) + "'");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }

  // Decimal with optional fraction and exponent.
  std::string_view mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    std::string exp_text(s.substr(e + 1));
    std::string_view digits = exp_text;
    if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) digits.remove_prefix(1);
    if (!all_digits(digits) || digits.size() > 9) throw ParameterError("malformed exponent in '" + std::string(s) + "'");
    exponent = std::strtol(exp_text.c_str(), nullptr, 10);
  }
  std::string digits;
  bool negative = false;
  std::string_view m = mantissa;
  if (!m.empty() && (m.front() == '+' || m.front() == '-')) {
    negative = m.front() == '-';
    m.remove_prefix(1);
  }
  const auto dot = m.find('.');
  std::string_view int_part = m.substr(0, dot);
  std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : m.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) throw ParameterError("malformed rational: '" + std::string(s) + "'");
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
    throw ParameterError("malformed rational: '" + std::string(s) + "'");
  digits.append(int_part);
  digits.append(frac_part);
  exponent -= static_cast<long>(frac_part.size());

  mpq_class q(mpz_class(digits, 10));
  if (negative) q = -q;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0)
    q /= ten_pow;
  else
    q *= ten_pow;
  q.canonicalize();
  return q;
}

std::string to_string(const mpq_class& q) { return q.get_str(10); }
std::string to_string(const mpz_class& z) { return z.get_str(10); }

std::string to_decimal(const mpq_class& q, int digits) {
  mpfr_t x;
  mpfr_init2(x, 256);
  mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
  char* out = nullptr;
  mpfr_asprintf(&out, "%.*Rg", digits, x);
  std::string result(out);
  mpfr_free_str(out);
  mpfr_clear(x);
  return result;
}

mpz_class floor_of(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

mpz_class ceil_of(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

long floor_log2(const mpq_class& q) {
  if (sgn(q) <= 0) throw ParameterError("floor_log2 of a non-positive value");
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  long l = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) - static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  // 2^(l-1) < q < 2^(l+1); settle which side of 2^l we are on.
  if (q < pow2(l)) --l;
  return l;
}

mpz_class pow2_int(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

mpq_class pow2(long e) {
  if (e >= 0) return mpq_class(pow2_int(static_cast<unsigned long>(e)));
  return mpq_class(mpz_class(1), pow2_int(static_cast<unsigned long>(-e)));
}

mpq_class pow(const mpq_class& base, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

bool is_dyadic(const mpq_class& q) { return mpz_popcount(q.get_den_mpz_t()) == 1; }

namespace {

mpq_class round_dyadic(const mpq_class& q, unsigned bits, bool up) {
  if (bits == 0) throw ParameterError("dyadic rounding needs at least one bit");
  if (sgn(q) == 0) return q;
  // Scale |q| into [2^(bits-1), 2^bits), round the integer part, scale back.
  const mpq_class a = abs(q);
  const long shift = static_cast<long>(bits) - 1 - floor_log2(a);
  const mpq_class scaled = a * pow2(shift);
  const bool toward_larger_magnitude = (sgn(q) > 0) == up;
  mpz_class m = toward_larger_magnitude ? ceil_of(scaled) : floor_of(scaled);
  mpq_class r = mpq_class(m) * pow2(-shift);
  r.canonicalize();
  return sgn(q) > 0 ? r : mpq_class(-r);
}

}  // namespace

mpq_class round_up_dyadic(const mpq_class& q, unsigned bits) { return round_dyadic(q, bits, true); }
mpq_class round_down_dyadic(const mpq_class& q, unsigned bits) { return round_dyadic(q, bits, false); }

mpq_class dist_to_int(const mpq_class& x) {
  mpq_class frac = x - mpq_class(floor_of(x));
  mpq_class other = 1 - frac;
  return frac < other ? frac : other;
}

}  // namespace dsieve
