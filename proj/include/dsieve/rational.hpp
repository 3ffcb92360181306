#pragma once

// Exact integer/rational helpers on top of GMP's C++ classes.

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dsieve {

/// Parses "p/q", "p", or a finite decimal such as "0.125" or "-3e-2".
/// Throws ParameterError on malformed input or a zero denominator.
mpq_class parse_rational(std::string_view text);

std::string to_string(const mpq_class& q);
std::string to_string(const mpz_class& z);

/// Decimal rendering with `digits` significant digits, for diagnostics only.
std::string to_decimal(const mpq_class& q, int digits = 20);

mpz_class floor_of(const mpq_class& q);
mpz_class ceil_of(const mpq_class& q);

/// floor(log2(q)) for q > 0, exact.
long floor_log2(const mpq_class& q);

/// 2^e for any integer e.
mpq_class pow2(long e);
mpz_class pow2_int(unsigned long e);

mpq_class pow(const mpq_class& base, unsigned long e);

bool is_dyadic(const mpq_class& q);

/// Smallest dyadic rational with at most `bits` significant bits that is >= q.
mpq_class round_up_dyadic(const mpq_class& q, unsigned bits);
/// Largest dyadic rational with at most `bits` significant bits that is <= q.
mpq_class round_down_dyadic(const mpq_class& q, unsigned bits);

/// Distance from x to the nearest integer.
mpq_class dist_to_int(const mpq_class& x);

}  // namespace dsieve
