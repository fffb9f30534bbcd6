#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace torushom {

using BigInt = mpz_class;
using Rational = mpq_class;

/// num / den in lowest terms (mpq_class(num, den) alone does not reduce).
Rational ratio(const BigInt& num, const BigInt& den);

/// Parses "p/q", "p" or a plain decimal such as "1.25" into an exact rational.
/// Throws Error(ErrorCode::Config) on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& value);
std::string to_string(const BigInt& value);

BigInt power(const BigInt& base, unsigned long exponent);
Rational power(const Rational& base, unsigned long exponent);

/// Natural log of a positive big integer, accurate for values far beyond double range.
double log_of(const BigInt& value);
double log_of(const Rational& value);

}  // namespace torushom
