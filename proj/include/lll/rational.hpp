// Exact rational arithmetic helpers on top of GMP's mpq_class.
//
// Every inequality the engine certifies is decided over exact rationals;
// doubles appear only in diagnostics (surface meshes, finite differences).
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace lll {

using Rat = mpq_class;
using Int = mpz_class;

// 2^-e as an exact rational, e >= 0.
Rat pow2_inv(unsigned e);

// Parse "num/den" or a bare integer "num". Whitespace is not accepted.
// Throws Error(ParseError) on malformed input or a zero denominator.
// The result is canonicalized, so inputs need not be in lowest terms.
Rat rat_parse(const std::string& s);

// Canonical "num/den" rendering with an explicit denominator ("3/1", "0/1").
std::string rat_str(const Rat& q);

// Exact square root when the canonical numerator and denominator are both
// perfect squares; nullopt otherwise (including all negative inputs).
std::optional<Rat> rat_sqrt_exact(const Rat& q);

// Smallest integer multiple of 2^-bits that is >= q. Acts as the identity
// on values that already are such multiples.
Rat ceil_dyadic(const Rat& q, unsigned bits);

double to_double(const Rat& q);

}  // namespace lll
