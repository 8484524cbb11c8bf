#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace autocrat {

// Exact rational arithmetic is backed by GMP. Values parsed from text keep
// decimal semantics ("0.9" == 9/10); doubles convert via their exact binary
// expansion, which can magnify near-ties in certification.
using Rational = mpq_class;

// Accepts "p/q", integers, and plain decimal literals ("-1.25").
Rational rational_from_string(std::string_view text);

Rational rational_from_double(double value);

// Renders "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& value);

struct RationalParseError : std::runtime_error {
  explicit RationalParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace autocrat
