#include "autocrat/rational.hpp"

#include <cctype>

namespace autocrat {

namespace {

bool valid_integer(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational rational_from_string(std::string_view text) {
  const std::string original(text);
  if (text.empty()) throw RationalParseError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!valid_integer(num) || !valid_integer(den))
      throw RationalParseError("bad rational literal: " + original);
    Rational r(std::string(num) + "/" + std::string(den), 10);
    if (r.get_den() == 0) throw RationalParseError("zero denominator: " + original);
    r.canonicalize();
    return r;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole = negative ? "-0" : "0";
    if (frac.empty() || !valid_integer(std::string(frac)) || !valid_integer(whole))
      throw RationalParseError("bad decimal literal: " + original);
    mpz_class digits(std::string(whole) + std::string(frac), 10);
    mpz_class den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rational r(digits, den);
    r.canonicalize();
    return r;
  }

  if (!valid_integer(text)) throw RationalParseError("bad integer literal: " + original);
  return Rational(std::string(text), 10);
}

Rational rational_from_double(double value) {
  Rational r;
  mpq_set_d(r.get_mpq_t(), value);
  return r;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

}  // namespace autocrat
