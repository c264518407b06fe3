#include "lamplighter/numeric.hpp"

#include <cctype>

namespace lamplighter {

namespace {

Rational parse_decimal(std::string_view text) {
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool negative = false;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++scale;
    } else {
      throw std::invalid_argument("not a number: " + std::string(text));
    }
  }
  if (digits.empty()) throw std::invalid_argument("not a number: " + std::string(text));
  mpz_class num(digits);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(scale));
  Rational q(negative ? mpz_class(-num) : num, den);
  q.canonicalize();
  return q;
}

}  // namespace

Probability Probability::parse(std::string_view text) {
  auto slash = text.find('/');
  Rational q;
  if (slash == std::string_view::npos) {
    bool plain = text.find_first_of("eE") == std::string_view::npos;
    if (!plain) return from_double(std::stod(std::string(text)));
    q = parse_decimal(text);
  } else {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (sgn(den) == 0) throw std::invalid_argument("zero denominator in " + std::string(text));
    q = num / den;
  }
  return from_rational(q);
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace lamplighter
