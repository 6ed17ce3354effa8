#include "lll/rational.hpp"

#include <cctype>

#include "lll/errors.hpp"

namespace lll {

Rat pow2_inv(unsigned e) {
  Int den = 1;
  den <<= e;
  Rat q(1);
  q /= Rat(den);
  return q;
}

namespace {

bool valid_int_token(const std::string& s, bool allow_sign) {
  if (s.empty()) return false;
  std::size_t i = (allow_sign && s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rat rat_parse(const std::string& s) {
  std::size_t slash = s.find('/');
  std::string num = (slash == std::string::npos) ? s : s.substr(0, slash);
  std::string den = (slash == std::string::npos) ? "1" : s.substr(slash + 1);
  // The sign lives on the numerator; "1/-2" is rejected, not normalized.
  if (!valid_int_token(num, true) || !valid_int_token(den, false)) {
    fail(ErrorKind::ParseError, "malformed rational \"" + s + "\"",
         {{"value", s}});
  }
  Int n(num), d(den);
  if (d == 0) {
    fail(ErrorKind::ParseError, "zero denominator in \"" + s + "\"",
         {{"value", s}});
  }
  Rat q(n);
  q /= Rat(d);
  return q;
}

std::string rat_str(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::optional<Rat> rat_sqrt_exact(const Rat& q) {
  if (sgn(q) < 0) return std::nullopt;
  const Int& num = q.get_num();
  const Int& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) ||
      !mpz_perfect_square_p(den.get_mpz_t())) {
    return std::nullopt;
  }
  Int rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  Rat r(rn);
  r /= Rat(rd);
  return r;
}

Rat ceil_dyadic(const Rat& q, unsigned bits) {
  Int scaled_num = q.get_num();
  scaled_num <<= bits;
  Int units;
  mpz_cdiv_q(units.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
  Int scale = 1;
  scale <<= bits;
  Rat r(units);
  r /= Rat(scale);
  return r;
}

double to_double(const Rat& q) { return q.get_d(); }

}  // namespace lll
