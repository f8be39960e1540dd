#include "carlab/rational.hpp"

#include "carlab/errors.hpp"

#include <cctype>
#include <ostream>

namespace carlab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational::Rational(long numerator, long denominator) {
  if (denominator == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  q_ = mpq_class(numerator, denominator);
  q_.canonicalize();
}

Rational::Rational(const mpz_class& numerator, const mpz_class& denominator) {
  if (sgn(denominator) == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  q_ = mpq_class(numerator, denominator);
  q_.canonicalize();
}

Rational::Rational(mpq_class value) : q_(std::move(value)) { q_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw Error(ErrorCode::ParseError, "malformed rational \"" + std::string(text) + "\"");
  }
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (sgn(d) == 0) throw Error(ErrorCode::ParseError, "zero denominator in \"" + std::string(text) + "\"");
  if (negative) n = -n;
  return Rational(n, d);
}

std::string Rational::str() const {
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero");
  q_ /= rhs.q_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

unsigned __int128 scaled_floor(const Rational& r, unsigned bits) {
  mpz_class scaled = r.numerator();
  scaled <<= bits;
  scaled /= r.denominator();  // truncation == floor for nonnegative r
  unsigned __int128 out = 0;
  // At most bits+1 significant bits; read out 64 at a time.
  mpz_class hi = scaled >> 64;
  mpz_class lo = scaled - (hi << 64);
  const auto to_u64 = [](const mpz_class& z) {
    std::uint64_t v = 0;
    mpz_export(&v, nullptr, -1, sizeof(v), 0, 0, z.get_mpz_t());
    return v;
  };
  out = (static_cast<unsigned __int128>(to_u64(hi)) << 64) | to_u64(lo);
  return out;
}

}  // namespace carlab
