#pragma once

#include <Eigen/Core>
#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace carlab {

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Thin value wrapper over GMP's mpq_class so that it behaves
/// like an ordinary arithmetic type inside Eigen expressions.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : q_(value) {}   // NOLINT(google-explicit-constructor)
  Rational(long numerator, long denominator);
  explicit Rational(const mpz_class& numerator, const mpz_class& denominator = 1);
  explicit Rational(mpq_class value);

  /// Parses "p/q" or "p" (optional leading '-'). Throws ParseError on
  /// malformed text or a zero denominator.
  static Rational parse(std::string_view text);

  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  /// Always "num/den", e.g. "1/3", "0/1", "-5/2".
  std::string str() const;
  explicit operator double() const { return q_.get_d(); }

  bool is_zero() const { return sgn(q_) == 0; }
  int sign() const { return sgn(q_); }

  Rational& operator+=(const Rational& rhs) { q_ += rhs.q_; return *this; }
  Rational& operator-=(const Rational& rhs) { q_ -= rhs.q_; return *this; }
  Rational& operator*=(const Rational& rhs) { q_ *= rhs.q_; return *this; }
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  mpq_class q_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

/// floor(r * 2^bits) for 0 <= r <= 1, as an unsigned 128-bit integer.
unsigned __int128 scaled_floor(const Rational& r, unsigned bits);

inline double to_double(const Rational& r) { return static_cast<double>(r); }
inline double to_double(double x) { return x; }

}  // namespace carlab

namespace Eigen {

template <>
struct NumTraits<carlab::Rational> : GenericNumTraits<carlab::Rational> {
  using Real = carlab::Rational;
  using NonInteger = carlab::Rational;
  using Nested = carlab::Rational;
  using Literal = carlab::Rational;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };

  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
  static int digits10() { return 0; }
};

}  // namespace Eigen
