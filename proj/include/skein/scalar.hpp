#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace skein {

using Rat = mpq_class;
using BFloat = boost::multiprecision::mpfr_float;

// Numeric thresholds used throughout. `bits` is the mpfr mantissa size for
// float-mode work, `zero_eps` the magnitude below which a float value counts
// as zero in relation checks, `rank_eps` the singular-value cutoff for
// numeric ranks.
struct Tolerance {
  unsigned bits = 128;
  double zero_eps = 1e-20;
  double rank_eps = 1e-8;
};

// Sets the default mpfr mantissa size (in bits) for newly created BFloat
// values. Call once at startup before any float-mode computation.
void set_float_bits(unsigned bits);
unsigned float_bits();

// The real field Q(delta), delta = 2cos(pi/N), presented by the minimal
// polynomial of delta over Q. Elements live in the power basis
// 1, delta, ..., delta^{d-1}.
class CycField {
 public:
  explicit CycField(int N);

  int N() const { return N_; }
  int degree() const { return static_cast<int>(minpoly_.size()) - 1; }
  // Monic minimal polynomial, minpoly_[i] = coefficient of x^i.
  const std::vector<Rat>& minpoly() const { return minpoly_; }
  // delta as a float at the current default precision.
  BFloat delta_float() const;

  bool operator==(const CycField& o) const { return N_ == o.N_; }

 private:
  int N_;
  std::vector<Rat> minpoly_;
};

using FieldPtr = std::shared_ptr<const CycField>;

// Returns a shared field object for Q(2cos(pi/N)); repeated calls with the
// same N return the same object.
FieldPtr field_for(int N);

// A scalar: either an exact element of Q(delta) (coefficient vector over the
// power basis) or an arbitrary-precision float. Arithmetic promotes to float
// as soon as either operand is float; sqrt always yields a float.
class Scalar {
 public:
  Scalar() : fl_(0) {}                         // float 0
  explicit Scalar(double v) : fl_(v) {}        // float from double
  explicit Scalar(const BFloat& v) : fl_(v) {}

  static Scalar exact_rational(FieldPtr f, const Rat& r);
  static Scalar exact_coeffs(FieldPtr f, std::vector<Rat> coeffs);
  static Scalar zero(FieldPtr f) { return exact_rational(std::move(f), 0); }
  static Scalar one(FieldPtr f) { return exact_rational(std::move(f), 1); }

  bool is_exact() const { return !ex_.empty(); }
  const FieldPtr& field() const { return field_; }
  const std::vector<Rat>& coeffs() const { return ex_; }

  // Exact value as a float at the current default precision (identity on
  // float-mode scalars).
  BFloat to_float() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator-() const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  Scalar sqrt() const;   // float mode, requires a nonnegative value
  Scalar inverse() const;
  Scalar pow(long e) const;

  // Exact zero test in exact mode, |x| == 0 in float mode.
  bool is_zero() const;
  // True if the two scalars are exactly equal (exact mode) or bitwise equal
  // floats; cross-mode always false.
  bool equals(const Scalar& o) const;

  std::string str(unsigned digits = 30) const;

 private:
  FieldPtr field_;        // set iff exact
  std::vector<Rat> ex_;   // power-basis coefficients; empty => float mode
  BFloat fl_;
};

// delta = 2cos(pi/N) as an exact scalar.
Scalar make_delta(int N);
// Quantum integer [n]_q by the Chebyshev recursion [0]=0, [1]=1,
// [n+1] = delta*[n] - [n-1]; n may be negative ([-n] = -[n]).
Scalar quantum_integer(long n, const Scalar& delta);
// Exact: exact zero test. Float: |x| < tol.zero_eps.
bool near_zero(const Scalar& x, const Tolerance& tol);
// Nonnegative square root inside Q(delta) when one exists (rational values
// in any degree, general elements in quadratic fields); nullopt otherwise
// and for float-mode input.
std::optional<Scalar> exact_sqrt(const Scalar& s);

}  // namespace skein
