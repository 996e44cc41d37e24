#include "skein/scalar.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace skein {

namespace {

using Poly = std::vector<Rat>;  // p[i] = coefficient of x^i

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int deg(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Exact division a / b in Q[x]; requires that b divides a.
Poly divide_exact(Poly a, const Poly& b) {
  Poly q(a.size() > b.size() ? a.size() - b.size() + 1 : 1, Rat(0));
  while (deg(a) >= deg(b) && !a.empty()) {
    Rat c = a.back() / b.back();
    int shift = deg(a) - deg(b);
    q[shift] = c;
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    trim(a);
  }
  if (!a.empty()) throw std::logic_error("divide_exact: nonzero remainder");
  trim(q);
  return q;
}

Poly cyclotomic(int n) {
  static std::map<int, Poly> memo;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  Poly num(n + 1, Rat(0));  // x^n - 1
  num[0] = -1;
  num[n] = 1;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) num = divide_exact(num, cyclotomic(d));
  memo[n] = num;
  return num;
}

// Minimal polynomial of 2cos(pi/N): the degree-m polynomial psi with
// Phi_{2N}(x) = x^m psi(x + 1/x), m = phi(2N)/2 (Phi_{2N} is palindromic).
Poly halved_cyclotomic(int N) {
  Poly P = cyclotomic(2 * N);
  int m = deg(P) / 2;
  Poly psi(m + 1, Rat(0));
  for (int j = m; j >= 0; --j) {
    Rat c = (m + j <= deg(P)) ? P[m + j] : Rat(0);
    psi[j] = c;
    // Subtract c * x^m * (x + 1/x)^j = c * sum_i binom(j,i) x^{m+j-2i}.
    Rat binom(1);
    for (int i = 0; i <= j; ++i) {
      P[m + j - 2 * i] -= c * binom;
      binom = binom * (j - i) / (i + 1);
    }
  }
  for (const Rat& c : P)
    if (c != 0) throw std::logic_error("halved_cyclotomic: bad palindrome");
  return psi;
}

unsigned g_bits = 128;

}  // namespace

void set_float_bits(unsigned bits) {
  g_bits = bits;
  unsigned digits = static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2;
  BFloat::default_precision(digits);
}

unsigned float_bits() { return g_bits; }

namespace {
struct FloatInit {
  FloatInit() { set_float_bits(128); }
} g_float_init;
}  // namespace

CycField::CycField(int N) : N_(N) {
  if (N < 2) throw std::invalid_argument("CycField: N must be >= 2");
  minpoly_ = halved_cyclotomic(N);
}

BFloat CycField::delta_float() const {
  BFloat pi = acos(BFloat(-1));
  return 2 * cos(pi / N_);
}

FieldPtr field_for(int N) {
  static std::map<int, FieldPtr> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  auto f = std::make_shared<const CycField>(N);
  cache[N] = f;
  return f;
}

Scalar Scalar::exact_rational(FieldPtr f, const Rat& r) {
  Scalar s;
  s.field_ = std::move(f);
  s.ex_.assign(s.field_->degree(), Rat(0));
  s.ex_[0] = r;
  return s;
}

Scalar Scalar::exact_coeffs(FieldPtr f, std::vector<Rat> coeffs) {
  if (static_cast<int>(coeffs.size()) != f->degree())
    throw std::invalid_argument("exact_coeffs: wrong length");
  Scalar s;
  s.field_ = std::move(f);
  s.ex_ = std::move(coeffs);
  return s;
}

BFloat Scalar::to_float() const {
  if (!is_exact()) return fl_;
  BFloat d = field_->delta_float();
  BFloat acc(0);
  for (int i = static_cast<int>(ex_.size()) - 1; i >= 0; --i) {
    acc = acc * d + BFloat(ex_[i].get_mpq_t());
  }
  return acc;
}

namespace {
void check_fields(const Scalar& a, const Scalar& b) {
  if (!(*a.field() == *b.field()))
    throw std::invalid_argument("scalar arithmetic across different fields");
}
}  // namespace

Scalar Scalar::operator+(const Scalar& o) const {
  if (is_exact() && o.is_exact()) {
    check_fields(*this, o);
    std::vector<Rat> c = ex_;
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.ex_[i];
    return exact_coeffs(field_, std::move(c));
  }
  return Scalar(to_float() + o.to_float());
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator-() const {
  if (is_exact()) {
    std::vector<Rat> c = ex_;
    for (Rat& x : c) x = -x;
    return exact_coeffs(field_, std::move(c));
  }
  return Scalar(BFloat(-fl_));
}

Scalar Scalar::operator*(const Scalar& o) const {
  if (is_exact() && o.is_exact()) {
    check_fields(*this, o);
    const auto& mp = field_->minpoly();
    int d = field_->degree();
    std::vector<Rat> prod(2 * d - 1, Rat(0));
    for (int i = 0; i < d; ++i) {
      if (ex_[i] == 0) continue;
      for (int j = 0; j < d; ++j) prod[i + j] += ex_[i] * o.ex_[j];
    }
    // Reduce modulo the (monic) minimal polynomial.
    for (int i = 2 * d - 2; i >= d; --i) {
      if (prod[i] == 0) continue;
      Rat c = prod[i];
      prod[i] = 0;
      for (int j = 0; j < d; ++j) prod[i - d + j] -= c * mp[j];
    }
    prod.resize(d);
    return exact_coeffs(field_, std::move(prod));
  }
  return Scalar(to_float() * o.to_float());
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  if (!is_exact()) return Scalar(BFloat(1 / fl_));
  // Extended Euclid in Q[x] against the minimal polynomial.
  Poly r0(field_->minpoly());
  Poly r1(ex_);
  trim(r1);
  Poly s0 = {}, s1 = {Rat(1)};  // coefficients of the *this-polynomial
  while (deg(r1) > 0) {
    // r0 = q*r1 + r2
    Poly q(deg(r0) - deg(r1) + 1, Rat(0));
    Poly r2 = r0;
    while (deg(r2) >= deg(r1)) {
      Rat c = r2.back() / r1.back();
      int shift = deg(r2) - deg(r1);
      q[shift] = c;
      for (size_t i = 0; i < r1.size(); ++i) r2[shift + i] -= c * r1[i];
      trim(r2);
    }
    Poly s2 = s0;
    {
      Poly qs1 = mul(q, s1);
      if (s2.size() < qs1.size()) s2.resize(qs1.size(), Rat(0));
      for (size_t i = 0; i < qs1.size(); ++i) s2[i] -= qs1[i];
      trim(s2);
    }
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r1.empty()) throw std::logic_error("inverse: reducible modulus");
  Rat g = r1[0];
  std::vector<Rat> out(field_->degree(), Rat(0));
  for (size_t i = 0; i < s1.size(); ++i) out[i] = s1[i] / g;
  return exact_coeffs(field_, std::move(out));
}

Scalar Scalar::operator/(const Scalar& o) const {
  if (is_exact() && o.is_exact()) return *this * o.inverse();
  return Scalar(to_float() / o.to_float());
}

Scalar Scalar::sqrt() const {
  BFloat v = to_float();
  if (v < 0) throw std::domain_error("sqrt of negative scalar");
  return Scalar(BFloat(boost::multiprecision::sqrt(v)));
}

Scalar Scalar::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  Scalar acc = is_exact() ? one(field_) : Scalar(1.0);
  Scalar base = *this;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

bool Scalar::is_zero() const {
  if (is_exact()) {
    for (const Rat& c : ex_)
      if (c != 0) return false;
    return true;
  }
  return fl_ == 0;
}

bool Scalar::equals(const Scalar& o) const {
  if (is_exact() != o.is_exact()) return false;
  if (is_exact()) return *field_ == *o.field_ && ex_ == o.ex_;
  return fl_ == o.fl_;
}

std::string Scalar::str(unsigned digits) const {
  if (!is_exact()) return fl_.str(digits);
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < ex_.size(); ++i) {
    if (ex_[i] == 0) continue;
    if (!first) os << " + ";
    os << ex_[i].get_str();
    if (i == 1) os << "*delta";
    if (i > 1) os << "*delta^" << i;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

Scalar make_delta(int N) {
  FieldPtr f = field_for(N);
  if (f->degree() == 1) {
    // delta is rational: the power basis is just {1}; delta = -c0.
    return Scalar::exact_rational(f, -f->minpoly()[0]);
  }
  std::vector<Rat> c(f->degree(), Rat(0));
  c[1] = 1;
  return Scalar::exact_coeffs(f, std::move(c));
}

Scalar quantum_integer(long n, const Scalar& delta) {
  bool neg = n < 0;
  if (neg) n = -n;
  Scalar zero = delta.is_exact() ? Scalar::zero(delta.field()) : Scalar(0.0);
  Scalar one = delta.is_exact() ? Scalar::one(delta.field()) : Scalar(1.0);
  Scalar a = zero, b = one;  // [0], [1]
  if (n == 0) return zero;
  for (long i = 1; i < n; ++i) {
    Scalar c = delta * b - a;
    a = b;
    b = c;
  }
  return neg ? -b : b;
}

bool near_zero(const Scalar& x, const Tolerance& tol) {
  if (x.is_exact()) return x.is_zero();
  return boost::multiprecision::abs(x.to_float()) < BFloat(tol.zero_eps);
}

namespace {

std::optional<Rat> rat_sqrt(const Rat& r) {
  if (sgn(r) < 0) return std::nullopt;
  mpz_class num = r.get_num(), den = r.get_den();
  mpz_class sn = sqrt(num), sd = sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rat(sn, sd);
}

}  // namespace

std::optional<Scalar> exact_sqrt(const Scalar& s) {
  if (!s.is_exact()) return std::nullopt;
  const FieldPtr& f = s.field();
  auto finish = [&](const Scalar& t) -> std::optional<Scalar> {
    Scalar root = t.to_float() < 0 ? -t : t;
    if ((root * root - s).is_zero()) return root;
    return std::nullopt;
  };
  std::vector<Rat> c = s.coeffs();
  c.resize(f->degree(), Rat(0));
  if (f->degree() != 2) {
    bool rational = true;
    for (int i = 1; i < f->degree(); ++i) rational &= (c[i] == 0);
    if (!rational) return std::nullopt;
    auto x = rat_sqrt(c[0]);
    if (!x) return std::nullopt;
    return finish(Scalar::exact_rational(f, *x));
  }
  // delta^2 = m1*delta + m0 from the monic minimal polynomial.
  Rat m1 = -f->minpoly()[1], m0 = -f->minpoly()[0];
  const Rat& a = c[0];
  const Rat& b = c[1];
  if (b == 0) {
    if (auto x = rat_sqrt(a)) return finish(Scalar::exact_rational(f, *x));
  }
  // (x + y*delta)^2 = (x^2 + m0 y^2) + (2xy + m1 y^2) delta; with Y = y^2,
  // eliminating x gives (m1^2 + 4 m0) Y^2 - (2 b m1 + 4 a) Y + b^2 = 0.
  Rat A2 = m1 * m1 + 4 * m0, A1 = -(2 * b * m1 + 4 * a), A0 = b * b;
  if (A2 == 0) return std::nullopt;
  auto disc = rat_sqrt(A1 * A1 - 4 * A2 * A0);
  if (!disc) return std::nullopt;
  for (int pick : {0, 1}) {
    Rat Y = (-A1 + (pick ? *disc : -*disc)) / (2 * A2);
    if (sgn(Y) < 0) continue;
    auto y = rat_sqrt(Y);
    if (!y) continue;
    Rat x;
    if (*y == 0) {
      auto x0 = rat_sqrt(a);
      if (!x0) continue;
      x = *x0;
    } else {
      x = (b - m1 * Y) / (2 * (*y));
    }
    if (auto t = finish(Scalar::exact_coeffs(f, {x, *y}))) return t;
  }
  return std::nullopt;
}

}  // namespace skein
