#include "skein/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "skein/tangle.hpp"

namespace skein {

namespace {

double to_dbl(const Scalar& s) { return s.to_float().convert_to<double>(); }

Scalar sqrt_scalar(const Scalar& s) {
  if (auto r = exact_sqrt(s)) return *r;
  return s.sqrt();
}

using Mat = std::vector<std::vector<Scalar>>;

Mat mat_mul(const Mat& A, const Mat& B, const FieldPtr& f) {
  size_t n = A.size(), m = B[0].size(), r = B.size();
  Mat C(n, std::vector<Scalar>(m, Scalar::zero(f)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < r; ++l) {
      if (A[i][l].is_zero()) continue;
      for (size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

Mat mat_inv(Mat A, const FieldPtr& f) {
  size_t n = A.size();
  Mat inv(n, std::vector<Scalar>(n, Scalar::zero(f)));
  for (size_t i = 0; i < n; ++i) inv[i][i] = Scalar::one(f);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    double best = -1.0;
    for (size_t r = col; r < n; ++r) {
      double a = std::abs(to_dbl(A[r][col]));
      if (a > best) {
        best = a;
        piv = r;
      }
    }
    if (!(best > 0.0)) throw std::runtime_error("mat_inv: singular matrix");
    std::swap(A[piv], A[col]);
    std::swap(inv[piv], inv[col]);
    Scalar d = A[col][col].inverse();
    for (size_t j = 0; j < n; ++j) {
      A[col][j] = A[col][j] * d;
      inv[col][j] = inv[col][j] * d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col].is_zero()) continue;
      Scalar m = A[r][col];
      for (size_t j = 0; j < n; ++j) {
        A[r][j] -= m * A[col][j];
        inv[r][j] -= m * inv[col][j];
      }
    }
  }
  return inv;
}

PAElement bend_br_n(PAElement x, int m) {
  for (int i = 0; i < m; ++i) x = x.bend_br();
  return x;
}

PAElement bend_rb_n(PAElement x, int m) {
  for (int i = 0; i < m; ++i) x = x.bend_rb();
  return x;
}

PAElement include_right_n(PAElement x, int m) {
  for (int i = 0; i < m; ++i) x = x.include_right();
  return x;
}

PAElement cup_at(const PAElement& x, int pos) {
  const auto& eng = x.handle()->engine();
  return PAElement(x.handle(), x.bottom(), x.top() + 2,
                   eng.apply_cup(x.terms(), pos));
}

PAElement cap_at(const PAElement& x, int pos) {
  const auto& eng = x.handle()->engine();
  return PAElement(x.handle(), x.bottom(), x.top() - 2,
                   eng.apply_cap(x.terms(), pos));
}

// m cups nested around each other, occupying top positions
// [pos, pos + 2m) afterwards.
PAElement nest_cups(PAElement x, int pos, int m) {
  for (int i = 0; i < m; ++i) x = cup_at(x, pos + i);
  return x;
}

// Inverse closure: joins top strands (pos + i) <-> (pos + 2m - 1 - i).
PAElement nest_caps(PAElement x, int pos, int m) {
  for (int i = m - 1; i >= 0; --i) x = cap_at(x, pos + i);
  return x;
}

PAElement box_at(const PAElement& x, const PathEngine<Scalar>::ExpandedBox& b,
                 int base) {
  const auto& eng = x.handle()->engine();
  return PAElement(x.handle(), x.bottom(), x.top(),
                   eng.apply_box(x.terms(), b, base));
}

// (n, n) -> (2n, 0): every top point bent down on the right.
PAElement to_covector(const PAElement& x) { return bend_br_n(x, x.top()); }

// (n, n) -> (0, 2n).
PAElement to_vector(const PAElement& x) { return bend_rb_n(x, x.bottom()); }

// (2n, 0) -> (n, n); inverse of to_covector on squares.
PAElement to_square(const PAElement& c) { return bend_rb_n(c, c.bottom() / 2); }

// Rotates a covector by `clicks` without disturbing the point order.
PAElement rot_cov(const PAElement& c, int clicks) {
  int half = c.bottom() / 2;
  return bend_br_n(bend_rb_n(c, half).rotate(clicks), half);
}

// Covectors laid side by side; the bottom reads [c1][c2].
PAElement concat_cov(const PAElement& c1, const PAElement& c2) {
  return c2 * include_right_n(c1, c2.bottom());
}

// Two equal-level squares rendered in one row; the right box enters rotated
// by rot_right clicks.
PAElement side_by_side(const PAPtr& h, const PAElement& left,
                       const PAElement& right, int rot_right) {
  if (left.top() != right.top())
    throw std::invalid_argument("side_by_side: level mismatch");
  int L = left.top();
  Circuit c;
  c.bottom = c.top = 2 * L;
  c.box_arity[0] = 2 * L;
  c.box_arity[1] = 2 * L;
  c.rows.push_back({Cell::box(0, 0), Cell::box(1, rot_right)});
  return evaluate_circuit(h, c, {{0, left}, {1, right}});
}

// a beside the half-turned b: the image of a (x) b^op in P_{2n}.
PAElement emb2(const PAElement& a, const PAElement& b) {
  return side_by_side(a.handle(), a, b, b.top());
}

// A level-3k box has three groups of 2k boundary points, counted ccw from
// the mark: group 0 on the left, group 1 below, group 2 on the right.
// attach_g* feeds the named group through the level-2k element c.
PAElement attach_g0(const PAElement& a, const PAElement& c, int k) {
  return bend_br_n(bend_rb_n(a, k) * c, k);
}

PAElement attach_g1(const PAElement& a, const PAElement& c, int k) {
  auto box = a.handle()->expand_box(c, 0);
  return bend_br_n(box_at(bend_rb_n(a, k), box, 2 * k), k);
}

PAElement attach_g2(const PAElement& a, const PAElement& c, int k) {
  auto box = a.handle()->expand_box(c, 0);
  return bend_br_n(box_at(bend_rb_n(a, k), box, 0), k);
}

// Cable m of a box with M cables of 2k strands, fed through c.
PAElement attach_cable(const PAElement& x, const PAElement& c, int m, int k,
                       int M) {
  PAElement f = bend_rb_n(x.rotate(2 * k * m), (M - 2) * k);
  return bend_br_n(f * c, (M - 2) * k).rotate(-2 * k * m);
}

// Joins of two level-3k boxes along one point group each: group g of A onto
// group g' of B, with the free groups fanned out into a level-4k square.
PAElement j01(const PAElement& A, const PAElement& B, int k) {
  return bend_rb_n(A, k) * bend_br_n(B.rotate(2 * k), k);
}

PAElement j10(const PAElement& A, const PAElement& B, int k) {
  return j01(B, A, k);
}

PAElement j20(const PAElement& A, const PAElement& B, int k) {
  return bend_rb_n(B, k) * bend_br_n(A, k);
}

// Caps the outer 4k points of a level-4k square onto each other.
PAElement close_outer(const PAElement& X, int k) {
  return nest_caps(X.rotate(-2 * k), 0, 2 * k);
}

// The level-k square x capped onto the top group of the level-3k box a;
// a level-2k square remains.
PAElement cap_top(const PAElement& a, const PAElement& x, int k) {
  return include_right_n(to_covector(x), 2 * k) * bend_rb_n(a, k);
}

PAElement sample_element(const PAPtr& h, int n, std::mt19937& gen) {
  PathState<Scalar> st;
  for (const auto& pr : h->pairs(n)) {
    long num = static_cast<long>(gen() % 129) - 64;
    if (num == 0) continue;
    Rat c(num, 64);
    c.canonicalize();
    st[pr] = Scalar::exact_rational(h->field(), c);
  }
  return PAElement(h, n, n, st);
}

Scalar q_prefactor(int v, int w, int z, const BlockDecomposition& dec,
                   const PrincipalGraphData& pg) {
  const FieldPtr& f = dec.handle->field();
  Scalar num = pg.mu_of(v) * pg.mu_of(w) * pg.mu_of(z);
  long nn = static_cast<long>(dec.sizes[dec.block_of(v)]) *
            dec.sizes[dec.block_of(w)] * dec.sizes[dec.block_of(z)];
  Scalar den = Scalar::exact_rational(f, Rat(nn)) * pg.index;
  return sqrt_scalar(num / den);
}

// The three-pill 6k-box: zv bent round the top, zw at the bottom left,
// zz at the bottom right.
PAElement pill_box(const PAElement& zv, const PAElement& zw,
                   const PAElement& zz, const PAPtr& h, int k) {
  int k2 = 2 * k;
  PAElement s = unit_element(h, 6 * k);
  auto bv = h->expand_box(include_right_n(zv.rotate(k2), k2), 0);
  s = box_at(s, bv, k);
  s = nest_caps(s, k, k2);
  auto bw = h->expand_box(zw, k);
  s = box_at(s, bw, 0);
  s = nest_cups(s, k, k2);
  auto bz = h->expand_box(include_right_n(zz, k2), 0);
  s = box_at(s, bz, k);
  return s;
}

// Greedy rank decomposition of a coefficient matrix over the path-pair
// basis; returns the leg pairs.
std::vector<std::pair<PAElement, PAElement>> peel_legs(
    const PAPtr& h, int level, std::vector<std::vector<Scalar>> mat,
    const Tolerance& tol) {
  const auto& prs = h->pairs(level);
  int D = static_cast<int>(prs.size());
  std::vector<std::pair<PAElement, PAElement>> legs;
  for (int step = 0; step < D; ++step) {
    int bi = -1, bj = -1;
    double best = -1.0;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        if (near_zero(mat[i][j], tol)) continue;
        double a = std::abs(to_dbl(mat[i][j]));
        if (a > best) {
          best = a;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;
    Scalar piv = mat[bi][bj];
    std::vector<Scalar> col(D), row(D);
    PathState<Scalar> sa, sb;
    for (int i = 0; i < D; ++i) {
      col[i] = mat[i][bj];
      if (!col[i].is_zero()) sa[prs[i]] = col[i];
    }
    for (int j = 0; j < D; ++j) {
      row[j] = mat[bi][j] / piv;
      if (!row[j].is_zero()) sb[prs[j]] = row[j];
    }
    legs.emplace_back(PAElement(h, level, level, sa),
                      PAElement(h, level, level, sb));
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) mat[i][j] -= col[i] * row[j];
  }
  return legs;
}

struct Meter {
  const Tolerance& tol;
  double dev = 0.0;
  bool exact = true;
  bool pass = true;
  explicit Meter(const Tolerance& t) : tol(t) {}

  void scalar(const Scalar& d) {
    double a = std::abs(to_dbl(d));
    if (a > dev) dev = a;
    if (d.is_exact()) {
      if (!d.is_zero()) pass = false;
    } else {
      exact = false;
      if (!(a < tol.zero_eps)) pass = false;
    }
  }

  void element(const PAElement& d) {
    for (const auto& [key, c] : d.terms()) scalar(c);
  }

  void sweedler(const SweedlerElement& a, const SweedlerElement& b) {
    auto ca = a.coordinates();
    auto cb = b.coordinates();
    for (size_t i = 0; i < ca.size(); ++i)
      for (size_t j = 0; j < ca.size(); ++j) scalar(ca[i][j] - cb[i][j]);
  }
};

void emit(SkeinReport& rep, const char* name, const Meter& m, int samples) {
  rep.checks.push_back(SkeinCheck{name, m.exact, m.dev, m.pass, samples});
}

// Left-to-right chain of level-3k boxes, each glued to the previous one
// along its left group; the result is the natural covector with the bottom
// reading [x1 g0][x1 g1][x2 g1]...[xm g1][xm g2].
PAElement chain_cov(const std::vector<PAElement>& xs, int k) {
  int k2 = 2 * k;
  PAElement w = bend_br_n(xs[0], k);
  for (size_t i = 1; i < xs.size(); ++i)
    w = bend_br_n(bend_rb_n(xs[i], k) * w, k2);
  return bend_br_n(w, k2);
}

// Chain closed into a necklace: the first left group meets the last right
// group round the outside, the down groups remain; a level-nk square.
PAElement necklace_square(const std::vector<PAElement>& xs, int k) {
  int k2 = 2 * k;
  PAElement cov2 = rot_cov(chain_cov(xs, k), -k2);
  return to_square(nest_caps(bend_rb_n(cov2, 2 * k2), 0, k2));
}

PAElement chain_square_rot(const std::vector<PAElement>& xs, int k) {
  return to_square(chain_cov(xs, k)).rotate(2 * k);
}

void daisychain_check(SkeinReport& rep, const char* name, int n,
                      const SweedlerElement& q, int k, const Tolerance& tol) {
  const PAPtr& h = q.handle();
  const auto& ql = q.legs();
  const int L = static_cast<int>(ql.size());
  Meter m(tol);
  SweedlerElement lhs(h, n * k), rhs(h, n * k);

  std::vector<PAElement> xa(n), xb(n);
  std::vector<int> idx(n, 0);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      xa[i] = ql[idx[i]].first;
      xb[i] = ql[idx[i]].second;
    }
    lhs += SweedlerElement::pure(necklace_square(xa, k),
                                 necklace_square(xb, k));
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == L) idx[pos--] = 0;
    if (pos < 0) break;
  }

  std::vector<PAElement> ya(n - 2), yb(n - 2);
  std::vector<int> jdx(n - 2, 0);
  for (;;) {
    for (int i = 0; i < n - 2; ++i) {
      ya[i] = ql[jdx[i]].first;
      yb[i] = ql[jdx[i]].second;
    }
    rhs += SweedlerElement::pure(chain_square_rot(ya, k),
                                 chain_square_rot(yb, k));
    int pos = n - 3;
    while (pos >= 0 && ++jdx[pos] == L) jdx[pos--] = 0;
    if (pos < 0) break;
  }

  m.sweedler(lhs, rhs);
  emit(rep, name, m, 0);
}

}  // namespace

SweedlerElement::SweedlerElement(PAPtr handle, int level)
    : handle_(std::move(handle)), level_(level) {}

SweedlerElement SweedlerElement::pure(const PAElement& first,
                                      const PAElement& second) {
  if (!first.valid() || !second.valid())
    throw std::invalid_argument("pure: invalid leg");
  if (first.handle() != second.handle() || first.bottom() != first.top() ||
      second.bottom() != second.top() || first.level() != second.level())
    throw std::invalid_argument("pure: mismatched legs");
  SweedlerElement r(first.handle(), first.level());
  r.legs_.emplace_back(first, second);
  return r;
}

void SweedlerElement::check_compatible(const SweedlerElement& o) const {
  if (!valid() || !o.valid() || handle_ != o.handle_ || level_ != o.level_)
    throw std::invalid_argument("sweedler: incompatible operands");
}

SweedlerElement& SweedlerElement::operator+=(const SweedlerElement& o) {
  if (!o.valid()) return *this;
  if (!valid()) {
    *this = o;
    return *this;
  }
  check_compatible(o);
  legs_.insert(legs_.end(), o.legs_.begin(), o.legs_.end());
  return *this;
}

SweedlerElement SweedlerElement::operator+(const SweedlerElement& o) const {
  SweedlerElement r = *this;
  r += o;
  return r;
}

SweedlerElement SweedlerElement::operator-(const SweedlerElement& o) const {
  if (!o.valid()) return *this;
  return *this + o.scaled(-Scalar::one(o.handle_->field()));
}

SweedlerElement SweedlerElement::scaled(const Scalar& c) const {
  SweedlerElement r = *this;
  for (auto& [a, b] : r.legs_) a = a.scaled(c);
  return r;
}

SweedlerElement SweedlerElement::multiply(const SweedlerElement& o) const {
  check_compatible(o);
  SweedlerElement r(handle_, level_);
  for (const auto& [a, b] : legs_)
    for (const auto& [c, d] : o.legs_) r.legs_.emplace_back(c * a, b * d);
  return r;
}

SweedlerElement SweedlerElement::star() const {
  SweedlerElement r = *this;
  for (auto& [a, b] : r.legs_) {
    a = a.star();
    b = b.star();
  }
  return r;
}

SweedlerElement SweedlerElement::rotate_both(int clicks) const {
  SweedlerElement r = *this;
  for (auto& [a, b] : r.legs_) {
    a = a.rotate(clicks);
    b = b.rotate(clicks);
  }
  return r;
}

Scalar SweedlerElement::trace_pair() const {
  if (!valid()) throw std::logic_error("trace_pair: invalid element");
  Scalar s = Scalar::zero(handle_->field());
  for (const auto& [a, b] : legs_) s += a.markov_trace() * b.markov_trace();
  return s;
}

std::vector<std::vector<Scalar>> SweedlerElement::coordinates() const {
  if (!valid()) throw std::logic_error("coordinates: invalid element");
  const auto& prs = handle_->pairs(level_);
  int D = static_cast<int>(prs.size());
  std::vector<std::vector<Scalar>> m(
      D, std::vector<Scalar>(D, Scalar::zero(handle_->field())));
  std::vector<Scalar> ca(D), cb(D);
  for (const auto& [a, b] : legs_) {
    for (int i = 0; i < D; ++i) {
      ca[i] = a.coefficient(prs[i]);
      cb[i] = b.coefficient(prs[i]);
    }
    for (int i = 0; i < D; ++i) {
      if (ca[i].is_zero()) continue;
      for (int j = 0; j < D; ++j) m[i][j] += ca[i] * cb[j];
    }
  }
  return m;
}

SweedlerElement SweedlerElement::compressed() const {
  if (!valid()) throw std::logic_error("compressed: invalid element");
  Tolerance tol;
  SweedlerElement r(handle_, level_);
  for (auto& [a, b] : peel_legs(handle_, level_, coordinates(), tol))
    r.legs_.emplace_back(a, b);
  return r;
}

bool SweedlerElement::same_as(const SweedlerElement& o,
                              const Tolerance& tol) const {
  check_compatible(o);
  auto ca = coordinates();
  auto cb = o.coordinates();
  for (size_t i = 0; i < ca.size(); ++i)
    for (size_t j = 0; j < ca.size(); ++j)
      if (!near_zero(ca[i][j] - cb[i][j], tol)) return false;
  return true;
}

bool SweedlerElement::is_zero(const Tolerance& tol) const {
  if (!valid() || legs_.empty()) return true;
  for (const auto& row : coordinates())
    for (const auto& s : row)
      if (!near_zero(s, tol)) return false;
  return true;
}

PAElement SweedlerElement::embed() const {
  if (!valid()) throw std::logic_error("embed: invalid element");
  PAElement acc = zero_element(handle_, 2 * level_, 2 * level_);
  for (const auto& [a, b] : legs_) acc += emb2(a, b);
  return acc;
}

SweedlerElement build_p(const BlockDecomposition& dec,
                        const PrincipalGraphData& pg) {
  const PAPtr& h = dec.handle;
  if (dec.level % 2 != 0) throw std::invalid_argument("build_p: odd level");
  for (int v : pg.even_vertices)
    if (pg.distance_of(v) > dec.level)
      throw std::invalid_argument("build_p: level too small for the graph");
  SweedlerElement out(h, dec.level);
  for (size_t b = 0; b < dec.labels.size(); ++b) {
    int nv = dec.sizes[b];
    Scalar inv_n = Scalar::exact_rational(h->field(), Rat(1, nv));
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j)
        out += SweedlerElement::pure(dec.unit(b, i, j).scaled(inv_n),
                                     dec.unit(b, j, i));
  }
  return out;
}

CanonicalQ build_q(const BlockDecomposition& dec, const PrincipalGraphData& pg,
                   const PAPtr& h) {
  if (dec.handle != h) throw std::invalid_argument("build_q: handle mismatch");
  if (dec.level % 2 != 0) throw std::invalid_argument("build_q: odd level");
  int k = dec.level / 2;
  for (int v : pg.even_vertices)
    if (pg.distance_of(v) > dec.level)
      throw std::invalid_argument("build_q: level too small for the graph");
  int k2 = 2 * k, k3 = 3 * k;
  const FieldPtr& f = h->field();
  const Scalar zero = Scalar::zero(f);
  Tolerance tol;
  const auto& prs = h->pairs(k3);
  int D = static_cast<int>(prs.size());
  Scalar d3k = h->delta().pow(k3);

  std::vector<PAElement> basis(D);
  for (int i = 0; i < D; ++i)
    basis[i] = from_path_pair(h, k3, k3, prs[i], Scalar::one(f));

  auto fwd = [&](const PAElement& A, const PAElement& u) {
    return d3k * (A * u.rotate(k2)).markov_trace();
  };
  auto bwd = [&](const PAElement& B, const PAElement& u) {
    return d3k * (B * u.rotate(-k2)).markov_trace();
  };

  Mat G(D, std::vector<Scalar>(D, zero)), G2 = G;
  for (int i = 0; i < D; ++i)
    for (int a = 0; a < D; ++a) {
      G[i][a] = fwd(basis[i], basis[a]);
      G2[i][a] = bwd(basis[i], basis[a]);
    }
  Mat GinvT = mat_inv(G, f);
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j) std::swap(GinvT[i][j], GinvT[j][i]);
  Mat G2inv = mat_inv(G2, f);

  CanonicalQ out;
  out.k = k;
  Mat total(D, std::vector<Scalar>(D, zero));
  for (int v : pg.even_vertices)
    for (int w : pg.even_vertices)
      for (int z : pg.even_vertices) {
        const PAElement& zv = dec.central[dec.block_of(v)];
        const PAElement& zw = dec.central[dec.block_of(w)];
        const PAElement& zz = dec.central[dec.block_of(z)];
        Scalar pre = q_prefactor(v, w, z, dec, pg);
        Mat R(D, std::vector<Scalar>(D, zero));
        for (int a = 0; a < D; ++a) {
          PAElement core =
              attach_g2(attach_g1(attach_g0(basis[a], zz, k), zv, k), zw, k);
          for (int c = 0; c < D; ++c)
            R[a][c] = pre * fwd(core, basis[c].star());
        }
        Mat mat = mat_mul(mat_mul(GinvT, R, f), G2inv, f);
        bool nonzero = false;
        for (int i = 0; i < D && !nonzero; ++i)
          for (int j = 0; j < D && !nonzero; ++j)
            if (!near_zero(mat[i][j], tol)) nonzero = true;
        if (!nonzero) continue;
        SweedlerElement comp(h, k3);
        for (auto& [a, b] : peel_legs(h, k3, mat, tol))
          comp += SweedlerElement::pure(a, b);
        out.components.emplace(std::make_tuple(v, w, z), comp);
        for (int i = 0; i < D; ++i)
          for (int j = 0; j < D; ++j) total[i][j] += mat[i][j];
      }

  SweedlerElement qsum(h, k3);
  for (auto& [a, b] : peel_legs(h, k3, total, tol))
    qsum += SweedlerElement::pure(a, b);
  out.q = qsum;
  return out;
}

GjsProjections build_gjs_projections(const PAPtr& h, int k) {
  if (k < 1) throw std::invalid_argument("build_gjs_projections: k < 1");
  GjsProjections g;
  g.e_k = tl_generator(h, k + 2, k + 1).scaled(h->delta());
  g.f_k = tl_generator(h, 2 * k, k);
  return g;
}

bool SkeinReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const SkeinCheck& SkeinReport::check(const std::string& relation) const {
  for (const auto& c : checks)
    if (c.relation == relation) return c;
  throw std::out_of_range("no relation " + relation);
}

SkeinReport verify_skein_suite(const SweedlerElement& p, const CanonicalQ& Q,
                               const BlockDecomposition& dec,
                               const PrincipalGraphData& pg, const PAPtr& h,
                               unsigned seed, int samples) {
  if (!p.valid() || !Q.q.valid())
    throw std::invalid_argument("verify_skein_suite: invalid inputs");
  const int k = Q.k;
  const int k2 = 2 * k, k3 = 3 * k, k4 = 4 * k;
  const FieldPtr& f = h->field();
  const Scalar zero = Scalar::zero(f);
  const Scalar one = Scalar::one(f);
  const Scalar delta = h->delta();
  const Scalar I = pg.index;
  const Scalar dk = delta.pow(k);
  const Scalar d2k = delta.pow(k2), d3k = delta.pow(k3), d4k = delta.pow(k4);
  Tolerance tol;
  std::mt19937 gen(seed);

  SkeinReport rep;
  rep.N = h->N();
  rep.k = k;
  rep.seed = seed;

  struct Pill {
    int v;
    Scalar mu;
    long n;
    PAElement z;
  };
  std::vector<Pill> pills;
  for (int v : pg.even_vertices) {
    int b = dec.block_of(v);
    pills.push_back(
        Pill{v, pg.mu_of(v), static_cast<long>(dec.sizes[b]), dec.central[b]});
  }
  auto pill_of = [&](int v) -> const Pill& {
    for (const auto& pl : pills)
      if (pl.v == v) return pl;
    throw std::logic_error("verify_skein_suite: unknown vertex");
  };
  const Pill& st = pill_of(pg.star);
  auto inv_long = [&](long n) {
    return Scalar::exact_rational(f, Rat(1, n));
  };
  Scalar n_star = Scalar::exact_rational(f, Rat(st.n));
  Scalar isq_I = one / sqrt_scalar(I);
  Scalar isq_nstar = one / sqrt_scalar(n_star);

  {
    Meter m(tol);
    PAElement sum = zero_element(h, k2, k2);
    for (const auto& pl : pills) {
      m.element(pl.z.rotate(k2) - pl.z);
      m.element(pl.z.star() - pl.z);
      m.element(pl.z * pl.z - pl.z);
      sum += pl.z;
    }
    m.element(sum - unit_element(h, k2));
    emit(rep, "pill-invariance", m, 0);
  }

  {
    Meter m(tol);
    std::vector<std::vector<std::pair<PAElement, PAElement>>> plegs(
        dec.labels.size());
    for (size_t b = 0; b < dec.labels.size(); ++b) {
      int nv = dec.sizes[b];
      Scalar inv_n = inv_long(nv);
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
          plegs[b].emplace_back(dec.unit(b, i, j).scaled(inv_n),
                                dec.unit(b, j, i));
    }
    for (int it = 0; it < samples; ++it) {
      PAElement x = sample_element(h, k2, gen);
      PAElement y = sample_element(h, k2, gen);
      for (size_t b = 0; b < dec.labels.size(); ++b) {
        const Pill& pl = pill_of(dec.labels[b]);
        Scalar lhs = zero;
        for (const auto& [a, bb] : plegs[b])
          lhs += d4k * (x * a).markov_trace() * (y * bb).markov_trace();
        Scalar rhs =
            pl.mu * inv_long(pl.n) * d2k * (y * (pl.z * x)).markov_trace();
        m.scalar(lhs - rhs);
      }
    }
    emit(rep, "2cleaver", m, samples);
  }

  {
    Meter m(tol);
    for (int it = 0; it < samples; ++it) {
      PAElement x = sample_element(h, k, gen);
      PAElement y = sample_element(h, k, gen);
      Scalar free_pair = (to_covector(x) * to_vector(y)).scalar_value();
      for (const auto& pl : pills) {
        Scalar lhs = (to_covector(x) * pl.z * to_vector(y)).scalar_value();
        m.scalar(lhs - (pl.v == pg.star ? free_pair : zero));
      }
    }
    emit(rep, "star-projection", m, samples);
  }

  {
    Meter m(tol);
    m.scalar(p.trace_pair() - d4k.inverse() * I);
    emit(rep, "p-trace", m, 0);
  }

  {
    Meter m(tol);
    m.sweedler(p.rotate_both(k2), p);
    emit(rep, "p-rotation", m, 0);
  }

  {
    Meter m(tol);
    PAElement lhs = zero_element(h, k4, 0);
    for (const auto& [a, b] : p.legs())
      lhs += concat_cov(nest_caps(a, 0, k), nest_caps(b.rotate(k2), 0, k));
    m.element(lhs - to_covector(st.z).scaled(dk * inv_long(st.n)));
    emit(rep, "p-capping", m, 0);
  }

  {
    Meter m(tol);
    PAElement s = zero_element(h, k2, k2);
    for (const auto& [a, b] : p.legs()) s += b * a;
    m.element(s - unit_element(h, k2));
    emit(rep, "p-multiplication", m, 0);
  }

  {
    Meter m(tol);
    auto pairing = [&](const PAElement& A, const PAElement& u) {
      return d3k * (A * u.rotate(k2)).markov_trace();
    };
    auto pairing2 = [&](const PAElement& B, const PAElement& u) {
      return d3k * (B * u.rotate(-k2)).markov_trace();
    };
    for (int it = 0; it < samples; ++it) {
      PAElement x = sample_element(h, k3, gen);
      PAElement y = sample_element(h, k3, gen);
      for (const auto& [key, comp] : Q.components) {
        auto [v, w, z] = key;
        PAElement core = attach_g2(
            attach_g1(attach_g0(x, pill_of(z).z, k), pill_of(v).z, k),
            pill_of(w).z, k);
        Scalar lhs = zero;
        for (const auto& [a, b] : comp.legs())
          lhs += pairing(a, x) * pairing2(b, y);
        m.scalar(lhs -
                 q_prefactor(v, w, z, dec, pg) * pairing(core, y.star()));
      }
    }
    emit(rep, "q-pairing", m, samples);
  }

  {
    Meter ml(tol), mr(tol);
    SweedlerElement accl(h, k3), accr(h, k3);
    for (const auto& [a, b] : Q.q.legs())
      for (const auto& [c, d] : p.legs()) {
        accl += SweedlerElement::pure(attach_g0(a, c, k), attach_g1(b, d, k));
        accr += SweedlerElement::pure(attach_g1(a, c, k), attach_g0(b, d, k));
      }
    ml.sweedler(accl, Q.q);
    mr.sweedler(accr, Q.q);
    emit(rep, "q-compat-p-left", ml, 0);
    emit(rep, "q-compat-p-right", mr, 0);
  }

  {
    Meter m(tol);
    m.sweedler(Q.q.rotate_both(k2), Q.q);
    emit(rep, "q-rotation", m, 0);
  }

  {
    Meter m(tol);
    for (int it = 0; it < samples; ++it) {
      PAElement x = sample_element(h, k, gen);
      PAElement y = sample_element(h, k, gen);
      SweedlerElement lhs(h, k2);
      for (const auto& [a, b] : Q.q.legs())
        lhs += SweedlerElement::pure(cap_top(a, x, k), cap_top(b, y, k));
      Scalar fc = (to_covector(x) * st.z * to_vector(y)).scalar_value();
      m.sweedler(lhs, p.scaled(isq_I * isq_nstar * fc));
    }
    emit(rep, "q-capping", m, samples);
  }

  {
    Meter m(tol);
    PAElement U = to_covector(st.z);
    for (int it = 0; it < samples; ++it) {
      PAElement x = sample_element(h, k, gen);
      PAElement y = sample_element(h, k, gen);
      SweedlerElement lhsS(h, k2);
      for (const auto& [a, b] : Q.q.legs())
        lhsS += SweedlerElement::pure(cap_top(a, x, k), cap_top(b, y, k));
      PAElement rhs = zero_element(h, k4, k4);
      for (const auto& [c, d] : p.legs()) {
        PAElement vc = c * to_vector(x);
        PAElement vd = bend_rb_n(to_covector(y) * d, k2);
        rhs += (include_right_n(vc, k2) * vd) * U;
      }
      m.element(lhsS.embed() - rhs.scaled(isq_I * isq_nstar));
    }
    emit(rep, "q-double-capping", m, samples);
  }

  {
    Meter m(tol);
    for (const auto& pw : pills)
      for (const auto& pz : pills) {
        PAElement lhs = zero_element(h, k4, k4);
        for (const auto& pv : pills) {
          auto itc = Q.components.find(std::make_tuple(pv.v, pw.v, pz.v));
          if (itc == Q.components.end()) continue;
          Scalar cv = sqrt_scalar(pv.mu * inv_long(pv.n));
          for (const auto& [a, b] : itc->second.legs())
            lhs += j01(a, b, k).scaled(cv);
        }
        Scalar cr = isq_I * sqrt_scalar(pw.mu * pz.mu * inv_long(pw.n * pz.n));
        m.element(lhs - side_by_side(h, pw.z, pz.z, 0).scaled(cr));
      }
    emit(rep, "q-connecting", m, 0);
  }

  {
    Meter m(tol);
    PAElement lhs = zero_element(h, k4, k4);
    for (const auto& [a, b] : Q.q.legs())
      lhs += j01(attach_g0(a, st.z, k), b, k).rotate(k2);
    m.element(lhs - p.embed().scaled(isq_I * sqrt_scalar(n_star)));
    emit(rep, "q-skein5", m, 0);
  }

  {
    Meter m(tol);
    for (int it = 0; it < samples; ++it) {
      PAElement x = sample_element(h, k4, gen);
      PAElement y = sample_element(h, k4, gen);
      PAElement xr = x.rotate(k4), yr = y.rotate(k4);
      for (const auto& p1 : pills)
        for (const auto& pw1 : pills)
          for (const auto& pw2 : pills)
            for (const auto& p2 : pills) {
              Scalar lhs = zero;
              for (const auto& pz : pills) {
                auto ia =
                    Q.components.find(std::make_tuple(p1.v, pw1.v, pz.v));
                auto ib =
                    Q.components.find(std::make_tuple(pz.v, pw2.v, p2.v));
                if (ia == Q.components.end() || ib == Q.components.end())
                  continue;
                for (const auto& [a, b] : ia->second.legs())
                  for (const auto& [a2, b2] : ib->second.legs())
                    lhs += (d4k * (j10(a, a2, k) * xr).markov_trace()) *
                           (d4k * (j01(b, b2, k) * yr).markov_trace());
              }
              PAElement X4 = attach_cable(x, p1.z, 0, k, 4);
              X4 = attach_cable(X4, pw1.z, 1, k, 4);
              X4 = attach_cable(X4, pw2.z, 2, k, 4);
              X4 = attach_cable(X4, p2.z, 3, k, 4);
              Scalar rhs = I.inverse() *
                           sqrt_scalar(p1.mu * p2.mu * pw1.mu * pw2.mu *
                                       inv_long(p1.n * p2.n * pw1.n * pw2.n)) *
                           d4k * (X4 * y).markov_trace();
              m.scalar(lhs - rhs);
            }
    }
    emit(rep, "four-cleaver", m, samples);
  }

  {
    Meter m(tol);
    SweedlerElement lhs(h, k4), rhs(h, k4);
    for (const auto& [a, b] : Q.q.legs())
      for (const auto& [a2, b2] : Q.q.legs()) {
        lhs += SweedlerElement::pure(j10(a, a2, k), j01(b, b2, k));
        rhs += SweedlerElement::pure(j01(a.rotate(k2), a2, k).rotate(-k2),
                                     j01(b.rotate(k2), b2, k).rotate(-k2));
      }
    m.sweedler(lhs, rhs);
    emit(rep, "two-q-rotate", m, 0);
  }

  {
    Meter m(tol);
    SweedlerElement acc(h, k2);
    for (const auto& [a, b] : Q.q.legs())
      for (const auto& [a2, b2] : Q.q.legs())
        acc += SweedlerElement::pure(
            bend_rb_n(close_outer(j10(a, a2, k), k), k2),
            bend_rb_n(close_outer(j01(b, b2, k), k), k2));
    m.sweedler(acc, p);
    emit(rep, "two-q-p", m, 0);
  }

  daisychain_check(rep, "daisychain-3", 3, Q.q, k, tol);
  daisychain_check(rep, "daisychain-4", 4, Q.q, k, tol);

  {
    SkeinCheck agg;
    agg.relation = "cabled-1-4";
    agg.exact_mode = true;
    agg.pass = true;
    for (const char* nm : {"p-rotation", "q-rotation", "q-compat-p-left",
                           "q-compat-p-right", "two-q-p", "two-q-rotate"}) {
      const SkeinCheck& c = rep.check(nm);
      agg.exact_mode = agg.exact_mode && c.exact_mode;
      agg.pass = agg.pass && c.pass;
      agg.deviation = std::max(agg.deviation, c.deviation);
    }
    rep.checks.push_back(agg);
  }

  {
    Meter m(tol);
    std::vector<std::pair<PAElement, PAElement>> jj;
    for (const auto& [a, b] : Q.q.legs())
      for (const auto& [a2, b2] : Q.q.legs())
        jj.emplace_back(j20(a, a2, k), j20(b, b2, k));
    for (int it = 0; it < samples; ++it) {
      PAElement x1 = sample_element(h, k2, gen);
      PAElement x2 = sample_element(h, k2, gen);
      PAElement cx1 = to_covector(x1), cx2 = to_covector(x2);
      SweedlerElement lhs(h, k2);
      for (const auto& [ja, jb] : jj)
        lhs += SweedlerElement::pure(bend_rb_n(cx1 * ja, k2),
                                     bend_rb_n(cx2 * jb, k2));
      Scalar sig = zero;
      for (const auto& [c, d] : p.legs())
        sig += d4k * (c * x1).markov_trace() * (d * x2).markov_trace();
      m.sweedler(lhs, p.scaled(sig));
    }
    emit(rep, "cabled-5", m, samples);
  }

  return rep;
}

}  // namespace skein
