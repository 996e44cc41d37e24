#include "skein/tlpa.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace skein {

namespace {

struct WalkHash {
  size_t operator()(const Walk& w) const {
    size_t h = 1469598103934665603ull;
    for (uint8_t v : w) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return h;
  }
};

double to_double(const Scalar& s) {
  return static_cast<double>(Scalar(s).to_float());
}

}  // namespace

// ---------------------------------------------------------------------------
// PAElement

PAElement::PAElement(PAPtr handle, int bottom, int top)
    : handle_(std::move(handle)), bottom_(bottom), top_(top) {
  if (bottom_ < 0 || top_ < 0 || ((bottom_ ^ top_) & 1))
    throw std::invalid_argument("PAElement: bad shape");
}

PAElement::PAElement(PAPtr handle, int bottom, int top, PathState<Scalar> terms)
    : PAElement(std::move(handle), bottom, top) {
  terms_ = std::move(terms);
}

int PAElement::level() const {
  if (bottom_ != top_) throw std::logic_error("level: element is not square");
  return bottom_;
}

void PAElement::check_same_shape(const PAElement& o) const {
  if (!handle_ || !o.handle_ || handle_->N() != o.handle_->N() ||
      bottom_ != o.bottom_ || top_ != o.top_)
    throw std::invalid_argument("element shape/handle mismatch");
}

PAElement& PAElement::operator+=(const PAElement& o) {
  check_same_shape(o);
  for (const auto& [k, c] : o.terms_) {
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  return *this;
}

PAElement& PAElement::operator-=(const PAElement& o) {
  return *this += -o;
}

PAElement PAElement::operator+(const PAElement& o) const {
  PAElement r = *this;
  r += o;
  return r;
}

PAElement PAElement::operator-(const PAElement& o) const {
  PAElement r = *this;
  r += -o;
  return r;
}

PAElement PAElement::operator-() const {
  PAElement r = *this;
  for (auto& [k, c] : r.terms_) c = -c;
  return r;
}

PAElement PAElement::scaled(const Scalar& c) const {
  PAElement r(handle_, bottom_, top_);
  if (c.is_zero()) return r;
  r.terms_ = terms_;
  for (auto& [k, v] : r.terms_) v = v * c;
  return r;
}

PAElement PAElement::operator*(const PAElement& o) const {
  if (!handle_ || !o.handle_ || handle_->N() != o.handle_->N())
    throw std::invalid_argument("multiply: handle mismatch");
  if (bottom_ != o.top_)
    throw std::invalid_argument("multiply: boundary mismatch");
  std::unordered_map<Walk, std::vector<const std::pair<const PathPair, Scalar>*>,
                     WalkHash>
      by_rho;
  for (const auto& t : terms_) by_rho[t.first.rho].push_back(&t);
  PAElement r(handle_, o.bottom_, top_);
  for (const auto& [ko, co] : o.terms_) {
    auto it = by_rho.find(ko.sigma);
    if (it == by_rho.end()) continue;
    for (const auto* tx : it->second) {
      PathPair nk{ko.rho, tx->first.sigma};
      Scalar add = tx->second * co;
      auto jt = r.terms_.find(nk);
      if (jt == r.terms_.end()) {
        r.terms_.emplace(std::move(nk), std::move(add));
      } else {
        jt->second += add;
        if (jt->second.is_zero()) r.terms_.erase(jt);
      }
    }
  }
  return r;
}

PAElement PAElement::star() const {
  const auto& eng = handle_->engine();
  PAElement r(handle_, top_, bottom_);
  for (const auto& [k, c] : terms_) {
    Scalar w = eng.walk_weight(k.sigma) / eng.walk_weight(k.rho);
    r.terms_.emplace(PathPair{k.sigma, k.rho}, c * w);
  }
  return r;
}

Scalar PAElement::markov_trace() const {
  int n = level();
  const auto& eng = handle_->engine();
  Scalar acc = Scalar::zero(handle_->field());
  for (const auto& [k, c] : terms_) {
    if (k.rho != k.sigma) continue;
    acc += c * eng.mu[k.rho.back()];
  }
  return acc * eng.delta_inv.pow(n);
}

PAElement PAElement::bend_br() const {
  if (top_ < 1) throw std::invalid_argument("bend_br: no top strands");
  return PAElement(handle_, bottom_ + 1, top_ - 1,
                   handle_->engine().bend_br(terms_));
}

PAElement PAElement::bend_rb() const {
  if (bottom_ < 1) throw std::invalid_argument("bend_rb: no bottom strands");
  return PAElement(handle_, bottom_ - 1, top_ + 1,
                   handle_->engine().bend_rb(terms_));
}

PAElement PAElement::close_right() const {
  if (bottom_ < 1 || top_ < 1)
    throw std::invalid_argument("close_right: needs strands on both sides");
  const auto& eng = handle_->engine();
  PathState<Scalar> s = eng.bend_rb(terms_);
  s = eng.apply_cap(s, top_ - 1);
  return PAElement(handle_, bottom_ - 1, top_ - 1, std::move(s));
}

PAElement PAElement::expect_right() const {
  int n = level();
  if (n < 1) throw std::invalid_argument("expect_right: level 0");
  return close_right().scaled(handle_->engine().delta_inv);
}

PAElement PAElement::include_right() const {
  const auto& eng = handle_->engine();
  PAElement r(handle_, bottom_ + 1, top_ + 1);
  for (const auto& [k, c] : terms_) {
    int e = k.rho.back();
    for (int w = e - 1; w <= e + 1; w += 2) {
      if (w < 1 || w > eng.top_vertex()) continue;
      PathPair nk = k;
      nk.rho.push_back(static_cast<uint8_t>(w));
      nk.sigma.push_back(static_cast<uint8_t>(w));
      r.terms_.emplace(std::move(nk), c);
    }
  }
  return r;
}

PAElement PAElement::rotate(int clicks) const {
  int n = level();
  if (clicks % (2 * std::max(n, 1)) == 0) return *this;
  auto coords = handle_->section(*this);
  const auto& piv = handle_->pivots(n);
  const auto& diag = handle_->diagrams(n);
  PAElement r(handle_, n, n);
  for (size_t j = 0; j < piv.size(); ++j) {
    if (coords[j].is_zero()) continue;
    r += handle_->phi(skein::rotate(diag[piv[j]], clicks)).scaled(coords[j]);
  }
  return r;
}

Scalar PAElement::coefficient(const PathPair& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Scalar::zero(handle_->field()) : it->second;
}

Scalar PAElement::scalar_value() const {
  if (bottom_ != 0 || top_ != 0)
    throw std::logic_error("scalar_value: shape is not (0,0)");
  return coefficient(PathPair{Walk{1}, Walk{1}});
}

bool PAElement::is_zero(const Tolerance& tol) const {
  for (const auto& [k, c] : terms_)
    if (!near_zero(c, tol)) return false;
  return true;
}

Scalar PAElement::inner(const PAElement& o) const {
  check_same_shape(o);
  return (o.star() * *this).markov_trace();
}

std::vector<std::pair<TLDiagram, Scalar>> PAElement::to_diagrams() const {
  int n = level();
  auto coords = handle_->section(*this);
  const auto& piv = handle_->pivots(n);
  const auto& diag = handle_->diagrams(n);
  std::vector<std::pair<TLDiagram, Scalar>> out;
  for (size_t j = 0; j < piv.size(); ++j)
    if (!coords[j].is_zero()) out.emplace_back(diag[piv[j]], coords[j]);
  return out;
}

std::vector<std::pair<PathPair, Scalar>> PAElement::sorted_terms() const {
  std::vector<std::pair<PathPair, Scalar>> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.rho != b.first.rho) return a.first.rho < b.first.rho;
    return a.first.sigma < b.first.sigma;
  });
  return out;
}

// ---------------------------------------------------------------------------
// PAHandle

PAHandle::PAHandle(int N, int max_level)
    : N_(N),
      max_level_(max_level),
      field_(field_for(N)),
      engine_(make_path_engine(field_)) {
  levels_.resize(kMaxCachedLevel + 1);
}

PAPtr PAHandle::build(int N, int max_level) {
  if (N < 4)
    throw std::invalid_argument(
        "build_quotient_tower: loop parameter delta = 2cos(pi/N) must exceed 1 "
        "(require N >= 4)");
  if (max_level < 0) throw std::invalid_argument("negative max level");
  return PAPtr(new PAHandle(N, max_level));
}

PAHandle::LevelCache& PAHandle::at(int n) {
  if (n < 0 || n > kMaxCachedLevel)
    throw std::invalid_argument("level out of cache range");
  return levels_[n];
}

long PAHandle::dim(int n) const { return quotient_dim(N_, n); }

const std::vector<TLDiagram>& PAHandle::diagrams(int n) {
  auto& lc = at(n);
  if (!lc.diagrams) lc.diagrams = all_diagrams(n);
  return *lc.diagrams;
}

const std::vector<Walk>& PAHandle::walks(int n) {
  auto& lc = at(n);
  if (!lc.walks) lc.walks = walks_from_star(N_, n);
  return *lc.walks;
}

const std::vector<PathPair>& PAHandle::pairs(int n) {
  const auto& wk = walks(n);
  auto& lc = at(n);
  if (!lc.pairs) {
    std::vector<PathPair> ps;
    for (const auto& rho : wk)
      for (const auto& sigma : wk)
        if (rho.back() == sigma.back()) ps.push_back(PathPair{rho, sigma});
    for (size_t i = 0; i < ps.size(); ++i)
      lc.pair_idx.emplace(ps[i], static_cast<int>(i));
    lc.pairs = std::move(ps);
  }
  return *lc.pairs;
}

int PAHandle::pair_index(int n, const PathPair& key) {
  pairs(n);
  auto& lc = at(n);
  auto it = lc.pair_idx.find(key);
  if (it == lc.pair_idx.end()) throw std::invalid_argument("unknown path pair");
  return it->second;
}

PAElement PAHandle::phi(const TLDiagram& d) {
  int n = d.level();
  PathState<Scalar> state;
  for (const auto& rho : walks(n))
    state.emplace(PathPair{rho, rho}, Scalar::one(field_));
  state = engine_.apply_diagram(state, diagram_ops(d), 0);
  engine_.prune(state);
  return PAElement(shared_from_this(), n, n, std::move(state));
}

std::vector<std::vector<Scalar>> PAHandle::gram(int n) {
  const auto& ds = diagrams(n);
  size_t m = ds.size();
  std::vector<std::vector<Scalar>> g(m,
                                     std::vector<Scalar>(m, Scalar::zero(field_)));
  std::vector<TLDiagram> flipped;
  flipped.reserve(m);
  for (const auto& d : ds) flipped.push_back(flip(d));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      auto st = stack(flipped[j], ds[i]);
      long e = st.loops + closure_loops(st.diagram) - n;
      g[i][j] = delta().pow(e);
    }
  }
  return g;
}

std::vector<Scalar> PAHandle::phi_column(int n, const TLDiagram& d) {
  PAElement el = phi(d);
  const auto& ps = pairs(n);
  std::vector<Scalar> col(ps.size(), Scalar::zero(field_));
  for (const auto& [k, c] : el.terms()) col[pair_index(n, k)] = c;
  return col;
}

void PAHandle::build_pivots(LevelCache& lc, int n) {
  if (n > 10)
    throw std::runtime_error(
        "section basis unavailable above level 10; restructure the "
        "computation to expand boxes at lower levels");
  const auto& ds = diagrams(n);
  long q = dim(n);
  std::vector<int> pivot_rows;
  std::vector<std::vector<Scalar>> reduced;
  std::vector<int> chosen;
  for (size_t di = 0; di < ds.size() && static_cast<long>(chosen.size()) < q;
       ++di) {
    auto col = phi_column(n, ds[di]);
    for (size_t k = 0; k < reduced.size(); ++k) {
      const Scalar& f = col[pivot_rows[k]];
      if (f.is_zero()) continue;
      Scalar fc = f;
      for (size_t r = 0; r < col.size(); ++r)
        if (!reduced[k][r].is_zero()) col[r] -= fc * reduced[k][r];
    }
    int piv = -1;
    for (size_t r = 0; r < col.size(); ++r)
      if (!col[r].is_zero()) {
        piv = static_cast<int>(r);
        break;
      }
    if (piv < 0) continue;
    Scalar inv = col[piv].inverse();
    for (auto& v : col) v = v * inv;
    pivot_rows.push_back(piv);
    reduced.push_back(std::move(col));
    chosen.push_back(static_cast<int>(di));
  }
  if (static_cast<long>(chosen.size()) != q)
    throw std::logic_error("pivot search did not reach the quotient dimension");

  // LU factorization of the pivot-column matrix for later section solves.
  size_t qq = chosen.size();
  std::vector<std::vector<Scalar>> m(qq,
                                     std::vector<Scalar>(qq, Scalar::zero(field_)));
  for (size_t j = 0; j < qq; ++j) {
    auto col = phi_column(n, ds[chosen[j]]);
    for (size_t r = 0; r < qq; ++r) m[r][j] = col[r];
  }
  std::vector<int> perm(qq);
  for (size_t i = 0; i < qq; ++i) perm[i] = static_cast<int>(i);
  for (size_t k = 0; k < qq; ++k) {
    size_t pr = k;
    while (pr < qq && m[pr][k].is_zero()) ++pr;
    if (pr == qq) throw std::logic_error("singular pivot matrix");
    std::swap(m[k], m[pr]);
    std::swap(perm[k], perm[pr]);
    Scalar inv = m[k][k].inverse();
    for (size_t i = k + 1; i < qq; ++i) {
      if (m[i][k].is_zero()) continue;
      Scalar f = m[i][k] * inv;
      m[i][k] = f;
      for (size_t j = k + 1; j < qq; ++j)
        if (!m[k][j].is_zero()) m[i][j] -= f * m[k][j];
    }
  }
  lc.lu = std::move(m);
  lc.lu_perm = std::move(perm);
  lc.pivots = std::move(chosen);
}

const std::vector<int>& PAHandle::pivots(int n) {
  pairs(n);
  diagrams(n);
  auto& lc = at(n);
  if (!lc.pivots) build_pivots(lc, n);
  return *lc.pivots;
}

std::vector<Scalar> PAHandle::lu_solve(const LevelCache& lc,
                                       std::vector<Scalar> rhs) const {
  size_t q = lc.lu.size();
  std::vector<Scalar> b(q, Scalar::zero(field_));
  for (size_t i = 0; i < q; ++i) b[i] = rhs[lc.lu_perm[i]];
  for (size_t i = 0; i < q; ++i)
    for (size_t j = 0; j < i; ++j)
      if (!lc.lu[i][j].is_zero() && !b[j].is_zero()) b[i] -= lc.lu[i][j] * b[j];
  for (size_t ii = q; ii-- > 0;) {
    for (size_t j = ii + 1; j < q; ++j)
      if (!lc.lu[ii][j].is_zero() && !b[j].is_zero())
        b[ii] -= lc.lu[ii][j] * b[j];
    b[ii] = b[ii] / lc.lu[ii][ii];
  }
  return b;
}

std::vector<Scalar> PAHandle::section(const PAElement& x) {
  int n = x.level();
  pivots(n);
  const auto& ps = pairs(n);
  std::vector<Scalar> rhs(ps.size(), Scalar::zero(field_));
  for (const auto& [k, c] : x.terms()) rhs[pair_index(n, k)] = c;
  auto& lc = at(n);
  return lu_solve(lc, std::move(rhs));
}

std::vector<std::vector<Scalar>> PAHandle::radical_basis(int n) {
  const auto& ds = diagrams(n);
  pairs(n);
  std::vector<int> pivot_rows;
  std::vector<std::vector<Scalar>> reduced;
  std::vector<std::vector<Scalar>> exprs;  // reduced[k] over original columns
  std::vector<std::vector<Scalar>> kernel;
  Scalar zero = Scalar::zero(field_);
  for (size_t di = 0; di < ds.size(); ++di) {
    auto col = phi_column(n, ds[di]);
    std::vector<Scalar> expr(ds.size(), zero);
    expr[di] = Scalar::one(field_);
    for (size_t k = 0; k < reduced.size(); ++k) {
      const Scalar f = col[pivot_rows[k]];
      if (f.is_zero()) continue;
      for (size_t r = 0; r < col.size(); ++r)
        if (!reduced[k][r].is_zero()) col[r] -= f * reduced[k][r];
      for (size_t r = 0; r < expr.size(); ++r)
        if (!exprs[k][r].is_zero()) expr[r] -= f * exprs[k][r];
    }
    int piv = -1;
    for (size_t r = 0; r < col.size(); ++r)
      if (!col[r].is_zero()) {
        piv = static_cast<int>(r);
        break;
      }
    if (piv < 0) {
      kernel.push_back(std::move(expr));
      continue;
    }
    Scalar inv = col[piv].inverse();
    for (auto& v : col) v = v * inv;
    for (auto& v : expr) v = v * inv;
    pivot_rows.push_back(piv);
    reduced.push_back(std::move(col));
    exprs.push_back(std::move(expr));
  }
  return kernel;
}

PathEngine<Scalar>::ExpandedBox PAHandle::expand_box(const PAElement& x,
                                                     int rot) {
  int m = x.level();
  auto coords = section(x);
  const auto& piv = pivots(m);
  const auto& ds = diagrams(m);
  PathEngine<Scalar>::ExpandedBox box;
  box.level = m;
  for (size_t j = 0; j < piv.size(); ++j) {
    if (coords[j].is_zero()) continue;
    TLDiagram d = rot ? skein::rotate(ds[piv[j]], rot) : ds[piv[j]];
    box.terms.emplace_back(diagram_ops(d), coords[j]);
  }
  return box;
}

PathEngine<double>::ExpandedBox PAHandle::expand_box_double(const PAElement& x,
                                                            int rot) {
  auto exact = expand_box(x, rot);
  PathEngine<double>::ExpandedBox box;
  box.level = exact.level;
  for (auto& [ops, c] : exact.terms)
    box.terms.emplace_back(std::move(ops), to_double(c));
  return box;
}

// ---------------------------------------------------------------------------
// Constructors and free operations

PAElement unit_element(const PAPtr& h, int n) {
  PathState<Scalar> state;
  for (const auto& rho : h->walks(n))
    state.emplace(PathPair{rho, rho}, Scalar::one(h->field()));
  return PAElement(h, n, n, std::move(state));
}

PAElement zero_element(const PAPtr& h, int bottom, int top) {
  return PAElement(h, bottom, top);
}

PAElement tl_generator(const PAPtr& h, int n, int i) {
  if (i < 1 || i > n - 1) throw std::invalid_argument("tl_generator: bad index");
  const auto& eng = h->engine();
  PAElement u = unit_element(h, n);
  PathState<Scalar> s = eng.apply_cap(u.terms(), i - 1);
  s = eng.apply_cup(s, i - 1);
  PAElement r(h, n, n, std::move(s));
  return r.scaled(eng.delta_inv);
}

PAElement from_diagram(const PAPtr& h, const TLDiagram& d) { return h->phi(d); }

PAElement from_path_pair(const PAPtr& h, int bottom, int top,
                         const PathPair& key, const Scalar& c) {
  if (static_cast<int>(key.rho.size()) != bottom + 1 ||
      static_cast<int>(key.sigma.size()) != top + 1 ||
      key.rho.back() != key.sigma.back() || key.rho[0] != 1 || key.sigma[0] != 1)
    throw std::invalid_argument("from_path_pair: bad walk pair");
  PathState<Scalar> s;
  s.emplace(key, c);
  return PAElement(h, bottom, top, std::move(s));
}

PAElement random_element(const PAPtr& h, int n, unsigned seed) {
  std::mt19937 gen(seed);
  PathState<Scalar> s;
  const auto& wk = h->walks(n);
  for (const auto& rho : wk) {
    for (const auto& sigma : wk) {
      if (rho.back() != sigma.back()) continue;
      long v = static_cast<long>(gen() % 7) - 3;
      if (v == 0) continue;
      s.emplace(PathPair{rho, sigma}, Scalar::exact_rational(h->field(), Rat(v)));
    }
  }
  return PAElement(h, n, n, std::move(s));
}

PAElement multiply(const PAElement& x, const PAElement& y) { return x * y; }
Scalar markov_trace(const PAElement& x) { return x.markov_trace(); }
PAElement conditional_expect(const PAElement& x) { return x.expect_right(); }
PAElement involution(const PAElement& x) { return x.star(); }

PAElement evaluate_circuit(const PAPtr& h, const Circuit& c,
                           const std::map<int, PAElement>& inputs) {
  auto diag = validate(c);
  if (!diag.ok) {
    std::string msg = "evaluate_circuit: invalid circuit";
    for (const auto& m : diag.messages) msg += "; " + m;
    throw std::invalid_argument(msg);
  }
  for (const auto& [id, arity] : c.box_arity) {
    auto it = inputs.find(id);
    if (it == inputs.end())
      throw std::invalid_argument("evaluate_circuit: missing input for box " +
                                  std::to_string(id));
    const PAElement& x = it->second;
    if (x.handle()->N() != h->N())
      throw std::invalid_argument("evaluate_circuit: handle mismatch");
    if (x.bottom() != x.top() || 2 * x.level() != arity)
      throw std::invalid_argument("evaluate_circuit: box arity mismatch");
  }

  const auto& eng = h->engine();
  std::map<std::pair<int, int>, PathEngine<Scalar>::ExpandedBox> expansions;
  auto box_for = [&](int id, int rot) -> const PathEngine<Scalar>::ExpandedBox& {
    auto key = std::make_pair(id, rot);
    auto it = expansions.find(key);
    if (it == expansions.end())
      it = expansions.emplace(key, h->expand_box(inputs.at(id), rot)).first;
    return it->second;
  };

  PathState<Scalar> state;
  for (const auto& rho : h->walks(c.bottom))
    state.emplace(PathPair{rho, rho}, Scalar::one(h->field()));
  for (const auto& row : c.rows) {
    int pos = 0;
    for (const auto& cell : row) {
      switch (cell.kind) {
        case Cell::Kind::Id:
          pos += 1;
          break;
        case Cell::Kind::Cap:
          state = eng.apply_cap(state, pos);
          break;
        case Cell::Kind::Cup:
          state = eng.apply_cup(state, pos);
          pos += 2;
          break;
        case Cell::Kind::Box: {
          const auto& box = box_for(cell.box_id, cell.rot);
          state = eng.apply_box(state, box, pos);
          pos += box.level;
          break;
        }
      }
    }
    eng.prune(state);
  }
  return PAElement(h, c.bottom, c.top, std::move(state));
}

}  // namespace skein
