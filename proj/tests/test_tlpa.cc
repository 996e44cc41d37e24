#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include <map>
#include <vector>

#include "doctest.h"
#include "skein/tlpa.hpp"
#include "support/naive_tl.hpp"

using namespace skein;

namespace {

PAElement lift(const PAPtr& h, const naive::Element& e) {
  PAElement acc = zero_element(h, e.n, e.n);
  for (const auto& [m, c] : e.coef) acc += h->phi(TLDiagram{m}).scaled(c);
  return acc;
}

naive::Element nelem(const TLDiagram& d, const FieldPtr& f) {
  naive::Element e;
  e.n = d.level();
  e.coef.emplace(d.match, Scalar::one(f));
  return e;
}

bool same(const PAElement& a, const PAElement& b) { return (a - b).is_zero(); }

}  // namespace

TEST_CASE("tower construction and quotient dimensions") {
  CHECK_THROWS_AS(PAHandle::build(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(PAHandle::build(2, 4), std::invalid_argument);

  auto h4 = PAHandle::build(4, 8);
  std::vector<long> want4 = {1, 1, 2, 4, 8, 16, 32};
  for (int n = 0; n <= 6; ++n) CHECK(h4->dim(n) == want4[n]);
  for (int n = 0; n <= 6; ++n)
    CHECK(static_cast<long>(h4->pairs(n).size()) == want4[n]);
  for (int n = 0; n <= 5; ++n)
    CHECK(static_cast<long>(h4->pivots(n).size()) == want4[n]);

  auto h5 = PAHandle::build(5, 6);
  std::vector<long> want5 = {1, 1, 2, 5, 13, 34, 89};
  for (int n = 0; n <= 6; ++n) CHECK(h5->dim(n) == want5[n]);
  for (int n = 0; n <= 4; ++n)
    CHECK(static_cast<long>(h5->pivots(n).size()) == want5[n]);

  auto h6 = PAHandle::build(6, 2);
  CHECK(h6->dim(0) == 1);
}

TEST_CASE("diagram utilities") {
  std::vector<size_t> catalan = {1, 1, 2, 5, 14, 42, 132};
  for (int n = 0; n <= 6; ++n) {
    auto ds = all_diagrams(n);
    CHECK(ds.size() == catalan[n]);
    for (size_t i = 0; i + 1 < ds.size(); ++i) CHECK(ds[i] < ds[i + 1]);
  }
  auto ds = all_diagrams(4);
  for (const auto& d : ds) {
    CHECK(flip(flip(d)) == d);
    CHECK(rotate(d, 8) == d);
    CHECK(rotate(rotate(d, 3), -3) == d);
    auto st = stack(identity_diagram(4), d);
    CHECK(st.diagram == d);
    CHECK(st.loops == 0);
  }
  CHECK(closure_loops(identity_diagram(3)) == 3);
}

TEST_CASE("path image is an algebra homomorphism") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 6);
    Scalar delta = h->delta();
    for (int n = 1; n <= 4; ++n) {
      auto ds = all_diagrams(n);
      std::vector<PAElement> im;
      for (const auto& d : ds) im.push_back(h->phi(d));
      for (size_t i = 0; i < ds.size(); ++i) {
        CHECK(markov_trace(im[i]).equals(
            delta.pow(closure_loops(ds[i]) - n)));
        for (size_t j = 0; j < ds.size(); ++j) {
          auto [m, loops] = naive::stack_match(ds[i].match, ds[j].match);
          PAElement rhs = h->phi(TLDiagram{m}).scaled(delta.pow(loops));
          CHECK(same(im[i] * im[j], rhs));
        }
      }
      PAElement u = unit_element(h, n);
      for (const auto& x : im) {
        CHECK(same(u * x, x));
        CHECK(same(x * u, x));
      }
    }
  }
}

TEST_CASE("involution matches vertical reflection") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 5);
    for (int n = 1; n <= 4; ++n) {
      for (const auto& d : all_diagrams(n))
        CHECK(same(h->phi(d).star(), h->phi(flip(d))));
    }
    for (unsigned seed : {11u, 12u}) {
      PAElement x = random_element(h, 3, seed);
      PAElement y = random_element(h, 3, seed + 50);
      CHECK(same((x * y).star(), y.star() * x.star()));
      CHECK(same(x.star().star(), x));
    }
  }
}

TEST_CASE("rotation matches diagram relabeling") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 4);
    for (int n = 1; n <= 3; ++n) {
      for (const auto& d : all_diagrams(n)) {
        for (int r : {1, 2, 3, -1}) {
          CHECK(same(h->phi(d).rotate(r),
                     h->phi(skein::rotate(d, r))));
        }
        CHECK(same(h->phi(d).rotate(1).rotate(1),
                   h->phi(skein::rotate(d, 2))));
        CHECK(same(h->phi(d).rotate(2 * n), h->phi(d)));
      }
    }
  }
}

TEST_CASE("Temperley-Lieb generator relations") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 5);
    int n = 4;
    Scalar di2 = h->delta().pow(-2);
    std::vector<PAElement> e;
    for (int i = 1; i <= n - 1; ++i) e.push_back(tl_generator(h, n, i));
    for (int i = 0; i < n - 1; ++i) {
      CHECK(same(e[i] * e[i], e[i]));
      CHECK(same(e[i].star(), e[i]));
      for (int j = 0; j < n - 1; ++j) {
        if (std::abs(i - j) == 1)
          CHECK(same(e[i] * e[j] * e[i], e[i].scaled(di2)));
        if (std::abs(i - j) >= 2) CHECK(same(e[i] * e[j], e[j] * e[i]));
      }
    }
  }
}

TEST_CASE("Markov trace values") {
  auto h4 = PAHandle::build(4, 4);
  CHECK(markov_trace(unit_element(h4, 3)).equals(Scalar::one(h4->field())));
  Scalar half = Scalar::exact_rational(h4->field(), Rat(1, 2));
  CHECK(markov_trace(tl_generator(h4, 3, 1)).equals(half));
  CHECK(markov_trace(tl_generator(h4, 3, 2)).equals(half));

  auto h5 = PAHandle::build(5, 4);
  Scalar fib = Scalar::exact_coeffs(h5->field(), {Rat(2), Rat(-1)});
  CHECK(markov_trace(tl_generator(h5, 2, 1)).equals(fib));
}

TEST_CASE("conditional expectation and inclusion") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 5);
    Scalar di2 = h->delta().pow(-2);
    CHECK(same(conditional_expect(unit_element(h, 4)), unit_element(h, 3)));
    CHECK(same(conditional_expect(tl_generator(h, 4, 3)),
               unit_element(h, 3).scaled(di2)));

    PAElement x = random_element(h, 3, 77);
    PAElement y = random_element(h, 3, 78);
    CHECK(markov_trace(conditional_expect(x)).equals(markov_trace(x)));
    PAElement ix = x.include_right();
    PAElement iy = y.include_right();
    CHECK(same(ix * iy, (x * y).include_right()));
    CHECK(markov_trace(ix).equals(markov_trace(x)));
    CHECK(same(conditional_expect(ix), x));
    // Markov property for the rightmost generator.
    PAElement e3 = tl_generator(h, 4, 3);
    CHECK(markov_trace(ix * e3).equals(markov_trace(x) * di2));
    // Bimodule property of the expectation.
    CHECK(same(conditional_expect(ix * random_element(h, 4, 79) * iy),
               x * conditional_expect(random_element(h, 4, 79)) * y));
  }
}

TEST_CASE("bends invert and closures reproduce the trace") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 5);
    PAElement x = random_element(h, 3, 5);
    CHECK(same(x.bend_br().bend_rb(), x));
    CHECK(same(x.bend_rb().bend_br(), x));
    CHECK(x.bend_br().bottom() == 4);
    CHECK(x.bend_br().top() == 2);

    PAElement closed = x;
    for (int i = 0; i < 3; ++i) closed = closed.close_right();
    Scalar full = closed.scalar_value();
    CHECK(markov_trace(x).equals(full * h->delta().pow(-3)));
  }
}

TEST_CASE("radical of the trace form") {
  auto h4 = PAHandle::build(4, 5);
  auto rad3 = h4->radical_basis(3);
  auto rad4 = h4->radical_basis(4);
  CHECK(rad3.size() == 1);
  CHECK(rad4.size() == 6);
  auto h5 = PAHandle::build(5, 5);
  auto rad5 = h5->radical_basis(4);
  CHECK(rad5.size() == 1);

  // Radical vectors are annihilated by the independently computed Gram
  // matrix, their images vanish in the quotient, and the radical is stable
  // under multiplication by arbitrary diagrams.
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 5);
    int n = (N == 4) ? 3 : 4;
    auto ds = all_diagrams(n);
    std::vector<naive::Match> ms;
    for (const auto& d : ds) ms.push_back(d.match);
    auto G = naive::gram(ms, h->delta(), n);
    for (const auto& v : h->radical_basis(n)) {
      PAElement img = zero_element(h, n, n);
      naive::Element rel;
      rel.n = n;
      for (size_t j = 0; j < ds.size(); ++j) {
        if (v[j].is_zero()) continue;
        img += h->phi(ds[j]).scaled(v[j]);
        naive::add_term(rel, ds[j].match, v[j]);
      }
      CHECK(img.is_zero());
      for (size_t r = 0; r < G.size(); ++r) {
        Scalar dot = Scalar::zero(h->field());
        for (size_t j = 0; j < ds.size(); ++j) dot += G[r][j] * v[j];
        CHECK(dot.is_zero());
      }
      for (const auto& d : ds) {
        auto prod = naive::mul(nelem(d, h->field()), rel, h->delta());
        for (size_t r = 0; r < G.size(); ++r) {
          Scalar dot = Scalar::zero(h->field());
          for (size_t j = 0; j < ds.size(); ++j) {
            auto it = prod.coef.find(ds[j].match);
            if (it != prod.coef.end()) dot += G[r][j] * it->second;
          }
          CHECK(dot.is_zero());
        }
      }
    }
  }
}

TEST_CASE("trace form is positive semidefinite with quotient rank") {
  auto h = PAHandle::build(4, 5);
  for (int n = 2; n <= 4; ++n) {
    auto G = h->gram(n);
    size_t m = G.size();
    Eigen::MatrixXd M(m, m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        M(i, j) = static_cast<double>(Scalar(G[i][j]).to_float());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    long positive = 0;
    for (long i = 0; i < es.eigenvalues().size(); ++i) {
      CHECK(es.eigenvalues()[i] > -1e-9);
      if (es.eigenvalues()[i] > 1e-8) ++positive;
    }
    CHECK(positive == h->dim(n));
  }
}

TEST_CASE("circuit evaluation") {
  for (int N : {4, 5}) {
    auto h = PAHandle::build(N, 6);
    Scalar delta = h->delta();

    // A lone box is the identity circuit on its input.
    Circuit ident;
    ident.rows = {{Cell::box(1)}};
    ident.bottom = 2;
    ident.top = 2;
    ident.box_arity[1] = 4;
    PAElement x = random_element(h, 2, 3);
    CHECK(same(evaluate_circuit(h, ident, {{1, x}}), x));

    // A closed loop evaluates to delta.
    Circuit circle;
    circle.rows = {{Cell::cup()}, {Cell::cap()}};
    circle.bottom = 0;
    circle.top = 0;
    CHECK(evaluate_circuit(h, circle, {}).scalar_value().equals(delta));

    // Cap then cup is delta times the Jones projection.
    Circuit hourglass;
    hourglass.rows = {{Cell::cap()}, {Cell::cup()}};
    hourglass.bottom = 2;
    hourglass.top = 2;
    CHECK(same(evaluate_circuit(h, hourglass, {}),
               tl_generator(h, 2, 1).scaled(delta)));

    // Stacked boxes multiply (upper box acts from the left).
    Circuit stacked;
    stacked.rows = {{Cell::box(1)}, {Cell::box(2)}};
    stacked.bottom = 2;
    stacked.top = 2;
    stacked.box_arity[1] = 4;
    stacked.box_arity[2] = 4;
    PAElement y = random_element(h, 2, 4);
    CHECK(same(evaluate_circuit(h, stacked, {{1, x}, {2, y}}), y * x));

    // Side-by-side boxes agree with the diagrammatic tensor.
    Circuit side;
    side.rows = {{Cell::box(1), Cell::box(2)}};
    side.bottom = 3;
    side.top = 3;
    side.box_arity[1] = 4;
    side.box_arity[2] = 2;
    auto ds2 = all_diagrams(2);
    auto ds1 = all_diagrams(1);
    for (const auto& a : ds2) {
      for (const auto& b : ds1) {
        auto nt = naive::tensor(nelem(a, h->field()), nelem(b, h->field()));
        CHECK(same(evaluate_circuit(
                       h, side, {{1, h->phi(a)}, {2, h->phi(b)}}),
                   lift(h, nt)));
      }
    }

    // Rotation offsets on boxes match element rotation.
    Circuit rot;
    rot.rows = {{Cell::box(1, 1)}};
    rot.bottom = 2;
    rot.top = 2;
    rot.box_arity[1] = 4;
    CHECK(same(evaluate_circuit(h, rot, {{1, x}}), x.rotate(1)));

    // DSL round trip through the evaluator.
    Circuit dsl = parse_circuit("n\nB1\n", {{1, 4}});
    PAElement capped(h, 2, 0, h->engine().apply_cap(x.terms(), 0));
    CHECK(same(evaluate_circuit(h, dsl, {{1, x}}), capped));

    CHECK_THROWS_AS(evaluate_circuit(h, ident, {}), std::invalid_argument);
  }
}

TEST_CASE("deterministic bases and term order") {
  auto a = PAHandle::build(4, 6);
  auto b = PAHandle::build(4, 6);
  for (int n = 2; n <= 4; ++n) CHECK(a->pivots(n) == b->pivots(n));
  PAElement xa = random_element(a, 3, 9);
  PAElement xb = random_element(b, 3, 9);
  auto ta = xa.sorted_terms();
  auto tb = xb.sorted_terms();
  REQUIRE(ta.size() == tb.size());
  for (size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].first == tb[i].first);
    CHECK(ta[i].second.equals(tb[i].second));
  }
  auto da = tl_generator(a, 3, 1).to_diagrams();
  auto db = tl_generator(b, 3, 1).to_diagrams();
  REQUIRE(da.size() == db.size());
  for (size_t i = 0; i < da.size(); ++i) {
    CHECK(da[i].first == db[i].first);
    CHECK(da[i].second.equals(db[i].second));
  }
}
