#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "skein/multimatrix.hpp"

using namespace skein;

namespace {

bool same(const PAElement& a, const PAElement& b) { return (a - b).is_zero(); }

double max_abs_coeff(const PAElement& e) {
  double m = 0.0;
  for (const auto& [key, c] : e.terms())
    m = std::max(m, std::abs(static_cast<double>(c.to_float())));
  return m;
}

Scalar rat(const FieldPtr& f, long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return Scalar::exact_rational(f, r);
}

}  // namespace

TEST_CASE("block decomposition shapes") {
  auto h4 = PAHandle::build(4, 6);
  auto d0 = decompose(h4, 0);
  CHECK(d0.labels == std::vector<int>{1});
  CHECK(d0.sizes == std::vector<int>{1});
  CHECK(same(d0.central[0], unit_element(h4, 0)));
  CHECK(d0.star_exact);

  auto d2 = decompose(h4, 2);
  CHECK(d2.labels == std::vector<int>{1, 3});
  CHECK(d2.sizes == std::vector<int>{1, 1});
  for (int b = 0; b < 2; ++b)
    CHECK(d2.trace_e11[b].equals(rat(h4->field(), 1, 2)));

  auto d3 = decompose(h4, 3);
  CHECK(d3.labels == std::vector<int>{2});
  CHECK(d3.sizes == std::vector<int>{2});
  long sq = 0;
  for (int s : d3.sizes) sq += static_cast<long>(s) * s;
  CHECK(sq == h4->dim(3));

  auto h5 = PAHandle::build(5, 6);
  auto e4 = decompose(h5, 4);
  CHECK(e4.labels == std::vector<int>{1, 3});
  CHECK(e4.sizes == std::vector<int>{2, 3});
  CHECK_FALSE(e4.star_exact);
  CHECK(decompose(h5, 2).star_exact);

  auto e3 = decompose(h5, 3);
  int b2 = e3.block_of(2);
  CHECK((e3.unit_weights[b2][0] / e3.unit_weights[b2][1])
            .equals(h5->delta()));

  CHECK_THROWS_AS(decompose(h4, 7), std::invalid_argument);
}

TEST_CASE("matrix unit axioms") {
  for (auto [N, n] : std::vector<std::pair<int, int>>{
           {4, 2}, {4, 3}, {4, 4}, {5, 3}, {5, 4}}) {
    auto h = PAHandle::build(N, 5);
    auto dec = decompose(h, n, 11);
    int nb = static_cast<int>(dec.labels.size());

    PAElement total = zero_element(h, n, n);
    for (int b = 0; b < nb; ++b)
      for (int i = 0; i < dec.sizes[b]; ++i) total += dec.unit(b, i, i);
    CHECK(same(total, unit_element(h, n)));

    for (int b = 0; b < nb; ++b) {
      int m = dec.sizes[b];
      PAElement diag_sum = zero_element(h, n, n);
      for (int i = 0; i < m; ++i) diag_sum += dec.unit(b, i, i);
      CHECK(same(diag_sum, dec.central[b]));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const Scalar ratio = dec.unit_weights[b][i] / dec.unit_weights[b][j];
          CHECK(same(dec.unit(b, i, j).star(),
                     dec.unit(b, j, i).scaled(ratio)));
          if (dec.star_exact)
            CHECK(same(dec.unit(b, i, j).star(), dec.unit(b, j, i)));
          for (int l = 0; l < m; ++l)
            for (int r = 0; r < m; ++r) {
              PAElement prod = dec.unit(b, i, j) * dec.unit(b, l, r);
              if (j == l)
                CHECK(same(prod, dec.unit(b, i, r)));
              else
                CHECK(prod.is_zero());
            }
        }
      for (int b2 = 0; b2 < nb; ++b2) {
        if (b2 == b) continue;
        CHECK((dec.unit(b, 0, 0) * dec.unit(b2, 0, 0)).is_zero());
        CHECK(same(dec.central[b] * dec.central[b2], zero_element(h, n, n)));
      }
      CHECK(same(dec.central[b] * dec.central[b], dec.central[b]));
      Scalar mu_v = quantum_integer(dec.labels[b], h->delta());
      CHECK(dec.trace_e11[b].equals(h->delta().pow(-n) * mu_v));
    }

    for (const auto& d : h->diagrams(n)) {
      PAElement x = h->phi(d);
      for (int b = 0; b < nb; ++b)
        CHECK(same(dec.central[b] * x, x * dec.central[b]));
    }
  }
}

TEST_CASE("gauge determinism and independence") {
  auto h = PAHandle::build(4, 5);
  auto a = decompose(h, 3, 1);
  auto b = decompose(h, 3, 1);
  auto c = decompose(h, 3, 2);

  for (size_t blk = 0; blk < a.labels.size(); ++blk) {
    for (size_t u = 0; u < a.units[blk].size(); ++u)
      CHECK(same(a.units[blk][u], b.units[blk][u]));
    CHECK(same(a.central[blk], c.central[blk]));
    CHECK(a.trace_e11[blk].equals(c.trace_e11[blk]));
  }

  bool differs = false;
  for (size_t blk = 0; blk < a.labels.size(); ++blk)
    for (size_t u = 0; u < a.units[blk].size(); ++u)
      differs = differs || !same(a.units[blk][u], c.units[blk][u]);
  CHECK(differs);

  // The separability element of each block does not depend on the gauge.
  for (auto* dec : {&a, &c}) {
    (void)dec;
  }
  for (size_t blk = 0; blk < a.labels.size(); ++blk) {
    int m = a.sizes[blk];
    PAElement left = zero_element(h, 3, 3);
    PAElement right = left;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        left += a.units[blk][i * m + j] * a.units[blk][j * m + i].star();
        right += c.units[blk][i * m + j] * c.units[blk][j * m + i].star();
      }
    CHECK(same(left, right));
  }
}

TEST_CASE("principal graph N=4") {
  auto h = PAHandle::build(4, 6);
  auto pg = principal_graph(h);
  CHECK(pg.star == 1);
  CHECK(pg.depth == 2);
  CHECK(pg.k == 1);
  CHECK(pg.vertices == std::vector<int>{1, 2, 3});
  CHECK(pg.even_vertices == std::vector<int>{1, 3});
  CHECK(pg.index.equals(rat(h->field(), 2)));
  CHECK(pg.mu_of(1).equals(rat(h->field(), 1)));
  CHECK(pg.mu_of(2).equals(h->delta()));
  CHECK(pg.mu_of(3).equals(rat(h->field(), 1)));
  CHECK(pg.distance_of(1) == 0);
  CHECK(pg.distance_of(2) == 1);
  CHECK(pg.distance_of(3) == 2);
  std::vector<std::vector<int>> want = {{0, 1, 0}, {1, 0, 1}, {0, 1, 0}};
  CHECK(pg.adjacency == want);
}

TEST_CASE("principal graph N=5") {
  auto h = PAHandle::build(5, 8);
  auto pg = principal_graph(h);
  CHECK(pg.depth == 3);
  CHECK(pg.k == 2);
  CHECK(pg.vertices == std::vector<int>{1, 2, 3, 4});
  CHECK(pg.even_vertices == std::vector<int>{1, 3});
  Scalar phi = h->delta();
  CHECK(pg.mu_of(2).equals(phi));
  CHECK(pg.mu_of(3).equals(phi));
  CHECK(pg.mu_of(4).equals(Scalar::one(h->field())));
  CHECK(pg.index.equals(rat(h->field(), 2) + phi));
  CHECK((pg.mu_of(3) * pg.mu_of(3)).equals(Scalar::one(h->field()) + phi));
}

TEST_CASE("insufficient level reporting") {
  CHECK_THROWS_WITH_AS(principal_graph(PAHandle::build(4, 3)),
                       doctest::Contains("at least 4"), std::runtime_error);
  CHECK_THROWS_WITH_AS(principal_graph(PAHandle::build(5, 4)),
                       doctest::Contains("at least 5"), std::runtime_error);
}

TEST_CASE("bratteli matrices reflect past the depth") {
  auto transpose = [](const std::vector<std::vector<int>>& m) {
    std::vector<std::vector<int>> t(m[0].size(), std::vector<int>(m.size()));
    for (size_t i = 0; i < m.size(); ++i)
      for (size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
  };

  auto h4 = PAHandle::build(4, 6);
  auto b2 = bratteli_matrix(h4, 2);
  auto b3 = bratteli_matrix(h4, 3);
  CHECK(b2 == std::vector<std::vector<int>>{{1}, {1}});
  CHECK(b3 == transpose(b2));
  CHECK(bratteli_matrix(h4, 4) == b2);

  auto h5 = PAHandle::build(5, 6);
  auto c3 = bratteli_matrix(h5, 3);
  auto c4 = bratteli_matrix(h5, 4);
  CHECK(c3 == std::vector<std::vector<int>>{{1, 1}, {0, 1}});
  CHECK(c4 == transpose(c3));
}

TEST_CASE("trace weights") {
  auto h4 = PAHandle::build(4, 6);
  auto pg4 = principal_graph(h4);
  auto rep4 = verify_trace_weights(decompose(h4, 2), pg4);
  CHECK(rep4.pass);
  CHECK(rep4.max_deviation == 0.0);
  for (const auto& row : rep4.rows) {
    CHECK(row.exact_match);
    CHECK(row.computed.equals(rat(h4->field(), 1, 2)));
  }

  auto h5 = PAHandle::build(5, 8);
  auto pg5 = principal_graph(h5);
  auto rep5 = verify_trace_weights(decompose(h5, 4), pg5);
  CHECK(rep5.pass);
  CHECK(rep5.max_deviation == 0.0);
  for (const auto& row : rep5.rows) CHECK(row.exact_match);

  CHECK_THROWS_AS(verify_trace_weights(decompose(h4, 3), pg4),
                  std::invalid_argument);
}

TEST_CASE("triple multiplicities N=4") {
  auto h = PAHandle::build(4, 6);
  auto pg = principal_graph(h);
  auto dec = decompose(h, 2);

  std::map<std::tuple<int, int, int>, int> want;
  auto prod = [](int v, int w) { return (v == w) ? 1 : 3; };
  for (int v : {1, 3})
    for (int w : {1, 3})
      for (int z : {1, 3}) want[{v, w, z}] = (z == prod(v, w)) ? 1 : 0;

  for (int v : {1, 3})
    for (int w : {1, 3}) {
      Scalar sum = Scalar::zero(h->field());
      for (int z : {1, 3}) {
        int m = triple_multiplicity(v, w, z, pg, dec);
        CHECK(m == want[{v, w, z}]);
        sum += rat(h->field(), m) * pg.mu_of(z);
      }
      CHECK(sum.equals(pg.mu_of(v) * pg.mu_of(w)));
    }

  CHECK_THROWS_AS(triple_multiplicity(1, 1, 1, pg, decompose(h, 4)),
                  std::invalid_argument);
}

TEST_CASE("triple multiplicities N=5") {
  auto h = PAHandle::build(5, 8);
  auto pg = principal_graph(h);
  auto dec = decompose(h, 4);

  std::map<std::tuple<int, int, int>, int> got;
  for (int v : {1, 3})
    for (int w : {1, 3})
      for (int z : {1, 3}) got[{v, w, z}] = triple_multiplicity(v, w, z, pg, dec);

  CHECK(got[{1, 1, 1}] == 1);
  CHECK(got[{1, 1, 3}] == 0);
  CHECK(got[{1, 3, 1}] == 0);
  CHECK(got[{1, 3, 3}] == 1);
  CHECK(got[{3, 1, 1}] == 0);
  CHECK(got[{3, 1, 3}] == 1);
  CHECK(got[{3, 3, 1}] == 1);
  CHECK(got[{3, 3, 3}] == 1);

  for (int v : {1, 3})
    for (int w : {1, 3}) {
      Scalar sum = Scalar::zero(h->field());
      for (int z : {1, 3})
        sum += rat(h->field(), got[{v, w, z}]) * pg.mu_of(z);
      CHECK(sum.equals(pg.mu_of(v) * pg.mu_of(w)));
    }
}

TEST_CASE("eigen splitting cross-check") {
  for (auto [N, n] : std::vector<std::pair<int, int>>{{4, 2}, {4, 3}, {5, 4}}) {
    auto h = PAHandle::build(N, 5);
    auto dec = decompose(h, n);
    auto split = eigen_split_center(h, n, 7);
    REQUIRE(split.projections.size() == dec.central.size());

    PAElement sum = zero_element(h, n, n);
    std::vector<bool> used(dec.central.size(), false);
    for (const auto& proj : split.projections) {
      sum += proj;
      CHECK(max_abs_coeff(proj * proj - proj) < 1e-9);
      double best = 1e9;
      size_t best_b = 0;
      for (size_t b = 0; b < dec.central.size(); ++b) {
        double dev = max_abs_coeff(proj - dec.central[b]);
        if (dev < best) {
          best = dev;
          best_b = b;
        }
      }
      CHECK(best < 1e-9);
      CHECK_FALSE(used[best_b]);
      used[best_b] = true;
    }
    CHECK(max_abs_coeff(sum - unit_element(h, n)) < 1e-9);
  }

  auto h = PAHandle::build(4, 4);
  CHECK_THROWS_WITH_AS(eigen_split_center(h, 2, 7, 2, {0.5, 0.5}),
                       doctest::Contains("collision"), std::runtime_error);
  auto rigged = eigen_split_center(h, 2, 7, 2, {0.25, 0.75});
  CHECK(rigged.projections.size() == 2);
}
