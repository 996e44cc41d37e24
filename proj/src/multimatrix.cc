#include "skein/multimatrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace skein {
namespace {

using SMat = std::vector<std::vector<Scalar>>;

std::optional<SMat> invert_exact(SMat m, const Scalar& zero,
                                 const Scalar& one) {
  int n = static_cast<int>(m.size());
  SMat inv(n, std::vector<Scalar>(n, zero));
  for (int i = 0; i < n; ++i) inv[i][i] = one;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!m[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Scalar f = m[col][col].inverse();
    for (int c = 0; c < n; ++c) {
      m[col][c] *= f;
      inv[col][c] *= f;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      Scalar g = m[r][col];
      for (int c = 0; c < n; ++c) {
        m[r][c] -= g * m[col][c];
        inv[r][c] -= g * inv[col][c];
      }
    }
  }
  return inv;
}

std::optional<long> exact_small_int(const Scalar& s) {
  if (!s.is_exact()) return std::nullopt;
  const auto& c = s.coeffs();
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i] != 0) return std::nullopt;
  if (c[0].get_den() != 1 || !c[0].get_num().fits_slong_p())
    return std::nullopt;
  return c[0].get_num().get_si();
}

Rat draw_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
  Rat r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

}  // namespace

int BlockDecomposition::block_of(int vertex) const {
  for (size_t b = 0; b < labels.size(); ++b)
    if (labels[b] == vertex) return static_cast<int>(b);
  throw std::invalid_argument("block_of: no block with endpoint " +
                              std::to_string(vertex));
}

const PAElement& BlockDecomposition::unit(int b, int i, int j) const {
  return units.at(b).at(static_cast<size_t>(i) * sizes.at(b) + j);
}

BlockDecomposition decompose(const PAPtr& h, int n, std::uint64_t seed) {
  if (n > h->max_level())
    throw std::invalid_argument("decompose: level " + std::to_string(n) +
                                " exceeds handle max level " +
                                std::to_string(h->max_level()));
  const auto& walks = h->walks(n);
  const auto& eng = h->engine();
  FieldPtr f = h->field();
  Scalar zero = Scalar::zero(f), one = Scalar::one(f);

  std::map<int, std::vector<int>> by_vertex;
  for (size_t t = 0; t < walks.size(); ++t)
    by_vertex[walks[t].back()].push_back(static_cast<int>(t));

  BlockDecomposition dec;
  dec.handle = h;
  dec.level = n;
  dec.seed = seed;
  dec.star_exact = true;
  std::mt19937_64 rng(seed);

  for (const auto& [vertex, blk] : by_vertex) {
    int m = static_cast<int>(blk.size());
    std::vector<Scalar> w(m, one);
    for (int i = 0; i < m; ++i) w[i] = eng.walk_weight(walks[blk[i]]);

    // Rescale so the involution permutes the units, when the square roots
    // of the weight ratios exist in the field.
    std::vector<Scalar> gamma(m, one);
    bool rescaled = true;
    for (int i = 1; i < m && rescaled; ++i) {
      auto s = exact_sqrt(w[i] / w[0]);
      if (s)
        gamma[i] = *s;
      else
        rescaled = false;
    }
    std::vector<Scalar> effw = rescaled ? std::vector<Scalar>(m, one) : w;

    // Seeded gauge: Cayley transform of a weight-antisymmetric matrix.
    SMat g, ginv;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 16)
        throw std::runtime_error("decompose: gauge matrix never invertible");
      SMat a(m, std::vector<Scalar>(m, zero));
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          a[i][j] = Scalar::exact_rational(f, draw_rational(rng));
          a[j][i] = -(effw[i] / effw[j]) * a[i][j];
        }
      SMat plus = a, minus = a;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (i == j) {
            plus[i][j] = one + a[i][j];
            minus[i][j] = one - a[i][j];
          } else {
            minus[i][j] = -a[i][j];
          }
        }
      auto inv = invert_exact(plus, zero, one);
      if (!inv) continue;
      g.assign(m, std::vector<Scalar>(m, zero));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l) g[i][j] += minus[i][l] * (*inv)[l][j];
      auto gi = invert_exact(g, zero, one);
      if (!gi) continue;
      ginv = *gi;
      break;
    }

    std::vector<PAElement> units;
    units.reserve(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        PathState<Scalar> st;
        for (int a = 0; a < m; ++a) {
          if (g[a][i].is_zero()) continue;
          for (int b = 0; b < m; ++b) {
            if (ginv[j][b].is_zero()) continue;
            Scalar c = g[a][i] * ginv[j][b] * (gamma[b] / gamma[a]);
            PathPair key{walks[blk[b]], walks[blk[a]]};
            auto it = st.find(key);
            if (it == st.end())
              st.emplace(std::move(key), std::move(c));
            else
              it->second += c;
          }
        }
        PAElement e(h, n, n, std::move(st));
        units.push_back(std::move(e));
      }

    PathState<Scalar> zst;
    for (int a = 0; a < m; ++a)
      zst.emplace(PathPair{walks[blk[a]], walks[blk[a]]}, one);

    dec.labels.push_back(vertex);
    dec.sizes.push_back(m);
    dec.central.emplace_back(h, n, n, std::move(zst));
    dec.trace_e11.push_back(units[0].markov_trace());
    dec.units.push_back(std::move(units));
    dec.unit_weights.push_back(rescaled ? std::vector<Scalar>(m, one) : w);
    dec.star_exact = dec.star_exact && rescaled;
  }

  PAElement total = zero_element(h, n, n);
  for (const auto& z : dec.central) total += z;
  if (!(total - unit_element(h, n)).is_zero())
    throw std::runtime_error(
        "decompose: central idempotents do not sum to the unit "
        "(non-semisimple input)");
  return dec;
}

std::vector<std::vector<int>> bratteli_matrix(const PAPtr& h, int n) {
  BlockDecomposition lo = decompose(h, n), hi = decompose(h, n + 1);
  std::vector<std::vector<int>> out(lo.labels.size(),
                                    std::vector<int>(hi.labels.size(), 0));
  for (size_t a = 0; a < lo.labels.size(); ++a) {
    PAElement inc = lo.unit(static_cast<int>(a), 0, 0).include_right();
    for (size_t b = 0; b < hi.labels.size(); ++b) {
      Scalar ratio =
          (hi.central[b] * inc).markov_trace() / hi.trace_e11[b];
      auto mult = exact_small_int(ratio);
      if (!mult || *mult < 0)
        throw std::logic_error("bratteli_matrix: non-integral multiplicity");
      out[a][b] = static_cast<int>(*mult);
    }
  }
  return out;
}

int PrincipalGraphData::vertex_pos(int vertex) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == vertex) return static_cast<int>(i);
  throw std::invalid_argument("vertex_pos: unknown vertex " +
                              std::to_string(vertex));
}

const Scalar& PrincipalGraphData::mu_of(int vertex) const {
  return mu[vertex_pos(vertex)];
}

int PrincipalGraphData::distance_of(int vertex) const {
  return distance[vertex_pos(vertex)];
}

PrincipalGraphData principal_graph(const PAPtr& h) {
  int L = h->max_level();
  std::set<int> seen;
  int depth = 0;
  for (int n = 0; n <= L; ++n) {
    auto counts = walk_counts(h->N(), n);
    for (int v = 1; v < h->N(); ++v)
      if (counts[v] > 0 && seen.insert(v).second) depth = n;
  }
  if (depth + 2 > L)
    throw std::runtime_error(
        "principal_graph: block lattice not stabilized within max level " +
        std::to_string(L) + "; rebuild with max level at least " +
        std::to_string(depth + 2));

  BlockDecomposition lo = decompose(h, depth), hi = decompose(h, depth + 1);
  auto brat = bratteli_matrix(h, depth);

  PrincipalGraphData pg;
  pg.handle = h;
  pg.star = 1;
  pg.depth = depth;
  pg.k = (depth + 1) / 2;
  std::set<int> verts(lo.labels.begin(), lo.labels.end());
  verts.insert(hi.labels.begin(), hi.labels.end());
  pg.vertices.assign(verts.begin(), verts.end());
  int V = static_cast<int>(pg.vertices.size());

  pg.adjacency.assign(V, std::vector<int>(V, 0));
  for (size_t a = 0; a < lo.labels.size(); ++a)
    for (size_t b = 0; b < hi.labels.size(); ++b) {
      int i = pg.vertex_pos(lo.labels[a]), j = pg.vertex_pos(hi.labels[b]);
      pg.adjacency[i][j] = pg.adjacency[j][i] = brat[a][b];
    }

  // Graph distance from the distinguished vertex.
  pg.distance.assign(V, -1);
  std::vector<int> queue{pg.vertex_pos(pg.star)};
  pg.distance[queue[0]] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    int i = queue[head];
    for (int j = 0; j < V; ++j)
      if (pg.adjacency[i][j] > 0 && pg.distance[j] < 0) {
        pg.distance[j] = pg.distance[i] + 1;
        queue.push_back(j);
      }
  }
  int maxd = 0;
  for (int d : pg.distance) {
    if (d < 0) throw std::logic_error("principal_graph: graph not connected");
    maxd = std::max(maxd, d);
  }
  if (maxd != depth)
    throw std::logic_error("principal_graph: depth mismatch with distances");

  // Exact Perron-Frobenius weights: solve (A - delta) mu = 0, mu(*) = 1.
  FieldPtr f = h->field();
  Scalar zero = Scalar::zero(f), one = Scalar::one(f), delta = h->delta();
  std::vector<std::vector<Scalar>> sys(V + 1, std::vector<Scalar>(V + 1, zero));
  for (int i = 0; i < V; ++i) {
    for (int j = 0; j < V; ++j)
      sys[i][j] = Scalar::exact_rational(f, pg.adjacency[i][j]);
    sys[i][i] -= delta;
  }
  sys[V][pg.vertex_pos(pg.star)] = one;
  sys[V][V] = one;  // augmented column: mu(*) = 1
  int rank = 0;
  for (int col = 0; col < V && rank <= V; ++col) {
    int piv = -1;
    for (int r = rank; r <= V; ++r)
      if (!sys[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::logic_error("principal_graph: singular PF system");
    std::swap(sys[piv], sys[rank]);
    Scalar fct = sys[rank][col].inverse();
    for (int c = 0; c <= V; ++c) sys[rank][c] *= fct;
    for (int r = 0; r <= V; ++r) {
      if (r == rank || sys[r][col].is_zero()) continue;
      Scalar g = sys[r][col];
      for (int c = 0; c <= V; ++c) sys[r][c] -= g * sys[rank][c];
    }
    ++rank;
  }
  if (rank != V)
    throw std::logic_error("principal_graph: PF system underdetermined");
  for (int r = rank; r <= V; ++r)
    if (!sys[r][V].is_zero())
      throw std::logic_error("principal_graph: inconsistent PF system");
  pg.mu.assign(V, zero);
  for (int r = 0; r < rank; ++r) {
    int lead = -1;
    for (int c = 0; c < V; ++c)
      if (!sys[r][c].is_zero()) {
        lead = c;
        break;
      }
    if (lead >= 0) pg.mu[lead] = sys[r][V];
  }

  // Float power iteration as an independent cross-check.  The adjacency
  // matrix of a bipartite graph has +/- eigenvalue pairs, so iterate on
  // A + sI (s > 0 keeps the graph spectrum intact while making the
  // Perron eigenvalue strictly dominant).
  const double shift = V + 1.0;
  Eigen::MatrixXd A(V, V);
  for (int i = 0; i < V; ++i)
    for (int j = 0; j < V; ++j)
      A(i, j) = pg.adjacency[i][j] + (i == j ? shift : 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(V);
  double lambda = 0;
  for (int it = 0; it < 400; ++it) {
    Eigen::VectorXd y = A * x;
    lambda = y.norm() / x.norm() - shift;
    x = y / y.norm();
  }
  x /= x(pg.vertex_pos(pg.star));
  double dfl = static_cast<double>(h->delta().to_float());
  if (std::abs(lambda - dfl) > 1e-9)
    throw std::logic_error("principal_graph: PF eigenvalue cross-check failed");
  for (int i = 0; i < V; ++i) {
    double mu_f = static_cast<double>(pg.mu[i].to_float());
    Scalar resid = zero;
    for (int j = 0; j < V; ++j)
      resid += Scalar::exact_rational(f, pg.adjacency[i][j]) * pg.mu[j];
    if (!(resid - delta * pg.mu[i]).is_zero())
      throw std::logic_error("principal_graph: A mu != delta mu");
    if (std::abs(x(i) - mu_f) > 1e-8)
      throw std::logic_error("principal_graph: PF eigenvector cross-check"
                             " failed");
  }

  pg.index = zero;
  for (int i = 0; i < V; ++i)
    if (pg.distance[i] % 2 == 0) {
      pg.even_vertices.push_back(pg.vertices[i]);
      pg.index += pg.mu[i] * pg.mu[i];
    }
  return pg;
}

TraceWeightReport verify_trace_weights(const BlockDecomposition& dec,
                                       const PrincipalGraphData& pg) {
  if (dec.level != 2 * pg.k)
    throw std::invalid_argument("verify_trace_weights: decomposition level " +
                                std::to_string(dec.level) + " != 2k = " +
                                std::to_string(2 * pg.k));
  TraceWeightReport rep;
  Scalar scale = dec.handle->delta().pow(-2 * pg.k);
  for (size_t b = 0; b < dec.labels.size(); ++b) {
    TraceWeightReport::Row row;
    row.vertex = dec.labels[b];
    row.computed = dec.trace_e11[b];
    row.expected = scale * pg.mu_of(row.vertex);
    Scalar diff = row.computed - row.expected;
    row.exact_match = diff.is_zero();
    row.deviation = row.exact_match
                        ? 0.0
                        : std::abs(static_cast<double>(diff.to_float()));
    rep.max_deviation = std::max(rep.max_deviation, row.deviation);
    rep.rows.push_back(std::move(row));
  }
  rep.pass = rep.max_deviation < 1e-12;
  return rep;
}

int triple_multiplicity(int v, int w, int z, const PrincipalGraphData& pg,
                        const BlockDecomposition& dec) {
  int k = pg.k;
  if (dec.level != 2 * k)
    throw std::invalid_argument("triple_multiplicity: decomposition level " +
                                std::to_string(dec.level) + " != 2k = " +
                                std::to_string(2 * k));
  const PAPtr& h = dec.handle;
  if (3 * k > h->max_level())
    throw std::invalid_argument(
        "triple_multiplicity: need handle levels up to " +
        std::to_string(3 * k));
  auto box_v = h->expand_box(dec.unit(dec.block_of(v), 0, 0), 0);
  auto box_w = h->expand_box(dec.unit(dec.block_of(w), 0, 0), 2 * k);
  const PAElement& pill_z = dec.unit(dec.block_of(z), 0, 0);
  const auto& eng = h->engine();

  // Row index over the bent shape (2k, 4k).
  std::unordered_map<PathPair, int, PathPairHash> row;
  {
    const auto& bot = h->walks(2 * k);
    const auto& top = h->walks(4 * k);
    for (const auto& r : bot)
      for (const auto& s : top)
        if (r.back() == s.back())
          row.emplace(PathPair{r, s}, static_cast<int>(row.size()));
  }
  const auto& basis = h->diagrams(3 * k);
  Eigen::MatrixXd A =
      Eigen::MatrixXd::Zero(static_cast<int>(row.size()),
                            static_cast<int>(basis.size()));
  for (size_t c = 0; c < basis.size(); ++c) {
    PAElement x = from_diagram(h, basis[c]);
    for (int b = 0; b < k; ++b) x = x.bend_rb();
    PathState<Scalar> st = eng.apply_box(x.terms(), box_v, 0);
    st = eng.apply_box(st, box_w, 2 * k);
    PAElement dressed(h, 2 * k, 4 * k, std::move(st));
    dressed = dressed * pill_z;
    for (const auto& [key, coeff] : dressed.terms())
      A(row.at(key), static_cast<int>(c)) =
          static_cast<double>(coeff.to_float());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-9 * sv(0)) ++rank;
  return rank;
}

CenterSplit eigen_split_center(const PAPtr& h, int n, std::uint64_t seed,
                               int retries, const std::vector<double>& rigged) {
  const auto& pairs = h->pairs(n);
  int D = static_cast<int>(pairs.size());
  FieldPtr f = h->field();
  Scalar zero = Scalar::zero(f), one = Scalar::one(f);

  std::vector<PAElement> basis;
  basis.reserve(D);
  for (const auto& key : pairs)
    basis.push_back(from_path_pair(h, n, n, key, one));

  // Exact commutant solve against the Temperley-Lieb generators.
  std::vector<std::vector<Scalar>> center_vecs;
  if (n < 2) {
    for (int t = 0; t < D; ++t) {
      std::vector<Scalar> e(D, zero);
      e[t] = one;
      center_vecs.push_back(std::move(e));
    }
  } else {
    std::vector<PAElement> gens;
    for (int i = 1; i <= n - 1; ++i) gens.push_back(tl_generator(h, n, i));
    std::vector<std::vector<Scalar>> rows(
        static_cast<size_t>(gens.size()) * D, std::vector<Scalar>(D, zero));
    for (int t = 0; t < D; ++t)
      for (size_t gi = 0; gi < gens.size(); ++gi) {
        PAElement comm = basis[t] * gens[gi] - gens[gi] * basis[t];
        for (const auto& [key, c] : comm.terms())
          rows[gi * D + h->pair_index(n, key)][t] = c;
      }
    // Null space by Gauss-Jordan elimination.
    int rank = 0;
    std::vector<int> lead_col;
    for (int col = 0; col < D; ++col) {
      int piv = -1;
      for (size_t r = rank; r < rows.size(); ++r)
        if (!rows[r][col].is_zero()) {
          piv = static_cast<int>(r);
          break;
        }
      if (piv < 0) continue;
      std::swap(rows[piv], rows[rank]);
      Scalar fct = rows[rank][col].inverse();
      for (int c = 0; c < D; ++c) rows[rank][c] *= fct;
      for (size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(r) == rank || rows[r][col].is_zero()) continue;
        Scalar g = rows[r][col];
        for (int c = 0; c < D; ++c) rows[r][c] -= g * rows[rank][c];
      }
      lead_col.push_back(col);
      ++rank;
    }
    std::vector<bool> is_lead(D, false);
    for (int c : lead_col) is_lead[c] = true;
    for (int free = 0; free < D; ++free) {
      if (is_lead[free]) continue;
      std::vector<Scalar> vec(D, zero);
      vec[free] = one;
      for (int r = 0; r < rank; ++r) vec[lead_col[r]] = -rows[r][free];
      center_vecs.push_back(std::move(vec));
    }
  }
  int B = static_cast<int>(center_vecs.size());
  if (!rigged.empty() && static_cast<int>(rigged.size()) != B)
    throw std::invalid_argument(
        "eigen_split_center: rigged coefficient count != center dimension");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.25, 4.0);
  for (int attempt = 1; attempt <= std::max(1, retries); ++attempt) {
    std::vector<double> r(B);
    for (int j = 0; j < B; ++j) r[j] = rigged.empty() ? unif(rng) : rigged[j];
    PAElement zc = zero_element(h, n, n);
    for (int j = 0; j < B; ++j)
      for (int t = 0; t < D; ++t)
        if (!center_vecs[j][t].is_zero())
          zc += basis[t].scaled(center_vecs[j][t] * Scalar(r[j]));
    zc = (zc + zc.star()).scaled(Scalar(0.5));

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(D, D);
    for (int t = 0; t < D; ++t) {
      PAElement img = zc * basis[t];
      for (const auto& [key, c] : img.terms())
        M(h->pair_index(n, key), t) = static_cast<double>(c.to_float());
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    std::vector<double> ev(D);
    for (int i = 0; i < D; ++i) ev[i] = es.eigenvalues()(i).real();
    std::sort(ev.begin(), ev.end());
    double scale = 1.0 + std::abs(ev.back());
    std::vector<double> lambdas;
    std::vector<int> counts;
    for (double e : ev) {
      if (lambdas.empty() || e - lambdas.back() > 1e-7 * scale) {
        lambdas.push_back(e);
        counts.push_back(1);
      } else {
        lambdas.back() =
            (lambdas.back() * counts.back() + e) / (counts.back() + 1);
        ++counts.back();
      }
    }
    if (static_cast<int>(lambdas.size()) != B) continue;

    CenterSplit out;
    out.seed = seed;
    out.attempts = attempt;
    PAElement unit_f = unit_element(h, n).scaled(Scalar(1.0));
    for (int c = 0; c < B; ++c) {
      PAElement proj = unit_f;
      for (int j = 0; j < B; ++j) {
        if (j == c) continue;
        proj = (proj * (zc - unit_f.scaled(Scalar(lambdas[j]))))
                   .scaled(Scalar(1.0 / (lambdas[c] - lambdas[j])));
      }
      out.projections.push_back(std::move(proj));
    }
    return out;
  }
  throw std::runtime_error(
      "eigen_split_center: eigenvalue collision persisted after " +
      std::to_string(std::max(1, retries)) + " retries");
}

}  // namespace skein
