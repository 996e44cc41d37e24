#pragma once

#include <cstdint>
#include <vector>

#include "skein/tlpa.hpp"

namespace skein {

// Block structure of the level-n quotient algebra: one block per endpoint
// vertex. Matrix units are assembled from the path basis and randomized by
// a seeded weight-orthogonal gauge, so the gauge is fixed only by the seed.
struct BlockDecomposition {
  PAPtr handle;
  int level = 0;
  std::uint64_t seed = 0;
  // True when every unit system satisfies e_ij(v)* = e_ji(v) exactly. In
  // general the exact involution is e_ij(v)* = (w_i/w_j) e_ji(v) with the
  // stored weights; rescaling all weights to 1 needs square roots that may
  // not lie in Q(delta).
  bool star_exact = false;
  std::vector<int> labels;                        // endpoint vertex per block
  std::vector<int> sizes;                         // n_v
  std::vector<PAElement> central;                 // z_v
  std::vector<std::vector<PAElement>> units;      // units[b][i*n_v + j]
  std::vector<std::vector<Scalar>> unit_weights;  // w_i per block
  std::vector<Scalar> trace_e11;                  // tr(e_11(v))

  int block_of(int vertex) const;
  const PAElement& unit(int b, int i, int j) const;
};

BlockDecomposition decompose(const PAPtr& h, int n, std::uint64_t seed = 1);

// Principal graph data: bipartite adjacency, exact Perron-Frobenius weights
// normalized at the distinguished vertex, depth, cutoff k = ceil(depth/2)
// and global index I = sum of mu_v^2 over the even vertices.
struct PrincipalGraphData {
  PAPtr handle;
  int star = 1;
  int depth = 0;
  int k = 0;
  Scalar index;
  std::vector<int> vertices;                // sorted vertex labels
  std::vector<int> even_vertices;           // Gamma_+
  std::vector<std::vector<int>> adjacency;  // multiplicity matrix
  std::vector<Scalar> mu;                   // aligned with `vertices`
  std::vector<int> distance;                // d(*, v), aligned

  int vertex_pos(int vertex) const;
  const Scalar& mu_of(int vertex) const;
  int distance_of(int vertex) const;
};

PrincipalGraphData principal_graph(const PAPtr& h);

// Inclusion multiplicities between the block lattices at levels n and n+1;
// rows follow decompose(h, n).labels, columns decompose(h, n+1).labels.
std::vector<std::vector<int>> bratteli_matrix(const PAPtr& h, int n);

struct TraceWeightReport {
  struct Row {
    int vertex = 0;
    Scalar computed, expected;
    double deviation = 0.0;
    bool exact_match = false;
  };
  std::vector<Row> rows;
  double max_deviation = 0.0;
  bool pass = false;
};

// Checks tr(e_11(v)) = delta^{-2k} mu_v for every block of `dec`, which must
// be computed at level 2k.
TraceWeightReport verify_trace_weights(const BlockDecomposition& dec,
                                       const PrincipalGraphData& pg);

// Multiplicity of X_z in X_v tensor conj(X_w): numeric rank of the map that
// dresses the three boundary cables of a free 3k-box with the minimal
// projections e_11(v), e_11(w), e_11(z).
int triple_multiplicity(int v, int w, int z, const PrincipalGraphData& pg,
                        const BlockDecomposition& dec);

// Float cross-check of the center: solves the commutant system exactly,
// then splits a random self-adjoint central element by its spectrum and
// returns the spectral idempotents in float mode. An eigenvalue collision
// triggers a retry with fresh coefficients; exhausting `retries` throws.
// A non-empty `rigged` pins the central coefficients (collision tests).
struct CenterSplit {
  std::uint64_t seed = 0;
  int attempts = 0;
  std::vector<PAElement> projections;
};

CenterSplit eigen_split_center(const PAPtr& h, int n, std::uint64_t seed,
                               int retries = 3,
                               const std::vector<double>& rigged = {});

}  // namespace skein
