#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "skein/diagram.hpp"
#include "skein/paths.hpp"
#include "skein/scalar.hpp"
#include "skein/tangle.hpp"

namespace skein {

class PAHandle;
using PAPtr = std::shared_ptr<PAHandle>;

// An element of the quotient planar algebra with `bottom` boundary points
// below and `top` above (equal parity). Coordinates are kept over the path
// basis: pairs of equal-endpoint walks on A_{N-1}.
class PAElement {
 public:
  PAElement() = default;
  PAElement(PAPtr handle, int bottom, int top);
  PAElement(PAPtr handle, int bottom, int top, PathState<Scalar> terms);

  const PAPtr& handle() const { return handle_; }
  int bottom() const { return bottom_; }
  int top() const { return top_; }
  int level() const;  // requires bottom == top
  bool valid() const { return handle_ != nullptr; }
  const PathState<Scalar>& terms() const { return terms_; }

  PAElement& operator+=(const PAElement& o);
  PAElement& operator-=(const PAElement& o);
  PAElement operator+(const PAElement& o) const;
  PAElement operator-(const PAElement& o) const;
  PAElement operator-() const;
  PAElement operator*(const PAElement& o) const;  // this stacked above o
  PAElement scaled(const Scalar& c) const;

  PAElement star() const;
  Scalar markov_trace() const;        // normalized: trace(unit) = 1
  PAElement expect_right() const;     // conditional expectation to level-1
  PAElement include_right() const;    // inclusion adding one strand
  PAElement close_right() const;      // joins the two rightmost points
  PAElement bend_br() const;          // top-right point moves to the bottom
  PAElement bend_rb() const;          // bottom-right point moves to the top
  PAElement rotate(int clicks) const; // marked corner moves by `clicks`

  Scalar coefficient(const PathPair& key) const;
  Scalar scalar_value() const;  // shape (0,0) only
  bool is_zero(const Tolerance& tol = Tolerance{}) const;
  Scalar inner(const PAElement& o) const;  // trace(o* . this)

  // Expansion over the pivot-diagram basis at the element's level.
  std::vector<std::pair<TLDiagram, Scalar>> to_diagrams() const;

  // Deterministic ordering of the sparse terms.
  std::vector<std::pair<PathPair, Scalar>> sorted_terms() const;

 private:
  PAPtr handle_;
  int bottom_ = 0, top_ = 0;
  PathState<Scalar> terms_;
  void check_same_shape(const PAElement& o) const;
};

// Shared tower state for one value of N (delta = 2 cos(pi/N), N >= 4).
class PAHandle : public std::enable_shared_from_this<PAHandle> {
 public:
  static PAPtr build(int N, int max_level);

  int N() const { return N_; }
  int max_level() const { return max_level_; }
  const FieldPtr& field() const { return field_; }
  const PathEngine<Scalar>& engine() const { return engine_; }
  Scalar delta() const { return engine_.delta; }

  long dim(int n) const;  // quotient dimension
  const std::vector<TLDiagram>& diagrams(int n);   // pre-quotient basis
  const std::vector<Walk>& walks(int n);
  const std::vector<PathPair>& pairs(int n);       // path basis, sorted
  int pair_index(int n, const PathPair& key);

  // Image of a diagram in the quotient (forward map).
  PAElement phi(const TLDiagram& d);

  // Markov-trace Gram matrix over the pre-quotient diagram basis.
  std::vector<std::vector<Scalar>> gram(int n);

  // Indices (into diagrams(n)) of the lexicographically-first diagrams whose
  // images form a basis of the quotient.
  const std::vector<int>& pivots(int n);

  // Kernel of phi over the diagram basis: one coefficient vector per
  // dependent diagram.
  std::vector<std::vector<Scalar>> radical_basis(int n);

  // Coordinates of x over the pivot diagrams of its level.
  std::vector<Scalar> section(const PAElement& x);

  PathEngine<Scalar>::ExpandedBox expand_box(const PAElement& x, int rot);
  PathEngine<double>::ExpandedBox expand_box_double(const PAElement& x,
                                                    int rot);

 private:
  PAHandle(int N, int max_level);
  int N_ = 0;
  int max_level_ = 0;
  FieldPtr field_;
  PathEngine<Scalar> engine_;

  struct LevelCache {
    std::optional<std::vector<TLDiagram>> diagrams;
    std::optional<std::vector<Walk>> walks;
    std::optional<std::vector<PathPair>> pairs;
    std::unordered_map<PathPair, int, PathPairHash> pair_idx;
    std::optional<std::vector<int>> pivots;
    // LU factorization of the pivot-column matrix, with row permutation.
    std::vector<std::vector<Scalar>> lu;
    std::vector<int> lu_perm;
  };
  // Fixed capacity so references returned from the caches stay valid.
  static constexpr int kMaxCachedLevel = 63;
  std::vector<LevelCache> levels_;
  LevelCache& at(int n);
  void build_pivots(LevelCache& lc, int n);
  std::vector<Scalar> phi_column(int n, const TLDiagram& d);
  std::vector<Scalar> lu_solve(const LevelCache& lc,
                               std::vector<Scalar> rhs) const;

  friend class PAElement;
};

// Element constructors.
PAElement unit_element(const PAPtr& h, int n);
PAElement zero_element(const PAPtr& h, int bottom, int top);
PAElement tl_generator(const PAPtr& h, int n, int i);  // e_i, 1 <= i <= n-1
PAElement from_diagram(const PAPtr& h, const TLDiagram& d);
PAElement from_path_pair(const PAPtr& h, int bottom, int top,
                         const PathPair& key, const Scalar& c);
PAElement random_element(const PAPtr& h, int n, unsigned seed);

// Spec-level operation names.
PAElement multiply(const PAElement& x, const PAElement& y);
Scalar markov_trace(const PAElement& x);
PAElement conditional_expect(const PAElement& x);
PAElement involution(const PAElement& x);

// Evaluates a layered circuit against square box inputs keyed by box id.
// The result has the circuit's boundary shape.
PAElement evaluate_circuit(const PAPtr& h, const Circuit& c,
                           const std::map<int, PAElement>& inputs);

}  // namespace skein
