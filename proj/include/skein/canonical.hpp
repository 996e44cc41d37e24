#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "skein/multimatrix.hpp"
#include "skein/tlpa.hpp"

namespace skein {

// An element of P_n (x) P_n^op kept as a finite sum of leg pairs. The
// second leg carries the opposite multiplication; embedding into P_{2n}
// renders it side by side with the first leg, rotated half way round.
class SweedlerElement {
 public:
  SweedlerElement() = default;
  SweedlerElement(PAPtr handle, int level);

  static SweedlerElement pure(const PAElement& first, const PAElement& second);

  const PAPtr& handle() const { return handle_; }
  int level() const { return level_; }
  bool valid() const { return handle_ != nullptr; }
  const std::vector<std::pair<PAElement, PAElement>>& legs() const {
    return legs_;
  }

  SweedlerElement& operator+=(const SweedlerElement& o);
  SweedlerElement operator+(const SweedlerElement& o) const;
  SweedlerElement operator-(const SweedlerElement& o) const;
  SweedlerElement scaled(const Scalar& c) const;

  // (a (x) b)(c (x) d) = ac (x) db.
  SweedlerElement multiply(const SweedlerElement& o) const;
  SweedlerElement star() const;
  SweedlerElement rotate_both(int clicks) const;
  Scalar trace_pair() const;  // (tr (x) tr), both factors normalized

  // Coefficient matrix over the path-pair basis at the level; the canonical
  // comparison form. coords[i][j] multiplies basis_i (x) basis_j.
  std::vector<std::vector<Scalar>> coordinates() const;
  // Rank decomposition of the coefficient matrix; minimal leg count.
  SweedlerElement compressed() const;
  bool same_as(const SweedlerElement& o,
               const Tolerance& tol = Tolerance{}) const;
  bool is_zero(const Tolerance& tol = Tolerance{}) const;

  // Image in P_{2 level}: first leg beside the half-rotated second leg.
  PAElement embed() const;

 private:
  PAPtr handle_;
  int level_ = 0;
  std::vector<std::pair<PAElement, PAElement>> legs_;
  void check_compatible(const SweedlerElement& o) const;
};

// p = sum_v (1/n_v) sum_ij e_ij(v) (x) e_ji(v)^op over the even vertices.
SweedlerElement build_p(const BlockDecomposition& dec,
                        const PrincipalGraphData& pg);

// q and its per-triple components q_{v,w,z}, each the trace-orthogonal
// projection of a three-pill 6k-box onto the embedded P_3k (x) P_3k^op,
// scaled by I^{-1/2} (mu_v mu_w mu_z / n_v n_w n_z)^{1/2}.
struct CanonicalQ {
  SweedlerElement q;
  std::map<std::tuple<int, int, int>, SweedlerElement> components;
  int k = 0;
};
CanonicalQ build_q(const BlockDecomposition& dec, const PrincipalGraphData& pg,
                   const PAPtr& h);

// The two graded-algebra projections: e_k (a level k+2 element) and the
// cup-cap idempotent f_k (level 2k), with f_k = delta^{-1} times the raw
// cup-cap diagram.
struct GjsProjections {
  PAElement e_k;
  PAElement f_k;
};
GjsProjections build_gjs_projections(const PAPtr& h, int k);

struct SkeinCheck {
  std::string relation;
  bool exact_mode = false;
  double deviation = 0.0;
  bool pass = false;
  int samples = 0;
};

struct SkeinReport {
  int N = 0;
  int k = 0;
  unsigned seed = 0;
  std::vector<SkeinCheck> checks;
  bool all_pass() const;
  const SkeinCheck& check(const std::string& relation) const;
};

// Evaluates the full relation suite for p and q: the two-box cleaving rule,
// the strand-projection rule, the four p relations, the five q relations,
// connecting, the four-box cleaving corollary, the two-q corollaries, the
// daisychain collapses at n = 3 and 4, and the five cabled relations.
// Quantified relations are sampled `samples` times with seeded rational
// coefficients.
SkeinReport verify_skein_suite(const SweedlerElement& p, const CanonicalQ& q,
                               const BlockDecomposition& dec,
                               const PrincipalGraphData& pg, const PAPtr& h,
                               unsigned seed = 1, int samples = 10);

}  // namespace skein
