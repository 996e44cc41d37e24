#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "skein/diagram.hpp"
#include "skein/scalar.hpp"

namespace skein {

// A walk on the Coxeter graph A_{N-1} (vertices 1..N-1) starting at the
// distinguished vertex 1; walk[i] is the vertex after i steps.
using Walk = std::vector<uint8_t>;

// All walks of a given length, in lexicographic order.
std::vector<Walk> walks_from_star(int N, int length);

// Number of walks of the given length ending at each vertex (index 1..N-1).
std::vector<long> walk_counts(int N, int length);

// Dimension of the level-n quotient: pairs of equal-endpoint walks.
long quotient_dim(int N, int n);

// A basis vector of the quotient at shape (|rho|, |sigma|): a pair of walks
// with a common endpoint, rho along the bottom boundary and sigma along the
// top.
struct PathPair {
  Walk rho, sigma;
  bool operator==(const PathPair&) const = default;
};

struct PathPairHash {
  size_t operator()(const PathPair& p) const {
    size_t h = 1469598103934665603ull;
    auto mix = [&h](uint8_t b) {
      h ^= b;
      h *= 1099511628211ull;
    };
    for (uint8_t v : p.rho) mix(v);
    mix(0xff);
    for (uint8_t v : p.sigma) mix(v);
    return h;
  }
};

template <class C>
using PathState = std::unordered_map<PathPair, C, PathPairHash>;

inline bool coeff_zero(const Scalar& s) { return s.is_zero(); }
inline bool coeff_zero(double x) { return x == 0.0; }
inline Scalar coeff_pow(const Scalar& b, long e) { return b.pow(e); }
inline double coeff_pow(double b, long e) {
  return std::pow(b, static_cast<double>(e));
}

// Elementary moves on path states with exact (Scalar) or double weights.
// All boundary operations act on the top walk sigma; the bend operations
// exchange steps between the right-hand ends of sigma and rho.
template <class C>
struct PathEngine {
  int N = 0;
  std::vector<C> mu;        // mu[v] = quantum integer [v], v = 1..N-1
  std::vector<C> cup_down;  // weight of inserting a downward spike at y
  std::vector<C> cap_up;    // weight of removing an upward spike at y
  C one, delta, delta_inv;

  int top_vertex() const { return N - 1; }

  // Inserts a new cup whose legs become strands pos and pos+1.
  PathState<C> apply_cup(const PathState<C>& in, int pos) const {
    PathState<C> out;
    out.reserve(in.size() * 2);
    for (const auto& [key, c] : in) {
      const Walk& s = key.sigma;
      int y = s[pos];
      for (int w : {y + 1, y - 1}) {
        if (w < 1 || w > top_vertex()) continue;
        PathPair nk{key.rho, {}};
        nk.sigma.reserve(s.size() + 2);
        nk.sigma.assign(s.begin(), s.begin() + pos + 1);
        nk.sigma.push_back(static_cast<uint8_t>(w));
        nk.sigma.push_back(static_cast<uint8_t>(y));
        nk.sigma.insert(nk.sigma.end(), s.begin() + pos + 1, s.end());
        C add = (w == y + 1) ? c : c * cup_down[y];
        auto it = out.find(nk);
        if (it == out.end())
          out.emplace(std::move(nk), std::move(add));
        else
          it->second += add;
      }
    }
    return out;
  }

  // Joins strands pos and pos+1 by a cap; terms without the matching spike
  // vanish.
  PathState<C> apply_cap(const PathState<C>& in, int pos) const {
    PathState<C> out;
    out.reserve(in.size());
    for (const auto& [key, c] : in) {
      const Walk& s = key.sigma;
      int y = s[pos];
      int x = s[pos + 1];
      if (s[pos + 2] != y) continue;
      PathPair nk{key.rho, {}};
      nk.sigma.reserve(s.size() - 2);
      nk.sigma.assign(s.begin(), s.begin() + pos + 1);
      nk.sigma.insert(nk.sigma.end(), s.begin() + pos + 3, s.end());
      C add = (x == y + 1) ? c * cap_up[y] : c;
      auto it = out.find(nk);
      if (it == out.end())
        out.emplace(std::move(nk), std::move(add));
      else
        it->second += add;
    }
    return out;
  }

  // Bends the last step of sigma down around the right side onto rho.
  PathState<C> bend_br(const PathState<C>& in) const {
    PathState<C> out;
    out.reserve(in.size());
    for (const auto& [key, c] : in) {
      const Walk& s = key.sigma;
      if (s.size() < 2) throw std::invalid_argument("bend_br: empty top");
      int u = s[s.size() - 2];
      int v = s[s.size() - 1];
      PathPair nk{key.rho, Walk(s.begin(), s.end() - 1)};
      nk.rho.push_back(static_cast<uint8_t>(u));
      C add = (v == u + 1) ? c * cap_up[u] : c;
      auto it = out.find(nk);
      if (it == out.end())
        out.emplace(std::move(nk), std::move(add));
      else
        it->second += add;
    }
    return out;
  }

  // Bends the last step of rho up around the right side onto sigma; inverse
  // of bend_br.
  PathState<C> bend_rb(const PathState<C>& in) const {
    PathState<C> out;
    out.reserve(in.size());
    for (const auto& [key, c] : in) {
      const Walk& r = key.rho;
      if (r.size() < 2) throw std::invalid_argument("bend_rb: empty bottom");
      int v = r[r.size() - 2];
      int u = r[r.size() - 1];
      PathPair nk{Walk(r.begin(), r.end() - 1), key.sigma};
      nk.sigma.push_back(static_cast<uint8_t>(v));
      C add = (u == v - 1) ? c / cap_up[u] : c;
      auto it = out.find(nk);
      if (it == out.end())
        out.emplace(std::move(nk), std::move(add));
      else
        it->second += add;
    }
    return out;
  }

  // Applies one TL diagram, given by its move sequence, to the strand block
  // starting at `base`.
  PathState<C> apply_diagram(const PathState<C>& in,
                             const std::vector<DiagramOp>& ops,
                             int base) const {
    PathState<C> cur = in;
    for (const auto& op : ops) {
      cur = op.is_cap ? apply_cap(cur, base + op.pos)
                      : apply_cup(cur, base + op.pos);
    }
    return cur;
  }

  // Applies a box whose value has been expanded over TL diagrams.
  struct ExpandedBox {
    std::vector<std::pair<std::vector<DiagramOp>, C>> terms;
    int level = 0;
  };
  PathState<C> apply_box(const PathState<C>& in, const ExpandedBox& box,
                         int base) const {
    PathState<C> out;
    for (const auto& [ops, w] : box.terms) {
      if (coeff_zero(w)) continue;
      PathState<C> part = apply_diagram(in, ops, base);
      for (auto& [key, c] : part) {
        C add = c * w;
        auto it = out.find(key);
        if (it == out.end())
          out.emplace(key, std::move(add));
        else
          it->second += add;
      }
    }
    return out;
  }

  // Weight of a walk: product of mu[to]/mu[from] over its upward steps.
  C walk_weight(const Walk& w) const {
    C acc = one;
    for (size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i + 1] == w[i] + 1) acc = acc * cap_up[w[i]];
    return acc;
  }

  void prune(PathState<C>& s) const {
    for (auto it = s.begin(); it != s.end();)
      it = coeff_zero(it->second) ? s.erase(it) : std::next(it);
  }
};

PathEngine<Scalar> make_path_engine(const FieldPtr& field);
PathEngine<double> make_path_engine_double(int N);

}  // namespace skein
