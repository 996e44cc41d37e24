#include "skein/diagram.hpp"

#include <algorithm>
#include <stdexcept>

namespace skein {

namespace {

void enumerate_range(std::vector<int>& match, int lo, int hi,
                     std::vector<std::vector<int>>& out) {
  if (lo > hi) {
    out.push_back(match);
    return;
  }
  for (int j = lo + 1; j <= hi; j += 2) {
    match[lo] = j;
    match[j] = lo;
    // Points strictly between lo and j must match among themselves, as must
    // the points after j; recurse on the inner range first.
    std::vector<std::vector<int>> inner;
    std::vector<int> saved = match;
    enumerate_range(match, lo + 1, j - 1, inner);
    for (auto& m : inner) {
      match = m;
      enumerate_range(match, j + 1, hi, out);
    }
    match = saved;
  }
}

}  // namespace

std::vector<TLDiagram> all_diagrams(int n) {
  if (n < 0) throw std::invalid_argument("all_diagrams: negative level");
  std::vector<std::vector<int>> raw;
  std::vector<int> match(2 * n, -1);
  enumerate_range(match, 0, 2 * n - 1, raw);
  std::vector<TLDiagram> out;
  out.reserve(raw.size());
  for (auto& m : raw) out.push_back(TLDiagram{std::move(m)});
  std::sort(out.begin(), out.end());
  return out;
}

TLDiagram identity_diagram(int n) {
  TLDiagram d;
  d.match.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    d.match[i] = 2 * n - 1 - i;
    d.match[2 * n - 1 - i] = i;
  }
  return d;
}

StackResult stack(const TLDiagram& x, const TLDiagram& y) {
  const int n = x.level();
  if (y.level() != n) throw std::invalid_argument("stack: level mismatch");
  const int m = 2 * n;
  // Interface strand k joins x's bottom point k to y's top point 2n-1-k.
  // Result boundary: y's bottom points 0..n-1 and x's top points n..2n-1.
  auto is_result_boundary = [n, m](bool in_x, int p) {
    return in_x ? (p >= n) : (p < n);
  };
  std::vector<char> seen_x(m, 0), seen_y(m, 0);

  auto trace = [&](bool in_x, int p) {
    // Follow the strand starting at boundary point p of diagram (in_x ? x : y)
    // until it reaches another result boundary point.
    for (;;) {
      if (in_x) {
        seen_x[p] = 1;
        int q = x.match[p];
        seen_x[q] = 1;
        if (is_result_boundary(true, q)) return std::pair<bool, int>(true, q);
        in_x = false;
        p = m - 1 - q;  // x bottom q -> y top point
      } else {
        seen_y[p] = 1;
        int q = y.match[p];
        seen_y[q] = 1;
        if (is_result_boundary(false, q)) return std::pair<bool, int>(false, q);
        in_x = true;
        p = m - 1 - q;  // y top q -> x bottom point
      }
    }
  };

  TLDiagram res;
  res.match.assign(m, -1);
  for (int p = 0; p < m; ++p) {
    bool in_x = p >= n;
    if (in_x ? seen_x[p] : seen_y[p]) continue;
    auto [ex, q] = trace(in_x, p);
    (void)ex;
    res.match[p] = q;
    res.match[q] = p;
  }

  int loops = 0;
  for (int k = 0; k < n; ++k) {
    if (seen_x[k]) continue;
    // Unvisited interface strand: part of a closed loop.
    ++loops;
    bool in_x = true;
    int p = k;
    while (!(in_x ? seen_x[p] : seen_y[p])) {
      if (in_x) {
        seen_x[p] = 1;
        int q = x.match[p];
        seen_x[q] = 1;
        in_x = false;
        p = m - 1 - q;
      } else {
        seen_y[p] = 1;
        int q = y.match[p];
        seen_y[q] = 1;
        in_x = true;
        p = m - 1 - q;
      }
    }
  }
  return StackResult{std::move(res), loops};
}

TLDiagram rotate(const TLDiagram& d, int r) {
  const int m = static_cast<int>(d.match.size());
  if (m == 0) return d;
  r = ((r % m) + m) % m;
  TLDiagram out;
  out.match.assign(m, -1);
  for (int i = 0; i < m; ++i) out.match[(i + r) % m] = (d.match[i] + r) % m;
  return out;
}

TLDiagram flip(const TLDiagram& d) {
  const int m = static_cast<int>(d.match.size());
  TLDiagram out;
  out.match.assign(m, -1);
  for (int i = 0; i < m; ++i) out.match[m - 1 - i] = m - 1 - d.match[i];
  return out;
}

int closure_loops(const TLDiagram& d) {
  const int m = static_cast<int>(d.match.size());
  std::vector<char> seen(m, 0);
  int loops = 0;
  for (int p = 0; p < m; ++p) {
    if (seen[p]) continue;
    ++loops;
    int q = p;
    while (!seen[q]) {
      seen[q] = 1;
      int r = d.match[q];
      seen[r] = 1;
      q = m - 1 - r;  // closure joins i and 2n-1-i
    }
  }
  return loops;
}

std::vector<DiagramOp> diagram_ops(const TLDiagram& d) {
  const int n = d.level();
  const int m = 2 * n;
  std::vector<DiagramOp> ops;

  // Caps: bottom-bottom arcs, innermost first.
  std::vector<int> cur;  // bottom points still live, left to right
  for (int i = 0; i < n; ++i) cur.push_back(i);
  bool found = true;
  while (found) {
    found = false;
    for (int t = 0; t + 1 < static_cast<int>(cur.size()); ++t) {
      if (d.match[cur[t]] == cur[t + 1]) {
        ops.push_back(DiagramOp{true, t});
        cur.erase(cur.begin() + t, cur.begin() + t + 2);
        found = true;
        break;
      }
    }
  }

  // Remaining bottom points are through-strands; replace each by its top
  // position (left-to-right index j corresponds to point 2n-1-j).
  std::vector<int> top_pos;
  for (int b : cur) {
    int q = d.match[b];
    if (q < n) throw std::logic_error("diagram_ops: unreduced bottom arc");
    top_pos.push_back(m - 1 - q);
  }

  // Cups: top-top arcs, outermost first (sorted by left endpoint).
  // Top positions j1 < j2 are joined when match links their points.
  std::vector<std::pair<int, int>> arcs;
  for (int j1 = 0; j1 < n; ++j1) {
    int p = m - 1 - j1;
    int q = d.match[p];
    if (q < n) continue;  // through strand
    int j2 = m - 1 - q;
    if (j1 < j2) arcs.emplace_back(j1, j2);
  }
  std::sort(arcs.begin(), arcs.end());
  for (auto [s, t] : arcs) {
    int idx = 0;
    while (idx < static_cast<int>(top_pos.size()) && top_pos[idx] < s) ++idx;
    ops.push_back(DiagramOp{false, idx});
    top_pos.insert(top_pos.begin() + idx, {s, t});
  }
  for (int j = 0; j + 1 < static_cast<int>(top_pos.size()); ++j) {
    if (top_pos[j] > top_pos[j + 1])
      throw std::logic_error("diagram_ops: top order violated");
  }
  return ops;
}

}  // namespace skein
