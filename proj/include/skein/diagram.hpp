#pragma once

#include <cstdint>
#include <vector>

namespace skein {

// A Temperley-Lieb diagram at level n: a non-crossing perfect matching of 2n
// boundary points. Points are numbered counterclockwise from the marked
// corner at the top left: 0..n-1 run along the bottom left to right,
// n..2n-1 along the top right to left (so point 2n-1 is top-left, adjacent
// to point 0 across the marked corner).
struct TLDiagram {
  std::vector<int> match;  // match[i] = partner of point i; size 2n

  int level() const { return static_cast<int>(match.size()) / 2; }
  bool operator==(const TLDiagram&) const = default;
  bool operator<(const TLDiagram& o) const { return match < o.match; }
};

// All TL diagrams at level n (Catalan(n) of them), sorted by match vector;
// the order is the module's canonical diagram order.
std::vector<TLDiagram> all_diagrams(int n);

// Identity diagram: bottom i joined to top i (point 2n-1-i).
TLDiagram identity_diagram(int n);

// Vertical stacking x over y (both level n): y's top boundary is glued to
// x's bottom boundary. Returns the resulting diagram and the number of
// closed loops removed.
struct StackResult {
  TLDiagram diagram;
  int loops = 0;
};
StackResult stack(const TLDiagram& x, const TLDiagram& y);

// Counterclockwise rotation by r boundary points (marked corner moves past r
// points); r may be negative.
TLDiagram rotate(const TLDiagram& d, int r);

// Vertical reflection (the * involution): bottom i <-> top i.
TLDiagram flip(const TLDiagram& d);

// Markov trace closure: joins bottom i to top i (point 2n-1-i) around the
// right side; returns the number of closed loops.
int closure_loops(const TLDiagram& d);

// The diagram as a sequence of elementary moves on the top boundary of a
// state with n strands, suitable for the path engine: caps first (innermost
// outward), then cups (outermost inward). `pos` is the strand position at
// the time the move is applied.
struct DiagramOp {
  bool is_cap;
  int pos;
};
std::vector<DiagramOp> diagram_ops(const TLDiagram& d);

}  // namespace skein
