#pragma once

#include <map>
#include <string>
#include <vector>

#include "skein/scalar.hpp"

namespace skein {

// One cell of a circuit row. A cell occupies a contiguous group of strand
// positions: Id passes one strand through, Cap joins two adjacent strands
// from below, Cup emits two adjacent strands, Box consumes m and emits m
// strands for a box of arity 2m (rectangular normal form).
struct Cell {
  enum class Kind { Id, Cap, Cup, Box };
  Kind kind = Kind::Id;
  int box_id = -1;  // Box only
  int rot = 0;      // Box only: marked-point rotation offset, ccw

  static Cell id() { return {Kind::Id, -1, 0}; }
  static Cell cap() { return {Kind::Cap, -1, 0}; }
  static Cell cup() { return {Kind::Cup, -1, 0}; }
  static Cell box(int id, int rot = 0) { return {Kind::Box, id, rot}; }

  bool operator==(const Cell&) const = default;
};

using Row = std::vector<Cell>;

// A layered circuit: rows are listed bottom to top, each row a left-to-right
// list of cells. Strand counts at the bottom and top boundaries are stored
// explicitly so that the zero-row identity circuit is representable.
// bottom_left_shaded gives the shading of the region at the left edge
// (connected along the whole height); all other region shadings follow by
// parity. Box arities (total marked points, always even) live in box_arity;
// the same box id may appear in several cells.
struct Circuit {
  std::vector<Row> rows;
  int bottom = 0;
  int top = 0;
  bool bottom_left_shaded = false;
  std::map<int, int> box_arity;

  static Circuit identity(int n, bool shaded = false) {
    Circuit c;
    c.bottom = c.top = n;
    c.bottom_left_shaded = shaded;
    return c;
  }

  bool operator==(const Circuit&) const = default;
};

// Strand counts consumed/emitted by a cell; Box cells need the arity table.
int cell_in(const Cell& c, const std::map<int, int>& box_arity);
int cell_out(const Cell& c, const std::map<int, int>& box_arity);
int row_in(const Row& r, const std::map<int, int>& box_arity);
int row_out(const Row& r, const std::map<int, int>& box_arity);

struct Diagnostics {
  bool ok = true;
  std::vector<std::string> messages;
};

// Structural checks: row strand counts chain from bottom to top, every box
// id has a declared even arity. Returns diagnostics naming row/cell on
// failure.
Diagnostics validate(const Circuit& c);

// Vertical stacking: bottom first, then top. Requires matching strand count
// and shading at the seam; box tables are merged (a shared id must have the
// same arity). Throws std::invalid_argument on mismatch.
Circuit compose(const Circuit& top, const Circuit& bottom);

// Horizontal juxtaposition; the shorter circuit is padded with identity rows
// at its top. Requires right's left-edge shading to match the shading of
// left's right-edge region. Throws std::invalid_argument on mismatch.
Circuit tensor(const Circuit& left, const Circuit& right);

// Replaces every strand by k parallel strands: caps/cups become nested
// families (k rows), boxes widen (arity and rotation offsets scale by k).
// k = 2 is string doubling.
Circuit double_and_cable(const Circuit& c, int k);

// I^{e/4}, times an extra I^{-1} when flag is set (degree-0 circuit whose
// boundary region is shaded).
struct SpinExponent {
  int e = 0;
  bool shaded_boundary_flag = false;

  bool operator==(const SpinExponent&) const = default;

  Scalar value(const Scalar& I) const;
};

// Product over local extrema of I^{+1/4} (convex side of the extremum
// unshaded) or I^{-1/4} (shaded). In layered normal form the extrema are
// exactly the Cap cells (convex side between the legs, below the arc) and
// Cup cells (between the legs, above the arc). Requires every box rotation
// offset to be 0: callers expand rotations into explicit bend rows when the
// spin factor is meaningful. Throws std::invalid_argument otherwise.
SpinExponent spin_factor(const Circuit& c);

// Text form, one row per line, top row first. Tokens: `|` (id strand),
// `u` (cup), `n` (cap), `B<id>` or `B<id>r<offset>` (box). Lines starting
// with '#' are comments; a line consisting of the word `shaded` marks the
// left-edge region shaded. Box arities must be supplied for every box id
// used. The parsed circuit is validated; throws std::invalid_argument on
// syntax or structure errors.
Circuit parse_circuit(const std::string& text,
                      const std::map<int, int>& box_arity);

// Inverse of parse_circuit (top row first, `shaded` directive included when
// set).
std::string to_dsl(const Circuit& c);

}  // namespace skein
