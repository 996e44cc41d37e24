#include "skein/tangle.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace skein {

namespace {

int box_half(const Cell& c, const std::map<int, int>& box_arity) {
  auto it = box_arity.find(c.box_id);
  if (it == box_arity.end())
    throw std::invalid_argument("box id " + std::to_string(c.box_id) +
                                " has no declared arity");
  return it->second / 2;
}

}  // namespace

int cell_in(const Cell& c, const std::map<int, int>& box_arity) {
  switch (c.kind) {
    case Cell::Kind::Id: return 1;
    case Cell::Kind::Cap: return 2;
    case Cell::Kind::Cup: return 0;
    case Cell::Kind::Box: return box_half(c, box_arity);
  }
  return 0;
}

int cell_out(const Cell& c, const std::map<int, int>& box_arity) {
  switch (c.kind) {
    case Cell::Kind::Id: return 1;
    case Cell::Kind::Cap: return 0;
    case Cell::Kind::Cup: return 2;
    case Cell::Kind::Box: return box_half(c, box_arity);
  }
  return 0;
}

int row_in(const Row& r, const std::map<int, int>& box_arity) {
  int n = 0;
  for (const Cell& c : r) n += cell_in(c, box_arity);
  return n;
}

int row_out(const Row& r, const std::map<int, int>& box_arity) {
  int n = 0;
  for (const Cell& c : r) n += cell_out(c, box_arity);
  return n;
}

Diagnostics validate(const Circuit& c) {
  Diagnostics d;
  auto fail = [&d](const std::string& msg) {
    d.ok = false;
    d.messages.push_back(msg);
  };
  for (const auto& [id, arity] : c.box_arity) {
    if (arity < 0 || arity % 2 != 0)
      fail("box " + std::to_string(id) + " has odd arity " +
           std::to_string(arity));
  }
  int strands = c.bottom;
  for (size_t i = 0; i < c.rows.size(); ++i) {
    int in = 0, out = 0;
    for (size_t j = 0; j < c.rows[i].size(); ++j) {
      const Cell& cell = c.rows[i][j];
      if (cell.kind == Cell::Kind::Box &&
          c.box_arity.find(cell.box_id) == c.box_arity.end()) {
        fail("row " + std::to_string(i) + " cell " + std::to_string(j) +
             ": box " + std::to_string(cell.box_id) + " not in arity table");
        return d;
      }
      in += cell_in(cell, c.box_arity);
      out += cell_out(cell, c.box_arity);
    }
    if (in != strands)
      fail("row " + std::to_string(i) + " consumes " + std::to_string(in) +
           " strands but " + std::to_string(strands) + " are available");
    strands = out;
  }
  if (strands != c.top)
    fail("top boundary expects " + std::to_string(c.top) +
         " strands but rows emit " + std::to_string(strands));
  return d;
}

Circuit compose(const Circuit& top, const Circuit& bottom) {
  if (bottom.top != top.bottom)
    throw std::invalid_argument(
        "compose: seam mismatch (" + std::to_string(bottom.top) + " vs " +
        std::to_string(top.bottom) + " strands)");
  if (bottom.bottom_left_shaded != top.bottom_left_shaded)
    throw std::invalid_argument("compose: shading mismatch at seam");
  Circuit r = bottom;
  r.top = top.top;
  r.rows.insert(r.rows.end(), top.rows.begin(), top.rows.end());
  for (const auto& [id, arity] : top.box_arity) {
    auto [it, inserted] = r.box_arity.emplace(id, arity);
    if (!inserted && it->second != arity)
      throw std::invalid_argument("compose: box " + std::to_string(id) +
                                  " declared with two arities");
  }
  return r;
}

Circuit tensor(const Circuit& left, const Circuit& right) {
  // Shading of left's right-edge region: left edge flipped once per strand.
  bool seam = left.bottom_left_shaded ^ (left.bottom % 2 != 0);
  if (right.bottom_left_shaded != seam)
    throw std::invalid_argument("tensor: shading clash at the seam");
  Circuit l = left, r = right;
  while (l.rows.size() < r.rows.size()) l.rows.push_back(Row(l.top, Cell::id()));
  while (r.rows.size() < l.rows.size()) r.rows.push_back(Row(r.top, Cell::id()));
  Circuit out;
  out.bottom = l.bottom + r.bottom;
  out.top = l.top + r.top;
  out.bottom_left_shaded = l.bottom_left_shaded;
  out.rows.resize(l.rows.size());
  for (size_t i = 0; i < l.rows.size(); ++i) {
    out.rows[i] = l.rows[i];
    out.rows[i].insert(out.rows[i].end(), r.rows[i].begin(), r.rows[i].end());
  }
  out.box_arity = l.box_arity;
  for (const auto& [id, arity] : r.box_arity) {
    auto [it, inserted] = out.box_arity.emplace(id, arity);
    if (!inserted && it->second != arity)
      throw std::invalid_argument("tensor: box " + std::to_string(id) +
                                  " declared with two arities");
  }
  return out;
}

Circuit double_and_cable(const Circuit& c, int k) {
  if (k < 1) throw std::invalid_argument("double_and_cable: k must be >= 1");
  Circuit out;
  out.bottom = c.bottom * k;
  out.top = c.top * k;
  out.bottom_left_shaded = c.bottom_left_shaded;
  for (const auto& [id, arity] : c.box_arity) out.box_arity[id] = arity * k;
  for (const Row& row : c.rows) {
    std::vector<Row> block(k);
    for (const Cell& cell : row) {
      switch (cell.kind) {
        case Cell::Kind::Id:
          for (int j = 0; j < k; ++j)
            block[j].insert(block[j].end(), k, Cell::id());
          break;
        case Cell::Kind::Cap:
          // Innermost cap first going up.
          for (int j = 0; j < k; ++j) {
            block[j].insert(block[j].end(), k - 1 - j, Cell::id());
            block[j].push_back(Cell::cap());
            block[j].insert(block[j].end(), k - 1 - j, Cell::id());
          }
          break;
        case Cell::Kind::Cup:
          // Outermost cup first going up.
          for (int j = 0; j < k; ++j) {
            block[j].insert(block[j].end(), j, Cell::id());
            block[j].push_back(Cell::cup());
            block[j].insert(block[j].end(), j, Cell::id());
          }
          break;
        case Cell::Kind::Box: {
          int m = box_half(cell, c.box_arity);
          block[0].push_back(Cell::box(cell.box_id, cell.rot * k));
          for (int j = 1; j < k; ++j)
            block[j].insert(block[j].end(), m * k, Cell::id());
          break;
        }
      }
    }
    out.rows.insert(out.rows.end(), block.begin(), block.end());
  }
  return out;
}

Scalar SpinExponent::value(const Scalar& I) const {
  Scalar quarter = I.sqrt().sqrt();
  Scalar v = quarter.pow(e);
  if (shaded_boundary_flag) v = v / I;
  return v;
}

SpinExponent spin_factor(const Circuit& c) {
  Diagnostics d = validate(c);
  if (!d.ok)
    throw std::invalid_argument("spin_factor: invalid circuit: " +
                                d.messages.front());
  SpinExponent s;
  for (const Row& row : c.rows) {
    int in_left = 0, out_left = 0;
    for (const Cell& cell : row) {
      switch (cell.kind) {
        case Cell::Kind::Cap: {
          // Convex side between the legs, below the arc.
          bool shaded = c.bottom_left_shaded ^ ((in_left + 1) % 2 != 0);
          s.e += shaded ? -1 : 1;
          break;
        }
        case Cell::Kind::Cup: {
          // Convex side between the legs, above the arc.
          bool shaded = c.bottom_left_shaded ^ ((out_left + 1) % 2 != 0);
          s.e += shaded ? -1 : 1;
          break;
        }
        case Cell::Kind::Box:
          if (cell.rot != 0)
            throw std::invalid_argument(
                "spin_factor: box with rotation offset; expand rotations "
                "into explicit bends first");
          break;
        case Cell::Kind::Id:
          break;
      }
      in_left += cell_in(cell, c.box_arity);
      out_left += cell_out(cell, c.box_arity);
    }
  }
  if (c.bottom == 0 && c.top == 0 && c.bottom_left_shaded)
    s.shaded_boundary_flag = true;
  return s;
}

Circuit parse_circuit(const std::string& text,
                      const std::map<int, int>& box_arity) {
  Circuit c;
  c.box_arity = box_arity;
  std::vector<Row> top_first;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::istringstream toks(line);
    std::string tok;
    Row row;
    bool directive = false;
    while (toks >> tok) {
      if (tok == "shaded" && row.empty()) {
        c.bottom_left_shaded = true;
        directive = true;
        break;
      }
      if (tok == "|") {
        row.push_back(Cell::id());
      } else if (tok == "u") {
        row.push_back(Cell::cup());
      } else if (tok == "n") {
        row.push_back(Cell::cap());
      } else if (tok.size() > 1 && tok[0] == 'B') {
        size_t rpos = tok.find('r', 1);
        try {
          int id = std::stoi(tok.substr(1, rpos == std::string::npos
                                               ? std::string::npos
                                               : rpos - 1));
          int rot = rpos == std::string::npos ? 0
                                              : std::stoi(tok.substr(rpos + 1));
          row.push_back(Cell::box(id, rot));
        } catch (const std::exception&) {
          throw std::invalid_argument("bad box token: " + tok);
        }
      } else {
        throw std::invalid_argument("bad circuit token: " + tok);
      }
    }
    if (!directive && !row.empty()) top_first.push_back(std::move(row));
  }
  c.rows.assign(top_first.rbegin(), top_first.rend());
  if (!c.rows.empty()) {
    c.bottom = row_in(c.rows.front(), c.box_arity);
    c.top = row_out(c.rows.back(), c.box_arity);
  }
  Diagnostics d = validate(c);
  if (!d.ok) throw std::invalid_argument("circuit text: " + d.messages.front());
  return c;
}

std::string to_dsl(const Circuit& c) {
  std::ostringstream os;
  if (c.bottom_left_shaded) os << "shaded\n";
  for (auto it = c.rows.rbegin(); it != c.rows.rend(); ++it) {
    for (size_t j = 0; j < it->size(); ++j) {
      if (j) os << ' ';
      const Cell& cell = (*it)[j];
      switch (cell.kind) {
        case Cell::Kind::Id: os << '|'; break;
        case Cell::Kind::Cap: os << 'n'; break;
        case Cell::Kind::Cup: os << 'u'; break;
        case Cell::Kind::Box:
          os << 'B' << cell.box_id;
          if (cell.rot != 0) os << 'r' << cell.rot;
          break;
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace skein
