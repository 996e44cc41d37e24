#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "skein/tangle.hpp"

using namespace skein;

namespace {

// Builds a random valid circuit starting from `width` bottom strands.
Circuit random_circuit(int width, int n_rows, std::mt19937& rng,
                       bool with_boxes = false) {
  Circuit c;
  c.bottom = width;
  std::uniform_int_distribution<int> kind(0, with_boxes ? 3 : 2);
  int strands = width;
  for (int i = 0; i < n_rows; ++i) {
    Row row;
    int left = strands;
    int out = 0;
    while (left > 0) {
      int k = kind(rng);
      if (k == 1 && left >= 2) {
        row.push_back(Cell::cap());
        left -= 2;
      } else if (k == 2) {
        row.push_back(Cell::cup());
        out += 2;
      } else if (k == 3 && left >= 2) {
        int id = static_cast<int>(c.box_arity.size());
        c.box_arity[id] = 4;
        row.push_back(Cell::box(id));
        left -= 2;
        out += 2;
      } else {
        row.push_back(Cell::id());
        left -= 1;
        out += 1;
      }
    }
    if (row.empty()) row.push_back(Cell::cup()), out = 2;
    c.rows.push_back(row);
    strands = out;
  }
  c.top = strands;
  return c;
}

}  // namespace

TEST_CASE("validate") {
  CHECK(validate(Circuit::identity(0)).ok);
  CHECK(validate(Circuit::identity(5)).ok);

  Circuit cap;
  cap.bottom = 2;
  cap.top = 0;
  cap.rows = {{Cell::cap()}};
  CHECK(validate(cap).ok);

  Circuit bad;
  bad.bottom = 3;
  bad.top = 2;
  bad.rows = {{Cell::id(), Cell::id(), Cell::id()}, {Cell::id(), Cell::id()}};
  Diagnostics d = validate(bad);
  CHECK_FALSE(d.ok);
  CHECK(d.messages.front().find("row 1") != std::string::npos);

  Circuit unbound;
  unbound.bottom = 1;
  unbound.top = 1;
  unbound.rows = {{Cell::box(7)}};
  CHECK_FALSE(validate(unbound).ok);
}

TEST_CASE("compose") {
  Circuit id3 = Circuit::identity(3);
  CHECK(compose(id3, id3) == id3);

  Circuit cup;
  cup.bottom = 0;
  cup.top = 2;
  cup.rows = {{Cell::cup()}};
  Circuit cap;
  cap.bottom = 2;
  cap.top = 0;
  cap.rows = {{Cell::cap()}};
  Circuit circle = compose(cap, cup);
  CHECK(circle.bottom == 0);
  CHECK(circle.top == 0);
  CHECK(circle.rows.size() == 2);
  CHECK(validate(circle).ok);

  CHECK_THROWS_AS(compose(cap, cap), std::invalid_argument);

  std::mt19937 rng(7);
  for (int t = 0; t < 20; ++t) {
    Circuit a = random_circuit(3, 2, rng);
    Circuit b = random_circuit(a.top, 2, rng);
    Circuit c = random_circuit(b.top, 2, rng);
    CHECK(compose(c, compose(b, a)) == compose(compose(c, b), a));
  }
}

TEST_CASE("tensor") {
  Circuit id2 = Circuit::identity(2);
  Circuit id3 = Circuit::identity(3);
  CHECK(tensor(id2, id3) == Circuit::identity(5));

  Circuit cap;
  cap.bottom = 2;
  cap.top = 0;
  cap.rows = {{Cell::cap()}};
  Circuit two = tensor(cap, cap);
  CHECK(two.bottom == 4);
  CHECK(two.top == 0);
  CHECK(validate(two).ok);

  // Parity-odd left side flips the seam shading requirement.
  Circuit odd = Circuit::identity(1);
  Circuit shaded = Circuit::identity(2, true);
  CHECK_NOTHROW(tensor(odd, shaded));
  CHECK_THROWS_AS(tensor(odd, Circuit::identity(2)), std::invalid_argument);

  // Interchange law: stacking then juxtaposing = juxtaposing then stacking.
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    Circuit a = random_circuit(2, 1, rng);
    Circuit b = random_circuit(a.top, 1, rng);
    Circuit c = random_circuit(2 + (a.bottom % 2), 1, rng);
    c.bottom_left_shaded = (a.bottom % 2 != 0);
    Circuit d = random_circuit(c.top, 1, rng);
    d.bottom_left_shaded = c.bottom_left_shaded;
    Circuit lhs = tensor(compose(b, a), compose(d, c));
    Circuit rhs = compose(tensor(b, d), tensor(a, c));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("double_and_cable") {
  CHECK(double_and_cable(Circuit::identity(1), 2) == Circuit::identity(2));
  CHECK(double_and_cable(Circuit::identity(1), 3) == Circuit::identity(3));

  Circuit cap;
  cap.bottom = 2;
  cap.top = 0;
  cap.rows = {{Cell::cap()}};
  Circuit doubled = double_and_cable(cap, 2);
  CHECK(doubled.bottom == 4);
  CHECK(doubled.rows.size() == 2);
  CHECK(doubled.rows[0] == Row{Cell::id(), Cell::cap(), Cell::id()});
  CHECK(doubled.rows[1] == Row{Cell::cap()});
  CHECK(validate(doubled).ok);

  std::mt19937 rng(23);
  for (int t = 0; t < 15; ++t) {
    Circuit a = random_circuit(4, 2, rng);
    Circuit b = random_circuit(a.top, 2, rng);
    CHECK(double_and_cable(compose(b, a), 2) ==
          compose(double_and_cable(b, 2), double_and_cable(a, 2)));
    Circuit c = random_circuit(2, 2, rng);
    CHECK(double_and_cable(tensor(a, c), 2) ==
          tensor(double_and_cable(a, 2), double_and_cable(c, 2)));
    CHECK(validate(double_and_cable(a, 3)).ok);
  }
}

TEST_CASE("spin_factor") {
  CHECK(spin_factor(Circuit::identity(4)).e == 0);
  CHECK_FALSE(spin_factor(Circuit::identity(4)).shaded_boundary_flag);

  Circuit cup;
  cup.bottom = 0;
  cup.top = 2;
  cup.rows = {{Cell::cup()}};
  Circuit cap;
  cap.bottom = 2;
  cap.top = 0;
  cap.rows = {{Cell::cap()}};

  SUBCASE("closed circle is shading independent with value I^{-1/2}") {
    Circuit circle = compose(cap, cup);
    SpinExponent a = spin_factor(circle);
    CHECK(a.e == -2);
    CHECK_FALSE(a.shaded_boundary_flag);

    Circuit circle_shaded = circle;
    circle_shaded.bottom_left_shaded = true;
    SpinExponent b = spin_factor(circle_shaded);
    CHECK(b.e == 2);
    CHECK(b.shaded_boundary_flag);

    Scalar I(2.25);
    CHECK(near_zero(a.value(I) - b.value(I), Tolerance{}));
    CHECK(near_zero(a.value(I) - I.sqrt().inverse(), Tolerance{}));
  }

  SUBCASE("Jones projection shape, even strand count: e = -2") {
    // Two through strands, a cap and a cup on the right.
    Circuit c;
    c.bottom = 4;
    c.top = 4;
    c.rows = {{Cell::id(), Cell::id(), Cell::cap()},
              {Cell::id(), Cell::id(), Cell::cup()}};
    CHECK(spin_factor(c).e == -2);
  }

  SUBCASE("Jones projection shape, odd strand count: e = +2") {
    Circuit c;
    c.bottom = 5;
    c.top = 5;
    c.rows = {{Cell::id(), Cell::id(), Cell::id(), Cell::cap()},
              {Cell::id(), Cell::id(), Cell::id(), Cell::cup()}};
    CHECK(spin_factor(c).e == 2);
  }

  SUBCASE("multiplicative under compose") {
    std::mt19937 rng(31);
    for (int t = 0; t < 25; ++t) {
      Circuit a = random_circuit(4, 2, rng);
      Circuit b = random_circuit(a.top, 2, rng);
      CHECK(spin_factor(compose(b, a)).e ==
            spin_factor(a).e + spin_factor(b).e);
    }
  }

  SUBCASE("rotated boxes are rejected") {
    Circuit c;
    c.bottom = 2;
    c.top = 2;
    c.box_arity[0] = 4;
    c.rows = {{Cell::box(0, 1)}};
    CHECK_THROWS_AS(spin_factor(c), std::invalid_argument);
  }
}

TEST_CASE("dsl round trip") {
  std::string text =
      "# a boxed zigzag\n"
      "n |\n"
      "B2r-1 |\n"
      "u |\n";
  Circuit c = parse_circuit(text, {{2, 4}});
  CHECK(c.bottom == 1);
  CHECK(c.top == 1);
  CHECK(c.rows.size() == 3);
  CHECK(c.rows[0] == Row{Cell::cup(), Cell::id()});
  CHECK(c.rows[1] == Row{Cell::box(2, -1), Cell::id()});
  CHECK(c.rows[2] == Row{Cell::cap(), Cell::id()});
  CHECK(validate(c).ok);
  CHECK(parse_circuit(to_dsl(c), {{2, 4}}) == c);

  Circuit s = parse_circuit("shaded\nu\n", {});
  CHECK(s.bottom_left_shaded);
  CHECK(s.top == 2);
  CHECK(parse_circuit(to_dsl(s), {}) == s);

  CHECK_THROWS_AS(parse_circuit("| x |\n", {}), std::invalid_argument);
  CHECK_THROWS_AS(parse_circuit("B9\n", {}), std::invalid_argument);
  CHECK_THROWS_AS(parse_circuit("| n\n| |\n", {}), std::invalid_argument);
}
