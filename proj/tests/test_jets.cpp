#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "germlab/jet.hpp"
#include "germlab/jet_json.hpp"
#include "test_support.hpp"

using namespace germlab;
using testsupport::Lcg;
using testsupport::random_jet;

namespace {

Jet<Rational> make_jet(int order,
                       std::initializer_list<std::tuple<int, int, Rational>> terms) {
  Jet<Rational> f(order);
  for (const auto& [i, j, c] : terms) f.set(i, j, c);
  return f;
}

}  // namespace

TEST_CASE("triangular coefficient indexing") {
  CHECK(jet_index(0, 0) == 0);
  CHECK(jet_index(1, 0) == 1);
  CHECK(jet_index(0, 1) == 2);
  CHECK(jet_index(2, 0) == 3);
  CHECK(jet_index(1, 1) == 4);
  CHECK(jet_index(0, 2) == 5);
  CHECK(jet_index(3, 0) == 6);
  // total count through degree d is (d+1)(d+2)/2
  CHECK(jet_size(0) == 1);
  CHECK(jet_size(1) == 3);
  CHECK(jet_size(9) == 55);
}

TEST_CASE("constructors and accessors") {
  Jet<Rational> z(3);
  CHECK(z.order() == 3);
  CHECK(z.coeff(2, 1) == 0);

  auto x = Jet<Rational>::variable(0, 4);
  auto y = Jet<Rational>::variable(1, 4);
  CHECK(x.coeff(1, 0) == 1);
  CHECK(x.coeff(0, 1) == 0);
  CHECK(y.coeff(0, 1) == 1);

  auto c = Jet<Rational>::constant(Rational(7, 2), 2);
  CHECK(c.coeff(0, 0) == Rational(7, 2));
  CHECK(c.coeff(1, 0) == 0);

  CHECK_THROWS_AS(Jet<Rational>(-1), std::invalid_argument);
  CHECK_THROWS(Jet<Rational>::variable(2, 3));
  CHECK_THROWS_AS(Jet<Rational>(2).coeff(2, 1), std::out_of_range);
}

TEST_CASE("arithmetic is exact and truncates to the smaller order") {
  // (1 + x + y)^2 through order 2
  auto j = make_jet(2, {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}});
  auto sq = j * j;
  CHECK(sq.order() == 2);
  CHECK(sq.coeff(0, 0) == 1);
  CHECK(sq.coeff(1, 0) == 2);
  CHECK(sq.coeff(0, 1) == 2);
  CHECK(sq.coeff(2, 0) == 1);
  CHECK(sq.coeff(1, 1) == 2);
  CHECK(sq.coeff(0, 2) == 1);

  // mixed orders: product order is the min of the two
  Lcg rng(11);
  auto a = random_jet(rng, 5);
  auto b = random_jet(rng, 3);
  CHECK((a * b).order() == 3);
  CHECK((a + b).order() == 3);
  CHECK((a - b).order() == 3);

  // ring identities on random jets
  Lcg rng2(13);
  auto f = random_jet(rng2, 6);
  auto g = random_jet(rng2, 6);
  auto h = random_jet(rng2, 6);
  CHECK(f * g == g * f);
  CHECK((f + g) * h == f * h + g * h);
  CHECK((f * g) * h == f * (g * h));
  CHECK(f * Jet<Rational>::constant(1, 6) == f);
  CHECK(f - f == Jet<Rational>(6));
  CHECK(f * Rational(3, 7) + f * Rational(4, 7) == f);
}

TEST_CASE("partial derivatives satisfy the Leibniz rule exactly") {
  Lcg rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_jet(rng, 6);
    auto g = random_jet(rng, 6);
    for (int var = 0; var < 2; ++var) {
      auto lhs = partial(f * g, var);
      auto rhs = partial(f, var) * g.truncated(5) + f.truncated(5) * partial(g, var);
      CHECK(lhs == rhs);
    }
  }
  // mixed partials commute
  Lcg rng2(22);
  auto f = random_jet(rng2, 7);
  CHECK(partial(partial(f, 0), 1) == partial(partial(f, 1), 0));
  // order drops by one, floor at zero
  CHECK(partial(f, 0).order() == 6);
  CHECK(partial(Jet<Rational>::constant(5, 0), 1).order() == 0);
  CHECK(partial(Jet<Rational>::constant(5, 0), 1).coeff(0, 0) == 0);
}

TEST_CASE("evaluate is a ring morphism") {
  Lcg rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_jet(rng, 5);
    auto g = random_jet(rng, 5);
    Rational px = rng.rational(3, 3);
    Rational py = rng.rational(3, 3);
    CHECK(evaluate(f + g, px, py) == evaluate(f, px, py) + evaluate(g, px, py));
    // multiplication truncates to the operand order, so pad the low-degree
    // factors up front: their true product has degree 4 <= 5 and stays exact
    auto flow = f.truncated(2).truncated(5);
    auto glow = g.truncated(2).truncated(5);
    CHECK(evaluate(flow * glow, px, py) ==
          evaluate(flow, px, py) * evaluate(glow, px, py));
  }
  auto x = Jet<Rational>::variable(0, 3);
  auto y = Jet<Rational>::variable(1, 3);
  CHECK(evaluate(x * x * y, Rational(2), Rational(-3)) == Rational(-12));
}

TEST_CASE("compose substitutes exactly when degrees stay within the order") {
  Lcg rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    // outer of degree <= 3, inner of degree <= 2, both carried at order 9:
    // the composite has degree <= 6, so no truncation loss occurs and
    // evaluation commutes with composition.
    auto f = random_jet(rng, 3).truncated(9);
    auto g1 = random_jet(rng, 2, /*zero_constant=*/true).truncated(9);
    auto g2 = random_jet(rng, 2, /*zero_constant=*/true).truncated(9);
    auto comp = compose(f, g1, g2);
    Rational px = rng.rational(2, 3);
    Rational py = rng.rational(2, 3);
    CHECK(evaluate(comp, px, py) ==
          evaluate(f, evaluate(g1, px, py), evaluate(g2, px, py)));
  }
}

TEST_CASE("compose is associative on truncated jets") {
  Lcg rng(43);
  auto f = random_jet(rng, 5);
  auto g1 = random_jet(rng, 5, true);
  auto g2 = random_jet(rng, 5, true);
  auto h1 = random_jet(rng, 5, true);
  auto h2 = random_jet(rng, 5, true);
  auto lhs = compose(compose(f, g1, g2), h1, h2);
  auto rhs = compose(f, compose(g1, h1, h2), compose(g2, h1, h2));
  CHECK(lhs == rhs);
}

TEST_CASE("compose rejects inner jets with nonzero constant term") {
  Lcg rng(51);
  auto f = random_jet(rng, 4);
  auto bad = make_jet(4, {{0, 0, 1}, {1, 0, 1}});
  auto ok = make_jet(4, {{0, 1, 1}});
  CHECK_THROWS_AS(compose(f, bad, ok), std::invalid_argument);
  CHECK_THROWS_AS(compose(f, ok, bad), std::invalid_argument);
}

TEST_CASE("compose with the identity is the identity") {
  Lcg rng(52);
  auto f = random_jet(rng, 6);
  auto x = Jet<Rational>::variable(0, 6);
  auto y = Jet<Rational>::variable(1, 6);
  CHECK(compose(f, x, y) == f);
}

TEST_CASE("translate recentres exactly") {
  Lcg rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    auto f = random_jet(rng, 6);
    Rational dx = rng.rational(3, 3);
    Rational dy = rng.rational(3, 3);
    auto g = translate(f, dx, dy);
    // g(u,v) = f(u+dx, v+dy): check on a few sample offsets
    for (int k = 0; k < 4; ++k) {
      Rational ux = rng.rational(2, 3);
      Rational uy = rng.rational(2, 3);
      CHECK(evaluate(g, ux, uy) == evaluate(f, Rational(ux + dx), Rational(uy + dy)));
    }
    // translating back restores the jet exactly
    CHECK(translate(g, Rational(-dx), Rational(-dy)) == f);
  }
  // translation commutes with differentiation
  Lcg rng2(62);
  auto f = random_jet(rng2, 6);
  Rational dx(5, 3), dy(-2, 7);
  CHECK(partial(translate(f, dx, dy), 0) == translate(partial(f, 0), dx, dy));
  CHECK(partial(translate(f, dx, dy), 1) == translate(partial(f, 1), dx, dy));
}

TEST_CASE("max_abs_coeff and double conversion") {
  auto f = make_jet(3, {{0, 0, Rational(-7, 2)}, {2, 1, Rational(3)}});
  CHECK(max_abs_coeff(f) == 3.5);
  auto d = to_double_jet(f);
  CHECK(d.coeff(0, 0) == doctest::Approx(-3.5));
  CHECK(d.coeff(2, 1) == doctest::Approx(3.0));
  CHECK(d.order() == 3);
}

TEST_CASE("json round trip preserves double jets bit for bit") {
  Jet<double> f(4);
  f.set(0, 0, 0.1);
  f.set(1, 0, -1.0 / 3.0);
  f.set(0, 1, 1e-17);
  f.set(2, 2, 123456789.123456789);
  f.set(4, 0, -0.0);  // negative zero is a zero: dropped from sparse output
  auto j = jet_to_json(f);
  CHECK(j["order"] == 4);
  auto g = jet_from_json(j);
  CHECK(g.order() == 4);
  for (int d = 0; d <= 4; ++d)
    for (int k = 0; k <= d; ++k) {
      double a = f.coeff(d - k, k);
      double b = g.coeff(d - k, k);
      if (a == 0.0)
        CHECK(b == 0.0);
      else
        CHECK(a == b);  // exact, not approximate
    }
  // serialized form is sparse: zero coefficients do not appear
  for (const auto& entry : j["coeffs"]) CHECK(entry[2].get<double>() != 0.0);
}

TEST_CASE("json round trip preserves rational jets exactly") {
  Lcg rng(71);
  auto f = random_jet(rng, 5);
  f.set(3, 1, Rational(Integer("123456789012345678901234567890"), Integer(7)));
  auto j = jet_to_json(f);
  auto g = rational_jet_from_json(j);
  CHECK(g == f);
  // rational coefficients serialize as strings
  for (const auto& entry : j["coeffs"]) CHECK(entry[2].is_string());
  // the generic reader also accepts rational strings, converting to double
  auto d = jet_from_json(j);
  CHECK(d.coeff(3, 1) ==
        doctest::Approx(to_double(f.coeff(3, 1))).epsilon(1e-12));
}

TEST_CASE("json rejects malformed input") {
  nlohmann::json j;
  j["order"] = 2;
  j["coeffs"] = nlohmann::json::array({{0, 0, "not-a-number"}});
  CHECK_THROWS(jet_from_json(j));
  nlohmann::json k;
  k["order"] = 1;
  k["coeffs"] = nlohmann::json::array({{5, 0, 1.0}});  // degree beyond order
  CHECK_THROWS(jet_from_json(k));
  nlohmann::json m;  // missing order
  m["coeffs"] = nlohmann::json::array();
  CHECK_THROWS(jet_from_json(m));
}

TEST_CASE("rational string parsing round trips") {
  CHECK(rational_string(Rational(-22, 7)) == "-22/7");
  CHECK(rational_string(Rational(5)) == "5");
  CHECK(parse_rational("-22/7") == Rational(-22, 7));
  CHECK(parse_rational("5") == Rational(5));
  CHECK(parse_rational("0/9") == Rational(0));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
}
