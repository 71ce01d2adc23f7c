#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "germlab/geometry.hpp"
#include "germlab/recognition.hpp"
#include "germlab/unfolding.hpp"

using namespace germlab;

namespace {

// Closed forms of the typical family's curves:
//   parabolic  x^2 - t y^2 - 3 y^3        (normalized coeff(x^2) = 1)
//   flecnodal  t x^2 + 4 x^2 y - t^2 y^2 - 7 t y^3 - (49/4) y^4
//                                          (normalized coeff(x^2 y) = 4)
double parabolic_coeff(int i, int j, double t) {
  if (i == 2 && j == 0) return 1.0;
  if (i == 0 && j == 2) return -t;
  if (i == 0 && j == 3) return -3.0;
  return 0.0;
}

double flecnodal_coeff(int i, int j, double t) {
  if (i == 2 && j == 0) return t;
  if (i == 2 && j == 1) return 4.0;
  if (i == 0 && j == 2) return -t * t;
  if (i == 0 && j == 3) return -7.0 * t;
  if (i == 0 && j == 4) return -49.0 / 4.0;
  return 0.0;
}

void check_curve(const Jet<double>& poly, double (*ref)(int, int, double), double t,
                 double tol) {
  for (int i = 0; i <= poly.order(); ++i)
    for (int j = 0; i + j <= poly.order(); ++j) {
      INFO("coeff x^", i, " y^", j);
      CHECK(std::fabs(poly.coeff(i, j) - ref(i, j, t)) <= tol);
    }
}

}  // namespace

TEST_CASE("characteristic curves of the typical family at t = 0 are exact") {
  auto cf = CrosscapFamily::typical();
  auto [par, fle] = characteristic_curves(cf, 0.0);
  CHECK(par.label == CurveLabel::Parabolic);
  CHECK(fle.label == CurveLabel::Flecnodal);
  // Exactly x^2 - 3 y^3: the elimination is integer arithmetic here.
  check_curve(par.poly, parabolic_coeff, 0.0, 0.0);
  // Exactly 4 x^2 y - (49/4) y^4 = y * (4 x^2 - (49/4) y^3).
  check_curve(fle.poly, flecnodal_coeff, 0.0, 0.0);
}

TEST_CASE("characteristic curves match the closed forms for t != 0") {
  auto cf = CrosscapFamily::typical();
  for (double t : {0.1, -0.1, 0.35, -0.2}) {
    CAPTURE(t);
    auto [par, fle] = characteristic_curves(cf, t);
    check_curve(par.poly, parabolic_coeff, t, 1e-15);
    check_curve(fle.poly, flecnodal_coeff, t, 1e-15);
  }
}

TEST_CASE("characteristic curves reject families that break the elimination") {
  auto cf = CrosscapFamily::typical();
  cf.g1.set(3, 0, 0.5);  // g != 0: the view direction cannot be removed exactly
  CHECK_THROWS_AS(characteristic_curves(cf, 0.1), std::runtime_error);
}

TEST_CASE("branch contact orders between the parabolic and flecnodal curves") {
  auto cf = CrosscapFamily::typical();

  SUBCASE("t = 0.1: two branch pairs, both with third-order contact") {
    auto [par, fle] = characteristic_curves(cf, 0.1);
    auto contacts = contact_order(par, fle);
    REQUIRE(contacts.size() == 2);
    const double st = std::sqrt(0.1);
    for (const auto& bc : contacts) {
      CHECK(bc.axis == 0);
      CHECK(!bc.via_resultant);
      CHECK(!bc.at_least);
      CHECK(bc.order == 3);
      CHECK(std::fabs(std::fabs(bc.tangent_a) - st) < 1e-9);
      CHECK(std::fabs(bc.tangent_a - bc.tangent_b) < 1e-9);
    }
    CHECK(contacts[0].tangent_a == doctest::Approx(-st));
    CHECK(contacts[1].tangent_a == doctest::Approx(st));
  }

  SUBCASE("t = 0: branches are not graphs, resultant fallback reports a bound") {
    auto [par, fle] = characteristic_curves(cf, 0.0);
    auto contacts = contact_order(par, fle);
    REQUIRE(contacts.size() == 1);
    CHECK(contacts[0].via_resultant);
    CHECK(contacts[0].at_least);
    // Total intersection multiplicity is 8, beyond the working jet order, so
    // only the order bound is certified.
    CHECK(contacts[0].order == std::min(par.poly.order(), fle.poly.order()));
  }

  SUBCASE("transverse tangency of simple graphs") {
    Jet<double> a(9), b(9);
    a.set(0, 1, 1.0);  // y = 0
    b.set(0, 1, 1.0);
    b.set(2, 0, -1.0);  // y = x^2
    auto contacts =
        contact_order({a, CurveLabel::Other}, {b, CurveLabel::Other});
    REQUIRE(contacts.size() == 1);
    CHECK(contacts[0].axis == 1);
    CHECK(contacts[0].order == 2);
    CHECK(!contacts[0].at_least);
  }

  SUBCASE("identical curves saturate the working order") {
    auto [par, fle] = characteristic_curves(cf, 0.1);
    auto contacts = contact_order(par, par);
    REQUIRE(contacts.size() == 2);
    for (const auto& bc : contacts) {
      CHECK(bc.at_least);
      CHECK(bc.order == par.poly.order());
    }
  }

  SUBCASE("degenerate inputs are rejected") {
    Jet<double> z(6), c(6);
    c.set(0, 0, 1.0);
    Jet<double> ok(6);
    ok.set(0, 1, 1.0);
    CHECK_THROWS_AS(contact_order({z, CurveLabel::Other}, {ok, CurveLabel::Other}),
                    std::invalid_argument);
    CHECK_THROWS_AS(contact_order({ok, CurveLabel::Other}, {c, CurveLabel::Other}),
                    std::invalid_argument);
  }
}

TEST_CASE("projection two-jet regime flips with the sign of t") {
  auto cf = CrosscapFamily::typical();
  auto plus = classify_corank2_2jet(projection_germ(cf, 0.0, 0.0, 0.25));
  auto minus = classify_corank2_2jet(projection_germ(cf, 0.0, 0.0, -0.25));
  CHECK(plus.tag == ClassTag::Sharksfin);
  CHECK(minus.tag == ClassTag::DeltoidTwoJet);
}

TEST_CASE("crosscap family validation") {
  CHECK_NOTHROW(validate_crosscap_family(CrosscapFamily::typical()));

  auto bad2jet = CrosscapFamily::typical();
  bad2jet.phi0.set(1, 1, 0.3);
  CHECK_THROWS_AS(validate_crosscap_family(bad2jet), std::invalid_argument);

  auto bad_g0 = CrosscapFamily::typical();
  bad_g0.g0.set(2, 1, 1.0);  // depends on y
  CHECK_THROWS_AS(validate_crosscap_family(bad_g0), std::invalid_argument);

  CHECK_THROWS_AS(CrosscapFamily::typical(2), std::invalid_argument);

  CrosscapFamily low;
  low.g0 = low.g1 = low.phi0 = low.phi1 = Jet<double>(2);
  CHECK_THROWS_AS(validate_crosscap_family(low), std::invalid_argument);
}

TEST_CASE("trivial caustic frame reproduces the reference unfolding counts") {
  const Window w{-0.6, 0.6, -0.6, 0.6, 256};
  ContourOptions copts;
  copts.parallel = false;
  for (auto [t1, t2] : {std::pair{-0.030625, -0.35}, std::pair{0.05145, -0.35},
                        std::pair{0.02, 0.3}}) {
    CAPTURE(t1);
    CAPTURE(t2);
    auto sec = lagrange_caustic_section(CausticFrame::trivial(), t1, t2, w, copts);
    CHECK(sec.t1 == t1);
    CHECK(sec.t2 == t2);
    auto germ = unfolding_germ<double>(UnfoldingId::I23, {0.0, t1, t2});
    auto ref = apparent_contour(germ, w, copts);
    CHECK(sec.diagram.counts == ref.counts);
  }
}

TEST_CASE("non-transverse caustic slices are rejected") {
  CausticFrame f;
  f.a2 = 2.0;  // 1 - a2 y vanishes at y = 0.5, inside the window
  CHECK_THROWS_AS(
      lagrange_caustic_section(f, 0.0, -0.3, Window{-0.6, 0.6, -0.6, 0.6, 64}),
      std::domain_error);
  CHECK_THROWS_AS(lagrange_caustic_section(CausticFrame::trivial(), 0.0, -0.3,
                                           Window{-0.6, 0.6, -0.6, 0.6, 8}),
                  std::invalid_argument);
}

TEST_CASE("caustic sweep locates the section walls at t2 = -0.4") {
  // At t2 = c < 0 and a = 0 the reference model has walls across the sweep
  // range b in [0.17 c^2, 0.42 c^2]:
  //   swallowtail crease b = 16 c^2 / 45, beaks/lips crease b = c^2 / 3,
  //   cusp+fold chart edge b = c^2 / 4.
  const double c = -0.4;
  const Window w{-0.6, 0.6, -0.6, 0.6, 256};
  SweepOptions so;
  so.frames = 33;
  so.locate_tol = 1e-5;
  const std::vector<std::array<double, 2>> path{{0.42 * c * c, c}, {0.17 * c * c, c}};
  auto res = perestroika_sweep(CausticFrame::trivial(), path, w, so);

  REQUIRE(res.s.size() == 33);
  REQUIRE(res.counts.size() == 33);
  REQUIRE(res.diagrams.size() == 33);
  CHECK(res.counts.front() == FeatureCounts{1, 1, 0});
  CHECK(res.counts.back() == FeatureCounts{2, 3, 0});
  REQUIRE(!res.crossings.empty());

  // Merge detector sub-steps: crossings closer than 2e-3 in t1 are one wall
  // passage. Expect exactly the three walls, with the right net transitions
  // and the nearest located parameter within 1e-4 of each closed form.
  struct Wall {
    double b;
    FeatureCounts before, after;
    StratumId stratum;
  };
  const std::vector<Wall> expected{
      {16 * c * c / 45, {1, 1, 0}, {1, 5, 2}, StratumId::Swallowtail},
      {c * c / 3, {1, 5, 2}, {2, 3, 2}, StratumId::BeaksLips},
      {c * c / 4, {2, 3, 2}, {2, 3, 0}, StratumId::CuspFold},
  };
  std::vector<std::vector<SweepCrossing>> groups;
  for (const auto& cr : res.crossings) {
    if (groups.empty() || std::fabs(cr.t[0] - groups.back().back().t[0]) > 2e-3)
      groups.emplace_back();
    groups.back().push_back(cr);
  }
  REQUIRE(groups.size() == expected.size());
  for (size_t k = 0; k < groups.size(); ++k) {
    CAPTURE(k);
    const Wall& want = expected[k];  // path runs from high b to low b
    CHECK(groups[k].front().before == want.before);
    CHECK(groups[k].back().after == want.after);
    double nearest = 1.0;
    for (const auto& cr : groups[k]) {
      nearest = std::min(nearest, std::fabs(cr.t[0] - want.b));
      REQUIRE(cr.stratum.has_value());
      CHECK(*cr.stratum == want.stratum);
      CHECK(cr.model_distance < 1e-3);
    }
    CHECK(nearest < 1e-4);
  }
}

TEST_CASE("caustic sweep: parallel and serial runs are identical") {
  const double c = -0.4;
  const Window w{-0.6, 0.6, -0.6, 0.6, 128};
  SweepOptions so;
  so.frames = 9;
  so.locate_tol = 1e-4;
  // One wall (beaks/lips crease) inside the range.
  const std::vector<std::array<double, 2>> path{{0.35 * c * c, c}, {0.30 * c * c, c}};
  auto par = perestroika_sweep(CausticFrame::trivial(), path, w, so);
  so.parallel = false;
  auto ser = perestroika_sweep(CausticFrame::trivial(), path, w, so);
  CHECK(par.s == ser.s);
  CHECK(par.counts == ser.counts);
  REQUIRE(par.crossings.size() == ser.crossings.size());
  for (size_t i = 0; i < par.crossings.size(); ++i) {
    CHECK(par.crossings[i].s == ser.crossings[i].s);
    CHECK(par.crossings[i].before == ser.crossings[i].before);
    CHECK(par.crossings[i].after == ser.crossings[i].after);
  }
}

TEST_CASE("caustic sweep: constant path yields constant counts") {
  const Window w{-0.6, 0.6, -0.6, 0.6, 128};
  SweepOptions so;
  so.frames = 5;
  const double c = -0.35;
  const std::vector<std::array<double, 2>> path{{0.40 * c * c, c}, {0.41 * c * c, c}};
  auto res = perestroika_sweep(CausticFrame::trivial(), path, w, so);
  CHECK(res.crossings.empty());
  for (const auto& fc : res.counts) CHECK(fc == res.counts.front());
}

TEST_CASE("caustic sweep asks for more frames when counts fragment") {
  // Two frames across three walls: the single gap holds six intermediate
  // regimes at this resolution, far past the split budget.
  const double c = -0.4;
  const Window w{-0.6, 0.6, -0.6, 0.6, 256};
  SweepOptions so;
  so.frames = 2;
  so.locate_tol = 1e-5;
  const std::vector<std::array<double, 2>> path{{0.42 * c * c, c}, {0.17 * c * c, c}};
  CHECK_THROWS_AS(perestroika_sweep(CausticFrame::trivial(), path, w, so),
                  std::runtime_error);
}

TEST_CASE("sweep input validation") {
  const std::vector<std::array<double, 2>> path{{0.1, -0.4}, {0.2, -0.4}};
  SweepOptions so;
  so.frames = 1;
  CHECK_THROWS_AS(perestroika_sweep(CausticFrame::trivial(), path, {}, so),
                  std::invalid_argument);
  CHECK_THROWS_AS(perestroika_sweep(CausticFrame::trivial(), {{0.1, -0.4}}, {}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      perestroika_sweep(CausticFrame::trivial(), {{0.1, -0.4}, {0.1, -0.4}}, {}, {}),
      std::invalid_argument);
}

TEST_CASE("curve label names") {
  CHECK(std::string(curve_label_name(CurveLabel::Parabolic)) == "parabolic");
  CHECK(std::string(curve_label_name(CurveLabel::Flecnodal)) == "flecnodal");
  CHECK(std::string(curve_label_name(CurveLabel::DoublePoint)) == "double_point");
  CHECK(std::string(curve_label_name(CurveLabel::Other)) == "other");
}
