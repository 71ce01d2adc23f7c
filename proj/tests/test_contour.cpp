#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "germlab/contour.hpp"
#include "germlab/strata.hpp"
#include "test_support.hpp"

using namespace germlab;
using testsupport::Lcg;

namespace {

Jet<double> jet2(std::initializer_list<std::array<int, 2>> idx,
                 std::initializer_list<double> val, int order = 6) {
  Jet<double> f(order);
  auto it = val.begin();
  for (const auto& ij : idx) f.set(ij[0], ij[1], *it++);
  return f;
}

Jet<double> lambda_jet(const MapGerm<double>& f) {
  return partial(f.f1(), 0) * partial(f.f2(), 1) - partial(f.f1(), 1) * partial(f.f2(), 0);
}

// Crossing segment through a wall chart point, stepped +/- h along the
// in-plane gradient of the wall's implicit residual at fixed c.
struct WallCrossing {
  std::vector<double> minus_side, plus_side;
};

WallCrossing cross_wall(StratumId wall, int sign, double y, double c, double h) {
  const StratumPoint sp = parametrize_stratum(UnfoldingId::I23, wall, sign, {y, c});
  const double a0 = sp.params[0], b0 = sp.params[1];
  const double fd = 1e-6;
  const double ga =
      (implicit_residual(wall, a0 + fd, b0, c) - implicit_residual(wall, a0 - fd, b0, c)) /
      (2 * fd);
  const double gb =
      (implicit_residual(wall, a0, b0 + fd, c) - implicit_residual(wall, a0, b0 - fd, c)) /
      (2 * fd);
  const double g = std::hypot(ga, gb);
  REQUIRE(g > 1e-12);
  return {{a0 - h * ga / g, b0 - h * gb / g, c}, {a0 + h * ga / g, b0 + h * gb / g, c}};
}

Window square_window(double half_width, int resolution) {
  return {-half_width, half_width, -half_width, half_width, resolution};
}

}  // namespace

TEST_CASE("grid kernels are bitwise identical") {
  Lcg rng(71);
  Jet<double> poly(7);
  for (int d = 0; d <= 7; ++d)
    for (int j = 0; j <= d; ++j) poly.set(d - j, j, rng.uniform(-2.0, 2.0));
  Window w{-0.8, 1.1, -0.4, 0.9, 64};
  const auto serial = grid_eval_serial(poly, w);
  const auto parallel = grid_eval(poly, w);
  REQUIRE(serial.size() == 65u * 65u);
  REQUIRE(parallel.size() == serial.size());
  for (size_t k = 0; k < serial.size(); ++k) REQUIRE(serial[k] == parallel[k]);
}

TEST_CASE("window validation") {
  const MapGerm<double> fold(jet2({{1, 0}}, {1.0}), jet2({{0, 2}}, {1.0}));
  Window too_coarse = square_window(0.6, 16);
  CHECK_THROWS_AS(singular_set_trace(fold, too_coarse), std::invalid_argument);
  Window empty{0.5, 0.5, -0.5, 0.5, 128};
  CHECK_THROWS_AS(singular_set_trace(fold, empty), std::invalid_argument);
}

TEST_CASE("fold map: one fold line, no cusps, grid-aligned zero row reported") {
  const MapGerm<double> fold(jet2({{1, 0}}, {1.0}), jet2({{0, 2}}, {1.0}));
  const Window w = square_window(0.6, 512);  // lambda = 2y vanishes on the node row y = 0
  const ContourDiagram d = apparent_contour(fold, w);
  CHECK(d.counts == FeatureCounts{1, 0, 0});
  CHECK(!d.degenerate_cells.empty());
  REQUIRE(d.singular_polylines.size() == 1);
  double max_y = 0, min_x = 1, max_x = -1;
  for (const Vec2& p : d.singular_polylines[0]) {
    max_y = std::max(max_y, std::fabs(p.y));
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
  }
  CHECK(max_y < 1e-12);
  CHECK(min_x < -0.59);
  CHECK(max_x > 0.59);
}

TEST_CASE("cusp normal form: a single cusp at the origin") {
  // (x, xy + y^3): lambda = x + 3y^2, eta lambda = 6y flips sign at 0
  const MapGerm<double> cusp(jet2({{1, 0}}, {1.0}), jet2({{1, 1}, {0, 3}}, {1.0, 1.0}));
  const ContourDiagram d = apparent_contour(cusp, square_window(0.6, 512));
  CHECK(d.counts == FeatureCounts{1, 1, 0});
  REQUIRE(d.cusps.size() == 1);
  CHECK(std::hypot(d.cusps[0].source.x, d.cusps[0].source.y) < 1e-8);
  CHECK(std::hypot(d.cusps[0].image.x, d.cusps[0].image.y) < 1e-8);
  CHECK(d.cusps[0].polyline == 0);
}

TEST_CASE("nodal singular set stays on the exact curve through the origin") {
  // I23 member at (0,0,1): lambda = 2x^2 - 3y^3 - 2y^2, nodal at the origin
  const auto f = unfolding_germ<double>(UnfoldingId::I23, {0.0, 0.0, 1.0});
  const Window w = square_window(0.6, 512);
  const SingularTrace tr = singular_set_trace(f, w);
  REQUIRE(!tr.polylines.empty());
  double worst = 0, nearest_origin = 1;
  for (const auto& pl : tr.polylines)
    for (const Vec2& p : pl) {
      worst = std::max(worst, std::fabs(2 * p.x * p.x - 3 * p.y * p.y * p.y - 2 * p.y * p.y));
      nearest_origin = std::min(nearest_origin, std::hypot(p.x, p.y));
    }
  CHECK(worst < 1e-8);
  CHECK(nearest_origin < w.cell());
}

TEST_CASE("perturbed deltoid loop carries exactly three cusps") {
  // corank-2 deltoid-like germ, split by a small linear perturbation
  const MapGerm<double> f(jet2({{2, 0}, {0, 2}, {3, 0}, {1, 0}}, {1.0, -1.0, 1.0, 0.1}),
                          jet2({{1, 1}, {0, 1}}, {1.0, -0.05}));
  for (int res : {256, 512}) {
    const ContourDiagram d = apparent_contour(f, square_window(0.6, res));
    CHECK(d.counts == FeatureCounts{1, 3, 0});
    REQUIRE(d.closed.size() == 1);
    CHECK(d.closed[0]);
    for (const Vec2& p : d.singular_polylines[0]) {
      const double r = std::hypot(p.x, p.y);
      CHECK(r > 0.045);
      CHECK(r < 0.06);
    }
    // every cusp sits on the singular curve: |lambda| tiny, image = f(source)
    const Jet<double> lam = lambda_jet(f);
    for (const CuspPoint& cp : d.cusps) {
      CHECK(std::fabs(evaluate(lam, cp.source.x, cp.source.y)) < 1e-8);
      CHECK(std::fabs(evaluate(f.f1(), cp.source.x, cp.source.y) - cp.image.x) < 1e-12);
      CHECK(std::fabs(evaluate(f.f2(), cp.source.x, cp.source.y) - cp.image.y) < 1e-12);
    }
  }
}

TEST_CASE("deltoid-side regime counts are resolution-stable") {
  Lcg rng(2026);
  for (int trial = 0; trial < 6; ++trial) {
    const double a = rng.uniform(-0.03, 0.03), b = rng.uniform(-0.03, 0.03);
    const FeatureCounts lo =
        contour_features(UnfoldingId::I23, {a, b, -0.5}, square_window(0.45, 256));
    const FeatureCounts hi =
        contour_features(UnfoldingId::I23, {a, b, -0.5}, square_window(0.45, 512));
    CHECK(lo == FeatureCounts{2, 3, 0});
    CHECK(lo == hi);
  }
}

TEST_CASE("mirror equivariance: counts agree at (a,b,c) and (-a,b,c)") {
  const Window w = square_window(0.6, 384);
  for (auto [a, b, c] : {std::array<double, 3>{0.2, 0.1, -0.5},
                         std::array<double, 3>{-0.375, -0.065, -0.5},
                         std::array<double, 3>{0.05, 0.3, 1.0}}) {
    const auto d1 = apparent_contour(unfolding_germ<double>(UnfoldingId::I23, {a, b, c}), w);
    const auto d2 = apparent_contour(unfolding_germ<double>(UnfoldingId::I23, {-a, b, c}), w);
    CHECK(d1.counts == d2.counts);
  }
}

TEST_CASE("contour_features refuses points on or near a stratum") {
  const StratumPoint on_wall =
      parametrize_stratum(UnfoldingId::I23, StratumId::BeaksLips, +1, {-0.3, 1.0});
  CHECK_THROWS_AS(contour_features(UnfoldingId::I23, on_wall.params), std::domain_error);
  CHECK_THROWS_AS(contour_features(UnfoldingId::I23, {1e-4, 0.0, -0.5}), std::domain_error);
  // a point comfortably off every wall goes through
  const WallCrossing wc = cross_wall(StratumId::CuspFold, +1, -0.12, -0.5, 0.02);
  CHECK_NOTHROW(contour_features(UnfoldingId::I23, wc.minus_side));
}

TEST_CASE("beaks-lips crossing changes the cusp count by two") {
  const WallCrossing wc = cross_wall(StratumId::BeaksLips, +1, -0.30, 1.0, 0.01);
  const Window w = square_window(0.6, 512);
  const FeatureCounts lo = contour_features(UnfoldingId::I23, wc.minus_side, w, 1e-3);
  const FeatureCounts hi = contour_features(UnfoldingId::I23, wc.plus_side, w, 1e-3);
  CHECK(lo == FeatureCounts{2, 3, 0});
  CHECK(hi == FeatureCounts{1, 1, 0});  // a lips loop (own component, two cusps) dies
}

TEST_CASE("swallowtail crossing couples two cusps with one double point") {
  const WallCrossing wc = cross_wall(StratumId::Swallowtail, -1, 0.28, -1.0, 0.005);
  const Window w = square_window(1.0, 512);
  const FeatureCounts lo = contour_features(UnfoldingId::I23, wc.minus_side, w, 1e-3);
  const FeatureCounts hi = contour_features(UnfoldingId::I23, wc.plus_side, w, 1e-3);
  CHECK(lo == FeatureCounts{1, 3, 1});
  CHECK(hi == FeatureCounts{1, 5, 2});  // dovetail birth: +2 cusps, +1 self-crossing
}

TEST_CASE("cusp-fold crossing moves the double-point count by two") {
  // The wall is the incidence "cusp image vertex on a transversal arc". Past
  // it, each of the two branches of the cusp crosses the arc once, so the
  // double-point count changes by two while the cusp count stays put.
  const WallCrossing wc = cross_wall(StratumId::CuspFold, +1, -0.12, -0.5, 0.02);
  const Window w = square_window(0.6, 512);
  const auto lo =
      apparent_contour(unfolding_germ<double>(UnfoldingId::I23, wc.minus_side), w);
  const auto hi = apparent_contour(unfolding_germ<double>(UnfoldingId::I23, wc.plus_side), w);
  CHECK(lo.counts == FeatureCounts{2, 3, 0});
  CHECK(hi.counts == FeatureCounts{2, 3, 2});
  // both preimages of each new double point sit on the singular set and map
  // to the same image point, well separated in the source
  const auto f = unfolding_germ<double>(UnfoldingId::I23, wc.plus_side);
  const Jet<double> lam = lambda_jet(f);
  REQUIRE(hi.double_points.size() == 2);
  // intersection sources are interpolated inside a segment, so the on-curve
  // residual is bounded by the chord sag, O(cell^2)
  const double on_curve = 5 * w.cell() * w.cell();
  for (const DoublePoint& dp : hi.double_points) {
    CHECK(std::fabs(evaluate(lam, dp.source_a.x, dp.source_a.y)) < on_curve);
    CHECK(std::fabs(evaluate(lam, dp.source_b.x, dp.source_b.y)) < on_curve);
    const double ix_a = evaluate(f.f1(), dp.source_a.x, dp.source_a.y);
    const double iy_a = evaluate(f.f2(), dp.source_a.x, dp.source_a.y);
    const double ix_b = evaluate(f.f1(), dp.source_b.x, dp.source_b.y);
    const double iy_b = evaluate(f.f2(), dp.source_b.x, dp.source_b.y);
    CHECK(std::hypot(ix_a - ix_b, iy_a - iy_b) < 5 * w.cell());
    CHECK(std::hypot(dp.source_a.x - dp.source_b.x, dp.source_a.y - dp.source_b.y) >
          10 * w.cell());
  }
}

TEST_CASE("double-point detection accepts distant sources, rejects close ones") {
  auto densify = [](Vec2 from, Vec2 to, int n) {
    Polyline pl;
    for (int k = 0; k <= n; ++k) {
      const double t = double(k) / n;
      pl.push_back({from.x + t * (to.x - from.x), from.y + t * (to.y - from.y)});
    }
    return pl;
  };
  // two image lines crossing at (0.3, 0); sources far apart
  std::vector<Polyline> source = {densify({-1, -0.4}, {1, -0.4}, 50),
                                  densify({-1, 0.4}, {1, 0.4}, 50)};
  std::vector<Polyline> image = {densify({-1, 0}, {1, 0}, 50),
                                 densify({0.3, -1}, {0.3, 1}, 50)};
  auto found = detail::find_double_points(source, image, {false, false}, 0.1, 0.02);
  REQUIRE(found.size() == 1);
  CHECK(std::fabs(found[0].image.x - 0.3) < 1e-12);
  CHECK(std::fabs(found[0].image.y) < 1e-12);
  CHECK(std::fabs(found[0].source_a.y + 0.4) < 1e-12);
  CHECK(std::fabs(found[0].source_b.y - 0.4) < 1e-12);
  // same image crossing, but the second curve's source now passes through the
  // first one's source at the matching parameter: rejected as one feature
  std::vector<Polyline> near_source = {densify({-1, -0.4}, {1, -0.4}, 50),
                                       densify({0.3, -0.36}, {0.3, -0.44}, 50)};
  CHECK(detail::find_double_points(near_source, image, {false, false}, 0.1, 0.02).empty());
}

TEST_CASE("serial and parallel pipelines build identical diagrams") {
  const MapGerm<double> f(jet2({{2, 0}, {0, 2}, {3, 0}, {1, 0}}, {1.0, -1.0, 1.0, 0.1}),
                          jet2({{1, 1}, {0, 1}}, {1.0, -0.05}));
  ContourOptions serial_opts;
  serial_opts.parallel = false;
  const Window w = square_window(0.6, 256);
  const ContourDiagram a = apparent_contour(f, w);
  const ContourDiagram b = apparent_contour(f, w, serial_opts);
  CHECK(a.counts == b.counts);
  REQUIRE(a.singular_polylines.size() == b.singular_polylines.size());
  for (size_t i = 0; i < a.singular_polylines.size(); ++i) {
    REQUIRE(a.singular_polylines[i].size() == b.singular_polylines[i].size());
    for (size_t k = 0; k < a.singular_polylines[i].size(); ++k) {
      CHECK(a.singular_polylines[i][k].x == b.singular_polylines[i][k].x);
      CHECK(a.singular_polylines[i][k].y == b.singular_polylines[i][k].y);
    }
  }
}
