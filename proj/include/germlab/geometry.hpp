#pragma once

// Two applications of the jet/strata/contour machinery to classical surface
// geometry:
//
//  * Parallel projections of a crosscap family
//        iota_t = (y, x y + g(x,y,t), x^2 + alpha(t) y^2 + phi(x,y,t))
//    viewed along lines (1, v, w): the projection germ, the parabolic and
//    flecnodal curves of the surface as implicit plane curve germs (obtained
//    by eliminating the view direction from the degenerate-singularity
//    conditions on the projection), and contact orders between their
//    branches.
//
//  * Planar caustics of the D5 potential
//        F = x^2 y + y^4/4 + (q2/3) y^3 + (q1/2) y^2 - 2 mu1 x - mu2 y,
//    reduced by a linear frame t1 = q1 - a1 mu1 - a2 mu2,
//    t2 = q2 - b1 mu1 - b2 mu2 to a plane-to-plane family
//        Xi(x, y; t1, t2) = (x y, mu2(x, y, t1, t2)),
//    whose apparent contour is the caustic: single sections and swept paths
//    in the (t1, t2) plane with wall-crossing detection.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "germlab/contour.hpp"
#include "germlab/jet.hpp"
#include "germlab/map_germ.hpp"
#include "germlab/plane.hpp"
#include "germlab/strata.hpp"

namespace germlab {

enum class CurveLabel { Parabolic, Flecnodal, DoublePoint, Other };

const char* curve_label_name(CurveLabel label);

// Implicit plane curve germ: zero set of a bivariate jet with poly(0,0) = 0.
struct PlaneCurveGerm {
  Jet<double> poly;
  CurveLabel label = CurveLabel::Other;
};

// Crosscap unfolding (y, x y + g(x,y,t), x^2 + alpha(t) y^2 + phi(x,y,t))
// with alpha(t) = alpha_slope * t (so alpha(0) = 0: the t = 0 member is a
// parabolic crosscap), g = g0 + t g1 and phi = phi0 + t phi1. Constraints,
// checked by validate_crosscap_family: the 2-jets of g0, g1, phi0, phi1 at
// the origin vanish, and g0 is independent of y.
struct CrosscapFamily {
  double alpha_slope = 1.0;
  Jet<double> g0{kDefaultJetOrder}, g1{kDefaultJetOrder};
  Jet<double> phi0{kDefaultJetOrder}, phi1{kDefaultJetOrder};

  // g = 0, phi = y^3: the representative family used throughout the tests.
  static CrosscapFamily typical(int order = kDefaultJetOrder);
};

// Throws std::invalid_argument when the structural constraints fail.
void validate_crosscap_family(const CrosscapFamily& cf);

// Plane-to-plane germ of the projection of the t-member along the line
// spanned by (1, v, w), centred at the crosscap point:
//   (x, y) |-> (x y - v y + g(x,y,t), x^2 + alpha(t) y^2 - w y + phi(x,y,t)).
MapGerm<double> projection_germ(const CrosscapFamily& cf, double v, double w, double t);

// Parabolic and flecnodal curves of the t-member, as implicit germs in the
// source (x, y). The parabolic curve is the locus where some view direction
// (v, w) makes the projection singularity degenerate beyond a fold/cusp in
// the first-order sense (lambda = lambda_x = lambda_y = 0 has a solution);
// since lambda is affine in (v, w) this is a single 3x3 determinant. The
// flecnodal curve is the locus where some direction produces a
// swallowtail-degenerate point (lambda = eta lambda = eta^2 lambda = 0),
// eliminated by resultants in (w, v). For the typical family the results are
// exactly
//   parabolic:  x^2 - y^2 (t + 3 y)
//   flecnodal:  x^2 (t + 4 y) - y^2 (t + 7/2 y)^2
// normalized so coeff(x^2) = 1, respectively coeff(x^2 y) = 4. Throws
// std::runtime_error when the elimination degenerates (no curve germ of the
// expected shape at this jet order); families with g != 0 degenerate the
// flecnodal elimination — the direction variable w can no longer be removed
// exactly — and are rejected the same way.
std::pair<PlaneCurveGerm, PlaneCurveGerm> characteristic_curves(const CrosscapFamily& cf,
                                                                double t);

enum class PairingRule { ByTangent };

// Contact order of one paired branch: the two branches are graphs
// x = s(y) (or both y = s(x), axis = 1) with the stated tangents, and their
// series differ first at degree `order`. at_least means the difference
// vanished through the whole working order (identical curves report the jet
// order with at_least = true). via_resultant marks the fallback path: the
// branches were not extractable as graphs and `order` is the total
// intersection multiplicity from the valuation of the resultant, with no
// per-branch tangent data (tangents are NaN).
struct BranchContact {
  double tangent_a = 0.0, tangent_b = 0.0;
  int axis = 0;  // 0: branches x = s(y); 1: branches y = s(x)
  int order = 0;
  bool at_least = false;
  bool via_resultant = false;
};

// Pairs the power-series branches of c1 with those of c2 (by nearest tangent
// under PairingRule::ByTangent) and reports the contact order of each pair.
// Falls back to the resultant valuation when branch extraction fails in both
// graph orientations. Throws std::invalid_argument when a curve is zero or
// has nonvanishing constant term.
std::vector<BranchContact> contact_order(const PlaneCurveGerm& c1, const PlaneCurveGerm& c2,
                                         PairingRule rule = PairingRule::ByTangent);

// Linear reduction frame for the D5 caustic:
//   t1 = q1 - a1 mu1 - a2 mu2,   t2 = q2 - b1 mu1 - b2 mu2.
// Any such frame is a submersion in (q1, q2), so the slice always exists;
// the coefficients deform the caustic family away from the reference
// unfolding. Solving the critical-point equations for mu2 at fixed (t1, t2)
// gives
//   mu2 = [x^2 + y^3 + t1 y + t2 y^2 + x y^2 (a1 + b1 y)] / (1 - a2 y - b2 y^2)
// and the caustic family Xi = (mu1, mu2) = (x y, mu2). With the trivial frame
// Xi equals the I23 unfolding member at (a, b, c) = (0, t1, t2) with its two
// components swapped, which leaves every contour feature count unchanged.
struct CausticFrame {
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;

  static CausticFrame trivial() { return {}; }
  // Small non-trivial deformation exercised by the tests.
  static CausticFrame perturbed() { return {0.08, -0.05, 0.04, 0.06}; }
};

struct CausticSection {
  double t1 = 0.0, t2 = 0.0;
  MapGerm<double> germ;     // the reduced family member Xi(.,.; t1, t2)
  ContourDiagram diagram;   // its apparent contour = the planar caustic
};

// Caustic of the frame's family at (t1, t2) on the window. Throws
// std::domain_error when the reduction denominator 1 - a2 y - b2 y^2 can
// vanish over the window's y-range (the slice stops being transverse there).
CausticSection lagrange_caustic_section(const CausticFrame& frame, double t1, double t2,
                                        const Window& window = {},
                                        const ContourOptions& opts = {});

// One wall passage detected between consecutive sweep frames: counts jumped
// from `before` to `after`; the passage was bisected down to locate_tol in
// the path parameter. Membership is confirmed against the reference
// unfolding model of the trivial frame, i.e. the nearest I23 stratum to
// (a, b, c) = (0, t1, t2) within membership_delta; perturbed frames report
// the nearest wall of that model (their true walls are deformed).
struct SweepCrossing {
  double s = 0.0;                  // path parameter in [0, 1]
  std::array<double, 2> t{};       // (t1, t2) at the crossing
  FeatureCounts before, after;
  std::optional<StratumId> stratum;
  double model_distance = 0.0;     // first-order distance to that stratum
};

struct SweepOptions {
  int frames = 33;                 // >= 2 sample frames along the path
  double locate_tol = 1e-6;        // bisection tolerance in path parameter
  double membership_delta = 2e-3;  // stratum confirmation radius
  bool parallel = true;            // OpenMP over frames (inner contours serial)
  ContourOptions contour{};        // options for each frame's contour
};

struct SweepResult {
  std::vector<double> s;                 // frame parameters in [0, 1]
  std::vector<std::array<double, 2>> t;  // frame (t1, t2)
  std::vector<FeatureCounts> counts;
  std::vector<ContourDiagram> diagrams;
  std::vector<SweepCrossing> crossings;
};

// Sweeps the caustic along a polyline in the (t1, t2) plane: per-frame
// caustic diagrams plus the crossing log. Counts are locally constant away
// from the bifurcation set, so every jump between consecutive frames is
// bisected; a bisection probe that disagrees with both bracket states splits
// the gap (another wall inside it, or a detector sub-step within a grid cell
// of a wall) and each part is bisected separately, so one gap can yield
// several crossings at neighbouring parameters. When a gap fragments into
// more than a handful of regimes a std::runtime_error asks for more frames.
// The path must avoid the axis t1 = 0 of the reference model (a
// codimension-two line where contour counts are not locally constant).
// With opts.parallel the frames are distributed across OpenMP threads and
// each inner contour runs its serial kernels; opts.parallel = false is the
// serial reference, byte-identical in all outputs.
SweepResult perestroika_sweep(const CausticFrame& frame,
                              const std::vector<std::array<double, 2>>& path,
                              const Window& window = {}, const SweepOptions& opts = {});

}  // namespace germlab
