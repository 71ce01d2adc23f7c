#pragma once

// Bifurcation-diagram strata of the three unfoldings: closed-form
// parametrizations, implicit defining polynomials, plane sections, and the
// locate-and-classify round trip from a parameter point back to the singular
// source points that realize the stratum.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "germlab/plane.hpp"
#include "germlab/recognition.hpp"
#include "germlab/unfolding.hpp"

namespace germlab {

enum class StratumId {
  BeaksLips,
  Goose,
  Swallowtail,
  Butterfly,
  CuspFold,
  SharksfinAxis,
  DeltoidAxis,
  Tacnode,
  Gulls,
  BeaksLines,
};

const char* stratum_name(StratumId s);
std::optional<StratumId> stratum_from_name(const std::string& name);

struct StratumPoint {
  UnfoldingId u;
  StratumId s;
  int sign = +1;  // the +/- branch choice of the parametrization
  std::vector<double> internal;
  std::vector<double> params;  // (a, b) or (a, b, c)
};

struct StratumOptions {
  // Evaluate the cusp+fold a-component without the 1/2 factor. Only the
  // halved form satisfies the defining octic; the unhalved variant is kept
  // selectable for documentation and tests.
  bool verbatim_cusp_fold = false;
};

// Closed-form parametrization. Throws std::domain_error when the internal
// coordinates violate the chart domain (e.g. c+3y < 0 for I23 BeaksLips,
// y >= 0 for CuspFold, c <= 0 for Goose/Butterfly) and std::invalid_argument
// for a stratum that does not belong to the unfolding.
//
// Internal coordinates by stratum:
//   I23 BeaksLips/Swallowtail/CuspFold: (y, c);  Goose/Butterfly: (c);
//   I23 SharksfinAxis/DeltoidAxis: (c);
//   Sharksfin BeaksLines: (t) with sign +1 -> line a=0, sign -1 -> line b=0;
//   Sharksfin Swallowtail: (b), degree-9 series chart (error O(b^14));
//   OddSharksfin BeaksLines: (t, c);  Tacnode: (b, c) with c < 0;
//   OddSharksfin Gulls: (b), the line a = c = 0.
StratumPoint parametrize_stratum(UnfoldingId u, StratumId s, int sign,
                                 const std::vector<double>& internal,
                                 const StratumOptions& opts = {});

// Exact counterparts of the I23 charts. The a-component squares to a rational
// function of the chart, so samples carry a^2 together with the branch sign.
struct ExactParams {
  Rational a_sq;
  int a_sign = +1;
  Rational b, c;
};
ExactParams exact_beaks_lips(const Rational& y, const Rational& c, int sign);
ExactParams exact_goose(const Rational& c, int sign);
ExactParams exact_swallowtail(const Rational& y, const Rational& c, int sign);
ExactParams exact_butterfly(const Rational& c, int sign);
ExactParams exact_cusp_fold(const Rational& y, const Rational& c, int sign,
                            bool verbatim_form = false);

// Defining polynomials of the codimension-1 I23 strata (even in a, evaluated
// through a^2). Only BeaksLips, Swallowtail and CuspFold have one.
Rational implicit_residual_sq(StratumId s, const Rational& a_sq, const Rational& b,
                              const Rational& c);
double implicit_residual(StratumId s, double a, double b, double c);

// Two-point witness of the cusp+fold bi-germ in the rational chart y = -r^2
// (r > 0): every coordinate is rational.
struct ExactCuspFoldWitness {
  Rational x, y, X, Y;  // cusp point (x,y), fold point (X,Y)
  Rational a, b, c;
};
ExactCuspFoldWitness exact_cusp_fold_witness(const Rational& r, const Rational& c, int sign);

// lambda, eta lambda, eta^2 lambda, eta^3 lambda of the I23 member as global
// polynomials in (x, y), computed with the field eta = -x d/dx + y d/dy.
template <class S>
std::array<Jet<S>, 4> i23_lambda_tower(const std::vector<S>& abc, int order = 6);

struct MultiGermWitness {
  Vec2 p, q;  // e.g. cusp source point and fold source point
  std::vector<double> params;
  // lambda(p), eta lambda(p) (0 when the witness has no cusp condition),
  // lambda(q), f2(p)-f2(q), f1(p)-f1(q)
  std::array<double, 5> residuals{};
};

struct LocatedPoint {
  Vec2 xy;
  SingularityClass cls;
  double newton_residual = 0.0;
};

struct LocateResult {
  std::vector<LocatedPoint> points;
  std::optional<MultiGermWitness> witness;  // CuspFold / Tacnode
};

// Finds the singular source point(s) realizing the stratum at p.params and
// classifies the recentred germ there. Seeds come from the closed-form charts
// unless one is supplied. Throws std::runtime_error on Newton failure and
// std::invalid_argument when a seed is required but missing.
LocateResult locate_and_classify(const StratumPoint& p,
                                 std::optional<Vec2> seed = std::nullopt,
                                 double newton_tol = 1e-12);

struct SectionCurve {
  StratumId s;
  int sign;
  std::vector<Vec2> ab;
  std::vector<double> internal;  // chart coordinate per vertex
};

struct SectionMark {
  StratumId s;
  int sign;
  Vec2 ab;
};

struct SectionSlice {
  UnfoldingId u;
  double c = 0.0;
  std::vector<SectionCurve> curves;
  std::vector<SectionMark> marks;
};

// Constant-c slice of the bifurcation diagram in the (a, b) plane, from the
// closed-form charts only (the traced odd-sharksfin swallowtail branch is
// appended by callers that want it). For the Sharksfin unfolding the slice is
// the whole two-parameter diagram. resolution = samples per branch, >= 16.
SectionSlice section_curves(UnfoldingId u, double c, const Window& window, int resolution = 400);

// First-order proximity of a parameter point to the closed-form strata of u:
// returns the nearest stratum whose estimated distance falls below delta, or
// nullopt. Implicit walls use |R| / |grad R| (conservative: the polynomials
// can vanish on sheets beyond the real charts), lines and planes use exact
// distances. The numerically traced odd-sharksfin swallowtail sheet is not
// part of the check.
std::optional<StratumId> stratum_within(UnfoldingId u, const std::vector<double>& params,
                                        double delta);

// Swallowtail branch samples obtained by numeric continuation of
// lambda = eta lambda = eta^2 lambda = 0 in (x, y, a) at fixed remaining
// parameters. abscissa holds the continuation parameter (b, or c for the
// odd-sharksfin tangency scan below), a the branch value, source the singular
// point per sample.
struct SwallowtailBranch {
  std::vector<double> abscissa;
  std::vector<double> a;
  std::vector<Vec2> source;
};

// Sharksfin branch a(b) over [b_lo, b_hi], walked from b_hi down with the
// series chart as the initial seed.
SwallowtailBranch trace_swallowtail_branch(UnfoldingId u, double c, double b_lo, double b_hi,
                                           int n_samples);

// Odd-sharksfin branch a(c) at fixed b, approaching the gulls point c -> 0;
// seeded from the collapsing-sheet asymptotics at the end nearest c = 0 and
// walked outward with warm starts.
SwallowtailBranch trace_oss_swallowtail_in_c(double b, double c_lo, double c_hi, int n_samples);

// Least-squares fit of the traced sharksfin branch a(b) on the monomial basis
// b^0..b^degree plus guard exponents absorbing the next series orders, solved
// exactly in rational arithmetic on the normal equations.
struct SwallowtailFit {
  std::vector<double> coeff;        // coeff[k] multiplies b^k, k = 0..degree
  std::vector<int> guard_exponents;
  std::vector<double> guard_coeff;
  double max_residual = 0.0;
  SwallowtailBranch samples;
};
SwallowtailFit series_fit_swallowtail(UnfoldingId u, double b_lo = 0.02, double b_hi = 0.25,
                                      int n_samples = 200, int degree = 9);

// Leading contact order of a traced branch with the line {a = 0}: log-log
// regression of |a| against the abscissa over the sample window.
double branch_contact_exponent(const SwallowtailBranch& branch);

}  // namespace germlab
