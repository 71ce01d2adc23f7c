#include "germlab/selfcheck.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "germlab/contour.hpp"
#include "germlab/geometry.hpp"
#include "germlab/recognition.hpp"
#include "germlab/strata.hpp"
#include "germlab/unfolding.hpp"

namespace germlab {

namespace {

// Deterministic sampling stream; each check owns an independent one.
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state >> 1;
  }
  int range(int lo, int hi) { return lo + static_cast<int>(next() % std::uint64_t(hi - lo + 1)); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(next() % (1ull << 53)) /
                    static_cast<double>(1ull << 53);
  }
  Rational rational(int max_num = 9, int max_den = 9) {
    return Rational(range(-max_num, max_num)) / Rational(range(1, max_den));
  }
  Rational nonzero_rational(int max_num = 9, int max_den = 9) {
    Rational r;
    do {
      r = rational(max_num, max_den);
    } while (r == 0);
    return r;
  }
  int sign() { return range(0, 1) ? 1 : -1; }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// ---- exact stratum identities ----------------------------------------------

bool check_stratum_identities(Lcg& rng, std::string& notes) {
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Rational y = rng.nonzero_rational(5, 5);
    const Rational t = rng.rational(5, 5);
    const Rational c = t * t - 3 * y;  // keeps a = +-4y sqrt(c+3y) rational
    const auto ep = exact_beaks_lips(y, c, rng.sign());
    if (implicit_residual_sq(StratumId::BeaksLips, ep.a_sq, ep.b, ep.c) != 0) ++bad;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const Rational y = rng.nonzero_rational(5, 5);
    Rational u = rng.rational(5, 5);
    if (u <= 0) u = 1 - u;
    const Rational c = u * u - 4 * y;  // (c+4y)^(-1/2) = 1/u stays rational
    const auto ep = exact_swallowtail(y, c, rng.sign());
    if (implicit_residual_sq(StratumId::Swallowtail, ep.a_sq, ep.b, ep.c) != 0) ++bad;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    Rational r = rng.rational(5, 5);
    if (r <= 0) r = 1 - r;
    const Rational c = rng.rational(5, 5);
    const auto ep = exact_cusp_fold(-r * r, c, rng.sign());  // y = -r^2
    if (implicit_residual_sq(StratumId::CuspFold, ep.a_sq, ep.b, ep.c) != 0) ++bad;
  }
  // the cusp-fold a-component needs its factor 1/2: without it the chart
  // leaves the defining octic
  const auto raw = exact_cusp_fold(Rational(-1), Rational(0), +1, /*verbatim_form=*/true);
  const Rational off = implicit_residual_sq(StratumId::CuspFold, raw.a_sq, raw.b, raw.c);
  std::ostringstream os;
  os << "3000 exact chart samples, " << bad << " nonzero residuals; "
     << "unhalved cusp-fold a-component at (c,y)=(0,-1) misses the octic by "
     << rational_string(off);
  notes = os.str();
  return bad == 0 && off != 0;
}

// ---- goose / butterfly edge coincidences ------------------------------------

bool check_edge_coincidences(Lcg& rng, std::string& notes) {
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rational c = rng.rational(9, 9);
    if (c <= 0) c = 1 - c;
    for (int s : {+1, -1}) {
      const auto g = exact_goose(c, s);
      const auto bl = exact_beaks_lips(Rational(-2, 9) * c, c, -s);
      if (!(g.a_sq == bl.a_sq && g.a_sign == bl.a_sign && g.b == bl.b && g.c == bl.c)) ++bad;
      if (implicit_residual_sq(StratumId::BeaksLips, g.a_sq, g.b, g.c) != 0) ++bad;

      const auto bf = exact_butterfly(c, s);
      const auto st = exact_swallowtail(Rational(-1, 5) * c, c, -s);
      if (!(bf.a_sq == st.a_sq && bf.a_sign == st.a_sign && bf.b == st.b && bf.c == st.c)) ++bad;
      if (implicit_residual_sq(StratumId::Swallowtail, bf.a_sq, bf.b, bf.c) != 0) ++bad;
    }
  }
  std::ostringstream os;
  os << "100 rational c > 0, both signs: goose == beaks-lips(y=-2c/9) and "
     << "butterfly == swallowtail(y=-c/5) exactly, " << bad << " violations";
  notes = os.str();
  return bad == 0;
}

// ---- corank-1 normal forms under conjugation --------------------------------

constexpr int kFormOrder = 7;

JetR form_jet(std::initializer_list<std::array<int, 2>> idx, std::initializer_list<int> val) {
  JetR f(kFormOrder);
  auto it = val.begin();
  for (const auto& ij : idx) f.set(ij[0], ij[1], Rational(*it++));
  return f;
}

MapGermR corank1_normal_form(ClassTag tag) {
  const JetR x = JetR::variable(0, kFormOrder);
  switch (tag) {
    case ClassTag::Fold:
      return {x, form_jet({{0, 2}}, {1})};
    case ClassTag::Cusp:
      return {x, form_jet({{1, 1}, {0, 3}}, {1, 1})};
    case ClassTag::Swallowtail:
      return {x, form_jet({{1, 1}, {0, 4}}, {1, 1})};
    case ClassTag::Lips:
      return {x, form_jet({{0, 3}, {2, 1}}, {1, 1})};
    case ClassTag::Beaks:
      return {x, form_jet({{0, 3}, {2, 1}}, {1, -1})};
    case ClassTag::Butterfly:
      return {x, form_jet({{1, 1}, {0, 5}, {0, 7}}, {1, 1, 1})};
    case ClassTag::Gulls:
      return {x, form_jet({{1, 2}, {0, 4}, {0, 5}}, {1, 1, 1})};
    case ClassTag::Goose:
      return {x, form_jet({{0, 3}, {3, 1}}, {1, 1})};
    default:
      throw std::logic_error("no corank-1 normal form for this tag");
  }
}

// Conjugation by random polynomial diffeomorphisms on source and target:
// invertible rational linear part plus random quadratic and cubic terms.
MapGermR conjugate_germ(const MapGermR& f, Lcg& rng) {
  auto diffeo = [&](JetR& d1, JetR& d2) {
    Rational a11, a12, a21, a22;
    do {
      a11 = rng.rational(3, 3);
      a12 = rng.rational(3, 3);
      a21 = rng.rational(3, 3);
      a22 = rng.rational(3, 3);
    } while (a11 * a22 - a12 * a21 == 0);
    d1 = JetR(kFormOrder);
    d2 = JetR(kFormOrder);
    d1.set(1, 0, a11);
    d1.set(0, 1, a12);
    d2.set(1, 0, a21);
    d2.set(0, 1, a22);
    for (int d = 2; d <= 3; ++d)
      for (int j = 0; j <= d; ++j) {
        d1.set(d - j, j, rng.rational(2, 3));
        d2.set(d - j, j, rng.rational(2, 3));
      }
  };
  JetR p1, p2, q1, q2;
  diffeo(p1, p2);
  diffeo(q1, q2);
  const JetR h1 = compose(f.f1(), p1, p2);
  const JetR h2 = compose(f.f2(), p1, p2);
  return MapGermR(compose(q1, h1, h2), compose(q2, h1, h2));
}

bool check_normal_forms(Lcg& rng, std::string& notes) {
  const ClassTag tags[] = {ClassTag::Fold,  ClassTag::Cusp,      ClassTag::Swallowtail,
                           ClassTag::Lips,  ClassTag::Beaks,     ClassTag::Butterfly,
                           ClassTag::Gulls, ClassTag::Goose};
  int wrong_base = 0, wrong = 0, unresolved = 0;
  for (ClassTag expected : tags) {
    const MapGermR f = corank1_normal_form(expected);
    if (classify(f).cls.tag != expected) ++wrong_base;
    for (int trial = 0; trial < 100; ++trial) {
      const ClassTag got = classify(conjugate_germ(f, rng)).cls.tag;
      if (got == ClassTag::Unresolved)
        ++unresolved;  // jet order exhausted, never misclassified
      else if (got != expected)
        ++wrong;
    }
  }
  std::ostringstream os;
  os << "8 normal forms, " << wrong_base << " base misclassifications; 800 random "
     << "conjugations: " << wrong << " misclassified, " << unresolved << " unresolved (skipped)";
  notes = os.str();
  return wrong_base == 0 && wrong == 0;
}

// ---- sharksfin swallowtail series -------------------------------------------

bool check_sharksfin_series(Lcg&, std::string& notes) {
  const auto fit = series_fit_swallowtail(UnfoldingId::Sharksfin);
  double spurious = 0.0;
  for (int k : {0, 1, 2, 3, 5, 6, 7, 8}) spurious = std::max(spurious, std::fabs(fit.coeff[k]));
  const double e4 = std::fabs(fit.coeff[4] - 1.0 / 16.0) / (1.0 / 16.0);
  const double e9 = std::fabs(fit.coeff[9] - 3.0 / 32.0) / (3.0 / 32.0);
  std::ostringstream os;
  os << "b^4 coefficient " << fmt(fit.coeff[4]) << " (rel err " << fmt(e4) << " vs 1/16), b^9 "
     << fmt(fit.coeff[9]) << " (rel err " << fmt(e9) << " vs 3/32), largest b^0..b^3,b^5..b^8 "
     << fmt(spurious) << ", fit residual " << fmt(fit.max_residual);
  notes = os.str();
  return fit.coeff.size() == 10 && e4 <= 1e-3 && e9 <= 5e-2 && spurious < 1e-4;
}

// ---- stratum round-trip through locate_and_classify -------------------------

bool check_stratum_round_trip(Lcg& rng, std::string& notes) {
  int samples = 0, mismatches = 0;
  double worst_witness = 0.0;

  // beaks-lips branch: verdict splits at the goose ordinate y = -2c/9
  for (int trial = 0; trial < 100; ++trial) {
    const double c = rng.uniform(0.3, 1.5);
    double y;
    do {
      y = rng.uniform(-c / 3 + 0.02, 0.5);
    } while (std::fabs(y + 2 * c / 9) < 0.02 || std::fabs(y) < 0.02);
    const auto p = parametrize_stratum(UnfoldingId::I23, StratumId::BeaksLips, rng.sign(), {y, c});
    const auto r = locate_and_classify(p);
    const ClassTag want = y < -2 * c / 9 ? ClassTag::Lips : ClassTag::Beaks;
    ++samples;
    if (r.points.size() != 1 || r.points[0].cls.tag != want) ++mismatches;
  }

  // goose and butterfly points (c > 0)
  for (int trial = 0; trial < 100; ++trial) {
    const double c = rng.uniform(0.1, 1.5);
    const int s = rng.sign();
    const auto rg =
        locate_and_classify(parametrize_stratum(UnfoldingId::I23, StratumId::Goose, s, {c}));
    ++samples;
    if (rg.points.size() != 1 || rg.points[0].cls.tag != ClassTag::Goose ||
        std::fabs(rg.points[0].xy.y + 2 * c / 9) > 1e-8)
      ++mismatches;
    const auto rb =
        locate_and_classify(parametrize_stratum(UnfoldingId::I23, StratumId::Butterfly, s, {c}));
    ++samples;
    if (rb.points.size() != 1 || rb.points[0].cls.tag != ClassTag::Butterfly ||
        std::fabs(rb.points[0].xy.y + c / 5) > 1e-8)
      ++mismatches;
  }

  // swallowtail branch
  for (int trial = 0; trial < 100; ++trial) {
    const double c = rng.uniform(0.3, 1.5);
    double y;
    do {
      y = rng.uniform(-c / 4 + 0.02, 0.5);
    } while (std::fabs(y + c / 5) < 0.02 || std::fabs(y) < 0.02);
    const auto p =
        parametrize_stratum(UnfoldingId::I23, StratumId::Swallowtail, rng.sign(), {y, c});
    const auto r = locate_and_classify(p);
    ++samples;
    if (r.points.size() != 1 || r.points[0].cls.tag != ClassTag::Swallowtail) ++mismatches;
  }

  // cusp-fold bi-germ: cusp + fold sharing an image point, witness to 1e-10
  for (int trial = 0; trial < 100; ++trial) {
    const double c = rng.uniform(-1.0, 1.0);
    double y;
    do {
      y = rng.uniform(-1.2, -0.05);
    } while (std::fabs(3 * c + 5 * y) < 0.2);  // stay away from the a = 0 pinch
    const auto p = parametrize_stratum(UnfoldingId::I23, StratumId::CuspFold, rng.sign(), {y, c});
    const auto r = locate_and_classify(p);
    ++samples;
    bool ok = r.points.size() == 2 && r.points[0].cls.tag == ClassTag::Cusp &&
              r.points[1].cls.tag == ClassTag::Fold && r.witness.has_value();
    if (ok) {
      for (double res : r.witness->residuals) {
        worst_witness = std::max(worst_witness, std::fabs(res));
        ok = ok && std::fabs(res) <= 1e-10;
      }
      ok = ok && dist(r.witness->p, r.witness->q) > 1e-3;
    }
    if (!ok) ++mismatches;
  }

  // axis strata
  for (int trial = 0; trial < 100; ++trial) {
    const auto rs = locate_and_classify(parametrize_stratum(
        UnfoldingId::I23, StratumId::SharksfinAxis, +1, {rng.uniform(0.05, 1.5)}));
    ++samples;
    if (rs.points.size() != 1 || rs.points[0].cls.tag != ClassTag::Sharksfin) ++mismatches;
    const auto rd = locate_and_classify(parametrize_stratum(
        UnfoldingId::I23, StratumId::DeltoidAxis, +1, {rng.uniform(-1.5, -0.05)}));
    ++samples;
    if (rd.points.size() != 1 || rd.points[0].cls.tag != ClassTag::DeltoidTwoJet) ++mismatches;
  }

  std::ostringstream os;
  os << samples << " located points across the 7 strata, " << mismatches
     << " mismatches; worst cusp-fold witness residual " << fmt(worst_witness);
  notes = os.str();
  return mismatches == 0;
}

// ---- gulls exclusion ---------------------------------------------------------

bool check_gulls_exclusion(Lcg& rng, std::string& notes) {
  // Substituting the critical-row solution a = -4x, b = -(9y^2 + 4cy) into the
  // eta tower gives eta^2 lambda = -2 lambda - 6y^3 identically, so lambda =
  // eta^2 lambda = 0 forces y = 0; lambda then collapses to -2x^2, forcing
  // x = 0 and with it a = b = 0. No gulls point exists off the origin.
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Rational x0 = rng.rational(), y0 = rng.rational(), c = rng.rational();
    const Rational a = -4 * x0;
    const Rational b = -(9 * y0 * y0 + 4 * c * y0);
    const auto tower = i23_lambda_tower<Rational>({a, b, c}, 6);
    if (evaluate(partial(tower[0], 0), x0, y0) != 0) ++bad;
    if (evaluate(partial(tower[0], 1), x0, y0) != 0) ++bad;
    const Rational lam = evaluate(tower[0], x0, y0);
    const Rational e2 = evaluate(tower[2], x0, y0);
    if (e2 + 2 * lam + 6 * y0 * y0 * y0 != 0) ++bad;
    // second elimination step: at y = 0 the substitution leaves lambda = -2x^2
    const auto t0 = i23_lambda_tower<Rational>({a, Rational(0), c}, 6);
    if (evaluate(t0[0], x0, Rational(0)) != -2 * x0 * x0) ++bad;
  }

  // conversely the odd-sharksfin b-axis members are genuinely gulls
  int located = 0, oss_trials = 20;
  for (int trial = 0; trial < oss_trials; ++trial) {
    const double b = rng.sign() * rng.uniform(0.2, 0.6);
    const auto p = parametrize_stratum(UnfoldingId::OddSharksfin, StratumId::Gulls, +1, {b});
    const auto r = locate_and_classify(p);
    if (r.points.size() == 1 && r.points[0].cls.tag == ClassTag::Gulls) ++located;
  }

  std::ostringstream os;
  os << "200 exact samples of the critical-row elimination, " << bad
     << " identity violations (lambda = eta^2 lambda = 0 forces a=b=x=y=0); odd-sharksfin "
     << "b-axis gulls located " << located << "/" << oss_trials;
  notes = os.str();
  return bad == 0 && located == oss_trials;
}

// ---- contour regimes ----------------------------------------------------------

struct WallPath {
  StratumId wall;
  int sign;
  double y, c, h, halfwidth;
};

// Probe points stepped +-h from a wall chart point along the in-plane gradient
// of the wall's implicit residual at fixed c.
std::pair<std::vector<double>, std::vector<double>> wall_probe(const WallPath& wp) {
  const auto sp = parametrize_stratum(UnfoldingId::I23, wp.wall, wp.sign, {wp.y, wp.c});
  const double a0 = sp.params[0], b0 = sp.params[1];
  const double fd = 1e-6;
  const double ga = (implicit_residual(wp.wall, a0 + fd, b0, wp.c) -
                     implicit_residual(wp.wall, a0 - fd, b0, wp.c)) /
                    (2 * fd);
  const double gb = (implicit_residual(wp.wall, a0, b0 + fd, wp.c) -
                     implicit_residual(wp.wall, a0, b0 - fd, wp.c)) /
                    (2 * fd);
  const double g = std::hypot(ga, gb);
  if (g <= 1e-12) throw std::runtime_error("wall gradient vanished at the probe point");
  return {{a0 - wp.h * ga / g, b0 - wp.h * gb / g, wp.c},
          {a0 + wp.h * ga / g, b0 + wp.h * gb / g, wp.c}};
}

bool check_contour_regimes(Lcg& rng, std::string& notes) {
  // (a) random small perturbations of the deltoid germ keep exactly 3 cusps
  int bad_deltoid = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int sa = rng.sign();
    const double alpha = sa * rng.uniform(0.05, 0.1);
    const double delta = -sa * rng.uniform(0.05, 0.1);
    const double beta = rng.uniform(-0.02, 0.02);
    const double gamma = rng.uniform(-0.02, 0.02);
    Jet<double> f1(6), f2(6);
    f1.set(2, 0, 1.0);
    f1.set(0, 2, -1.0);
    f1.set(3, 0, 1.0);
    f1.set(1, 0, alpha);
    f1.set(0, 1, beta);
    f2.set(1, 1, 1.0);
    f2.set(1, 0, gamma);
    f2.set(0, 1, delta);
    const MapGerm<double> f(f1, f2);
    for (int res : {256, 512})
      if (apparent_contour(f, Window{-0.3, 0.3, -0.3, 0.3, res}).counts.cusps != 3) ++bad_deltoid;
  }

  // (b) feature-count jumps across the walls on 10 crossing paths
  const WallPath paths[] = {
      {StratumId::BeaksLips, +1, -0.30, 1.0, 0.01, 0.6},
      {StratumId::BeaksLips, +1, -0.62, 2.0, 0.05, 1.5},
      {StratumId::BeaksLips, -1, 0.68, -2.0, 0.02, 1.8},
      {StratumId::Swallowtail, +1, 0.26, -1.0, 0.005, 1.0},
      {StratumId::Swallowtail, -1, 0.28, -1.0, 0.005, 1.0},
      {StratumId::Swallowtail, +1, 0.55, -2.0, 0.02, 1.8},
      {StratumId::Swallowtail, -1, 0.52, -2.0, 0.02, 1.8},
      {StratumId::CuspFold, +1, -0.09, -0.5, 0.02, 0.6},
      {StratumId::CuspFold, -1, -0.16, -0.5, 0.05, 0.6},
      {StratumId::CuspFold, +1, -0.40, 1.0, 0.01, 1.0},
  };
  int bl_ok = 0, bl_n = 0, st_ok = 0, st_n = 0, cf_ok = 0, cf_n = 0;
  std::set<int> cf_jumps;
  for (const WallPath& wp : paths) {
    const auto [lo_params, hi_params] = wall_probe(wp);
    const Window w{-wp.halfwidth, wp.halfwidth, -wp.halfwidth, wp.halfwidth, 512};
    const FeatureCounts lo = contour_features(UnfoldingId::I23, lo_params, w);
    const FeatureCounts hi = contour_features(UnfoldingId::I23, hi_params, w);
    const int dc = hi.cusps - lo.cusps;
    const int dd = hi.double_points - lo.double_points;
    switch (wp.wall) {
      case StratumId::BeaksLips:
        ++bl_n;
        if (std::abs(dc) == 2 && dd == 0) ++bl_ok;
        break;
      case StratumId::Swallowtail:
        ++st_n;
        if ((dd == 1 && dc == 2) || (dd == -1 && dc == -2)) ++st_ok;
        break;
      default:
        ++cf_n;
        cf_jumps.insert(dd);
        if (dc == 0 && std::abs(dd) == 1) ++cf_ok;
        break;
    }
  }

  std::ostringstream os;
  os << "perturbed deltoid: " << (40 - bad_deltoid) << "/40 contours with 3 cusps; wall "
     << "crossings: beaks-lips " << bl_ok << "/" << bl_n << " with |dcusps|=2, swallowtail "
     << st_ok << "/" << st_n << " with (ddp,dcusps)=+-(1,2), cusp-fold " << cf_ok << "/" << cf_n
     << " with |ddp|=1 (measured ddp in {";
  bool first = true;
  for (int j : cf_jumps) {
    os << (first ? "" : ", ") << j;
    first = false;
  }
  os << "}: both image branches of the translated cusp cross the fold arc, so the "
     << "double-point count moves by 2)";
  notes = os.str();
  return bad_deltoid == 0 && bl_ok == bl_n && st_ok == st_n && cf_ok == cf_n;
}

// ---- crosscap characteristic curves -------------------------------------------

bool check_crosscap_curves(Lcg&, std::string& notes) {
  const auto family = CrosscapFamily::typical();
  bool ok = true;
  std::ostringstream os;

  // t = 0: the two curves in closed form, coefficient-exact
  const auto [par0, fle0] = characteristic_curves(family, 0.0);
  Jet<double> par_ref(par0.poly.order());
  par_ref.set(2, 0, 1.0);
  par_ref.set(0, 3, -3.0);
  const bool par_exact = par0.poly == par_ref;
  Jet<double> y_factor(fle0.poly.order()), conic(fle0.poly.order());
  y_factor.set(0, 1, 1.0);
  conic.set(2, 0, 4.0);
  conic.set(0, 3, -49.0 / 4.0);
  const bool fle_exact = fle0.poly == y_factor * conic;
  ok = ok && par_exact && fle_exact;
  os << "t=0: parabolic == x^2-3y^3 " << (par_exact ? "exactly" : "FAILED") << ", flecnodal == "
     << "y*(4x^2-(49/4)y^3) " << (fle_exact ? "exactly" : "FAILED");

  // t = 0.1: both branch pairs meet with contact order 3
  const auto [parp, flep] = characteristic_curves(family, 0.1);
  const auto contacts = contact_order(parp, flep);
  bool all3 = !contacts.empty();
  for (const auto& bc : contacts) all3 = all3 && bc.order == 3 && !bc.at_least && !bc.via_resultant;
  ok = ok && all3;
  os << "; t=0.1: " << contacts.size() << " branch pairs, contact orders";
  for (const auto& bc : contacts) os << " " << bc.order;

  // t = -0.1: the parabolic locus is a smooth branch plus an isolated point
  const auto [parn, flen] = characteristic_curves(family, -0.1);
  (void)flen;
  const Window w{-0.3, 0.3, -0.3, 0.3, 512};
  const auto vals = grid_eval(parn.poly, w);
  const int n = w.resolution + 1;
  const double tol = 1e-12;
  int negatives = 0, zeros = 0, zero_i = -1, zero_j = -1;
  double min_neg_y = 1e300;
  std::vector<char> neg(std::size_t(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = vals[std::size_t(j) * n + i];
      if (std::fabs(v) <= tol) {
        ++zeros;
        zero_i = i;
        zero_j = j;
      } else if (v < 0) {
        neg[std::size_t(j) * n + i] = 1;
        ++negatives;
        min_neg_y = std::min(min_neg_y, w.y0 + j * w.cell());
      }
    }
  const bool origin_zero = zeros == 1 && zero_i == n / 2 && zero_j == n / 2;
  bool ring_positive = true;
  for (int dj : {-1, 0, 1})
    for (int di : {-1, 0, 1})
      if (di != 0 || dj != 0)
        ring_positive =
            ring_positive && vals[std::size_t(n / 2 + dj) * n + (n / 2 + di)] > tol;
  // the negative nodes (the branch interior) form one 4-connected component
  int components = 0;
  std::vector<char> seen(neg.size(), 0);
  std::vector<int> stack;
  for (int start = 0; start < n * n; ++start) {
    if (!neg[start] || seen[start]) continue;
    ++components;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int i = k % n, j = k / n;
      const int nb[4] = {i > 0 ? k - 1 : -1, i < n - 1 ? k + 1 : -1, j > 0 ? k - n : -1,
                         j < n - 1 ? k + n : -1};
      for (int m : nb)
        if (m >= 0 && neg[m] && !seen[m]) {
          seen[m] = 1;
          stack.push_back(m);
        }
    }
  }
  const bool census_ok = origin_zero && ring_positive && negatives > 0 && min_neg_y > 0.03 &&
                         components == 1;
  ok = ok && census_ok;
  os << "; t=-0.1 sign census on 512^2: " << negatives << " negative nodes in " << components
     << " component (min y " << fmt(min_neg_y) << "), lone zero at the origin with positive "
     << "ring " << (census_ok ? "confirmed" : "FAILED");
  notes = os.str();
  return ok;
}

// ---- caustic sections vs bifurcation sections ----------------------------------

struct Passage {
  double t1 = 0.0;
  FeatureCounts before, after;
  int members = 0;
};

// Chain crossings within 2e-3 in t1 into wall passages (near-wall detector
// sub-steps land within a grid cell of the wall and merge with it).
std::vector<Passage> merge_passages(const std::vector<SweepCrossing>& crossings) {
  std::vector<Passage> out;
  double last_t1 = 0.0, sum = 0.0;
  for (const auto& cr : crossings) {
    if (out.empty() || std::fabs(cr.t[0] - last_t1) > 2e-3) {
      out.push_back({cr.t[0], cr.before, cr.after, 1});
      sum = cr.t[0];
    } else {
      Passage& p = out.back();
      p.after = cr.after;
      sum += cr.t[0];
      p.t1 = sum / ++p.members;
    }
    last_t1 = cr.t[0];
  }
  return out;
}

bool check_caustic_sections(Lcg& rng, std::string& notes) {
  bool ok = true;
  double worst_cells = 0.0, worst_shift = 0.0;
  std::set<StratumId> seen;
  int passages = 0;
  for (int pathno = 0; pathno < 5; ++pathno) {
    // odd paths run above the deltoid side (c > 0) across the transversal
    // cusp-fold wall b = -c^2/5; even paths cross the swallowtail, beaks-lips
    // and cusp-fold walls at c < 0
    const int csign = pathno % 2 == 0 ? -1 : +1;
    const double c0 = csign * rng.uniform(0.25, 0.45);
    double b_from, b_to;
    if (csign < 0) {
      b_from = rng.uniform(0.38, 0.42) * c0 * c0;
      b_to = rng.uniform(0.17, 0.22) * c0 * c0;
    } else {
      b_from = -rng.uniform(0.12, 0.16) * c0 * c0;
      b_to = -rng.uniform(0.26, 0.30) * c0 * c0;
    }
    const std::vector<std::array<double, 2>> path = {{b_from, c0}, {b_to, c0}};

    // ordinates where the sliced strata cross the path's line a = 0
    const auto slice = section_curves(UnfoldingId::I23, c0, Window{-0.12, 0.12, -0.12, 0.12, 400});
    std::vector<double> wall_b;
    for (const auto& cur : slice.curves)
      for (std::size_t i = 1; i < cur.ab.size(); ++i) {
        const double xa = cur.ab[i - 1].x, xb = cur.ab[i].x;
        if (xa == 0.0) wall_b.push_back(cur.ab[i - 1].y);
        else if ((xa < 0.0) != (xb < 0.0))
          wall_b.push_back(cur.ab[i - 1].y +
                           (cur.ab[i].y - cur.ab[i - 1].y) * (0.0 - xa) / (xb - xa));
      }

    std::array<std::vector<Passage>, 2> merged;
    std::array<FeatureCounts, 2> entry{};
    for (int ri : {0, 1}) {
      const Window w{-0.6, 0.6, -0.6, 0.6, ri == 0 ? 256 : 512};
      SweepOptions so;
      so.locate_tol = 1e-5;
      const auto sweep = perestroika_sweep(CausticFrame::trivial(), path, w, so);
      entry[ri] = sweep.counts.front();
      for (const auto& cr : sweep.crossings) {
        double d = 1e300;
        for (double wb : wall_b) d = std::min(d, std::fabs(cr.t[0] - wb));
        worst_cells = std::max(worst_cells, d / w.cell());
        if (d > 2 * w.cell()) ok = false;
        if (cr.stratum) seen.insert(*cr.stratum);
      }
      merged[ri] = merge_passages(sweep.crossings);
    }

    // the passage sequence is stable under resolution doubling
    if (merged[0].size() != merged[1].size() || !(entry[0] == entry[1])) {
      ok = false;
    } else {
      for (std::size_t k = 0; k < merged[0].size(); ++k) {
        if (!(merged[0][k].before == merged[1][k].before &&
              merged[0][k].after == merged[1][k].after))
          ok = false;
        worst_shift = std::max(worst_shift, std::fabs(merged[0][k].t1 - merged[1][k].t1));
      }
    }
    if (merged[0].size() != (csign < 0 ? 3u : 1u)) ok = false;
    passages += static_cast<int>(merged[1].size());
  }

  std::ostringstream os;
  os << "5 paths, " << passages << " wall passages; worst crossing-to-section distance "
     << fmt(worst_cells) << " grid cells (allowed 2); passage sequences equal at 256/512, worst "
     << "position shift " << fmt(worst_shift) << "; strata seen:";
  for (StratumId s : seen) os << " " << stratum_name(s);
  notes = os.str();
  return ok;
}

}  // namespace

std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
  struct Entry {
    const char* name;
    bool (*fn)(Lcg&, std::string&);
  };
  const Entry entries[] = {
      {"stratum_identities", check_stratum_identities},
      {"edge_coincidences", check_edge_coincidences},
      {"normal_form_classification", check_normal_forms},
      {"sharksfin_series", check_sharksfin_series},
      {"stratum_round_trip", check_stratum_round_trip},
      {"gulls_exclusion", check_gulls_exclusion},
      {"contour_regimes", check_contour_regimes},
      {"crosscap_curves", check_crosscap_curves},
      {"caustic_sections", check_caustic_sections},
  };
  std::vector<CheckResult> out;
  std::uint64_t salt = 0;
  for (const Entry& e : entries) {
    CheckResult r;
    r.name = e.name;
    Lcg rng(seed + 0x9e3779b97f4a7c15ull * ++salt);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.pass = e.fn(rng, r.notes);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.notes = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace germlab
