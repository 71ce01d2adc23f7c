#pragma once

// Recognition of A-singularity classes of plane-to-plane germs from jet data.
//
// Corank-1 germs are decided by the lambda / eta-tower criteria evaluated at
// the origin, in the fixed row order fold, cusp, swallowtail, lips, beaks,
// butterfly, gulls, goose. Corank-2 germs are classified at the 2-jet level
// through the pencil of quadratic parts.

#include <array>
#include <optional>
#include <string>

#include "germlab/map_germ.hpp"

namespace germlab {

enum class ClassTag {
  Regular,
  Fold,
  Cusp,
  Swallowtail,
  Lips,
  Beaks,
  Butterfly,
  Gulls,
  Goose,
  Sharksfin,
  Deltoid,
  OddSharksfin,
  I23Candidate,
  DeltoidTwoJet,
  HyperbolicPairDegenerate,
  Unresolved,
};

const char* class_name(ClassTag tag);

struct SingularityClass {
  ClassTag tag = ClassTag::Unresolved;
  std::string reason;  // set only for Unresolved
  bool operator==(const SingularityClass& o) const { return tag == o.tag; }
};

// Values behind the corank-1 decision. Entries are filled as the decision
// procedure needs them; later ones may stay absent once a row has fired.
template <class S>
struct CriteriaReport {
  int corank = -1;
  S lambda0{};
  std::array<S, 2> dlambda0{};
  std::array<std::optional<S>, 4> eta_tower{};  // eta^k lambda (0), k = 1..4
  std::optional<S> hess_det;
  std::optional<int> hess_rank;
  std::optional<S> theta3_lambda0;  // only when hess_rank == 1
};

template <class S>
struct ClassifyResult {
  SingularityClass cls;
  CriteriaReport<S> report;
};

namespace detail {

template <class S>
std::array<S, 3> hessian_at_origin(const Jet<S>& lam) {
  // (lam_xx, lam_xy, lam_yy) at 0
  return {S(2) * lam.coeff(2, 0), lam.coeff(1, 1), S(2) * lam.coeff(0, 2)};
}

// theta^3 lambda (0) for a constant field theta: 6 * sum_{i+j=3} tx^i ty^j c_ij
template <class S>
S cubic_along(const Jet<S>& lam, const S& tx, const S& ty) {
  S acc(0);
  if (lam.order() < 3) return acc;
  std::array<S, 4> px{S(1), tx, tx * tx, tx * tx * tx};
  std::array<S, 4> py{S(1), ty, ty * ty, ty * ty * ty};
  for (int j = 0; j <= 3; ++j) acc += lam.coeff(3 - j, j) * px[3 - j] * py[j];
  return S(6) * acc;
}

}  // namespace detail

// Criteria data for a corank <= 1 germ, computed with the kernel field
// returned by kernel_field(f) unless an explicit field is supplied (the
// verdicts are invariant under the choice of spanning field).
template <class S>
CriteriaReport<S> criteria_report(const MapGerm<S>& f, const ZeroTolerance& tol,
                                  const std::array<Jet<S>, 2>* eta_override = nullptr) {
  CriteriaReport<S> r;
  r.corank = corank(f, tol);
  const Jet<S> lam = jacobian_jet(f);
  r.lambda0 = lam.coeff(0, 0);
  r.dlambda0 = {lam.order() >= 1 ? lam.coeff(1, 0) : S(0),
                lam.order() >= 1 ? lam.coeff(0, 1) : S(0)};
  if (r.corank == 2) return r;

  const std::array<Jet<S>, 2> eta = eta_override ? *eta_override : kernel_field(f);
  Jet<S> g = lam;
  for (int k = 0; k < 4; ++k) {
    if (g.order() < 1) break;
    g = apply_field(eta, g);
    r.eta_tower[k] = g.coeff(0, 0);
  }

  const auto h = detail::hessian_at_origin(lam);
  r.hess_det = h[0] * h[2] - h[1] * h[1];
  const bool all_zero = scalar_is_zero(h[0], 2, tol) && scalar_is_zero(h[1], 2, tol) &&
                        scalar_is_zero(h[2], 2, tol);
  if (all_zero)
    r.hess_rank = 0;
  else if (!scalar_is_zero(*r.hess_det, 4, tol))
    r.hess_rank = 2;
  else
    r.hess_rank = 1;

  if (*r.hess_rank == 1) {
    // kernel direction of the rank-1 Hessian [[h0,h1],[h1,h2]]
    S tx, ty;
    if (!scalar_is_zero(h[0], 2, tol) || !scalar_is_zero(h[1], 2, tol)) {
      tx = -h[1];
      ty = h[0];
    } else {
      tx = S(1);
      ty = S(0);
    }
    r.theta3_lambda0 = detail::cubic_along(lam, tx, ty);
  }
  return r;
}

// Table-driven corank-1 decision. Degrees used for the floating zero tests:
// lambda-like quantities are degree 2 in the input coefficients, each eta
// application adds one, the Hessian determinant is degree 4.
template <class S>
ClassifyResult<S> classify_corank1(const MapGerm<S>& f, const ZeroTolerance& tol,
                                   const std::array<Jet<S>, 2>* eta_override = nullptr) {
  ClassifyResult<S> out;
  out.report = criteria_report(f, tol, eta_override);
  const CriteriaReport<S>& r = out.report;
  if (r.corank != 1) {
    out.cls = {ClassTag::Unresolved, "classify_corank1: germ does not have corank 1"};
    return out;
  }

  auto eta_zero = [&](int k) {
    return r.eta_tower[k - 1] && scalar_is_zero(*r.eta_tower[k - 1], 2 + k, tol);
  };
  auto eta_known_nonzero = [&](int k) {
    return r.eta_tower[k - 1] && !scalar_is_zero(*r.eta_tower[k - 1], 2 + k, tol);
  };
  const bool dlam_zero =
      scalar_is_zero(r.dlambda0[0], 2, tol) && scalar_is_zero(r.dlambda0[1], 2, tol);
  const bool det_zero = scalar_is_zero(*r.hess_det, 4, tol);
  const bool det_pos = !det_zero && to_double(*r.hess_det) > 0;
  const bool det_neg = !det_zero && to_double(*r.hess_det) < 0;

  if (eta_known_nonzero(1)) {
    out.cls = {ClassTag::Fold, {}};
    return out;
  }
  if (!dlam_zero && eta_zero(1) && eta_known_nonzero(2)) {
    out.cls = {ClassTag::Cusp, {}};
    return out;
  }
  if (!dlam_zero && eta_zero(1) && eta_zero(2) && eta_known_nonzero(3)) {
    out.cls = {ClassTag::Swallowtail, {}};
    return out;
  }
  if (dlam_zero && det_pos) {
    out.cls = {ClassTag::Lips, {}};
    return out;
  }
  if (dlam_zero && det_neg && eta_known_nonzero(2)) {
    out.cls = {ClassTag::Beaks, {}};
    return out;
  }
  if (!dlam_zero && eta_zero(1) && eta_zero(2) && eta_zero(3) && eta_known_nonzero(4)) {
    out.cls = {ClassTag::Butterfly, {}};
    return out;
  }
  if (dlam_zero && det_neg && eta_zero(2) && eta_known_nonzero(3)) {
    out.cls = {ClassTag::Gulls, {}};
    return out;
  }
  if (dlam_zero && r.hess_rank && *r.hess_rank == 1 && eta_known_nonzero(2) &&
      r.theta3_lambda0 && !scalar_is_zero(*r.theta3_lambda0, 2, tol)) {
    out.cls = {ClassTag::Goose, {}};
    return out;
  }

  std::string reason = "no criteria row matched at jet order ";
  reason += std::to_string(f.order());
  if (!r.eta_tower[3]) reason += " (eta tower exhausted the available order)";
  out.cls = {ClassTag::Unresolved, reason};
  return out;
}

template <class S>
ClassifyResult<S> classify_corank1(const MapGerm<S>& f) {
  return classify_corank1(f, f.tolerance());
}

// 2-jet classification of corank-2 germs via the pencil s*Q1 + t*Q2 of
// quadratic parts and the discriminant form Delta(s,t).
template <class S>
SingularityClass classify_corank2_2jet(const MapGerm<S>& f, const ZeroTolerance& tol);

template <class S>
SingularityClass classify_corank2_2jet(const MapGerm<S>& f) {
  return classify_corank2_2jet(f, f.tolerance());
}

// Dispatcher: Regular for corank 0, the criteria table for corank 1, the
// 2-jet pencil for corank 2.
template <class S>
ClassifyResult<S> classify(const MapGerm<S>& f, const ZeroTolerance& tol) {
  const int ck = corank(f, tol);
  if (ck == 0) {
    ClassifyResult<S> out;
    out.cls = {ClassTag::Regular, {}};
    out.report.corank = 0;
    return out;
  }
  if (ck == 1) return classify_corank1(f, tol);
  ClassifyResult<S> out;
  out.report.corank = 2;
  out.cls = classify_corank2_2jet(f, tol);
  return out;
}

template <class S>
ClassifyResult<S> classify(const MapGerm<S>& f) {
  return classify(f, f.tolerance());
}

}  // namespace germlab
