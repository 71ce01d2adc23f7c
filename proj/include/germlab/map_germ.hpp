#pragma once

// Plane-to-plane map-germs f = (f1, f2) : (R^2, 0) -> (R^2, 0) stored as a
// pair of jets, plus the basic attached objects: the Jacobian determinant jet
// and a vector field spanning ker df along the singular set.

#include <array>
#include <stdexcept>

#include "germlab/jet.hpp"

namespace germlab {

// Tolerance scheme for zero tests on inexact scalars. A quantity that is
// polynomial of degree d in the input coefficients is compared against
// base * scale^d, scale = max(1, largest input coefficient magnitude).
struct ZeroTolerance {
  double base = 1e-10;
  double scale = 1.0;
  double threshold(int degree) const {
    double t = base;
    for (int k = 0; k < degree; ++k) t *= scale;
    return t;
  }
};

template <class S>
bool scalar_is_zero(const S& v, int degree, const ZeroTolerance& tol) {
  if constexpr (scalar_traits<S>::exact)
    return v == S(0);
  else
    return scalar_traits<S>::abs(v) < tol.threshold(degree);
}

template <class S>
class MapGerm {
 public:
  MapGerm(Jet<S> f1, Jet<S> f2) : f1_(std::move(f1)), f2_(std::move(f2)) {
    if (f1_.coeff(0, 0) != S(0) || f2_.coeff(0, 0) != S(0))
      throw std::invalid_argument("map germ components must vanish at the origin");
  }

  const Jet<S>& f1() const { return f1_; }
  const Jet<S>& f2() const { return f2_; }
  int order() const { return std::min(f1_.order(), f2_.order()); }

  // Linear part as row-major 2x2 matrix d(f1,f2)/d(x,y) at 0.
  std::array<S, 4> linear_part() const {
    return {f1_.coeff(1, 0), f1_.coeff(0, 1), f2_.coeff(1, 0), f2_.coeff(0, 1)};
  }

  ZeroTolerance tolerance(double base = 1e-10) const {
    ZeroTolerance tol;
    tol.base = base;
    tol.scale = std::max(1.0, std::max(max_abs_coeff(f1_), max_abs_coeff(f2_)));
    return tol;
  }

 private:
  Jet<S> f1_, f2_;
};

using MapGermR = MapGerm<Rational>;
using MapGermD = MapGerm<double>;

template <class S>
MapGerm<double> to_double_germ(const MapGerm<S>& f) {
  return MapGerm<double>(to_double_jet(f.f1()), to_double_jet(f.f2()));
}

template <class S>
int corank(const MapGerm<S>& f, const ZeroTolerance& tol) {
  const auto m = f.linear_part();
  const S det = m[0] * m[3] - m[1] * m[2];
  if (!scalar_is_zero(det, 2, tol)) return 0;
  for (const S& e : m)
    if (!scalar_is_zero(e, 1, tol)) return 1;
  return 2;
}

template <class S>
int corank(const MapGerm<S>& f) {
  return corank(f, f.tolerance());
}

// Jacobian determinant lambda = f1_x f2_y - f1_y f2_x, order N-1.
template <class S>
Jet<S> jacobian_jet(const MapGerm<S>& f) {
  return partial(f.f1(), 0) * partial(f.f2(), 1) - partial(f.f1(), 1) * partial(f.f2(), 0);
}

enum class Corank2Kernel {
  reject,        // corank-2 germ -> error
  unfolding_xy,  // use eta = (-x, y), the convention matching second component x*y
};

// A vector field spanning ker df along {lambda = 0}: (-fi_y, fi_x) built
// from the component with the larger gradient at 0 (ties prefer f1). Where
// grad fi != 0 this annihilates fi identically and df.eta = (0, +/-lambda),
// so it spans the kernel on the singular set; taking the larger gradient
// keeps the field well scaled when the other component is nearly critical.
template <class S>
std::array<Jet<S>, 2> kernel_field(const MapGerm<S>& f,
                                   Corank2Kernel convention = Corank2Kernel::reject) {
  const ZeroTolerance tol = f.tolerance();
  const auto m = f.linear_part();
  const bool grad1 = !scalar_is_zero(m[0], 1, tol) || !scalar_is_zero(m[1], 1, tol);
  const bool grad2 = !scalar_is_zero(m[2], 1, tol) || !scalar_is_zero(m[3], 1, tol);
  const double n1 = std::max(std::fabs(to_double(m[0])), std::fabs(to_double(m[1])));
  const double n2 = std::max(std::fabs(to_double(m[2])), std::fabs(to_double(m[3])));
  if (grad1 && (!grad2 || n1 >= n2)) return {-partial(f.f1(), 1), partial(f.f1(), 0)};
  if (grad2) return {-partial(f.f2(), 1), partial(f.f2(), 0)};
  if (convention == Corank2Kernel::unfolding_xy) {
    const int n = std::max(f.order() - 1, 1);
    return {-Jet<S>::variable(0, n), Jet<S>::variable(1, n)};
  }
  throw std::domain_error("kernel_field: corank-2 germ with no registered convention");
}

// Directional derivative of g along the field eta.
template <class S>
Jet<S> apply_field(const std::array<Jet<S>, 2>& eta, const Jet<S>& g) {
  return eta[0] * partial(g, 0) + eta[1] * partial(g, 1);
}

}  // namespace germlab
