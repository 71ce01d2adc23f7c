#pragma once

// The three corank-2 unfoldings whose bifurcation diagrams the strata module
// describes, as polynomial germ builders:
//
//   I23          (x^2 + y^3 + a x + b y + c y^2,  x y)            params (a,b,c)
//   Sharksfin    (x^2 + y^3 + a y,  y^2 + x^3 + b x)              params (a,b)
//   OddSharksfin (x^2 + y^5 + c y^3 + a y,  y^2 + x^3 + b x)      params (a,b,c)

#include <stdexcept>
#include <vector>

#include "germlab/map_germ.hpp"

namespace germlab {

enum class UnfoldingId { Sharksfin, OddSharksfin, I23 };

const char* unfolding_name(UnfoldingId u);
inline int unfolding_param_count(UnfoldingId u) { return u == UnfoldingId::Sharksfin ? 2 : 3; }

template <class S>
MapGerm<S> unfolding_germ(UnfoldingId u, const std::vector<S>& params,
                          int order = kDefaultJetOrder) {
  if (static_cast<int>(params.size()) != unfolding_param_count(u))
    throw std::invalid_argument("unfolding_germ: wrong parameter count");
  Jet<S> f1(order), f2(order);
  switch (u) {
    case UnfoldingId::I23:
      f1.set(2, 0, S(1));
      f1.set(0, 3, S(1));
      f1.set(1, 0, params[0]);
      f1.set(0, 1, params[1]);
      f1.set(0, 2, params[2]);
      f2.set(1, 1, S(1));
      break;
    case UnfoldingId::Sharksfin:
      f1.set(2, 0, S(1));
      f1.set(0, 3, S(1));
      f1.set(0, 1, params[0]);
      f2.set(0, 2, S(1));
      f2.set(3, 0, S(1));
      f2.set(1, 0, params[1]);
      break;
    case UnfoldingId::OddSharksfin:
      f1.set(2, 0, S(1));
      f1.set(0, 5, S(1));
      f1.set(0, 3, params[2]);
      f1.set(0, 1, params[0]);
      f2.set(0, 2, S(1));
      f2.set(3, 0, S(1));
      f2.set(1, 0, params[1]);
      break;
  }
  return MapGerm<S>(std::move(f1), std::move(f2));
}

// Germ of the unfolding member at a source point p0, recentred so that it is
// again a map-germ at the origin: g(u) = F(p0 + u) - F(p0).
template <class S>
MapGerm<S> unfolding_germ_at(UnfoldingId u, const std::vector<S>& params, const S& x0,
                             const S& y0, int order = kDefaultJetOrder) {
  const MapGerm<S> f = unfolding_germ(u, params, order);
  Jet<S> g1 = translate(f.f1(), x0, y0);
  Jet<S> g2 = translate(f.f2(), x0, y0);
  g1.set(0, 0, S(0));
  g2.set(0, 0, S(0));
  return MapGerm<S>(std::move(g1), std::move(g2));
}

}  // namespace germlab
