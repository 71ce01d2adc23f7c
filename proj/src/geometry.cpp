#include "germlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

namespace germlab {
namespace {

// Relative threshold for treating an eliminant coefficient as zero.
constexpr double kTrimZero = 1e-12;
// Relative threshold on series coefficients when reading off contact orders.
constexpr double kSeriesZero = 1e-9;
// A tangent root counts as real when |Im| is below this (relative).
constexpr double kTangentImag = 1e-7;
// Two tangent roots closer than this (relative) count as a multiple root.
constexpr double kTangentSep = 1e-6;

bool jet_is_zero(const Jet<double>& f, double scale) {
  return max_abs_coeff(f) <= kTrimZero * scale;
}

double jet_scale(const Jet<double>& f) { return std::max(1.0, max_abs_coeff(f)); }

// Divides every coefficient by d (kept as a true division so that dyadic
// rational results stay exact).
Jet<double> jet_divide_scalar(const Jet<double>& f, double d) {
  Jet<double> out(f.order());
  for (int i = 0; i <= f.order(); ++i)
    for (int j = 0; i + j <= f.order(); ++j) out.set(i, j, f.coeff(i, j) / d);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials in a formal variable v with bivariate-jet coefficients, used to
// eliminate the view direction from the singularity conditions.

using VPoly = std::vector<Jet<double>>;  // index = power of v

VPoly vp_add(const VPoly& a, const VPoly& b) {
  VPoly out(std::max(a.size(), b.size()), Jet<double>(a.empty() ? b[0].order() : a[0].order()));
  for (size_t k = 0; k < out.size(); ++k) {
    if (k < a.size()) out[k] += a[k];
    if (k < b.size()) out[k] += b[k];
  }
  return out;
}

VPoly vp_sub(const VPoly& a, const VPoly& b) {
  VPoly nb = b;
  for (auto& j : nb) j = -j;
  return vp_add(a, nb);
}

VPoly vp_mul(const VPoly& a, const VPoly& b) {
  VPoly out(a.size() + b.size() - 1, Jet<double>(a[0].order()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

VPoly vp_partial(const VPoly& a, int var) {
  VPoly out = a;
  for (auto& j : out) j = partial(j, var);
  return out;
}

void vp_trim(VPoly& a, double scale) {
  while (a.size() > 1 && jet_is_zero(a.back(), scale)) a.pop_back();
}

double vp_scale(const VPoly& a) {
  double s = 1.0;
  for (const auto& j : a) s = std::max(s, max_abs_coeff(j));
  return s;
}

// Determinant of a small matrix of jets by cofactor expansion.
Jet<double> jet_det(std::vector<std::vector<Jet<double>>> m) {
  const size_t n = m.size();
  const int order = m[0][0].order();
  if (n == 1) return m[0][0];
  Jet<double> out(order);
  std::vector<std::vector<Jet<double>>> minor(n - 1, std::vector<Jet<double>>(n - 1, Jet<double>(order)));
  for (size_t col = 0; col < n; ++col) {
    if (max_abs_coeff(m[0][col]) == 0.0) continue;
    for (size_t r = 1; r < n; ++r) {
      size_t mc = 0;
      for (size_t c = 0; c < n; ++c) {
        if (c == col) continue;
        minor[r - 1][mc++] = m[r][c];
      }
    }
    Jet<double> term = m[0][col] * jet_det(minor);
    if (col % 2 == 1) term = -term;
    out += term;
  }
  return out;
}

// Sylvester resultant in v of two jet-coefficient polynomials.
Jet<double> vp_resultant(VPoly p, VPoly q) {
  const double scale = std::max(vp_scale(p), vp_scale(q));
  vp_trim(p, scale);
  vp_trim(q, scale);
  const int m = static_cast<int>(p.size()) - 1, n = static_cast<int>(q.size()) - 1;
  const int order = p[0].order();
  if (m == 0 && n == 0) return Jet<double>::constant(1.0, order);
  if (m == 0) {  // Res = p0^n
    Jet<double> out = Jet<double>::constant(1.0, order);
    for (int k = 0; k < n; ++k) out *= p[0];
    return out;
  }
  if (n == 0) {
    Jet<double> out = Jet<double>::constant(1.0, order);
    for (int k = 0; k < m; ++k) out *= q[0];
    return out;
  }
  const int size = m + n;
  std::vector<std::vector<Jet<double>>> s(size, std::vector<Jet<double>>(size, Jet<double>(order)));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s[r][r + k] = p[m - k];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s[n + r][r + k] = q[n - k];
  return jet_det(std::move(s));
}

// Divides f by y^k after checking that every retained coefficient with
// y-exponent < k is negligible. Returns nullopt when not divisible.
std::optional<Jet<double>> jet_divide_y_pow(const Jet<double>& f, int k) {
  const double scale = jet_scale(f);
  Jet<double> out(f.order());
  for (int i = 0; i <= f.order(); ++i)
    for (int j = 0; i + j <= f.order(); ++j) {
      const double c = f.coeff(i, j);
      if (j < k) {
        if (std::fabs(c) > kTrimZero * scale) return std::nullopt;
        continue;
      }
      out.set(i, j - k, c);
    }
  return out;
}

Jet<double> family_g(const CrosscapFamily& cf, double t) { return cf.g0 + t * cf.g1; }
Jet<double> family_phi(const CrosscapFamily& cf, double t) { return cf.phi0 + t * cf.phi1; }

// ---------------------------------------------------------------------------
// Series helpers for branch extraction: truncated univariate power series as
// coefficient vectors, index = exponent.

using Series = std::vector<double>;

Series series_mul(const Series& a, const Series& b, int n) {
  Series out(n + 1, 0.0);
  for (int i = 0; i <= n && i < static_cast<int>(a.size()); ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; i + j <= n && j < static_cast<int>(b.size()); ++j)
      out[i + j] += a[i] * b[j];
  }
  return out;
}

// f(s(u), u) for a bivariate jet f, where the first jet variable is replaced
// by the series s and the second by u itself (or the other way around when
// axis = 1). Horner over the substituted variable.
Series jet_on_graph(const Jet<double>& f, const Series& s, int axis, int n) {
  const int order = f.order();
  Series out(n + 1, 0.0);
  Series pow(n + 1, 0.0);
  pow[0] = 1.0;
  for (int i = 0; i <= order; ++i) {
    if (i > 0) pow = series_mul(pow, s, n);
    for (int j = 0; i + j <= order && j <= n; ++j) {
      const double c = axis == 0 ? f.coeff(i, j) : f.coeff(j, i);
      if (c == 0.0) continue;
      for (int k = 0; j + k <= n && k < static_cast<int>(pow.size()); ++k)
        out[j + k] += c * pow[k];
    }
  }
  return out;
}

struct GraphBranch {
  double tangent = 0.0;
  Series s;  // branch graph: substituted variable = s(kept variable)
};

// Durand-Kerner roots of a real polynomial (coefficients low to high).
std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  int deg = static_cast<int>(c.size()) - 1;
  while (deg > 0 && c[deg] == 0.0) --deg;
  std::vector<std::complex<double>> z(deg);
  if (deg == 0) return z;
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> acc(1.0, 0.0);
  for (int i = 0; i < deg; ++i) {
    acc *= seed;
    z[i] = acc;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> v(0.0, 0.0);
    for (int k = deg; k >= 0; --k) v = v * x + c[k];
    return v;
  };
  for (int iter = 0; iter < 300; ++iter) {
    double move = 0.0;
    for (int i = 0; i < deg; ++i) {
      std::complex<double> denom(c[deg], 0.0);
      for (int j = 0; j < deg; ++j)
        if (j != i) denom *= z[i] - z[j];
      if (std::abs(denom) < 1e-300) continue;
      const std::complex<double> step = eval(z[i]) / denom;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-14) break;
  }
  return z;
}

// Power-series branches of {f = 0} through the origin presented as graphs in
// the given orientation (axis 0: x = s(y); axis 1: y = s(x)). Only branches
// with a simple real tangent are returned; tangents with multiplicity land in
// `degenerate`.
std::vector<GraphBranch> graph_branches(const Jet<double>& f, int axis, bool& degenerate) {
  degenerate = false;
  const int order = f.order();
  const double scale = jet_scale(f);
  // Lowest total-degree form as a polynomial in the tangent sigma.
  int m0 = -1;
  std::vector<double> q;
  for (int n = 1; n <= order && m0 < 0; ++n) {
    std::vector<double> cand(n + 1, 0.0);
    bool nonzero = false;
    for (int i = 0; i <= n; ++i) {
      const double c = axis == 0 ? f.coeff(i, n - i) : f.coeff(n - i, i);
      cand[i] = c;
      if (std::fabs(c) > kTrimZero * scale) nonzero = true;
    }
    if (nonzero) {
      m0 = n;
      q = std::move(cand);
    }
  }
  if (m0 < 0) return {};
  int deg = m0;
  while (deg > 0 && std::fabs(q[deg]) <= kTrimZero * scale) --deg;
  q.resize(deg + 1);
  if (deg == 0) return {};  // no graphs in this orientation
  std::vector<GraphBranch> out;
  const auto roots = poly_roots(q);
  double rscale = 1.0;
  for (const auto& z : roots) rscale = std::max(rscale, std::abs(z));
  for (size_t i = 0; i < roots.size(); ++i) {
    if (std::fabs(roots[i].imag()) > kTangentImag * rscale) continue;
    bool multiple = false;
    for (size_t j = 0; j < roots.size(); ++j)
      if (j != i && std::abs(roots[i] - roots[j]) < kTangentSep * rscale) multiple = true;
    if (multiple) {
      degenerate = true;
      continue;
    }
    const double sigma = roots[i].real();
    GraphBranch br;
    br.tangent = sigma;
    br.s.assign(order + 1, 0.0);
    br.s[1] = sigma;
    // Correct one series coefficient per step: the residual valuation rises
    // strictly, so at most `order` rounds are needed.
    const Jet<double> fx = partial(f, axis == 0 ? 0 : 1);
    for (int round = 0; round < 4 * order; ++round) {
      const Series r = jet_on_graph(f, br.s, axis, order);
      const Series d = jet_on_graph(fx, br.s, axis, order);
      double rs = 1.0;
      for (double v : r) rs = std::max(rs, std::fabs(v));
      int rv = -1;
      for (int k = 0; k <= order; ++k)
        if (std::fabs(r[k]) > kTrimZero * scale * 16) {
          rv = k;
          break;
        }
      if (rv < 0) break;
      int dv = -1;
      for (int k = 0; k <= order; ++k)
        if (std::fabs(d[k]) > kTrimZero * scale) {
          dv = k;
          break;
        }
      if (dv < 0 || rv - dv < 1 || rv - dv > order) break;
      br.s[rv - dv] -= r[rv] / d[dv];
    }
    out.push_back(std::move(br));
  }
  std::sort(out.begin(), out.end(),
            [](const GraphBranch& a, const GraphBranch& b) { return a.tangent < b.tangent; });
  return out;
}

// Total intersection multiplicity at the origin from the valuation of
// Res_x(f, g)(y), estimated on a geometric sequence of sample ordinates.
// Returns nullopt when the resultant vanishes identically at the working
// precision (shared component).
std::optional<int> resultant_valuation(const Jet<double>& f, const Jet<double>& g) {
  const double fs = jet_scale(f), gs = jet_scale(g);
  auto xdeg = [&](const Jet<double>& h, double s) {
    int d = 0;
    for (int i = 0; i <= h.order(); ++i)
      for (int j = 0; i + j <= h.order(); ++j)
        if (std::fabs(h.coeff(i, j)) > kTrimZero * s) d = std::max(d, i);
    return d;
  };
  const int m = xdeg(f, fs), n = xdeg(g, gs);
  if (m == 0 || n == 0) return std::nullopt;  // not x-regular: no graph data either
  auto res_at = [&](double y) {
    std::vector<double> p(m + 1, 0.0), q(n + 1, 0.0);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; i + j <= f.order(); ++j) p[i] += f.coeff(i, j) * std::pow(y, j);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= g.order(); ++j) q[i] += g.coeff(i, j) * std::pow(y, j);
    const int size = m + n;
    std::vector<std::vector<double>> s(size, std::vector<double>(size, 0.0));
    for (int r = 0; r < n; ++r)
      for (int k = 0; k <= m; ++k) s[r][r + k] = p[m - k];
    for (int r = 0; r < m; ++r)
      for (int k = 0; k <= n; ++k) s[n + r][r + k] = q[n - k];
    double det = 1.0;
    for (int col = 0; col < size; ++col) {
      int piv = col;
      for (int r = col + 1; r < size; ++r)
        if (std::fabs(s[r][col]) > std::fabs(s[piv][col])) piv = r;
      if (std::fabs(s[piv][col]) < 1e-300) return 0.0;
      if (piv != col) {
        std::swap(s[piv], s[col]);
        det = -det;
      }
      det *= s[col][col];
      for (int r = col + 1; r < size; ++r) {
        const double fac = s[r][col] / s[col][col];
        for (int c2 = col; c2 < size; ++c2) s[r][c2] -= fac * s[col][c2];
      }
    }
    return det;
  };
  const double y0 = 0.02;
  std::vector<double> rv;
  for (int k = 0; k <= 7; ++k) rv.push_back(std::fabs(res_at(y0 * std::pow(0.5, k))));
  std::vector<double> slopes;
  for (int k = 0; k + 1 <= 7; ++k) {
    if (rv[k] < 1e-280 || rv[k + 1] < 1e-280) continue;
    slopes.push_back(std::log2(rv[k] / rv[k + 1]));
  }
  if (slopes.size() < 3) return std::nullopt;
  std::sort(slopes.begin(), slopes.end());
  const double med = slopes[slopes.size() / 2];
  const int v = static_cast<int>(std::lround(med));
  if (std::fabs(med - v) > 0.25 || v < 0) return std::nullopt;
  return v;
}

FeatureCounts caustic_counts(const CausticFrame& frame, double t1, double t2, const Window& w,
                             const ContourOptions& copts) {
  return lagrange_caustic_section(frame, t1, t2, w, copts).diagram.counts;
}

double model_stratum_distance(StratumId s, double a, double b, double c) {
  if (s == StratumId::SharksfinAxis || s == StratumId::DeltoidAxis) return std::hypot(a, b);
  const double r = implicit_residual(s, a, b, c);
  const double h = 1e-6 * std::max({1.0, std::fabs(a), std::fabs(b), std::fabs(c)});
  const double gx = (implicit_residual(s, a + h, b, c) - implicit_residual(s, a - h, b, c)) / (2 * h);
  const double gy = (implicit_residual(s, a, b + h, c) - implicit_residual(s, a, b - h, c)) / (2 * h);
  const double gz = (implicit_residual(s, a, b, c + h) - implicit_residual(s, a, b, c - h)) / (2 * h);
  return std::fabs(r) / std::max(std::sqrt(gx * gx + gy * gy + gz * gz), 1e-12);
}

}  // namespace

const char* curve_label_name(CurveLabel label) {
  switch (label) {
    case CurveLabel::Parabolic: return "parabolic";
    case CurveLabel::Flecnodal: return "flecnodal";
    case CurveLabel::DoublePoint: return "double_point";
    case CurveLabel::Other: return "other";
  }
  return "other";
}

CrosscapFamily CrosscapFamily::typical(int order) {
  if (order < 3) throw std::invalid_argument("CrosscapFamily::typical: order must be >= 3");
  CrosscapFamily cf;
  cf.g0 = Jet<double>(order);
  cf.g1 = Jet<double>(order);
  cf.phi0 = Jet<double>(order);
  cf.phi1 = Jet<double>(order);
  cf.phi0.set(0, 3, 1.0);
  return cf;
}

void validate_crosscap_family(const CrosscapFamily& cf) {
  const Jet<double>* parts[4] = {&cf.g0, &cf.g1, &cf.phi0, &cf.phi1};
  const char* names[4] = {"g0", "g1", "phi0", "phi1"};
  for (int k = 0; k < 4; ++k) {
    const Jet<double>& f = *parts[k];
    if (f.order() < 3)
      throw std::invalid_argument(std::string("crosscap family: jet order of ") + names[k] +
                                  " too low");
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; i + j <= 2; ++j)
        if (f.coeff(i, j) != 0.0)
          throw std::invalid_argument(std::string("crosscap family: 2-jet of ") + names[k] +
                                      " must vanish");
  }
  for (int i = 0; i <= cf.g0.order(); ++i)
    for (int j = 1; i + j <= cf.g0.order(); ++j)
      if (cf.g0.coeff(i, j) != 0.0)
        throw std::invalid_argument("crosscap family: g at t = 0 must not depend on y");
  if (!std::isfinite(cf.alpha_slope))
    throw std::invalid_argument("crosscap family: alpha slope must be finite");
}

MapGerm<double> projection_germ(const CrosscapFamily& cf, double v, double w, double t) {
  validate_crosscap_family(cf);
  const int n = std::min(std::min(cf.g0.order(), cf.g1.order()),
                         std::min(cf.phi0.order(), cf.phi1.order()));
  const Jet<double> x = Jet<double>::variable(0, n), y = Jet<double>::variable(1, n);
  Jet<double> f1 = x * y - v * y + family_g(cf, t).truncated(n);
  Jet<double> f2 = x * x + (cf.alpha_slope * t) * (y * y) - w * y + family_phi(cf, t).truncated(n);
  return MapGerm<double>(std::move(f1), std::move(f2));
}

std::pair<PlaneCurveGerm, PlaneCurveGerm> characteristic_curves(const CrosscapFamily& cf,
                                                                double t) {
  validate_crosscap_family(cf);
  const int n = std::min(std::min(cf.g0.order(), cf.g1.order()),
                         std::min(cf.phi0.order(), cf.phi1.order()));
  const Jet<double> x = Jet<double>::variable(0, n), y = Jet<double>::variable(1, n);
  const Jet<double> g = family_g(cf, t).truncated(n);
  const Jet<double> phi = family_phi(cf, t).truncated(n);
  const double ta = cf.alpha_slope * t;

  // Jacobian entries of the projection with the view direction (v, w) kept
  // formal: J11 = y + g_x, J12 = x - v + g_y, J21 = 2x + phi_x,
  // J22 = 2 ta y - w + phi_y. lambda = J11 J22 - J12 J21 is affine in (v, w):
  //   lambda = lam0 + v J21 - w J11.
  const Jet<double> j11 = y + partial(g, 0);
  const Jet<double> j12_0 = x + partial(g, 1);  // at v = 0
  const Jet<double> j21 = 2.0 * x + partial(phi, 0);
  const Jet<double> j22_0 = (2.0 * ta) * y + partial(phi, 1);  // at w = 0
  const Jet<double> lam0 = j11 * j22_0 - j12_0 * j21;

  // Parabolic curve: lambda = lambda_x = lambda_y = 0 must admit a view
  // direction, i.e. the 3x3 matrix of (v, w, 1)-coefficients is singular.
  Jet<double> pdet = jet_det({{j21, -j11, lam0},
                              {partial(j21, 0), -partial(j11, 0), partial(lam0, 0)},
                              {partial(j21, 1), -partial(j11, 1), partial(lam0, 1)}});
  const double pc = pdet.coeff(2, 0);
  if (std::fabs(pc) <= kTrimZero * jet_scale(pdet))
    throw std::runtime_error(
        "characteristic_curves: parabolic elimination degenerates (no x^2 term)");
  PlaneCurveGerm parabolic{jet_divide_scalar(pdet, pc), CurveLabel::Parabolic};

  // Flecnodal curve: lambda = eta lambda = eta^2 lambda = 0 with the kernel
  // field eta = (J12, -J11). The w-elimination is exact only when the w
  // column is proportional to y throughout, which needs g = 0.
  if (max_abs_coeff(cf.g0) > 0.0 || max_abs_coeff(cf.g1) > 0.0)
    throw std::runtime_error(
        "characteristic_curves: flecnodal elimination degenerates for families with nonzero g");

  // With g = 0: lambda = lam0 - w y, eta = (x - v, -y); substituting
  // w = lam0 / y turns the two remaining conditions into polynomials in v:
  //   P2 = lam0 + eta lam0,  P3 = eta(eta lam0) - lam0.
  const VPoly xm_v = {x, -Jet<double>::constant(1.0, n)};  // x - v
  auto eta_apply = [&](const VPoly& a) {
    return vp_sub(vp_mul(xm_v, vp_partial(a, 0)), vp_mul({y}, vp_partial(a, 1)));
  };
  const VPoly lam0_v = {lam0, j21};  // lam0 + v J21 with g = 0
  const VPoly eta_lam = eta_apply(lam0_v);
  const VPoly p2 = vp_add(lam0_v, eta_lam);
  const VPoly p3 = vp_sub(eta_apply(eta_lam), lam0_v);
  Jet<double> elim = vp_resultant(p2, p3);

  // The eliminant vanishes to second order along {y = 0}, where the kernel
  // field degenerates and both root branches collide; strip that factor.
  auto stripped = jet_divide_y_pow(elim, 2);
  if (!stripped)
    throw std::runtime_error(
        "characteristic_curves: flecnodal eliminant lacks the structural y^2 factor");
  const double fcoef = stripped->coeff(2, 1);
  if (std::fabs(fcoef) <= kTrimZero * jet_scale(*stripped))
    throw std::runtime_error(
        "characteristic_curves: flecnodal elimination degenerates (no x^2 y term)");
  PlaneCurveGerm flecnodal{jet_divide_scalar(*stripped, fcoef / 4.0), CurveLabel::Flecnodal};
  return {std::move(parabolic), std::move(flecnodal)};
}

std::vector<BranchContact> contact_order(const PlaneCurveGerm& c1, const PlaneCurveGerm& c2,
                                         PairingRule rule) {
  (void)rule;  // single rule today
  for (const PlaneCurveGerm* c : {&c1, &c2}) {
    if (max_abs_coeff(c->poly) == 0.0)
      throw std::invalid_argument("contact_order: zero curve germ");
    if (std::fabs(c->poly.coeff(0, 0)) > kTrimZero * jet_scale(c->poly))
      throw std::invalid_argument("contact_order: curve germ must pass through the origin");
  }
  const int order = std::min(c1.poly.order(), c2.poly.order());

  for (int axis = 0; axis < 2; ++axis) {
    bool degenerate_a = false, degenerate_b = false;
    std::vector<GraphBranch> ba = graph_branches(c1.poly, axis, degenerate_a);
    std::vector<GraphBranch> bb = graph_branches(c2.poly, axis, degenerate_b);
    if (ba.empty() || bb.empty()) continue;
    // Pair by nearest tangent, greedily over all pairs.
    struct Cand {
      double d;
      size_t i, j;
    };
    std::vector<Cand> cands;
    for (size_t i = 0; i < ba.size(); ++i)
      for (size_t j = 0; j < bb.size(); ++j)
        cands.push_back({std::fabs(ba[i].tangent - bb[j].tangent), i, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
    std::vector<bool> ua(ba.size(), false), ub(bb.size(), false);
    std::vector<BranchContact> out;
    for (const Cand& c : cands) {
      if (ua[c.i] || ub[c.j]) continue;
      ua[c.i] = true;
      ub[c.j] = true;
      BranchContact bc;
      bc.tangent_a = ba[c.i].tangent;
      bc.tangent_b = bb[c.j].tangent;
      bc.axis = axis;
      double s = 1.0;
      for (int k = 0; k <= order; ++k)
        s = std::max({s, std::fabs(ba[c.i].s[k]), std::fabs(bb[c.j].s[k])});
      bc.order = order;
      bc.at_least = true;
      for (int k = 1; k <= order; ++k)
        if (std::fabs(ba[c.i].s[k] - bb[c.j].s[k]) > kSeriesZero * s) {
          bc.order = k;
          bc.at_least = false;
          break;
        }
      out.push_back(bc);
    }
    if (!out.empty()) return out;
  }

  // Not graphs in either orientation: fall back to the total intersection
  // multiplicity from the resultant valuation.
  BranchContact bc;
  bc.tangent_a = bc.tangent_b = std::numeric_limits<double>::quiet_NaN();
  bc.via_resultant = true;
  auto val = resultant_valuation(c1.poly, c2.poly);
  if (!val || *val > order) {
    bc.order = order;
    bc.at_least = true;
  } else {
    bc.order = *val;
  }
  return {bc};
}

CausticSection lagrange_caustic_section(const CausticFrame& frame, double t1, double t2,
                                        const Window& window, const ContourOptions& opts) {
  if (window.empty() || window.resolution < 32)
    throw std::invalid_argument("lagrange_caustic_section: invalid window");
  const double ymax = std::max(std::fabs(window.y0), std::fabs(window.y1));
  if (std::fabs(frame.a2) * ymax + std::fabs(frame.b2) * ymax * ymax >= 1.0)
    throw std::domain_error(
        "lagrange_caustic_section: slice not transverse over the window (reduction denominator "
        "can vanish)");
  const int n = kDefaultJetOrder;
  const Jet<double> x = Jet<double>::variable(0, n), y = Jet<double>::variable(1, n);
  const Jet<double> num = x * x + y * y * y + t1 * y + t2 * (y * y) +
                          (x * (y * y)) * (Jet<double>::constant(frame.a1, n) + frame.b1 * y);
  const Jet<double> den = Jet<double>::constant(1.0, n) - frame.a2 * y - frame.b2 * (y * y);
  Jet<double> mu2 = num * reciprocal(den);
  mu2.set(0, 0, 0.0);  // exact zero at the origin by construction
  MapGerm<double> xi(x * y, std::move(mu2));
  ContourDiagram diagram = apparent_contour(xi, window, opts);
  return CausticSection{t1, t2, std::move(xi), std::move(diagram)};
}

SweepResult perestroika_sweep(const CausticFrame& frame,
                              const std::vector<std::array<double, 2>>& path,
                              const Window& window, const SweepOptions& opts) {
  if (path.size() < 2) throw std::invalid_argument("perestroika_sweep: path needs >= 2 points");
  if (opts.frames < 2) throw std::invalid_argument("perestroika_sweep: frames must be >= 2");
  if (!(opts.locate_tol > 0.0) || !(opts.membership_delta > 0.0))
    throw std::invalid_argument("perestroika_sweep: tolerances must be positive");

  // Arc-length parametrization of the polyline on [0, 1].
  std::vector<double> cum(path.size(), 0.0);
  for (size_t k = 1; k < path.size(); ++k)
    cum[k] = cum[k - 1] + std::hypot(path[k][0] - path[k - 1][0], path[k][1] - path[k - 1][1]);
  const double total = cum.back();
  if (!(total > 0.0)) throw std::invalid_argument("perestroika_sweep: path has zero length");
  auto at = [&](double s) -> std::array<double, 2> {
    const double target = std::clamp(s, 0.0, 1.0) * total;
    size_t k = 1;
    while (k + 1 < path.size() && cum[k] < target) ++k;
    const double seg = cum[k] - cum[k - 1];
    const double u = seg > 0.0 ? (target - cum[k - 1]) / seg : 0.0;
    return {path[k - 1][0] + u * (path[k][0] - path[k - 1][0]),
            path[k - 1][1] + u * (path[k][1] - path[k - 1][1])};
  };

  SweepResult out;
  const int nf = opts.frames;
  out.s.resize(nf);
  out.t.resize(nf);
  out.counts.resize(nf);
  out.diagrams.resize(nf);
  for (int i = 0; i < nf; ++i) {
    out.s[i] = static_cast<double>(i) / (nf - 1);
    out.t[i] = at(out.s[i]);
  }

  std::exception_ptr first_error;
  if (opts.parallel) {
    ContourOptions inner = opts.contour;
    inner.parallel = false;  // frames own the parallelism; keep kernels serial
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < nf; ++i) {
      try {
        CausticSection sec = lagrange_caustic_section(frame, out.t[i][0], out.t[i][1], window, inner);
        out.counts[i] = sec.diagram.counts;
        out.diagrams[i] = std::move(sec.diagram);
      } catch (...) {
#pragma omp critical
        if (!first_error) first_error = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < nf; ++i) {
      CausticSection sec =
          lagrange_caustic_section(frame, out.t[i][0], out.t[i][1], window, opts.contour);
      out.counts[i] = sec.diagram.counts;
      out.diagrams[i] = std::move(sec.diagram);
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  for (int i = 0; i + 1 < nf; ++i) {
    if (out.counts[i] == out.counts[i + 1]) continue;
    // Bisect the gap. A probe matching neither bracket exposes an extra
    // regime inside the gap (another wall, or a detector sub-step within a
    // cell of a wall): split there and bisect each part, up to a small
    // fragmentation budget.
    struct Gap {
      double lo, hi;
      FeatureCounts cl, cr;
    };
    std::vector<Gap> gaps{{out.s[i], out.s[i + 1], out.counts[i], out.counts[i + 1]}};
    int splits = 0;
    while (!gaps.empty()) {
      Gap g = gaps.back();
      gaps.pop_back();
      while (g.hi - g.lo > opts.locate_tol) {
        const double mid = 0.5 * (g.lo + g.hi);
        const auto tm = at(mid);
        const FeatureCounts cm = caustic_counts(frame, tm[0], tm[1], window, opts.contour);
        if (cm == g.cl) {
          g.lo = mid;
        } else if (cm == g.cr) {
          g.hi = mid;
        } else {
          if (++splits > 4)
            throw std::runtime_error(
                "perestroika_sweep: counts fragment between frames near s = " +
                std::to_string(mid) + "; increase SweepOptions::frames");
          gaps.push_back({mid, g.hi, cm, g.cr});
          g.hi = mid;
          g.cr = cm;
        }
      }
      SweepCrossing cr;
      cr.s = 0.5 * (g.lo + g.hi);
      cr.t = at(cr.s);
      cr.before = g.cl;
      cr.after = g.cr;
      cr.stratum =
          stratum_within(UnfoldingId::I23, {0.0, cr.t[0], cr.t[1]}, opts.membership_delta);
      cr.model_distance = cr.stratum
                              ? model_stratum_distance(*cr.stratum, 0.0, cr.t[0], cr.t[1])
                              : std::numeric_limits<double>::quiet_NaN();
      out.crossings.push_back(std::move(cr));
    }
  }
  std::sort(out.crossings.begin(), out.crossings.end(),
            [](const SweepCrossing& a, const SweepCrossing& b) { return a.s < b.s; });
  return out;
}

}  // namespace germlab
