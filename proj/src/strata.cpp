#include "germlab/strata.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "germlab/numerics.hpp"

namespace germlab {

namespace {

void require_sign(int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("stratum sign must be +1 or -1");
}

void require_internal(const std::vector<double>& v, std::size_t n, const char* chart) {
  if (v.size() != n) {
    std::ostringstream os;
    os << chart << ": expected " << n << " internal coordinate(s), got " << v.size();
    throw std::invalid_argument(os.str());
  }
}

[[noreturn]] void domain_fail(const char* chart, const char* cond) {
  std::ostringstream os;
  os << chart << ": internal coordinates outside chart domain (" << cond << ")";
  throw std::domain_error(os.str());
}

int sgn(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

double param_scale(const std::vector<double>& params) {
  double s = 1.0;
  for (double p : params) s = std::max(s, std::fabs(p));
  return s;
}

// lambda, eta lambda, eta^2 lambda, eta^3 lambda of the member germ at a
// source point, computed on the recentred germ with the pointwise kernel
// field. The unfoldings are polynomial of degree <= 5, so an order-6 recentred
// jet carries every coefficient the chain of constants needs exactly.
struct TowerVals {
  double lam = 0, e1 = 0, e2 = 0, e3 = 0;
};

TowerVals tower_at(UnfoldingId u, const std::vector<double>& params, double x, double y) {
  const MapGerm<double> g = unfolding_germ_at(u, params, x, y, 6);
  const std::array<Jet<double>, 2> eta = kernel_field(g);
  Jet<double> t = jacobian_jet(g);
  TowerVals v;
  v.lam = t.coeff(0, 0);
  t = apply_field(eta, t);
  v.e1 = t.coeff(0, 0);
  t = apply_field(eta, t);
  v.e2 = t.coeff(0, 0);
  t = apply_field(eta, t);
  v.e3 = t.coeff(0, 0);
  return v;
}

LocatedPoint classify_at(UnfoldingId u, const std::vector<double>& params, double x, double y,
                         double residual) {
  const MapGerm<double> g = unfolding_germ_at(u, params, x, y, 7);
  LocatedPoint out;
  out.xy = {x, y};
  out.cls = classify(g).cls;
  out.newton_residual = residual;
  return out;
}

// Two plain Newton steps past the convergence test to land on the
// floating-point fixed point; keeps the best (smallest-residual) iterate.
void polish(int n, VecN& z, const std::function<void(const VecN&, VecN&)>& eval,
            const std::function<void(const VecN&, VecN&)>& jac, double* residual) {
  VecN f(n), J(n * n), best = z;
  auto res_at = [&](const VecN& p) {
    eval(p, f);
    double r = 0.0;
    for (double v : f) r = std::max(r, std::fabs(v));
    return r;
  };
  double best_r = res_at(z);
  for (int it = 0; it < 2; ++it) {
    eval(z, f);
    jac(z, J);
    VecN step = f;
    if (!lin_solve(J, step, n)) break;
    for (int k = 0; k < n; ++k) z[k] -= step[k];
    const double r = res_at(z);
    if (r < best_r) {
      best_r = r;
      best = z;
    }
  }
  z = best;
  if (residual) *residual = best_r;
}

[[noreturn]] void newton_fail(const char* what, double residual) {
  std::ostringstream os;
  os << what << ": Newton iteration did not converge (residual " << residual << ")";
  throw std::runtime_error(os.str());
}

void check_small(const char* what, double value, double tol) {
  if (std::fabs(value) > tol) {
    std::ostringstream os;
    os << what << ": located point fails the stratum equations (" << value << " vs tolerance "
       << tol << ")";
    throw std::runtime_error(os.str());
  }
}

// Exact Gaussian elimination for the rational normal equations of the series
// fit (a dozen unknowns at most, exactness beats pivoting concerns).
bool rational_lin_solve(std::vector<Rational>& A, std::vector<Rational>& rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (A[r * n + col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return false;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(A[col * n + k], A[piv * n + k]);
      std::swap(rhs[col], rhs[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      if (A[r * n + col] == 0) continue;
      const Rational m = A[r * n + col] / A[col * n + col];
      for (int k = col; k < n; ++k) A[r * n + k] -= m * A[col * n + k];
      rhs[r] -= m * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    Rational acc = rhs[r];
    for (int k = r + 1; k < n; ++k) acc -= A[r * n + k] * rhs[k];
    rhs[r] = acc / A[r * n + r];
  }
  return true;
}

// Samples a closed-form branch t -> (a, b) and appends the maximal in-window
// runs as separate curves. A coarse pass brackets the visible part first so
// the full resolution is spent inside the window.
void emit_branch(SectionSlice& out, const Window& win, int resolution, StratumId s, int sign,
                 double t0, double t1, const std::function<std::optional<Vec2>(double)>& ab) {
  if (!(t1 > t0)) return;
  const double margin = 0.15 * std::max(win.width(), win.height());
  const int coarse = std::max(4 * resolution, 1024);
  double lo = t1, hi = t0;
  for (int k = 0; k <= coarse; ++k) {
    const double t = t0 + (t1 - t0) * k / coarse;
    const std::optional<Vec2> p = ab(t);
    if (p && win.contains(*p, margin)) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (!(hi > lo)) return;
  const double pad = (t1 - t0) / coarse;
  lo = std::max(t0, lo - pad);
  hi = std::min(t1, hi + pad);

  SectionCurve cur{s, sign, {}, {}};
  auto flush = [&] {
    if (cur.ab.size() >= 2) out.curves.push_back(cur);
    cur.ab.clear();
    cur.internal.clear();
  };
  for (int k = 0; k < resolution; ++k) {
    const double t = lo + (hi - lo) * k / (resolution - 1);
    const std::optional<Vec2> p = ab(t);
    if (p && win.contains(*p, margin)) {
      cur.ab.push_back(*p);
      cur.internal.push_back(t);
    } else {
      flush();
    }
  }
  flush();
}

void emit_mark(SectionSlice& out, const Window& win, StratumId s, int sign, Vec2 ab) {
  if (win.contains(ab)) out.marks.push_back({s, sign, ab});
}

}  // namespace

const char* stratum_name(StratumId s) {
  switch (s) {
    case StratumId::BeaksLips: return "beaks_lips";
    case StratumId::Goose: return "goose";
    case StratumId::Swallowtail: return "swallowtail";
    case StratumId::Butterfly: return "butterfly";
    case StratumId::CuspFold: return "cusp_fold";
    case StratumId::SharksfinAxis: return "sharksfin_axis";
    case StratumId::DeltoidAxis: return "deltoid_axis";
    case StratumId::Tacnode: return "tacnode";
    case StratumId::Gulls: return "gulls";
    case StratumId::BeaksLines: return "beaks_lines";
  }
  return "?";
}

std::optional<StratumId> stratum_from_name(const std::string& name) {
  static const std::pair<const char*, StratumId> table[] = {
      {"beaks_lips", StratumId::BeaksLips},   {"goose", StratumId::Goose},
      {"swallowtail", StratumId::Swallowtail}, {"butterfly", StratumId::Butterfly},
      {"cusp_fold", StratumId::CuspFold},     {"sharksfin_axis", StratumId::SharksfinAxis},
      {"deltoid_axis", StratumId::DeltoidAxis}, {"tacnode", StratumId::Tacnode},
      {"gulls", StratumId::Gulls},            {"beaks_lines", StratumId::BeaksLines},
  };
  for (const auto& [n, id] : table)
    if (name == n) return id;
  return std::nullopt;
}

StratumPoint parametrize_stratum(UnfoldingId u, StratumId s, int sign,
                                 const std::vector<double>& internal,
                                 const StratumOptions& opts) {
  require_sign(sign);
  StratumPoint out;
  out.u = u;
  out.s = s;
  out.sign = sign;
  out.internal = internal;

  switch (u) {
    case UnfoldingId::I23:
      switch (s) {
        case StratumId::BeaksLips: {
          require_internal(internal, 2, "i23 beaks_lips");
          const double y = internal[0], c = internal[1];
          if (c + 3 * y < 0) domain_fail("i23 beaks_lips", "c + 3y >= 0");
          out.params = {sign * 4 * y * std::sqrt(c + 3 * y), -y * (4 * c + 9 * y), c};
          return out;
        }
        case StratumId::Goose: {
          require_internal(internal, 1, "i23 goose");
          const double c = internal[0];
          if (!(c > 0)) domain_fail("i23 goose", "c > 0");
          out.params = {sign * 8.0 / (9.0 * std::sqrt(3.0)) * c * std::sqrt(c), 4 * c * c / 9,
                        c};
          return out;
        }
        case StratumId::Swallowtail: {
          require_internal(internal, 2, "i23 swallowtail");
          const double y = internal[0], c = internal[1];
          if (!(c + 4 * y > 0)) domain_fail("i23 swallowtail", "c + 4y > 0");
          out.params = {sign * y * (4 * c + 15 * y) / std::sqrt(c + 4 * y),
                        -2 * y * (2 * c + 5 * y), c};
          return out;
        }
        case StratumId::Butterfly: {
          require_internal(internal, 1, "i23 butterfly");
          const double c = internal[0];
          if (!(c > 0)) domain_fail("i23 butterfly", "c > 0");
          out.params = {sign * c * std::sqrt(c / 5.0), 2 * c * c / 5, c};
          return out;
        }
        case StratumId::CuspFold: {
          require_internal(internal, 2, "i23 cusp_fold");
          const double y = internal[0], c = internal[1];
          if (!(y < 0)) domain_fail("i23 cusp_fold", "y < 0");
          const double half = opts.verbatim_cusp_fold ? 1.0 : 0.5;
          out.params = {sign * half * std::sqrt(-y) * (3 * c + 5 * y),
                        0.25 * (c * c - 6 * c * y - 15 * y * y), c};
          return out;
        }
        case StratumId::SharksfinAxis: {
          require_internal(internal, 1, "i23 sharksfin_axis");
          const double c = internal[0];
          if (!(c > 0)) domain_fail("i23 sharksfin_axis", "c > 0");
          out.params = {0.0, 0.0, c};
          return out;
        }
        case StratumId::DeltoidAxis: {
          require_internal(internal, 1, "i23 deltoid_axis");
          const double c = internal[0];
          if (!(c < 0)) domain_fail("i23 deltoid_axis", "c < 0");
          out.params = {0.0, 0.0, c};
          return out;
        }
        default: break;
      }
      break;

    case UnfoldingId::Sharksfin:
      switch (s) {
        case StratumId::BeaksLines: {
          require_internal(internal, 1, "sharksfin beaks_lines");
          const double t = internal[0];
          out.params = sign > 0 ? std::vector<double>{0.0, t} : std::vector<double>{t, 0.0};
          return out;
        }
        case StratumId::Swallowtail: {
          require_internal(internal, 1, "sharksfin swallowtail");
          const double t = internal[0];
          const double v = std::pow(t, 4) / 16 + 3 * std::pow(t, 9) / 32;
          out.params = sign > 0 ? std::vector<double>{v, t} : std::vector<double>{t, v};
          return out;
        }
        default: break;
      }
      break;

    case UnfoldingId::OddSharksfin:
      switch (s) {
        case StratumId::BeaksLines: {
          require_internal(internal, 2, "odd-sharksfin beaks_lines");
          const double t = internal[0], c = internal[1];
          out.params =
              sign > 0 ? std::vector<double>{0.0, t, c} : std::vector<double>{t, 0.0, c};
          return out;
        }
        case StratumId::Tacnode: {
          require_internal(internal, 2, "odd-sharksfin tacnode");
          const double b = internal[0], c = internal[1];
          if (!(c < 0)) domain_fail("odd-sharksfin tacnode", "c < 0");
          out.params = {c * c / 4, b, c};
          return out;
        }
        case StratumId::Gulls: {
          require_internal(internal, 1, "odd-sharksfin gulls");
          out.params = {0.0, internal[0], 0.0};
          return out;
        }
        case StratumId::Swallowtail:
          throw std::invalid_argument(
              "odd-sharksfin swallowtail has no closed-form chart; trace it with "
              "trace_oss_swallowtail_in_c");
        default: break;
      }
      break;
  }
  std::ostringstream os;
  os << "stratum " << stratum_name(s) << " does not belong to the " << unfolding_name(u)
     << " diagram";
  throw std::invalid_argument(os.str());
}

ExactParams exact_beaks_lips(const Rational& y, const Rational& c, int sign) {
  require_sign(sign);
  const Rational d = c + 3 * y;
  if (d < 0) domain_fail("exact_beaks_lips", "c + 3y >= 0");
  ExactParams p;
  p.a_sq = 16 * y * y * d;
  p.a_sign = (y == 0 || d == 0) ? 0 : sign * sgn(y);
  p.b = -y * (4 * c + 9 * y);
  p.c = c;
  return p;
}

ExactParams exact_goose(const Rational& c, int sign) {
  require_sign(sign);
  if (!(c > 0)) domain_fail("exact_goose", "c > 0");
  ExactParams p;
  p.a_sq = Rational(64, 243) * c * c * c;
  p.a_sign = sign;
  p.b = Rational(4, 9) * c * c;
  p.c = c;
  return p;
}

ExactParams exact_swallowtail(const Rational& y, const Rational& c, int sign) {
  require_sign(sign);
  const Rational d = c + 4 * y;
  if (!(d > 0)) domain_fail("exact_swallowtail", "c + 4y > 0");
  const Rational w = 4 * c + 15 * y;
  ExactParams p;
  p.a_sq = y * y * w * w / d;
  p.a_sign = (y == 0 || w == 0) ? 0 : sign * sgn(y) * sgn(w);
  p.b = -2 * y * (2 * c + 5 * y);
  p.c = c;
  return p;
}

ExactParams exact_butterfly(const Rational& c, int sign) {
  require_sign(sign);
  if (!(c > 0)) domain_fail("exact_butterfly", "c > 0");
  ExactParams p;
  p.a_sq = c * c * c / 5;
  p.a_sign = sign;
  p.b = Rational(2, 5) * c * c;
  p.c = c;
  return p;
}

ExactParams exact_cusp_fold(const Rational& y, const Rational& c, int sign, bool verbatim_form) {
  require_sign(sign);
  if (!(y < 0)) domain_fail("exact_cusp_fold", "y < 0");
  const Rational w = 3 * c + 5 * y;
  ExactParams p;
  p.a_sq = (-y) * w * w;
  if (!verbatim_form) p.a_sq /= 4;
  p.a_sign = (w == 0) ? 0 : sign * sgn(w);
  p.b = (c * c - 6 * c * y - 15 * y * y) / 4;
  p.c = c;
  return p;
}

Rational implicit_residual_sq(StratumId s, const Rational& a_sq, const Rational& b,
                              const Rational& c) {
  const Rational& A = a_sq;
  switch (s) {
    case StratumId::BeaksLips:
      return 243 * A * A + (256 * c * c * c - 864 * b * c) * A + 768 * b * b * b -
             256 * b * b * c * c;
    case StratumId::Swallowtail:
      return 80 * A * A * (8 * b - 3 * c * c) -
             8 * A *
                 (285 * b * b * c - 192 * b * c * c * c + 32 * c * c * c * c * c) +
             b * b * (45 * b - 16 * c * c) * (45 * b - 16 * c * c);
    case StratumId::CuspFold: {
      const Rational c2 = c * c, c3 = c2 * c, b2 = b * b;
      const Rational c4 = c2 * c2;
      return 18225 * A * A * A * A + 14580 * A * A * A * c3 -
             54 * A * A * (1275 * b2 * c2 - 49 * c4 * c2) +
             108 * A * (500 * b2 * b2 * c - 15 * b2 * c4 * c - c4 * c4 * c) -
             (16 * b2 - c4) * (c4 - 25 * b2) * (c4 - 25 * b2);
    }
    default:
      break;
  }
  std::ostringstream os;
  os << "stratum " << stratum_name(s) << " has no implicit defining polynomial";
  throw std::invalid_argument(os.str());
}

double implicit_residual(StratumId s, double a, double b, double c) {
  const double A = a * a;
  switch (s) {
    case StratumId::BeaksLips:
      return 243 * A * A + (256 * c * c * c - 864 * b * c) * A + 768 * b * b * b -
             256 * b * b * c * c;
    case StratumId::Swallowtail:
      return 80 * A * A * (8 * b - 3 * c * c) -
             8 * A * (285 * b * b * c - 192 * b * std::pow(c, 3) + 32 * std::pow(c, 5)) +
             b * b * (45 * b - 16 * c * c) * (45 * b - 16 * c * c);
    case StratumId::CuspFold: {
      const double c4 = std::pow(c, 4), b2 = b * b;
      return 18225 * std::pow(A, 4) + 14580 * std::pow(A, 3) * std::pow(c, 3) -
             54 * A * A * (1275 * b2 * c * c - 49 * std::pow(c, 6)) +
             108 * A * (500 * b2 * b2 * c - 15 * b2 * std::pow(c, 5) - std::pow(c, 9)) -
             (16 * b2 - c4) * (c4 - 25 * b2) * (c4 - 25 * b2);
    }
    default:
      break;
  }
  std::ostringstream os;
  os << "stratum " << stratum_name(s) << " has no implicit defining polynomial";
  throw std::invalid_argument(os.str());
}

ExactCuspFoldWitness exact_cusp_fold_witness(const Rational& r, const Rational& c, int sign) {
  require_sign(sign);
  if (!(r > 0)) domain_fail("exact_cusp_fold_witness", "r > 0");
  const Rational s(sign);
  ExactCuspFoldWitness w;
  w.x = -s * r * (c - 3 * r * r) / 2;
  w.y = -r * r;
  w.X = -s * r * r * r;
  w.Y = (3 * r * r - c) / 2;
  w.a = s * r * (3 * c - 5 * r * r) / 2;
  w.b = (c * c + 6 * c * r * r - 15 * r * r * r * r) / 4;
  w.c = c;
  return w;
}

template <class S>
std::array<Jet<S>, 4> i23_lambda_tower(const std::vector<S>& abc, int order) {
  if (order < 3) throw std::invalid_argument("i23_lambda_tower: order must be >= 3");
  const int n = order + 3;
  const MapGerm<S> f = unfolding_germ(UnfoldingId::I23, abc, n + 1);
  const std::array<Jet<S>, 2> eta{-Jet<S>::variable(0, n), Jet<S>::variable(1, n)};
  std::array<Jet<S>, 4> tower{Jet<S>(order), Jet<S>(order), Jet<S>(order), Jet<S>(order)};
  Jet<S> g = jacobian_jet(f);
  tower[0] = g.truncated(order);
  for (int k = 1; k < 4; ++k) {
    g = apply_field(eta, g);
    tower[k] = g.truncated(order);
  }
  return tower;
}

template std::array<Jet<Rational>, 4> i23_lambda_tower<Rational>(const std::vector<Rational>&,
                                                                 int);
template std::array<Jet<double>, 4> i23_lambda_tower<double>(const std::vector<double>&, int);

namespace {

// Analytic I23 helpers (lambda has total degree 3, so these are global).
double i23_lambda(const std::vector<double>& p, double x, double y) {
  return 2 * x * x + p[0] * x - 3 * y * y * y - 2 * p[2] * y * y - p[1] * y;
}
double i23_eta_lambda(const std::vector<double>& p, double x, double y) {
  return -4 * x * x - p[0] * x - 9 * y * y * y - 4 * p[2] * y * y - p[1] * y;
}
double i23_eta2_lambda(const std::vector<double>& p, double x, double y) {
  return 8 * x * x + p[0] * x - 27 * y * y * y - 8 * p[2] * y * y - p[1] * y;
}
double i23_f1(const std::vector<double>& p, double x, double y) {
  return x * x + y * y * y + p[0] * x + p[1] * y + p[2] * y * y;
}

LocateResult locate_i23(const StratumPoint& sp, double newton_tol) {
  const std::vector<double>& P = sp.params;
  const double a = P[0], b = P[1], c = P[2];
  const double S = param_scale(P);
  const double check_tol = 1e-8 * S * S;
  LocateResult out;

  switch (sp.s) {
    case StratumId::BeaksLips:
    case StratumId::Goose: {
      const bool goose = sp.s == StratumId::Goose;
      const double y_seed = goose ? -2 * c / 9 : sp.internal[0];
      VecN z{-a / 4, y_seed};
      auto eval = [&](const VecN& v, VecN& f) {
        f[0] = 4 * v[0] + a;
        f[1] = goose ? (-18 * v[1] - 4 * c) : (-9 * v[1] * v[1] - 4 * c * v[1] - b);
      };
      auto jac = [&](const VecN& v, VecN& J) {
        J = {4, 0, 0, goose ? -18.0 : (-18 * v[1] - 4 * c)};
      };
      double res = 0;
      NewtonReport rep = newton_solve(2, z, eval, jac, newton_tol);
      res = rep.residual;
      if (!rep.converged) polish(2, z, eval, jac, &res);
      if (res > check_tol) newton_fail(goose ? "goose" : "beaks_lips", res);
      check_small("lambda at located critical point", i23_lambda(P, z[0], z[1]), check_tol);
      if (goose)
        check_small("lambda_y at goose point", -9 * z[1] * z[1] - 4 * c * z[1] - b, check_tol);
      out.points.push_back(classify_at(sp.u, P, z[0], z[1], res));
      return out;
    }

    case StratumId::Swallowtail:
    case StratumId::Butterfly: {
      const bool btf = sp.s == StratumId::Butterfly;
      const double y0 = btf ? -c / 5 : sp.internal[0];
      // the butterfly point lies on the swallowtail branch of opposite sign,
      // so its source seed flips the x orientation
      const double x0 = (btf ? sp.sign : -sp.sign) * y0 * std::sqrt(c + 4 * y0);
      VecN z{x0, y0};
      auto eval = [&](const VecN& v, VecN& f) {
        f[0] = i23_eta_lambda(P, v[0], v[1]);
        f[1] = i23_eta2_lambda(P, v[0], v[1]);
      };
      auto jac = [&](const VecN& v, VecN& J) {
        J = {-8 * v[0] - a, -27 * v[1] * v[1] - 8 * c * v[1] - b,
             16 * v[0] + a, -81 * v[1] * v[1] - 16 * c * v[1] - b};
      };
      NewtonReport rep = newton_solve(2, z, eval, jac, newton_tol);
      double res = rep.residual;
      polish(2, z, eval, jac, &res);
      if (res > check_tol) newton_fail(btf ? "butterfly" : "swallowtail", res);
      check_small("lambda at located fold-series point", i23_lambda(P, z[0], z[1]), check_tol);
      out.points.push_back(classify_at(sp.u, P, z[0], z[1], res));
      return out;
    }

    case StratumId::CuspFold: {
      const double y0 = sp.internal[0];
      const double r = std::sqrt(-y0);
      VecN z{-sp.sign * r * (c + 3 * y0) / 2, y0, sp.sign * y0 * r, -(c + 3 * y0) / 2};
      auto eval = [&](const VecN& v, VecN& f) {
        f[0] = i23_lambda(P, v[0], v[1]);
        f[1] = i23_eta_lambda(P, v[0], v[1]);
        f[2] = i23_lambda(P, v[2], v[3]);
        f[3] = v[0] * v[1] - v[2] * v[3];
      };
      auto jac = [&](const VecN& v, VecN& J) {
        J.assign(16, 0.0);
        J[0] = 4 * v[0] + a;
        J[1] = -9 * v[1] * v[1] - 4 * c * v[1] - b;
        J[4] = -8 * v[0] - a;
        J[5] = -27 * v[1] * v[1] - 8 * c * v[1] - b;
        J[10] = 4 * v[2] + a;
        J[11] = -9 * v[3] * v[3] - 4 * c * v[3] - b;
        J[12] = v[1];
        J[13] = v[0];
        J[14] = -v[3];
        J[15] = -v[2];
      };
      NewtonReport rep = newton_solve(4, z, eval, jac, newton_tol);
      double res = rep.residual;
      polish(4, z, eval, jac, &res);
      if (res > check_tol) newton_fail("cusp_fold", res);
      const double df1 = i23_f1(P, z[0], z[1]) - i23_f1(P, z[2], z[3]);
      check_small("f1 target difference of the cusp+fold pair", df1, check_tol);
      MultiGermWitness w;
      w.p = {z[0], z[1]};
      w.q = {z[2], z[3]};
      w.params = P;
      w.residuals = {i23_lambda(P, z[0], z[1]), i23_eta_lambda(P, z[0], z[1]),
                     i23_lambda(P, z[2], z[3]), z[0] * z[1] - z[2] * z[3], df1};
      out.witness = w;
      out.points.push_back(classify_at(sp.u, P, z[0], z[1], res));
      out.points.push_back(classify_at(sp.u, P, z[2], z[3], res));
      return out;
    }

    case StratumId::SharksfinAxis:
    case StratumId::DeltoidAxis:
      out.points.push_back(classify_at(sp.u, P, 0.0, 0.0, 0.0));
      return out;

    default:
      break;
  }
  throw std::invalid_argument("locate_and_classify: chart/unfolding mismatch");
}

// Shared 3x3 solver for the sharksfin-type swallowtail point: unknowns
// (x, y, a) at fixed remaining parameters. The series/seed value of a is only
// a starting guess; re-solving it absorbs the truncation error of the chart.
LocateResult locate_swallowtail_3x3(UnfoldingId u, std::vector<double> P, Vec2 seed_xy,
                                    double newton_tol, const char* what) {
  VecN z{seed_xy.x, seed_xy.y, P[0]};
  auto eval = [&](const VecN& v, VecN& f) {
    std::vector<double> q = P;
    q[0] = v[2];
    const TowerVals t = tower_at(u, q, v[0], v[1]);
    f[0] = t.lam;
    f[1] = t.e1;
    f[2] = t.e2;
  };
  auto jac = [&](const VecN& v, VecN& J) { fd_jacobian(3, 3, v, eval, J); };
  NewtonReport rep = newton_solve(3, z, eval, jac, newton_tol, 60);
  double res = rep.residual;
  polish(3, z, eval, jac, &res);
  const double S = param_scale(P);
  if (res > 1e-8 * S * S) newton_fail(what, res);
  LocateResult out;
  std::vector<double> q = P;
  q[0] = z[2];
  out.points.push_back(classify_at(u, q, z[0], z[1], res));
  return out;
}

LocateResult locate_sharksfin(const StratumPoint& sp, double newton_tol) {
  const std::vector<double>& P = sp.params;
  LocateResult out;
  switch (sp.s) {
    case StratumId::BeaksLines:
      out.points.push_back(classify_at(sp.u, P, 0.0, 0.0, 0.0));
      return out;
    case StratumId::Swallowtail: {
      if (sp.sign < 0) {
        // mirror branch: swap the roles of (x, y) and (a, b) via the symmetry
        // (x, y, a, b) -> (y, x, b, a) of the unfolding
        StratumPoint m = sp;
        m.sign = +1;
        m.params = {P[1], P[0]};
        LocateResult r = locate_sharksfin(m, newton_tol);
        for (LocatedPoint& lp : r.points) std::swap(lp.xy.x, lp.xy.y);
        return r;
      }
      const double t = sp.internal[0];
      const Vec2 seed{-t * t * t / 4 - 17 * std::pow(t, 8) / 64, -t * t / 4 - std::pow(t, 7) / 4};
      return locate_swallowtail_3x3(sp.u, P, seed, newton_tol, "sharksfin swallowtail");
    }
    default:
      break;
  }
  throw std::invalid_argument("locate_and_classify: chart/unfolding mismatch");
}

LocateResult locate_oss(const StratumPoint& sp, std::optional<Vec2> seed, double newton_tol) {
  const std::vector<double>& P = sp.params;
  const double S = param_scale(P);
  const double check_tol = 1e-8 * S * S;
  LocateResult out;
  switch (sp.s) {
    case StratumId::BeaksLines:
    case StratumId::Gulls:
      out.points.push_back(classify_at(sp.u, P, 0.0, 0.0, 0.0));
      return out;

    case StratumId::Tacnode: {
      const double c = P[2];
      const double y0 = std::sqrt(-c / 2);
      std::array<VecN, 2> zs{VecN{0.0, y0}, VecN{0.0, -y0}};
      double res_all = 0.0;
      for (VecN& z : zs) {
        auto eval = [&](const VecN& v, VecN& f) {
          f[0] = 2 * v[0];
          f[1] = 5 * std::pow(v[1], 4) + 3 * c * v[1] * v[1] + P[0];
        };
        auto jac = [&](const VecN& v, VecN& J) {
          J = {2, 0, 0, 20 * v[1] * v[1] * v[1] + 6 * c * v[1]};
        };
        NewtonReport rep = newton_solve(2, z, eval, jac, newton_tol);
        double res = rep.residual;
        polish(2, z, eval, jac, &res);
        if (res > check_tol) newton_fail("tacnode", res);
        res_all = std::max(res_all, res);
      }
      const MapGerm<double> g = unfolding_germ(sp.u, P, 7);
      auto at = [&](const Jet<double>& j, const VecN& z) { return evaluate(j, z[0], z[1]); };
      const Jet<double> lam = jacobian_jet(g);
      const double df1 = at(g.f1(), zs[0]) - at(g.f1(), zs[1]);
      const double df2 = at(g.f2(), zs[0]) - at(g.f2(), zs[1]);
      check_small("f1 target difference of the tacnode pair", df1, check_tol);
      check_small("f2 target difference of the tacnode pair", df2, check_tol);
      MultiGermWitness w;
      w.p = {zs[0][0], zs[0][1]};
      w.q = {zs[1][0], zs[1][1]};
      w.params = P;
      w.residuals = {at(lam, zs[0]), 0.0, at(lam, zs[1]), df2, df1};
      out.witness = w;
      out.points.push_back(classify_at(sp.u, P, zs[0][0], zs[0][1], res_all));
      out.points.push_back(classify_at(sp.u, P, zs[1][0], zs[1][1], res_all));
      return out;
    }

    case StratumId::Swallowtail: {
      if (!seed)
        throw std::invalid_argument(
            "odd-sharksfin swallowtail needs a source-point seed; trace the branch with "
            "trace_oss_swallowtail_in_c");
      return locate_swallowtail_3x3(sp.u, P, *seed, newton_tol, "odd-sharksfin swallowtail");
    }
    default:
      break;
  }
  throw std::invalid_argument("locate_and_classify: chart/unfolding mismatch");
}

}  // namespace

LocateResult locate_and_classify(const StratumPoint& p, std::optional<Vec2> seed,
                                 double newton_tol) {
  if (static_cast<int>(p.params.size()) != unfolding_param_count(p.u))
    throw std::invalid_argument("locate_and_classify: parameter count mismatch");
  switch (p.u) {
    case UnfoldingId::I23: return locate_i23(p, newton_tol);
    case UnfoldingId::Sharksfin: return locate_sharksfin(p, newton_tol);
    case UnfoldingId::OddSharksfin: return locate_oss(p, seed, newton_tol);
  }
  throw std::invalid_argument("locate_and_classify: unknown unfolding");
}

SectionSlice section_curves(UnfoldingId u, double c, const Window& window, int resolution) {
  if (resolution < 16) throw std::invalid_argument("section_curves: resolution must be >= 16");
  if (window.empty()) throw std::invalid_argument("section_curves: empty window");
  SectionSlice out;
  out.u = u;
  out.c = c;
  const double half = std::max(window.width(), window.height());
  const double span = 1.0 + 2.0 * std::fabs(c) + 2.0 * std::sqrt(half);

  switch (u) {
    case UnfoldingId::I23: {
      for (int sign : {+1, -1}) {
        const int sg = sign;
        emit_branch(out, window, resolution, StratumId::BeaksLips, sg,
                    std::max(-c / 3, -span), span, [&, sg](double y) -> std::optional<Vec2> {
                      const double d = c + 3 * y;
                      if (d < 0) return std::nullopt;
                      return Vec2{sg * 4 * y * std::sqrt(d), -y * (4 * c + 9 * y)};
                    });
        emit_branch(out, window, resolution, StratumId::Swallowtail, sg,
                    -c / 4 + 1e-9 * std::max(1.0, std::fabs(c)), span,
                    [&, sg](double y) -> std::optional<Vec2> {
                      const double d = c + 4 * y;
                      if (!(d > 0)) return std::nullopt;
                      return Vec2{sg * y * (4 * c + 15 * y) / std::sqrt(d),
                                  -2 * y * (2 * c + 5 * y)};
                    });
        emit_branch(out, window, resolution, StratumId::CuspFold, sg, -span, -1e-12,
                    [&, sg](double y) -> std::optional<Vec2> {
                      if (!(y < 0)) return std::nullopt;
                      return Vec2{sg * 0.5 * std::sqrt(-y) * (3 * c + 5 * y),
                                  0.25 * (c * c - 6 * c * y - 15 * y * y)};
                    });
      }
      if (c > 0) {
        const double ag = 8.0 / (9.0 * std::sqrt(3.0)) * c * std::sqrt(c);
        const double ab = c * std::sqrt(c / 5.0);
        for (int sign : {+1, -1}) {
          emit_mark(out, window, StratumId::Goose, sign, {sign * ag, 4 * c * c / 9});
          emit_mark(out, window, StratumId::Butterfly, sign, {sign * ab, 2 * c * c / 5});
        }
        emit_mark(out, window, StratumId::SharksfinAxis, +1, {0, 0});
      } else if (c < 0) {
        emit_mark(out, window, StratumId::DeltoidAxis, +1, {0, 0});
      }
      return out;
    }

    case UnfoldingId::Sharksfin: {
      // the (a, b) plane is the entire parameter space; c is ignored
      emit_branch(out, window, resolution, StratumId::BeaksLines, +1, window.y0, window.y1,
                  [](double t) -> std::optional<Vec2> { return Vec2{0.0, t}; });
      emit_branch(out, window, resolution, StratumId::BeaksLines, -1, window.x0, window.x1,
                  [](double t) -> std::optional<Vec2> { return Vec2{t, 0.0}; });
      const double tmax = std::min(1.5 * half, 0.75);  // keep the series chart accurate
      emit_branch(out, window, resolution, StratumId::Swallowtail, +1, -tmax, tmax,
                  [](double t) -> std::optional<Vec2> {
                    return Vec2{std::pow(t, 4) / 16 + 3 * std::pow(t, 9) / 32, t};
                  });
      emit_branch(out, window, resolution, StratumId::Swallowtail, -1, -tmax, tmax,
                  [](double t) -> std::optional<Vec2> {
                    return Vec2{t, std::pow(t, 4) / 16 + 3 * std::pow(t, 9) / 32};
                  });
      emit_mark(out, window, StratumId::SharksfinAxis, +1, {0, 0});
      return out;
    }

    case UnfoldingId::OddSharksfin: {
      const StratumId a_line = (c == 0.0) ? StratumId::Gulls : StratumId::BeaksLines;
      emit_branch(out, window, resolution, a_line, +1, window.y0, window.y1,
                  [](double t) -> std::optional<Vec2> { return Vec2{0.0, t}; });
      emit_branch(out, window, resolution, StratumId::BeaksLines, -1, window.x0, window.x1,
                  [](double t) -> std::optional<Vec2> { return Vec2{t, 0.0}; });
      if (c < 0) {
        const double at = c * c / 4;
        emit_branch(out, window, resolution, StratumId::Tacnode, +1, window.y0, window.y1,
                    [at](double t) -> std::optional<Vec2> { return Vec2{at, t}; });
      }
      if (c != 0.0) emit_mark(out, window, StratumId::SharksfinAxis, +1, {0, 0});
      return out;
    }
  }
  throw std::invalid_argument("section_curves: unknown unfolding");
}

std::optional<StratumId> stratum_within(UnfoldingId u, const std::vector<double>& params,
                                        double delta) {
  if (static_cast<int>(params.size()) != unfolding_param_count(u))
    throw std::invalid_argument("stratum_within: wrong parameter count");
  if (!(delta > 0)) throw std::invalid_argument("stratum_within: delta must be positive");

  double best = std::numeric_limits<double>::infinity();
  std::optional<StratumId> id;
  auto consider = [&](double d, StratumId s) {
    if (d < best) {
      best = d;
      id = s;
    }
  };

  switch (u) {
    case UnfoldingId::I23: {
      const double a = params[0], b = params[1], c = params[2];
      for (StratumId s :
           {StratumId::BeaksLips, StratumId::Swallowtail, StratumId::CuspFold}) {
        const double r = implicit_residual(s, a, b, c);
        const double h = 1e-6 * std::max({1.0, std::fabs(a), std::fabs(b), std::fabs(c)});
        const double gx =
            (implicit_residual(s, a + h, b, c) - implicit_residual(s, a - h, b, c)) / (2 * h);
        const double gy =
            (implicit_residual(s, a, b + h, c) - implicit_residual(s, a, b - h, c)) / (2 * h);
        const double gz =
            (implicit_residual(s, a, b, c + h) - implicit_residual(s, a, b, c - h)) / (2 * h);
        const double gn = std::sqrt(gx * gx + gy * gy + gz * gz);
        consider(std::fabs(r) / std::max(gn, 1e-12), s);
      }
      consider(std::hypot(a, b),
               c >= 0 ? StratumId::SharksfinAxis : StratumId::DeltoidAxis);
      break;
    }
    case UnfoldingId::Sharksfin: {
      const double a = params[0], b = params[1];
      consider(std::fabs(a), StratumId::BeaksLines);
      consider(std::fabs(b), StratumId::BeaksLines);
      auto series = [](double t) { return std::pow(t, 4) / 16 + 3 * std::pow(t, 9) / 32; };
      auto slope = [](double t) { return std::pow(t, 3) / 4 + 27 * std::pow(t, 8) / 32; };
      if (std::fabs(b) <= 0.75)
        consider(std::fabs(a - series(b)) / std::hypot(1.0, slope(b)), StratumId::Swallowtail);
      if (std::fabs(a) <= 0.75)
        consider(std::fabs(b - series(a)) / std::hypot(1.0, slope(a)), StratumId::Swallowtail);
      break;
    }
    case UnfoldingId::OddSharksfin: {
      const double a = params[0], b = params[1], c = params[2];
      consider(std::fabs(a), StratumId::BeaksLines);
      consider(std::fabs(b), StratumId::BeaksLines);
      consider(std::hypot(a, c), StratumId::Gulls);
      if (c < 0)
        consider(std::fabs(4 * a - c * c) / std::sqrt(16 + 4 * c * c), StratumId::Tacnode);
      break;
    }
  }
  return best < delta ? id : std::nullopt;
}

SwallowtailBranch trace_swallowtail_branch(UnfoldingId u, double c, double b_lo, double b_hi,
                                           int n_samples) {
  if (u != UnfoldingId::Sharksfin)
    throw std::invalid_argument(
        "trace_swallowtail_branch covers the sharksfin unfolding; use "
        "trace_oss_swallowtail_in_c for the odd one");
  if (c != 0.0)
    throw std::invalid_argument("the sharksfin unfolding has no c parameter (pass c = 0)");
  if (!(0 < b_lo && b_lo < b_hi) || n_samples < 2)
    throw std::invalid_argument("trace_swallowtail_branch: need 0 < b_lo < b_hi, n >= 2");

  SwallowtailBranch br;
  br.abscissa.resize(n_samples);
  br.a.resize(n_samples);
  br.source.resize(n_samples);

  // walk from b_hi down, warm-starting each solve with the previous solution
  VecN z(3);
  for (int k = n_samples - 1; k >= 0; --k) {
    const double b = b_lo + (b_hi - b_lo) * k / (n_samples - 1);
    if (k == n_samples - 1) {
      z = {-std::pow(b, 3) / 4 - 17 * std::pow(b, 8) / 64, -b * b / 4 - std::pow(b, 7) / 4,
           std::pow(b, 4) / 16 + 3 * std::pow(b, 9) / 32};
    }
    auto eval = [&](const VecN& v, VecN& f) {
      const TowerVals t = tower_at(u, {v[2], b}, v[0], v[1]);
      f[0] = t.lam;
      f[1] = t.e1;
      f[2] = t.e2;
    };
    auto jac = [&](const VecN& v, VecN& J) { fd_jacobian(3, 3, v, eval, J); };
    NewtonReport rep = newton_solve(3, z, eval, jac, 1e-13, 60);
    double res = rep.residual;
    polish(3, z, eval, jac, &res);
    if (res > 1e-9) {
      std::ostringstream os;
      os << "trace_swallowtail_branch: stalled at b = " << b << " (residual " << res << ")";
      throw std::runtime_error(os.str());
    }
    br.abscissa[k] = b;
    br.a[k] = z[2];
    br.source[k] = {z[0], z[1]};
  }
  return br;
}

SwallowtailBranch trace_oss_swallowtail_in_c(double b, double c_lo, double c_hi, int n_samples) {
  if (b == 0.0) throw std::invalid_argument("trace_oss_swallowtail_in_c: b must be nonzero");
  if (!(c_lo < c_hi) || n_samples < 2 || c_lo == 0.0 || c_hi == 0.0 ||
      (c_lo < 0) != (c_hi < 0))
    throw std::invalid_argument(
        "trace_oss_swallowtail_in_c: need nonzero c_lo < c_hi of one sign, n >= 2");

  // the sheet that collapses into the gulls point (x, y, a -> 0 as c -> 0)
  // obeys y = -b^2 c/4, x = -b^3 c^2/4, a = b^4 c^3/16 to leading order; the
  // cubic growth of a realizes its 3-point contact with the plane a = 0
  // along the b-axis. Seed from the window end nearest c = 0, where the
  // leading terms are sharpest, and walk outward with warm starts.
  const bool seed_low = std::fabs(c_lo) <= std::fabs(c_hi);

  SwallowtailBranch br;
  br.abscissa.resize(n_samples);
  br.a.resize(n_samples);
  br.source.resize(n_samples);

  VecN z(3);
  for (int step = 0; step < n_samples; ++step) {
    const int k = seed_low ? step : n_samples - 1 - step;
    const double c = c_lo + (c_hi - c_lo) * k / (n_samples - 1);
    if (step == 0)
      z = {-std::pow(b, 3) * c * c / 4, -b * b * c / 4, std::pow(b, 4) * std::pow(c, 3) / 16};
    auto eval = [&](const VecN& v, VecN& f) {
      const TowerVals t = tower_at(UnfoldingId::OddSharksfin, {v[2], b, c}, v[0], v[1]);
      f[0] = t.lam;
      f[1] = t.e1;
      f[2] = t.e2;
    };
    auto jac = [&](const VecN& v, VecN& J) { fd_jacobian(3, 3, v, eval, J); };
    NewtonReport rep = newton_solve(3, z, eval, jac, 1e-13, 60);
    double res = rep.residual;
    polish(3, z, eval, jac, &res);
    if (res > 1e-9) {
      std::ostringstream os;
      os << "trace_oss_swallowtail_in_c: stalled at c = " << c << " (residual " << res << ")";
      throw std::runtime_error(os.str());
    }
    if (step == 0 && std::fabs(z[1] + b * b * c / 4) > 0.5 * std::fabs(b * b * c / 4))
      throw std::runtime_error(
          "trace_oss_swallowtail_in_c: seed end lies outside the gulls asymptotic regime");
    br.abscissa[k] = c;
    br.a[k] = z[2];
    br.source[k] = {z[0], z[1]};
  }

  // the far end sits at healthy scales: insist it really is a swallowtail
  const int far = seed_low ? n_samples - 1 : 0;
  const MapGerm<double> g = unfolding_germ_at(
      UnfoldingId::OddSharksfin, {br.a[far], b, br.abscissa[far]}, br.source[far].x,
      br.source[far].y, 7);
  const auto far_cls = classify(g).cls;
  if (far_cls.tag != ClassTag::Swallowtail) {
    std::ostringstream os;
    os << "trace_oss_swallowtail_in_c: far endpoint classifies as " << class_name(far_cls.tag);
    throw std::runtime_error(os.str());
  }
  return br;
}

SwallowtailFit series_fit_swallowtail(UnfoldingId u, double b_lo, double b_hi, int n_samples,
                                      int degree) {
  if (u != UnfoldingId::Sharksfin)
    throw std::invalid_argument("series_fit_swallowtail applies to the sharksfin unfolding");
  if (degree < 4 || degree > 16)
    throw std::invalid_argument("series_fit_swallowtail: degree must be in [4, 16]");

  SwallowtailFit fit;
  fit.samples = trace_swallowtail_branch(u, 0.0, b_lo, b_hi, n_samples);
  // guard exponents absorb the first untruncated series orders (the expansion
  // proceeds in steps of five: each neglected term of the three defining
  // equations sits five orders above its leading term)
  fit.guard_exponents = {degree + 5, degree + 10};

  std::vector<int> expo(degree + 1);
  for (int k = 0; k <= degree; ++k) expo[k] = k;
  expo.insert(expo.end(), fit.guard_exponents.begin(), fit.guard_exponents.end());
  const int M = static_cast<int>(expo.size());
  const int emax = expo.back();

  std::vector<Rational> G(M * M, Rational(0)), rhs(M, Rational(0));
  std::vector<Rational> pw(2 * emax + 1);
  const int n = static_cast<int>(fit.samples.abscissa.size());
  for (int i = 0; i < n; ++i) {
    const Rational bi(fit.samples.abscissa[i]);  // exact dyadic conversion
    const Rational ai(fit.samples.a[i]);
    pw[0] = 1;
    for (int e = 1; e <= 2 * emax; ++e) pw[e] = pw[e - 1] * bi;
    for (int r = 0; r < M; ++r) {
      rhs[r] += ai * pw[expo[r]];
      for (int c2 = r; c2 < M; ++c2) G[r * M + c2] += pw[expo[r] + expo[c2]];
    }
  }
  for (int r = 0; r < M; ++r)
    for (int c2 = 0; c2 < r; ++c2) G[r * M + c2] = G[c2 * M + r];

  if (!rational_lin_solve(G, rhs, M))
    throw std::runtime_error("series_fit_swallowtail: singular normal equations");

  fit.coeff.resize(degree + 1);
  for (int k = 0; k <= degree; ++k) fit.coeff[k] = to_double(rhs[k]);
  fit.guard_coeff.resize(fit.guard_exponents.size());
  for (std::size_t g = 0; g < fit.guard_exponents.size(); ++g)
    fit.guard_coeff[g] = to_double(rhs[degree + 1 + g]);

  for (int i = 0; i < n; ++i) {
    const double b = fit.samples.abscissa[i];
    double model = 0.0;
    for (int r = 0; r < M; ++r) model += to_double(rhs[r]) * std::pow(b, expo[r]);
    fit.max_residual = std::max(fit.max_residual, std::fabs(fit.samples.a[i] - model));
  }
  return fit;
}

double branch_contact_exponent(const SwallowtailBranch& branch) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < branch.abscissa.size(); ++i) {
    const double t = std::fabs(branch.abscissa[i]), a = std::fabs(branch.a[i]);
    if (!(t > 0) || !(a > 0)) continue;
    const double lx = std::log(t), ly = std::log(a);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("branch_contact_exponent: not enough usable samples");
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("branch_contact_exponent: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace germlab
