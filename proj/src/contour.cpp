#include "germlab/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "germlab/numerics.hpp"
#include "germlab/strata.hpp"

namespace germlab {
namespace {

// ---------------------------------------------------------------- evaluator

constexpr int kMaxEvalDegree = 31;

// Compact term list of a jet, skipping zero coefficients; evaluation is
// allocation-free so the grid kernels stay cheap.
struct PolyEval {
  struct Term {
    int i, j;
    double c;
  };
  std::vector<Term> terms;
  int deg = 0;

  PolyEval() = default;
  explicit PolyEval(const Jet<double>& f) {
    for (int d = 0; d <= f.order(); ++d)
      for (int j = 0; j <= d; ++j) {
        const double c = f.coeff(d - j, j);
        if (c != 0.0) {
          terms.push_back({d - j, j, c});
          deg = d;
        }
      }
    if (deg > kMaxEvalDegree)
      throw std::invalid_argument("contour: polynomial degree above the evaluator limit");
  }

  double operator()(double x, double y) const {
    std::array<double, kMaxEvalDegree + 1> px, py;
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= deg; ++k) {
      px[k] = px[k - 1] * x;
      py[k] = py[k - 1] * y;
    }
    double acc = 0.0;
    for (const Term& t : terms) acc += t.c * px[t.i] * py[t.j];
    return acc;
  }
};

struct MapEval {
  PolyEval f1, f2, f1x, f1y, f2x, f2y, lam, lamx, lamy;
  double scale = 1.0;          // max(1, |lambda coefficients|)
  double feature_scale = 1.0;  // includes the map components
};

MapEval build_map(const MapGerm<double>& f) {
  const Jet<double>& a = f.f1();
  const Jet<double>& b = f.f2();
  const Jet<double> ax = partial(a, 0), ay = partial(a, 1);
  const Jet<double> bx = partial(b, 0), by = partial(b, 1);
  const Jet<double> lam = ax * by - ay * bx;
  MapEval m;
  m.f1 = PolyEval(a);
  m.f2 = PolyEval(b);
  m.f1x = PolyEval(ax);
  m.f1y = PolyEval(ay);
  m.f2x = PolyEval(bx);
  m.f2y = PolyEval(by);
  m.lam = PolyEval(lam);
  m.lamx = PolyEval(partial(lam, 0));
  m.lamy = PolyEval(partial(lam, 1));
  m.scale = std::max(1.0, max_abs_coeff(lam));
  m.feature_scale = std::max({m.scale, max_abs_coeff(a), max_abs_coeff(b)});
  return m;
}

double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

Vec2 map_value(const MapEval& m, const Vec2& p) {
  return {m.f1(p.x, p.y), m.f2(p.x, p.y)};
}

Vec2 grad_lambda(const MapEval& m, const Vec2& p) {
  return {m.lamx(p.x, p.y), m.lamy(p.x, p.y)};
}

// Kernel line field (-dFi/dy, dFi/dx) of the component with the larger
// gradient at p. Defined up to sign; callers maintain orientation.
Vec2 kernel_dir(const MapEval& m, const Vec2& p) {
  const double g1x = m.f1x(p.x, p.y), g1y = m.f1y(p.x, p.y);
  const double g2x = m.f2x(p.x, p.y), g2y = m.f2y(p.x, p.y);
  const double n1 = std::max(std::fabs(g1x), std::fabs(g1y));
  const double n2 = std::max(std::fabs(g2x), std::fabs(g2y));
  if (n1 >= n2) return {-g1y, g1x};
  return {-g2y, g2x};
}

// Gradient-descent Newton toward {lambda = 0}; keeps the better of the start
// and the iterate and never moves farther than max_move from the start.
Vec2 project_to_curve(const MapEval& m, const Vec2& start, double tol, double max_move) {
  Vec2 q = start;
  for (int it = 0; it < 12; ++it) {
    const double v = m.lam(q.x, q.y);
    if (std::fabs(v) < tol) return q;
    const Vec2 g = grad_lambda(m, q);
    const double g2 = g.x * g.x + g.y * g.y;
    if (g2 < 1e-30) break;
    const Vec2 next{q.x - v * g.x / g2, q.y - v * g.y / g2};
    if (dist(next, start) > max_move) break;
    q = next;
  }
  return std::fabs(m.lam(q.x, q.y)) <= std::fabs(m.lam(start.x, start.y)) ? q : start;
}

// ------------------------------------------------------------- grid kernels

void check_window(const Window& w, const char* who) {
  if (w.empty()) throw std::invalid_argument(std::string(who) + ": empty window");
  if (w.resolution < 32)
    throw std::invalid_argument(std::string(who) + ": resolution must be >= 32");
}

std::vector<double> grid_values(const PolyEval& pe, const Window& w, bool parallel) {
  const int n = w.resolution;
  const int stride = n + 1;
  std::vector<double> v(static_cast<size_t>(stride) * stride);
  const double dx = w.width() / n, dy = w.height() / n;
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j <= n; ++j) {
      const double y = w.y0 + j * dy;
      double* row = v.data() + static_cast<size_t>(j) * stride;
      for (int i = 0; i <= n; ++i) row[i] = pe(w.x0 + i * dx, y);
    }
  } else {
    for (int j = 0; j <= n; ++j) {
      const double y = w.y0 + j * dy;
      double* row = v.data() + static_cast<size_t>(j) * stride;
      for (int i = 0; i <= n; ++i) row[i] = pe(w.x0 + i * dx, y);
    }
  }
  return v;
}

// --------------------------------------------------------- marching squares

// Edge keys: node (i, j) has index j * stride + i; the edge to (i+1, j) gets
// key 2 * index, the edge to (i, j+1) key 2 * index + 1.
int64_t hkey(int i, int j, int stride) {
  return 2 * (static_cast<int64_t>(j) * stride + i);
}
int64_t vkey(int i, int j, int stride) {
  return 2 * (static_cast<int64_t>(j) * stride + i) + 1;
}

struct ScanRows {
  std::vector<std::pair<int64_t, int64_t>> segments;  // edge-key pairs, row order
  std::vector<GridCell> degenerate;
};

ScanRows scan_cells(const std::vector<double>& v, const PolyEval& lam, const Window& w,
                    bool parallel) {
  const int n = w.resolution;
  const int stride = n + 1;
  const double dx = w.width() / n, dy = w.height() / n;
  double gmax = 0.0;
  for (double x : v) gmax = std::max(gmax, std::fabs(x));
  const double degen_tol = 1e-13 * std::max(1.0, gmax);

  std::vector<ScanRows> rows(n);
  auto scan_row = [&](int j) {
    ScanRows& out = rows[j];
    for (int i = 0; i < n; ++i) {
      const double v00 = v[static_cast<size_t>(j) * stride + i];
      const double v10 = v[static_cast<size_t>(j) * stride + i + 1];
      const double v11 = v[static_cast<size_t>(j + 1) * stride + i + 1];
      const double v01 = v[static_cast<size_t>(j + 1) * stride + i];
      const bool z00 = std::fabs(v00) <= degen_tol, z10 = std::fabs(v10) <= degen_tol;
      const bool z11 = std::fabs(v11) <= degen_tol, z01 = std::fabs(v01) <= degen_tol;
      if ((z00 && z10) || (z01 && z11) || (z00 && z01) || (z10 && z11))
        out.degenerate.push_back({i, j});
      const int code = (v00 >= 0.0 ? 1 : 0) | (v10 >= 0.0 ? 2 : 0) | (v11 >= 0.0 ? 4 : 0) |
                       (v01 >= 0.0 ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const int64_t eb = hkey(i, j, stride), et = hkey(i, j + 1, stride);
      const int64_t el = vkey(i, j, stride), er = vkey(i + 1, j, stride);
      auto emit = [&](int64_t a, int64_t b) { out.segments.push_back({a, b}); };
      switch (code) {
        case 1:
        case 14: emit(el, eb); break;
        case 2:
        case 13: emit(eb, er); break;
        case 4:
        case 11: emit(er, et); break;
        case 8:
        case 7: emit(et, el); break;
        case 3:
        case 12: emit(el, er); break;
        case 6:
        case 9: emit(eb, et); break;
        case 5: {
          // saddle: pair by the sign of lambda at the cell centre
          const bool cpos = lam(w.x0 + (i + 0.5) * dx, w.y0 + (j + 0.5) * dy) >= 0.0;
          if (cpos) {
            emit(eb, er);
            emit(et, el);
          } else {
            emit(el, eb);
            emit(er, et);
          }
          break;
        }
        case 10: {
          const bool cpos = lam(w.x0 + (i + 0.5) * dx, w.y0 + (j + 0.5) * dy) >= 0.0;
          if (cpos) {
            emit(el, eb);
            emit(er, et);
          } else {
            emit(eb, er);
            emit(et, el);
          }
          break;
        }
        default: break;
      }
    }
  };

  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < n; ++j) scan_row(j);
  } else {
    for (int j = 0; j < n; ++j) scan_row(j);
  }

  ScanRows all;
  for (ScanRows& r : rows) {
    all.segments.insert(all.segments.end(), r.segments.begin(), r.segments.end());
    all.degenerate.insert(all.degenerate.end(), r.degenerate.begin(), r.degenerate.end());
  }
  return all;
}

Vec2 edge_point(int64_t key, const std::vector<double>& v, const Window& w) {
  const int n = w.resolution;
  const int stride = n + 1;
  const bool vertical = key & 1;
  const int64_t node = key >> 1;
  const int i = static_cast<int>(node % stride);
  const int j = static_cast<int>(node / stride);
  const double dx = w.width() / n, dy = w.height() / n;
  const double a = v[static_cast<size_t>(j) * stride + i];
  const double b = vertical ? v[static_cast<size_t>(j + 1) * stride + i]
                            : v[static_cast<size_t>(j) * stride + i + 1];
  double t = (a == b) ? 0.5 : a / (a - b);
  t = std::clamp(t, 0.0, 1.0);
  if (vertical) return {w.x0 + i * dx, w.y0 + (j + t) * dy};
  return {w.x0 + (i + t) * dx, w.y0 + j * dy};
}

// ----------------------------------------------------------------- chaining

struct Chains {
  std::vector<std::vector<int64_t>> paths;  // edge keys in walk order
  std::vector<bool> closed;
};

Chains chain_segments(const std::vector<std::pair<int64_t, int64_t>>& segments) {
  Chains out;
  std::unordered_map<int64_t, std::array<int, 2>> incident;
  incident.reserve(segments.size() * 2);
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    for (int64_t e : {segments[s].first, segments[s].second}) {
      auto [it, fresh] = incident.try_emplace(e, std::array<int, 2>{-1, -1});
      auto& slots = it->second;
      (void)fresh;
      if (slots[0] < 0)
        slots[0] = s;
      else if (slots[1] < 0)
        slots[1] = s;
      // a third incidence cannot happen: a cell uses an edge at most once and
      // an edge borders at most two cells
    }
  }
  std::vector<bool> used(segments.size(), false);

  auto walk = [&](int64_t start_edge, int start_seg) {
    std::vector<int64_t> path{start_edge};
    int seg = start_seg;
    int64_t at = start_edge;
    while (seg >= 0 && !used[seg]) {
      used[seg] = true;
      const int64_t next = segments[seg].first == at ? segments[seg].second : segments[seg].first;
      path.push_back(next);
      at = next;
      const auto& slots = incident[at];
      seg = -1;
      for (int cand : slots)
        if (cand >= 0 && !used[cand]) seg = cand;
    }
    return path;
  };

  // open chains first: start at degree-1 edges in deterministic segment order
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (used[s]) continue;
    for (int64_t e : {segments[s].first, segments[s].second}) {
      const auto& slots = incident[e];
      if (slots[1] < 0 && !used[s]) {
        out.paths.push_back(walk(e, s));
        out.closed.push_back(false);
      }
    }
  }
  // remaining segments belong to cycles
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (used[s]) continue;
    std::vector<int64_t> path = walk(segments[s].first, s);
    // the walk returns to the start edge; drop the duplicate terminal key
    if (path.size() > 1 && path.front() == path.back()) path.pop_back();
    out.paths.push_back(std::move(path));
    out.closed.push_back(true);
  }
  return out;
}

// -------------------------------------------------------------------- trace

SingularTrace trace_impl(const MapEval& m, const Window& w, const ContourOptions& opts) {
  check_window(w, "singular_set_trace");
  const std::vector<double> values = grid_values(m.lam, w, opts.parallel);
  const ScanRows scan = scan_cells(values, m.lam, w, opts.parallel);
  Chains chains = chain_segments(scan.segments);

  SingularTrace tr;
  tr.degenerate_cells = scan.degenerate;
  tr.closed = chains.closed;
  const double tol = opts.polish_tol * m.scale;
  const double cell_diag = std::hypot(w.width() / w.resolution, w.height() / w.resolution);
  for (const std::vector<int64_t>& path : chains.paths) {
    Polyline line;
    line.reserve(path.size());
    for (int64_t e : path) {
      const Vec2 raw = edge_point(e, values, w);
      line.push_back(project_to_curve(m, raw, tol, 1.5 * cell_diag));
    }
    tr.polylines.push_back(std::move(line));
  }
  return tr;
}

// -------------------------------------------------------------------- cusps

std::vector<CuspPoint> find_cusps(const MapEval& m, const std::vector<Polyline>& polylines,
                                  const std::vector<bool>& closed_flags, const Window& w,
                                  const ContourOptions& opts) {
  std::vector<CuspPoint> out;
  const double tol = opts.polish_tol * m.scale;
  const double cell_diag = std::hypot(w.width() / w.resolution, w.height() / w.resolution);
  const double merge_r = 0.25 * cell_diag;

  for (size_t pi = 0; pi < polylines.size(); ++pi) {
    const Polyline& P = polylines[pi];
    const bool closed = closed_flags[pi];
    const size_t count = P.size();
    if (count < 3) continue;

    // orientation-continued kernel field and eta lambda along the chain
    std::vector<Vec2> eta(count);
    std::vector<double> t(count);
    eta[0] = kernel_dir(m, P[0]);
    t[0] = dot(eta[0], grad_lambda(m, P[0]));
    for (size_t k = 1; k < count; ++k) {
      Vec2 e = kernel_dir(m, P[k]);
      if (dot(e, eta[k - 1]) < 0) e = {-e.x, -e.y};
      eta[k] = e;
      t[k] = dot(e, grad_lambda(m, P[k]));
    }

    const size_t nseg = closed ? count : count - 1;
    for (size_t k = 0; k < nseg; ++k) {
      const size_t k1 = (k + 1) % count;
      const double t0 = t[k];
      double t1 = t[k1];
      if (closed && k1 == 0) {
        // wrap: continue the field across the closing segment; a line field
        // may come back reversed, producing the odd cusp count of a loop
        Vec2 e = kernel_dir(m, P[0]);
        if (dot(e, eta[count - 1]) < 0) e = {-e.x, -e.y};
        t1 = dot(e, grad_lambda(m, P[0]));
      }
      if ((t0 >= 0.0) == (t1 >= 0.0)) continue;

      const Vec2 ref = eta[k];
      Vec2 lo = P[k], hi = P[k1];
      double slo = t0;
      for (int it = 0; it < 60 && dist(lo, hi) > 1e-14; ++it) {
        Vec2 mid{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
        mid = project_to_curve(m, mid, tol, 1.5 * cell_diag);
        Vec2 e = kernel_dir(m, mid);
        if (dot(e, ref) < 0) e = {-e.x, -e.y};
        const double tv = dot(e, grad_lambda(m, mid));
        if ((tv >= 0.0) == (slo >= 0.0)) {
          lo = mid;
          slo = tv;
        } else {
          hi = mid;
        }
      }
      Vec2 c = project_to_curve(m, {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)}, tol,
                                1.5 * cell_diag);
      bool dup = false;
      for (const CuspPoint& prev : out)
        if (dist(prev.source, c) < merge_r) dup = true;
      if (!dup) out.push_back({c, map_value(m, c), static_cast<int>(pi)});
    }
  }
  return out;
}

Vec2 lerp(const Vec2& a, const Vec2& b, double t) {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

// ------------------------------------------------------ double-point polish

void polish_double_points(const MapEval& m, std::vector<DoublePoint>& dps, double cell,
                          double min_source_dist) {
  for (DoublePoint& dp : dps) {
    VecN z{dp.source_a.x, dp.source_a.y, dp.source_b.x, dp.source_b.y};
    auto eval = [&](const VecN& v, VecN& f) {
      f[0] = m.f1(v[0], v[1]) - m.f1(v[2], v[3]);
      f[1] = m.f2(v[0], v[1]) - m.f2(v[2], v[3]);
      f[2] = m.lam(v[0], v[1]);
      f[3] = m.lam(v[2], v[3]);
    };
    auto jac = [&](const VecN& v, VecN& J) {
      J.assign(16, 0.0);
      J[0] = m.f1x(v[0], v[1]);
      J[1] = m.f1y(v[0], v[1]);
      J[2] = -m.f1x(v[2], v[3]);
      J[3] = -m.f1y(v[2], v[3]);
      J[4] = m.f2x(v[0], v[1]);
      J[5] = m.f2y(v[0], v[1]);
      J[6] = -m.f2x(v[2], v[3]);
      J[7] = -m.f2y(v[2], v[3]);
      J[8] = m.lamx(v[0], v[1]);
      J[9] = m.lamy(v[0], v[1]);
      J[12] = m.lamx(v[2], v[3]);
      J[13] = m.lamy(v[2], v[3]);
    };
    const NewtonReport rep = newton_solve(4, z, eval, jac, 1e-12 * m.feature_scale, 30);
    const Vec2 pa{z[0], z[1]}, pb{z[2], z[3]};
    const bool stayed = dist(pa, dp.source_a) < 3 * cell && dist(pb, dp.source_b) < 3 * cell;
    if (rep.residual < 1e-9 * m.feature_scale && stayed &&
        dist(pa, pb) > min_source_dist) {
      dp.source_a = pa;
      dp.source_b = pb;
      const Vec2 ia = map_value(m, pa), ib = map_value(m, pb);
      dp.image = {0.5 * (ia.x + ib.x), 0.5 * (ia.y + ib.y)};
      dp.polished = true;
    }
  }
  // polishing can land two raw detections on the same crossing: merge again
  std::vector<DoublePoint> merged;
  for (const DoublePoint& dp : dps) {
    bool dup = false;
    for (const DoublePoint& prev : merged) {
      const bool direct = dist(prev.source_a, dp.source_a) < 3 * cell &&
                          dist(prev.source_b, dp.source_b) < 3 * cell;
      const bool crossed = dist(prev.source_a, dp.source_b) < 3 * cell &&
                           dist(prev.source_b, dp.source_a) < 3 * cell;
      if (direct || crossed) dup = true;
    }
    if (!dup) merged.push_back(dp);
  }
  dps = std::move(merged);
}

}  // namespace

// ------------------------------------------------------------------ public

std::vector<double> grid_eval_serial(const Jet<double>& poly, const Window& w) {
  check_window(w, "grid_eval");
  return grid_values(PolyEval(poly), w, false);
}

std::vector<double> grid_eval(const Jet<double>& poly, const Window& w) {
  check_window(w, "grid_eval");
  return grid_values(PolyEval(poly), w, true);
}

SingularTrace singular_set_trace(const MapGerm<double>& f, const Window& w,
                                 const ContourOptions& opts) {
  return trace_impl(build_map(f), w, opts);
}

namespace detail {

std::vector<DoublePoint> find_double_points(const std::vector<Polyline>& source,
                                            const std::vector<Polyline>& image,
                                            const std::vector<bool>& closed,
                                            double min_source_dist, double merge_radius) {
  struct Seg {
    Vec2 q0, q1, s0, s1;
  };
  std::vector<Seg> segs;
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool first = true;
  for (size_t p = 0; p < image.size(); ++p) {
    const Polyline& I = image[p];
    const Polyline& S = source[p];
    if (I.size() < 2) continue;
    const bool loop = p < closed.size() && closed[p];
    const size_t nseg = loop ? I.size() : I.size() - 1;
    for (size_t k = 0; k < nseg; ++k) {
      const size_t k1 = (k + 1) % I.size();
      segs.push_back({I[k], I[k1], S[k], S[k1]});
      for (const Vec2& q : {I[k], I[k1]}) {
        if (first) {
          lo_x = hi_x = q.x;
          lo_y = hi_y = q.y;
          first = false;
        }
        lo_x = std::min(lo_x, q.x);
        hi_x = std::max(hi_x, q.x);
        lo_y = std::min(lo_y, q.y);
        hi_y = std::max(hi_y, q.y);
      }
    }
  }
  if (segs.size() < 2) return {};

  // broad phase on a uniform hash grid sized by the median segment length
  std::vector<double> lens(segs.size());
  for (size_t s = 0; s < segs.size(); ++s) lens[s] = dist(segs[s].q0, segs[s].q1);
  std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
  const double extent = std::max(hi_x - lo_x, hi_y - lo_y);
  const double cell = std::max({2.0 * lens[lens.size() / 2], extent / 4096.0, 1e-12});

  auto cell_range = [&](double a, double b, double lo) {
    const int c0 = static_cast<int>(std::floor((std::min(a, b) - lo) / cell));
    const int c1 = static_cast<int>(std::floor((std::max(a, b) - lo) / cell));
    return std::pair<int, int>(c0, c1);
  };
  std::unordered_map<int64_t, std::vector<int>> buckets;
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    const auto [ix0, ix1] = cell_range(segs[s].q0.x, segs[s].q1.x, lo_x);
    const auto [iy0, iy1] = cell_range(segs[s].q0.y, segs[s].q1.y, lo_y);
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy)
        buckets[(static_cast<int64_t>(ix) << 32) ^ static_cast<uint32_t>(iy)].push_back(s);
  }

  auto cross = [](const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; };
  std::unordered_set<uint64_t> tested;
  std::vector<DoublePoint> raw;
  for (const auto& [key, list] : buckets) {
    (void)key;
    for (size_t ii = 0; ii < list.size(); ++ii)
      for (size_t jj = ii + 1; jj < list.size(); ++jj) {
        const int a = std::min(list[ii], list[jj]);
        const int b = std::max(list[ii], list[jj]);
        if (a == b) continue;
        if (!tested.insert((static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b)).second)
          continue;
        const Seg& A = segs[a];
        const Seg& B = segs[b];
        const Vec2 r{A.q1.x - A.q0.x, A.q1.y - A.q0.y};
        const Vec2 s{B.q1.x - B.q0.x, B.q1.y - B.q0.y};
        const Vec2 d{B.q0.x - A.q0.x, B.q0.y - A.q0.y};
        const double den = cross(r, s);
        if (std::fabs(den) < 1e-30) continue;
        const double t = cross(d, s) / den;
        const double u = cross(d, r) / den;
        if (t < -1e-9 || t > 1 + 1e-9 || u < -1e-9 || u > 1 + 1e-9) continue;
        const Vec2 sa = lerp(A.s0, A.s1, t), sb = lerp(B.s0, B.s1, u);
        if (dist(sa, sb) <= min_source_dist) continue;
        raw.push_back({lerp(A.q0, A.q1, t), sa, sb, false});
      }
  }

  // merge detections of the same crossing (adjacent segment pairs can both
  // fire when the crossing sits near a shared vertex)
  std::vector<DoublePoint> out;
  for (const DoublePoint& dp : raw) {
    bool dup = false;
    for (const DoublePoint& prev : out) {
      const bool direct = dist(prev.source_a, dp.source_a) < merge_radius &&
                          dist(prev.source_b, dp.source_b) < merge_radius;
      const bool crossed = dist(prev.source_a, dp.source_b) < merge_radius &&
                           dist(prev.source_b, dp.source_a) < merge_radius;
      if (direct || crossed) dup = true;
    }
    if (!dup) out.push_back(dp);
  }
  std::sort(out.begin(), out.end(), [](const DoublePoint& a, const DoublePoint& b) {
    if (a.image.x != b.image.x) return a.image.x < b.image.x;
    if (a.image.y != b.image.y) return a.image.y < b.image.y;
    return a.source_a.x < b.source_a.x;
  });
  return out;
}

}  // namespace detail

ContourDiagram apparent_contour(const MapGerm<double>& f, const Window& w,
                                const ContourOptions& opts) {
  const MapEval m = build_map(f);
  SingularTrace tr = trace_impl(m, w, opts);

  ContourDiagram d;
  d.degenerate_cells = std::move(tr.degenerate_cells);
  d.closed = tr.closed;
  d.contour_polylines.reserve(tr.polylines.size());
  for (const Polyline& P : tr.polylines) {
    Polyline img;
    img.reserve(P.size());
    for (const Vec2& p : P) img.push_back(map_value(m, p));
    d.contour_polylines.push_back(std::move(img));
  }

  d.cusps = find_cusps(m, tr.polylines, tr.closed, w, opts);

  const double cell = w.cell();
  const double min_source_dist = opts.distinct_cells * cell;
  d.double_points = detail::find_double_points(tr.polylines, d.contour_polylines, tr.closed,
                                               min_source_dist, 3.0 * cell);
  polish_double_points(m, d.double_points, cell, min_source_dist);

  d.singular_polylines = std::move(tr.polylines);
  for (const DoublePoint& dp : d.double_points)
    for (const CuspPoint& c : d.cusps)
      if (dist(dp.source_a, c.source) < min_source_dist ||
          dist(dp.source_b, c.source) < min_source_dist)
        d.tolerance_collision = true;

  d.counts.components = static_cast<int>(d.singular_polylines.size());
  d.counts.cusps = static_cast<int>(d.cusps.size());
  d.counts.double_points = static_cast<int>(d.double_points.size());
  return d;
}

FeatureCounts contour_features(UnfoldingId u, const std::vector<double>& params,
                               const Window& w, double delta, const ContourOptions& opts) {
  if (!(delta > 0)) throw std::invalid_argument("contour_features: delta must be positive");
  if (const auto hit = stratum_within(u, params, delta)) {
    throw std::domain_error(std::string("contour_features: parameters lie within delta of the ") +
                            stratum_name(*hit) + " stratum; counts are not a regime invariant");
  }
  return apparent_contour(unfolding_germ(u, params), w, opts).counts;
}

}  // namespace germlab
