#pragma once

// Singular sets and apparent contours of polynomial plane-to-plane maps on a
// window. The map is the polynomial defined by the germ's jets. Pipeline:
// dense grid evaluation of the Jacobian determinant lambda (serial and OpenMP
// row-parallel kernels, bitwise identical), marching-squares cell scan with
// the ambiguous saddle resolved by the cell-centre sign, chaining into
// polylines, Newton polish of the vertices onto {lambda = 0}, cusp detection
// as sign changes of eta lambda along each chain with an orientation-continued
// kernel field (the field is a line field: around a closed chain it may return
// reversed, which is what makes odd cusp counts on a loop possible), and image
// double points by segment-segment intersection with a source-distinctness
// guard.

#include <vector>

#include "germlab/map_germ.hpp"
#include "germlab/plane.hpp"
#include "germlab/unfolding.hpp"

namespace germlab {

using Polyline = std::vector<Vec2>;

// Node values poly(x_i, y_j) on the (resolution+1)^2 nodes of w, row-major
// with index j * (resolution + 1) + i. The parallel kernel distributes rows
// across threads and is bitwise identical to the serial reference.
std::vector<double> grid_eval_serial(const Jet<double>& poly, const Window& w);
std::vector<double> grid_eval(const Jet<double>& poly, const Window& w);

struct GridCell {
  int i = 0, j = 0;
  bool operator==(const GridCell&) const = default;
};

struct FeatureCounts {
  int components = 0;
  int cusps = 0;
  int double_points = 0;
  bool operator==(const FeatureCounts&) const = default;
};

struct CuspPoint {
  Vec2 source, image;
  int polyline = 0;  // index of the singular polyline carrying the cusp
};

struct DoublePoint {
  Vec2 image;
  Vec2 source_a, source_b;
  bool polished = false;  // Newton refinement of the 4-equation system converged
};

struct SingularTrace {
  std::vector<Polyline> polylines;         // vertices on {lambda = 0}
  std::vector<bool> closed;                // per polyline
  std::vector<GridCell> degenerate_cells;  // lambda vanished on a full cell edge
};

struct ContourDiagram {
  std::vector<Polyline> singular_polylines;
  std::vector<Polyline> contour_polylines;  // images, same indexing
  std::vector<bool> closed;
  std::vector<CuspPoint> cusps;
  std::vector<DoublePoint> double_points;
  FeatureCounts counts;
  std::vector<GridCell> degenerate_cells;
  // a double-point preimage came closer to a cusp than the distinctness
  // threshold: the two features are not separated at this resolution
  bool tolerance_collision = false;
};

struct ContourOptions {
  double polish_tol = 1e-10;  // target |lambda| < polish_tol * coefficient scale
  int distinct_cells = 10;    // double-point source separation, in grid cells
  bool parallel = true;       // row-parallel kernels; serial reference otherwise
};

// Marching-squares extraction of {lambda = 0}. Requires a nonempty window with
// resolution >= 32. Cells where lambda vanishes on a whole edge are reported,
// not fatal (node zeros count as positive, so such rows still chain).
SingularTrace singular_set_trace(const MapGerm<double>& f, const Window& w,
                                 const ContourOptions& opts = {});

ContourDiagram apparent_contour(const MapGerm<double>& f, const Window& w,
                                const ContourOptions& opts = {});

// Regime invariant (components, cusps, double points) of the unfolding member
// at params. Throws std::domain_error when params lies within delta of a
// closed-form stratum of u (first-order distance; the numerically traced
// odd-sharksfin swallowtail sheet is not part of the guard).
FeatureCounts contour_features(UnfoldingId u, const std::vector<double>& params,
                               const Window& w = {}, double delta = 1e-3,
                               const ContourOptions& opts = {});

namespace detail {

// Raw double-point detection among image segments: spatial-hash broad phase,
// exact segment intersection, source separation > min_source_dist, duplicate
// merging within merge_radius in source space. Exposed for direct testing.
std::vector<DoublePoint> find_double_points(const std::vector<Polyline>& source,
                                            const std::vector<Polyline>& image,
                                            const std::vector<bool>& closed,
                                            double min_source_dist, double merge_radius);

}  // namespace detail

}  // namespace germlab
