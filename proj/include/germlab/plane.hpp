#pragma once

#include <cmath>

namespace germlab {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Window {
  double x0 = -0.6, x1 = 0.6, y0 = -0.6, y1 = 0.6;
  int resolution = 512;  // grid cells per axis where sampling applies
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool empty() const { return !(x0 < x1) || !(y0 < y1); }
  double cell() const { return width() / resolution; }
  bool contains(const Vec2& p, double margin = 0.0) const {
    return p.x >= x0 - margin && p.x <= x1 + margin && p.y >= y0 - margin && p.y <= y1 + margin;
  }
  Window scaled(double factor) const {
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double hw = 0.5 * width() * factor, hh = 0.5 * height() * factor;
    return {cx - hw, cx + hw, cy - hh, cy + hh, resolution};
  }
};

}  // namespace germlab
