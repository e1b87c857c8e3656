#pragma once
// Signed-distance rasterizer on the unit square. Primitives stamp onto a
// square canvas with 1-pixel smoothstep anti-aliasing; overlaps combine
// by per-pixel maximum, so draw order never matters. Curved strokes are
// quadratic Beziers flattened to capsule chains.

#include <algorithm>
#include <cmath>

#include "tensor.hpp"

namespace genlab {

struct Canvas {
  int size;
  Tensor img;  // [1,S,S], black background

  explicit Canvas(int s) : size(s), img({1, s, s}) {}

  double px(int x) const { return (x + 0.5) / size; }
  double py(int y) const { return (y + 0.5) / size; }

  void disc(double cx, double cy, double r, double intensity) {
    stamp_bbox(cx - r, cy - r, cx + r, cy + r, intensity, [&](double x, double y) {
      return std::hypot(x - cx, y - cy) - r;
    });
  }

  void annulus(double cx, double cy, double r, double half_width, double intensity) {
    const double pad = r + half_width;
    stamp_bbox(cx - pad, cy - pad, cx + pad, cy + pad, intensity, [&](double x, double y) {
      return std::abs(std::hypot(x - cx, y - cy) - r) - half_width;
    });
  }

  // Rectangle of half-extents (hx, hy) rotated by rot about its center.
  void box(double cx, double cy, double hx, double hy, double rot, double intensity) {
    const double c = std::cos(rot), s = std::sin(rot);
    const double reach = std::hypot(hx, hy);
    stamp_bbox(cx - reach, cy - reach, cx + reach, cy + reach, intensity,
               [&](double x, double y) {
                 const double dx = x - cx, dy = y - cy;
                 const double qx = std::abs(c * dx + s * dy) - hx;
                 const double qy = std::abs(-s * dx + c * dy) - hy;
                 const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
                 return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
               });
  }

  void capsule(double ax, double ay, double bx, double by, double thickness,
               double intensity) {
    const double half = thickness * 0.5;
    stamp_bbox(std::min(ax, bx) - half, std::min(ay, by) - half, std::max(ax, bx) + half,
               std::max(ay, by) + half, intensity, [&](double x, double y) {
                 const double ex = bx - ax, ey = by - ay;
                 const double len2 = ex * ex + ey * ey;
                 double t = len2 > 0 ? ((x - ax) * ex + (y - ay) * ey) / len2 : 0.0;
                 t = std::clamp(t, 0.0, 1.0);
                 return std::hypot(x - (ax + t * ex), y - (ay + t * ey)) - half;
               });
  }

  // Equilateral triangle, circumradius r, rotated by rot about (cx, cy).
  void triangle(double cx, double cy, double r, double rot, double intensity) {
    const double c = std::cos(rot), s = std::sin(rot);
    const double half_side = r * std::sqrt(3.0) * 0.5;
    stamp_bbox(cx - r, cy - r, cx + r, cy + r, intensity, [&](double x, double y) {
      double qx = c * (x - cx) + s * (y - cy);
      double qy = -s * (x - cx) + c * (y - cy);
      const double k = std::sqrt(3.0);
      qx = std::abs(qx) - half_side;
      qy = qy + half_side / k;
      if (qx + k * qy > 0.0) {
        const double nx = (qx - k * qy) * 0.5;
        const double ny = (-k * qx - qy) * 0.5;
        qx = nx;
        qy = ny;
      }
      qx -= std::clamp(qx, -2.0 * half_side, 0.0);
      return -std::hypot(qx, qy) * (qy > 0.0 ? 1.0 : (qy < 0.0 ? -1.0 : 0.0));
    });
  }

  void quad_bezier(double x0, double y0, double x1, double y1, double x2, double y2,
                   double thickness, double intensity, int segments = 24) {
    double px = x0, py = y0;
    for (int i = 1; i <= segments; ++i) {
      const double t = double(i) / segments, u = 1.0 - t;
      const double bx = u * u * x0 + 2 * u * t * x1 + t * t * x2;
      const double by = u * u * y0 + 2 * u * t * y1 + t * t * y2;
      capsule(px, py, bx, by, thickness, intensity);
      px = bx;
      py = by;
    }
  }

 private:
  // Evaluates the distance field over the primitive's padded bounding
  // box only; everything outside has zero coverage by construction.
  template <typename DistFn>
  void stamp_bbox(double x_lo, double y_lo, double x_hi, double y_hi, double intensity,
                  DistFn&& dist) {
    const double aa = 0.5 / size;
    const int ix0 = std::max(0, int(std::floor((x_lo - aa) * size)));
    const int iy0 = std::max(0, int(std::floor((y_lo - aa) * size)));
    const int ix1 = std::min(size - 1, int(std::ceil((x_hi + aa) * size)));
    const int iy1 = std::min(size - 1, int(std::ceil((y_hi + aa) * size)));
    for (int y = iy0; y <= iy1; ++y)
      for (int x = ix0; x <= ix1; ++x) {
        const double d = dist(px(x), py(y));
        if (d >= aa) continue;
        double t = std::clamp((aa - d) / (2.0 * aa), 0.0, 1.0);
        t = t * t * (3.0 - 2.0 * t);
        const float v = float(t * intensity);
        float& cell = img(0, y, x);
        cell = std::max(cell, v);
      }
  }
};

}  // namespace genlab
