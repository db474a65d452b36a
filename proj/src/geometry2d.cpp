#include "textworld/geometry2d.hpp"

namespace textworld {

double signed_area(std::span<const Vec2> poly) {
  double a = 0;
  for (std::size_t i = 0, n = poly.size(); i < n; i++) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

bool is_convex(std::span<const Vec2> poly) {
  std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; i++) {
    double c = cross(poly[(i + 1) % n] - poly[i], poly[(i + 2) % n] - poly[(i + 1) % n]);
    if (c == 0) continue;
    int s = c > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return sign != 0;
}

Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  Polygon out(subject.begin(), subject.end());
  if (clip.size() < 3) return {};
  double orientation = signed_area(clip) >= 0 ? 1.0 : -1.0;
  for (std::size_t i = 0, n = clip.size(); i < n && !out.empty(); i++) {
    Vec2 a = clip[i], b = clip[(i + 1) % n];
    auto side = [&](Vec2 p) { return orientation * cross(b - a, p - a); };
    Polygon in = std::move(out);
    out.clear();
    for (std::size_t j = 0, m = in.size(); j < m; j++) {
      Vec2 p = in[j], q = in[(j + 1) % m];
      double sp = side(p), sq = side(q);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        double t = sp / (sp - sq);
        out.push_back(p + (q - p) * t);
      }
    }
  }
  return out;
}

Polygon clip_to_rect(std::span<const Vec2> subject, double x0, double y0, double x1, double y1) {
  const Vec2 rect[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return clip_convex(subject, rect);
}

double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b) {
  Polygon p = clip_convex(a, b);
  return p.size() < 3 ? 0.0 : area(p);
}

bool contains_convex(std::span<const Vec2> poly, Vec2 p) {
  int sign = 0;
  for (std::size_t i = 0, n = poly.size(); i < n; i++) {
    double c = cross(poly[(i + 1) % n] - poly[i], p - poly[i]);
    if (c == 0) continue;
    int s = c > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return true;
}

}  // namespace textworld
