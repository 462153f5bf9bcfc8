#include "quermass/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace quermass {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Tolerance for power-distance comparisons (squared-length units).
constexpr double kPowerEps = 1e-9;

struct Interval {
  double a, b;
};

// Sorts and fuses overlapping intervals in place.
void merge_intervals(std::vector<Interval>& iv) {
  if (iv.size() < 2) return;
  std::sort(iv.begin(), iv.end(), [](const Interval& u, const Interval& v) { return u.a < v.a; });
  std::size_t out = 0;
  for (std::size_t k = 1; k < iv.size(); ++k) {
    if (iv[k].a <= iv[out].b) {
      if (iv[k].b > iv[out].b) iv[out].b = iv[k].b;
    } else {
      iv[++out] = iv[k];
    }
  }
  iv.resize(out + 1);
}

// Appends the angular intervals of the circle (cx, cy, r) covered by the
// discs of `discs` (radii shifted by `off`), skipping index `skip`.  Returns
// true as soon as one disc covers the circle entirely.  Tangencies within
// tolerance contribute no interval.
bool covered_intervals(double cx, double cy, double r, const std::vector<Disc>& discs,
                       double off, std::ptrdiff_t skip, std::vector<Interval>& out) {
  for (std::size_t j = 0; j < discs.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == skip) continue;
    double rj = discs[j].r + off;
    if (rj <= kGeomEps) continue;
    double dx = discs[j].cx - cx, dy = discs[j].cy - cy;
    double d2 = dx * dx + dy * dy;
    double reach = r + rj;
    if (d2 >= reach * reach) continue;
    double d = std::sqrt(d2);
    if (d + r <= rj + kGeomEps) return true;          // circle inside disc j
    if (d >= r + rj - kGeomEps) continue;             // disjoint or tangent
    if (d <= r - rj + kGeomEps) continue;             // disc j inside, not reaching
    double cosb = (d2 + r * r - rj * rj) / (2.0 * d * r);
    cosb = std::clamp(cosb, -1.0, 1.0);
    double beta = std::acos(cosb);
    double phi = std::atan2(dy, dx);
    if (phi < 0.0) phi += kTwoPi;
    double s = phi - beta, e = phi + beta;
    if (s < 0.0) {
      out.push_back({s + kTwoPi, kTwoPi});
      out.push_back({0.0, e});
    } else if (e > kTwoPi) {
      out.push_back({s, kTwoPi});
      out.push_back({0.0, e - kTwoPi});
    } else {
      out.push_back({s, e});
    }
  }
  return false;
}

// Complement of the merged covered intervals within [0, 2*pi]; zero-length
// gaps from tangency artefacts are dropped.
void uncovered_gaps(std::vector<Interval>& covered, std::vector<Interval>& gaps) {
  gaps.clear();
  merge_intervals(covered);
  double cursor = 0.0;
  for (const Interval& iv : covered) {
    if (iv.a > cursor + kGeomEps) gaps.push_back({cursor, iv.a});
    if (iv.b > cursor) cursor = iv.b;
  }
  if (cursor < kTwoPi - kGeomEps) gaps.push_back({cursor, kTwoPi});
}

double uncovered_length_core(double cx, double cy, double r, const std::vector<Disc>& discs,
                             double off, std::ptrdiff_t skip) {
  if (r <= kGeomEps) return 0.0;
  std::vector<Interval> covered, gaps;
  if (covered_intervals(cx, cy, r, discs, off, skip, covered)) return 0.0;
  uncovered_gaps(covered, gaps);
  double total = 0.0;
  for (const Interval& g : gaps) total += g.b - g.a;
  return r * total;
}

// Discs that survive the containment sweep: exact duplicates and discs lying
// inside a larger disc (within tolerance) are removed.  The union and all its
// functionals are unchanged.  Survivors keep their original indices.
std::vector<std::size_t> active_discs(const std::vector<Disc>& discs) {
  std::vector<std::size_t> order(discs.size());
  for (std::size_t i = 0; i < discs.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (discs[a].r != discs[b].r) return discs[a].r > discs[b].r;
    return a < b;
  });
  std::vector<std::size_t> kept;
  kept.reserve(discs.size());
  for (std::size_t idx : order) {
    const Disc& p = discs[idx];
    bool nested = false;
    for (std::size_t k : kept) {
      const Disc& q = discs[k];
      double dx = p.cx - q.cx, dy = p.cy - q.cy;
      double lim = q.r - p.r + kGeomEps;
      if (lim >= 0.0 && dx * dx + dy * dy <= lim * lim) {
        nested = true;
        break;
      }
    }
    if (!nested) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// ---- Euler characteristic: dual complex of the power tessellation ----
//
// A disc contributes a vertex when its power cell restricted to the union is
// nonempty, a pair contributes an edge when the restricted cells share a
// point on their radical chord, and a triple contributes a triangle when the
// radical centre lies in the balls and is power-minimal.  The alternating
// count V - E + T equals the Euler characteristic of the union.  Ties in
// power are resolved with a small slack; exact four-circle concurrences sit
// outside this tolerance model.

struct Pt {
  double x, y;
};

// Clips a convex CCW polygon by the half-plane {u : a*u.x + b*u.y <= c}.
void clip_halfplane(std::vector<Pt>& poly, double a, double b, double c, std::vector<Pt>& tmp) {
  if (poly.empty()) return;
  tmp.clear();
  std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Pt& P = poly[k];
    const Pt& Q = poly[(k + 1) % m];
    double sp = a * P.x + b * P.y - c;
    double sq = a * Q.x + b * Q.y - c;
    bool in_p = sp <= kPowerEps, in_q = sq <= kPowerEps;
    if (in_p) tmp.push_back(P);
    if (in_p != in_q) {
      double t = sp / (sp - sq);
      tmp.push_back({P.x + t * (Q.x - P.x), P.y + t * (Q.y - P.y)});
    }
  }
  poly.swap(tmp);
}

double dist_point_segment(double px, double py, const Pt& A, const Pt& B) {
  double ex = B.x - A.x, ey = B.y - A.y;
  double len2 = ex * ex + ey * ey;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - A.x) * ex + (py - A.y) * ey) / len2, 0.0, 1.0);
  double dx = A.x + t * ex - px, dy = A.y + t * ey - py;
  return std::sqrt(dx * dx + dy * dy);
}

// Distance from the origin to a convex CCW polygon (0 when inside).
double dist_origin_polygon(const std::vector<Pt>& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return std::sqrt(poly[0].x * poly[0].x + poly[0].y * poly[0].y);
  bool inside = poly.size() >= 3;
  for (std::size_t k = 0; inside && k < poly.size(); ++k) {
    const Pt& P = poly[k];
    const Pt& Q = poly[(k + 1) % poly.size()];
    double cross = (Q.x - P.x) * (-P.y) - (Q.y - P.y) * (-P.x);
    if (cross < -kPowerEps) inside = false;
  }
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poly.size(); ++k)
    best = std::min(best, dist_point_segment(0.0, 0.0, poly[k], poly[(k + 1) % poly.size()]));
  return best;
}

bool properly_intersecting(const Disc& a, const Disc& b) {
  double dx = a.cx - b.cx, dy = a.cy - b.cy;
  double d = std::sqrt(dx * dx + dy * dy);
  return d > std::abs(a.r - b.r) + kGeomEps && d < a.r + b.r - kGeomEps;
}

int euler_characteristic(const std::vector<Disc>& d) {
  std::size_t n = d.size();
  if (n == 0) return 0;

  std::vector<std::vector<int>> nbr(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = d[i].cx - d[j].cx, dy = d[i].cy - d[j].cy;
      double lim = d[i].r + d[j].r + kGeomEps;
      if (dx * dx + dy * dy <= lim * lim) {
        nbr[i].push_back(static_cast<int>(j));
        nbr[j].push_back(static_cast<int>(i));
      }
    }

  // Power of disc l at point u, in the frame centred on disc i.
  auto power_at = [&](std::size_t i, int l, double ux, double uy) {
    double ax = d[l].cx - d[i].cx, ay = d[l].cy - d[i].cy;
    double vx = ux - ax, vy = uy - ay;
    return vx * vx + vy * vy - d[l].r * d[l].r;
  };

  int vertices = 0;
  std::vector<Pt> poly, tmp;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i].r <= kGeomEps) {
      // Point grains that survive the containment sweep are uncovered and
      // power-dominated by no one at their own location.
      ++vertices;
      continue;
    }
    double h = d[i].r * (1.0 + 1e-12) + 1e-12;
    poly.assign({{h, -h}, {h, h}, {-h, h}, {-h, -h}});
    for (int l : nbr[i]) {
      double ax = d[l].cx - d[i].cx, ay = d[l].cy - d[i].cy;
      double c = ax * ax + ay * ay - d[l].r * d[l].r + d[i].r * d[i].r;
      clip_halfplane(poly, 2.0 * ax, 2.0 * ay, c, tmp);
      if (poly.empty()) break;
    }
    if (!poly.empty() && dist_origin_polygon(poly) <= d[i].r + kGeomEps) ++vertices;
  }

  int edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int jj : nbr[i]) {
      std::size_t j = static_cast<std::size_t>(jj);
      if (j <= i) continue;
      double dxc = d[j].cx - d[i].cx, dyc = d[j].cy - d[i].cy;
      double dist = std::sqrt(dxc * dxc + dyc * dyc);
      double p0x, p0y, p1x, p1y;
      if (properly_intersecting(d[i], d[j])) {
        // Radical chord endpoints = the two circle intersection points.
        double a = (dist * dist + d[i].r * d[i].r - d[j].r * d[j].r) / (2.0 * dist);
        double hh = std::sqrt(std::max(d[i].r * d[i].r - a * a, 0.0));
        double ux = dxc / dist, uy = dyc / dist;
        p0x = a * ux - hh * uy;
        p0y = a * uy + hh * ux;
        p1x = a * ux + hh * uy;
        p1y = a * uy - hh * ux;
      } else if (dist >= d[i].r + d[j].r - kGeomEps) {
        // Tangent within tolerance: the chord degenerates to the contact point.
        double t = d[i].r / (d[i].r + d[j].r);
        p0x = p1x = t * dxc;
        p0y = p1y = t * dyc;
      } else {
        continue;
      }
      double own0 = p0x * p0x + p0y * p0y - d[i].r * d[i].r;
      double own1 = p1x * p1x + p1y * p1y - d[i].r * d[i].r;
      double t_lo = 0.0, t_hi = 1.0;
      bool feasible = true;
      for (int l : nbr[i]) {
        if (l == jj) continue;
        double g0 = power_at(i, l, p0x, p0y) - own0 + kPowerEps;
        double g1 = power_at(i, l, p1x, p1y) - own1 + kPowerEps;
        if (g0 >= 0.0 && g1 >= 0.0) continue;
        if (g0 < 0.0 && g1 < 0.0) {
          feasible = false;
          break;
        }
        double t = g0 / (g0 - g1);
        if (g0 < 0.0)
          t_lo = std::max(t_lo, t);
        else
          t_hi = std::min(t_hi, t);
        if (t_lo > t_hi + 1e-12) {
          feasible = false;
          break;
        }
      }
      if (feasible) ++edges;
    }
  }

  int triangles = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ni = nbr[i];
    for (std::size_t a = 0; a < ni.size(); ++a) {
      std::size_t j = static_cast<std::size_t>(ni[a]);
      if (j <= i || !properly_intersecting(d[i], d[j])) continue;
      for (std::size_t b = a + 1; b < ni.size(); ++b) {
        std::size_t k = static_cast<std::size_t>(ni[b]);
        if (k <= i || k == j) continue;
        std::size_t lo = std::min(j, k), hi = std::max(j, k);
        if (!properly_intersecting(d[i], d[k]) || !properly_intersecting(d[lo], d[hi])) continue;
        // Radical centre: intersection of the radical axes with j and k.
        double ajx = d[j].cx - d[i].cx, ajy = d[j].cy - d[i].cy;
        double akx = d[k].cx - d[i].cx, aky = d[k].cy - d[i].cy;
        double bj = ajx * ajx + ajy * ajy - d[j].r * d[j].r + d[i].r * d[i].r;
        double bk = akx * akx + aky * aky - d[k].r * d[k].r + d[i].r * d[i].r;
        double det = 4.0 * (ajx * aky - ajy * akx);
        if (std::abs(det) < 1e-14) continue;  // collinear centres: axes do not meet
        double ux = (aky * bj * 2.0 - ajy * bk * 2.0) / det;
        double uy = (ajx * bk * 2.0 - akx * bj * 2.0) / det;
        double common = ux * ux + uy * uy - d[i].r * d[i].r;
        if (common > kPowerEps) continue;  // radical centre outside the balls
        bool minimal = true;
        for (int l : nbr[i]) {
          if (l == static_cast<int>(j) || l == static_cast<int>(k)) continue;
          if (power_at(i, l, ux, uy) < common - kPowerEps) {
            minimal = false;
            break;
          }
        }
        if (minimal) ++triangles;
      }
    }
  }

  return vertices - edges + triangles;
}

}  // namespace

Window Window::eroded(double margin) const {
  Window w{x0 + margin, y0 + margin, x1 - margin, y1 - margin};
  if (w.x0 >= w.x1 - kGeomEps || w.y0 >= w.y1 - kGeomEps)
    throw std::invalid_argument("erosion margin " + std::to_string(margin) +
                                " leaves an empty window");
  return w;
}

std::vector<BoundaryArc> boundary_arcs(const MarkedConfiguration& config) {
  const std::vector<Disc>& discs = config.discs;
  std::vector<std::size_t> active = active_discs(discs);
  std::vector<Disc> act;
  act.reserve(active.size());
  for (std::size_t idx : active) act.push_back(discs[idx]);

  std::vector<BoundaryArc> arcs;
  std::vector<Interval> covered, gaps;
  for (std::size_t a = 0; a < act.size(); ++a) {
    const Disc& p = act[a];
    if (p.r <= kGeomEps) continue;
    covered.clear();
    if (covered_intervals(p.cx, p.cy, p.r, act, 0.0, static_cast<std::ptrdiff_t>(a), covered))
      continue;
    uncovered_gaps(covered, gaps);
    for (const Interval& g : gaps) arcs.push_back({active[a], g.a, g.b});
  }
  return arcs;
}

MinkowskiTriple minkowski(const MarkedConfiguration& config) {
  const std::vector<Disc>& discs = config.discs;
  std::vector<std::size_t> active = active_discs(discs);
  std::vector<Disc> act;
  act.reserve(active.size());
  for (std::size_t idx : active) act.push_back(discs[idx]);

  MinkowskiTriple t;
  std::vector<Interval> covered, gaps;
  for (std::size_t a = 0; a < act.size(); ++a) {
    const Disc& p = act[a];
    if (p.r <= kGeomEps) continue;
    covered.clear();
    if (covered_intervals(p.cx, p.cy, p.r, act, 0.0, static_cast<std::ptrdiff_t>(a), covered))
      continue;
    uncovered_gaps(covered, gaps);
    for (const Interval& g : gaps) {
      t.perimeter += p.r * (g.b - g.a);
      // Green's theorem contribution of the arc, union kept on the left.
      t.area += 0.5 * (p.r * p.r * (g.b - g.a) +
                       p.cx * p.r * (std::sin(g.b) - std::sin(g.a)) +
                       p.cy * p.r * (std::cos(g.a) - std::cos(g.b)));
    }
  }
  t.euler = euler_characteristic(act);
  return t;
}

double uncovered_arc_length(const Disc& p, const MarkedConfiguration& config) {
  return uncovered_length_core(p.cx, p.cy, p.r, config.discs, 0.0, -1);
}

MarkedConfiguration inflate(const MarkedConfiguration& config, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("inflate requires alpha >= 0");
  MarkedConfiguration out = config;
  for (Disc& d : out.discs) d.r += alpha;
  return out;
}

double f_alpha(const Disc& p, const MarkedConfiguration& config, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("f_alpha requires alpha >= 0");
  return uncovered_length_core(p.cx, p.cy, p.r + alpha, config.discs, alpha, -1);
}

bool is_isolated(const Disc& p, const MarkedConfiguration& config) {
  return is_isolated_skip(p, config, -1);
}

double uncovered_arc_length_skip(const Disc& p, const MarkedConfiguration& config,
                                 double radius_offset, std::ptrdiff_t skip_index) {
  if (radius_offset < 0.0) throw std::invalid_argument("radius offset must be >= 0");
  return uncovered_length_core(p.cx, p.cy, p.r, config.discs, radius_offset, skip_index);
}

bool is_isolated_skip(const Disc& p, const MarkedConfiguration& config,
                      std::ptrdiff_t skip_index) {
  for (std::size_t j = 0; j < config.discs.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == skip_index) continue;
    const Disc& q = config.discs[j];
    double dx = q.cx - p.cx, dy = q.cy - p.cy;
    double d = std::sqrt(dx * dx + dy * dy);
    bool exterior = d > p.r + q.r + kGeomEps;
    bool interior = d < p.r - q.r - kGeomEps;
    if (!exterior && !interior) return false;
  }
  return true;
}

MinkowskiTriple local_delta(const Disc& p, const MarkedConfiguration& config,
                            double max_grain_radius) {
  double reach = p.r + 2.0 * max_grain_radius;
  MarkedConfiguration nbhd;
  nbhd.window = config.window;
  for (const Disc& q : config.discs) {
    double dx = q.cx - p.cx, dy = q.cy - p.cy;
    double lim = reach + q.r;
    if (dx * dx + dy * dy <= lim * lim) nbhd.discs.push_back(q);
  }
  MinkowskiTriple without = minkowski(nbhd);
  nbhd.discs.push_back(p);
  MinkowskiTriple with = minkowski(nbhd);
  return with - without;
}

MinkowskiTriple local_delta(const Disc& p, const MarkedConfiguration& config) {
  double r = p.r;
  for (const Disc& q : config.discs) r = std::max(r, q.r);
  return local_delta(p, config, r);
}

}  // namespace quermass
