#pragma once

#include <cstddef>
#include <vector>

namespace quermass {

// Absolute tolerance for geometric predicates (window units).
inline constexpr double kGeomEps = 1e-12;

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;  // must be >= 0
};

// Axis-aligned observation window [x0,x1] x [y0,y1].
struct Window {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  // Shrinks the window by margin on every side; throws if the result is empty.
  Window eroded(double margin) const;
};

// Finite list of discs with the window their centres live in.  Duplicate
// discs are legal as data (the point process counts multiplicities); the
// geometric operations collapse them before measuring the union.
struct MarkedConfiguration {
  std::vector<Disc> discs;
  Window window;

  std::size_t size() const { return discs.size(); }
};

// Circular arc of disc `disc_index` on the boundary of the union.
// Angles are radians, counter-clockwise, with 0 <= a0 < a1 <= a0 + 2*pi and
// a0 < 2*pi; a full circle is [0, 2*pi].
struct BoundaryArc {
  std::size_t disc_index = 0;
  double a0 = 0.0;
  double a1 = 0.0;
};

// Area, boundary length and Euler characteristic of a union of discs.
struct MinkowskiTriple {
  double area = 0.0;
  double perimeter = 0.0;
  int euler = 0;
};

inline MinkowskiTriple operator-(const MinkowskiTriple& a, const MinkowskiTriple& b) {
  return {a.area - b.area, a.perimeter - b.perimeter, a.euler - b.euler};
}

// Uncovered boundary arcs of the union, sorted by (disc_index, a0).  A disc
// lying inside another (or duplicated) contributes no arcs.
std::vector<BoundaryArc> boundary_arcs(const MarkedConfiguration& config);

// Exact area / perimeter / Euler characteristic of the union of discs.
// Area is the line integral (1/2) * closed-contour (x dy - y dx) over the
// boundary arcs; the Euler characteristic is vertices - edges + triangles of
// the dual complex of the power tessellation restricted to the union.
MinkowskiTriple minkowski(const MarkedConfiguration& config);

// Length of the part of the circle of p not covered by the union of the
// configuration's discs.  p itself is not excluded: if config contains a
// disc covering p's circle the result is 0.
double uncovered_arc_length(const Disc& p, const MarkedConfiguration& config);

// Grows every radius by alpha >= 0 (window unchanged).
MarkedConfiguration inflate(const MarkedConfiguration& config, double alpha);

// Uncovered arc length of the inflated disc of p against the inflated
// configuration: the summand of the dilated-perimeter identity.
double f_alpha(const Disc& p, const MarkedConfiguration& config, double alpha);

// True iff the circle of p misses every disc of config: each other disc is
// strictly exterior (d > r_p + r_j) or strictly interior (d < r_p - r_j).
// Tangency within tolerance counts as contact, i.e. not isolated.
bool is_isolated(const Disc& p, const MarkedConfiguration& config);

// Variants for sums over the configuration's own points: the disc at
// skip_index is ignored, and radius_offset >= 0 inflates the remaining
// config radii (p is used as given).
double uncovered_arc_length_skip(const Disc& p, const MarkedConfiguration& config,
                                 double radius_offset, std::ptrdiff_t skip_index);
bool is_isolated_skip(const Disc& p, const MarkedConfiguration& config,
                      std::ptrdiff_t skip_index);

// Change of the Minkowski triple when p is added to config, computed on the
// neighbourhood of discs meeting B(p.centre, p.r + 2*max_grain_radius).  The
// result equals the full-configuration difference whenever max_grain_radius
// bounds every radius in config.
MinkowskiTriple local_delta(const Disc& p, const MarkedConfiguration& config,
                            double max_grain_radius);

// Convenience overload using the largest radius present in config and p.
MinkowskiTriple local_delta(const Disc& p, const MarkedConfiguration& config);

}  // namespace quermass
