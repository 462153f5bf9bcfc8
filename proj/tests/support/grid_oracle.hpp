#pragma once

#include <vector>

#include "quermass/geom.hpp"
#include "quermass/rng.hpp"

namespace quermass::testing {

struct OracleResult {
  double area = 0.0;
  double perimeter = 0.0;
  long euler = 0;
};

// Pixel-grid reference for the Minkowski functionals of a disc union,
// independent of the analytic kernel. Area by pixel-centre counting,
// perimeter by marching squares with linear interpolation, Euler
// characteristic by connected components (4-neighbour foreground,
// 8-neighbour background) minus holes. `resolution` is the node count
// along the longer bounding-box side.
OracleResult oracle_minkowski(const std::vector<Disc>& discs, std::size_t resolution = 1600);

// Random disc set avoiding near-tangent pairs (digitization flips grid
// connectivity near tangency, which would make the oracle comparison
// meaningless, not wrong).
std::vector<Disc> random_discs(Rng& rng, std::size_t max_discs, const Window& window,
                               double r_min, double r_max, double guard = 0.02);

}  // namespace quermass::testing
