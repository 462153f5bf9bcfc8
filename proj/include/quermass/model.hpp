#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "quermass/geom.hpp"
#include "quermass/rng.hpp"

namespace quermass {

// Distribution of grain radii: uniform on [r_min, r_max] or a finite set of
// atoms sampled by Walker's alias method.  The support must be bounded and
// nonnegative; r0() is its supremum.
class RadiusLaw {
 public:
  static RadiusLaw uniform_law(double r_min, double r_max);
  // atoms = (radius, probability); probabilities must sum to 1 within 1e-9.
  static RadiusLaw discrete_law(std::vector<std::pair<double, double>> atoms);

  double r0() const { return r0_; }
  double mean() const;
  double sample(Rng& rng) const;

  bool is_uniform() const { return uniform_; }
  double uniform_min() const { return r_min_; }
  double uniform_max() const { return r_max_; }
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

  // Round-trippable textual form, e.g. "uniform(0.5,2)".
  std::string describe() const;

 private:
  RadiusLaw() = default;

  bool uniform_ = true;
  double r_min_ = 0.0, r_max_ = 0.0, r0_ = 0.0;
  std::vector<std::pair<double, double>> atoms_;
  std::vector<double> alias_prob_;
  std::vector<std::size_t> alias_idx_;
};

// Intensity and interaction weights of the model; the energy of a
// configuration is theta . (area, perimeter, euler) of the grain union.
struct QuermassParams {
  double z = 1.0;
  std::array<double, 3> theta{0.0, 0.0, 0.0};
};

// Throws when z <= 0 or a component is not finite.
void validate(const QuermassParams& params);

double hamiltonian(const std::array<double, 3>& theta, const MarkedConfiguration& config);

// Energy change when p joins config; exact for any max_grain_radius bounding
// the radii of config.
double local_energy(const std::array<double, 3>& theta, const Disc& p,
                    const MarkedConfiguration& config, double max_grain_radius);

// Conditional intensity z * exp(-local_energy).
double papangelou(const QuermassParams& params, const Disc& p,
                  const MarkedConfiguration& config, double max_grain_radius);

}  // namespace quermass
