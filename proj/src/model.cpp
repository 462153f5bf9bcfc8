#include "quermass/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quermass {

RadiusLaw RadiusLaw::uniform_law(double r_min, double r_max) {
  if (!(r_min >= 0.0) || !(r_max > r_min))
    throw std::invalid_argument("uniform radius law requires 0 <= r_min < r_max");
  RadiusLaw law;
  law.uniform_ = true;
  law.r_min_ = r_min;
  law.r_max_ = r_max;
  law.r0_ = r_max;
  return law;
}

RadiusLaw RadiusLaw::discrete_law(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete radius law requires atoms");
  double total = 0.0, sup = 0.0;
  for (const auto& [r, p] : atoms) {
    if (!(r >= 0.0)) throw std::invalid_argument("discrete radius law: negative radius");
    if (!(p > 0.0)) throw std::invalid_argument("discrete radius law: nonpositive probability");
    total += p;
    sup = std::max(sup, r);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("discrete radius law: probabilities must sum to 1");

  RadiusLaw law;
  law.uniform_ = false;
  law.atoms_ = std::move(atoms);
  law.r0_ = sup;

  // Walker alias table; construction order is fixed so sampling is
  // reproducible for a given seed.
  std::size_t n = law.atoms_.size();
  law.alias_prob_.assign(n, 0.0);
  law.alias_idx_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = law.atoms_[i].second * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::size_t s = small.back(), l = large.back();
    small.pop_back();
    large.pop_back();
    law.alias_prob_[s] = scaled[s];
    law.alias_idx_[s] = l;
    scaled[l] = scaled[l] + scaled[s] - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::size_t i : large) law.alias_prob_[i] = 1.0;
  for (std::size_t i : small) law.alias_prob_[i] = 1.0;
  return law;
}

double RadiusLaw::mean() const {
  if (uniform_) return 0.5 * (r_min_ + r_max_);
  double m = 0.0;
  for (const auto& [r, p] : atoms_) m += r * p;
  return m;
}

double RadiusLaw::sample(Rng& rng) const {
  if (uniform_) return r_min_ + rng.uniform01() * (r_max_ - r_min_);
  std::size_t n = atoms_.size();
  std::size_t slot = std::min(static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n)), n - 1);
  double v = rng.uniform01();
  return atoms_[v < alias_prob_[slot] ? slot : alias_idx_[slot]].first;
}

std::string RadiusLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (uniform_) {
    os << "uniform(" << r_min_ << "," << r_max_ << ")";
  } else {
    os << "discrete[";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i) os << ",";
      os << "(" << atoms_[i].first << "," << atoms_[i].second << ")";
    }
    os << "]";
  }
  return os.str();
}

void validate(const QuermassParams& params) {
  if (!(params.z > 0.0)) throw std::invalid_argument("intensity z must be positive");
  for (double t : params.theta)
    if (!std::isfinite(t)) throw std::invalid_argument("interaction weights must be finite");
}

double hamiltonian(const std::array<double, 3>& theta, const MarkedConfiguration& config) {
  MinkowskiTriple m = minkowski(config);
  return theta[0] * m.area + theta[1] * m.perimeter + theta[2] * static_cast<double>(m.euler);
}

double local_energy(const std::array<double, 3>& theta, const Disc& p,
                    const MarkedConfiguration& config, double max_grain_radius) {
  MinkowskiTriple d = local_delta(p, config, max_grain_radius);
  return theta[0] * d.area + theta[1] * d.perimeter + theta[2] * static_cast<double>(d.euler);
}

double papangelou(const QuermassParams& params, const Disc& p,
                  const MarkedConfiguration& config, double max_grain_radius) {
  return params.z * std::exp(-local_energy(params.theta, p, config, max_grain_radius));
}

}  // namespace quermass
