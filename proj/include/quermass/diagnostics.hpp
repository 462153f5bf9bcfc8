#pragma once

#include <array>
#include <string>
#include <vector>

#include "quermass/model.hpp"
#include "quermass/raster.hpp"
#include "quermass/sampler.hpp"

namespace quermass {

enum class CurveKind { Contact, Covariance, Erosion, Dilation, Opening, Closing };

std::string curve_kind_name(CurveKind kind);

struct CurveEstimate {
  CurveKind kind = CurveKind::Contact;
  std::vector<double> r_grid;  // strictly increasing, starts at 0
  std::vector<double> values;
};

// Evenly spaced grid 0, r_max/(n-1), ..., r_max.
std::vector<double> make_r_grid(double r_max, std::size_t n);

// Spherical contact distribution H(r) = P(dist to foreground <= r | outside
// foreground), estimated over background pixels minus-sampled by r.
CurveEstimate contact_distribution(const BinaryRaster& raster, const std::vector<double>& r_grid);

// Two-point coverage probability C(r), averaged over horizontal and vertical
// lags rounded to the pixel lattice.
CurveEstimate covariance(const BinaryRaster& raster, const std::vector<double>& r_grid);

// Area fraction after erosion/dilation/opening/closing with a disc of radius
// r, computed from distance transforms and minus-sampled by r. Order:
// erosion, dilation, opening, closing.
std::array<CurveEstimate, 4> morph_curves(const BinaryRaster& raster,
                                          const std::vector<double>& r_grid);

CurveEstimate curve_for_kind(CurveKind kind, const BinaryRaster& raster,
                             const std::vector<double>& r_grid);

struct EnvelopeSettings {
  ChainSettings chain;       // chain.seed is the master seed; replicates derive from it
  std::vector<double> r_grid;
  double pixel_size = 0.05;
  std::size_t n_sim = 99;
  double q_lo = 0.025, q_hi = 0.975;
  bool parallel = true;
};

struct EnvelopeBand {
  CurveKind kind = CurveKind::Contact;
  std::vector<double> r_grid;
  std::vector<double> lower, upper;
};

struct EnvelopeResult {
  std::vector<EnvelopeBand> bands;
  std::vector<std::string> failures;  // "replicate 3: <what went wrong>"
  std::size_t n_used = 0;             // replicates contributing to the quantiles
};

// Simulates n_sim realizations, rasterizes each, and returns pointwise
// empirical quantile bands per curve kind. Failed replicates are reported in
// `failures`; at least two must succeed.
EnvelopeResult envelopes(const QuermassParams& params, const RadiusLaw& law, const Window& window,
                         const std::vector<CurveKind>& kinds, const EnvelopeSettings& settings);

}  // namespace quermass
