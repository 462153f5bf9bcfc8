#include "quermass/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quermass/parallel.hpp"
#include "quermass/rng.hpp"

namespace quermass {

namespace {

void validate_r_grid(const std::vector<double>& r_grid) {
  if (r_grid.empty() || r_grid[0] != 0.0)
    throw std::invalid_argument("r grid must start at 0");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!std::isfinite(r_grid[i]) || (i > 0 && r_grid[i] <= r_grid[i - 1]))
      throw std::invalid_argument("r grid must be finite and strictly increasing");
  }
}

// Distance from a pixel centre to the raster boundary, world units.
double edge_distance(const BinaryRaster& r, std::size_t ix, std::size_t iy) {
  double dx = std::min(static_cast<double>(ix) + 0.5, static_cast<double>(r.width - ix) - 0.5);
  double dy = std::min(static_cast<double>(iy) + 0.5, static_cast<double>(r.height - iy) - 0.5);
  return std::min(dx, dy) * r.pixel_size;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  double h = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

std::string curve_kind_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::Contact:
      return "contact";
    case CurveKind::Covariance:
      return "covariance";
    case CurveKind::Erosion:
      return "erosion";
    case CurveKind::Dilation:
      return "dilation";
    case CurveKind::Opening:
      return "opening";
    case CurveKind::Closing:
      return "closing";
  }
  return "?";
}

std::vector<double> make_r_grid(double r_max, std::size_t n) {
  if (!(r_max > 0.0) || n < 2) throw std::invalid_argument("r grid needs r_max > 0 and n >= 2");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = r_max * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

CurveEstimate contact_distribution(const BinaryRaster& raster, const std::vector<double>& r_grid) {
  validate_r_grid(r_grid);
  std::size_t fg = raster.foreground_count();
  if (fg == raster.pixel_count())
    throw std::invalid_argument("contact distribution undefined on an all-foreground raster");

  std::vector<double> dist_sq = squared_distance_transform(raster.bits, raster.width, raster.height);
  double ps = raster.pixel_size;

  CurveEstimate curve;
  curve.kind = CurveKind::Contact;
  curve.r_grid = r_grid;
  curve.values.reserve(r_grid.size());
  for (double r : r_grid) {
    std::size_t eligible = 0, hit = 0;
    for (std::size_t iy = 0; iy < raster.height; ++iy)
      for (std::size_t ix = 0; ix < raster.width; ++ix) {
        std::size_t i = iy * raster.width + ix;
        if (raster.bits[i]) continue;
        if (edge_distance(raster, ix, iy) <= r) continue;
        ++eligible;
        if (std::sqrt(dist_sq[i]) * ps <= r) ++hit;
      }
    // No conditioning pixels left: everything beyond the minus-sampled border
    // is covered, so the empirical value saturates.
    curve.values.push_back(eligible == 0 ? 1.0
                                         : static_cast<double>(hit) / static_cast<double>(eligible));
  }
  return curve;
}

CurveEstimate covariance(const BinaryRaster& raster, const std::vector<double>& r_grid) {
  validate_r_grid(r_grid);
  CurveEstimate curve;
  curve.kind = CurveKind::Covariance;
  curve.r_grid = r_grid;
  curve.values.reserve(r_grid.size());
  for (double r : r_grid) {
    std::size_t lag = static_cast<std::size_t>(std::llround(r / raster.pixel_size));
    if (lag >= raster.width && lag >= raster.height)
      throw std::invalid_argument("covariance lag exceeds the raster extent");
    std::size_t pairs = 0, hits = 0;
    if (lag < raster.width) {
      for (std::size_t iy = 0; iy < raster.height; ++iy) {
        const std::uint8_t* row = raster.bits.data() + iy * raster.width;
        for (std::size_t ix = 0; ix + lag < raster.width; ++ix) {
          ++pairs;
          hits += row[ix] & row[ix + lag];
        }
      }
    }
    if (lag < raster.height) {
      for (std::size_t iy = 0; iy + lag < raster.height; ++iy) {
        const std::uint8_t* row = raster.bits.data() + iy * raster.width;
        const std::uint8_t* other = raster.bits.data() + (iy + lag) * raster.width;
        for (std::size_t ix = 0; ix < raster.width; ++ix) {
          ++pairs;
          hits += row[ix] & other[ix];
        }
      }
    }
    curve.values.push_back(static_cast<double>(hits) / static_cast<double>(pairs));
  }
  return curve;
}

std::array<CurveEstimate, 4> morph_curves(const BinaryRaster& raster,
                                          const std::vector<double>& r_grid) {
  validate_r_grid(r_grid);
  std::size_t w = raster.width, h = raster.height, n = raster.pixel_count();
  double ps = raster.pixel_size;

  std::vector<std::uint8_t> bg_mask(n);
  for (std::size_t i = 0; i < n; ++i) bg_mask[i] = raster.bits[i] ? 0 : 1;
  std::vector<double> to_fg = squared_distance_transform(raster.bits, w, h);
  std::vector<double> to_bg = squared_distance_transform(bg_mask, w, h);

  std::array<CurveEstimate, 4> curves;
  curves[0].kind = CurveKind::Erosion;
  curves[1].kind = CurveKind::Dilation;
  curves[2].kind = CurveKind::Opening;
  curves[3].kind = CurveKind::Closing;
  for (CurveEstimate& c : curves) c.r_grid = r_grid;

  std::vector<std::uint8_t> eroded(n), not_dilated(n);
  for (double r : r_grid) {
    double rp = r / ps, rp2 = rp * rp;
    for (std::size_t i = 0; i < n; ++i) {
      eroded[i] = to_bg[i] > rp2 ? 1 : 0;
      not_dilated[i] = to_fg[i] > rp2 ? 1 : 0;
    }
    // opening = points within r of the eroded set; closing = points farther
    // than r from the complement of the dilated set.
    std::vector<double> to_eroded = squared_distance_transform(eroded, w, h);
    std::vector<double> to_not_dilated = squared_distance_transform(not_dilated, w, h);

    std::size_t eligible = 0, ne = 0, nd = 0, no = 0, nc = 0;
    for (std::size_t iy = 0; iy < h; ++iy)
      for (std::size_t ix = 0; ix < w; ++ix) {
        if (edge_distance(raster, ix, iy) <= r) continue;
        std::size_t i = iy * w + ix;
        ++eligible;
        ne += eroded[i];
        nd += 1 - not_dilated[i];
        no += to_eroded[i] <= rp2 ? 1 : 0;
        nc += to_not_dilated[i] > rp2 ? 1 : 0;
      }
    double denom = eligible ? static_cast<double>(eligible) : 1.0;
    curves[0].values.push_back(static_cast<double>(ne) / denom);
    curves[1].values.push_back(static_cast<double>(nd) / denom);
    curves[2].values.push_back(static_cast<double>(no) / denom);
    curves[3].values.push_back(static_cast<double>(nc) / denom);
  }
  return curves;
}

CurveEstimate curve_for_kind(CurveKind kind, const BinaryRaster& raster,
                             const std::vector<double>& r_grid) {
  switch (kind) {
    case CurveKind::Contact:
      return contact_distribution(raster, r_grid);
    case CurveKind::Covariance:
      return covariance(raster, r_grid);
    default: {
      std::array<CurveEstimate, 4> curves = morph_curves(raster, r_grid);
      for (CurveEstimate& c : curves)
        if (c.kind == kind) return c;
      throw std::logic_error("unhandled curve kind");
    }
  }
}

EnvelopeResult envelopes(const QuermassParams& params, const RadiusLaw& law, const Window& window,
                         const std::vector<CurveKind>& kinds, const EnvelopeSettings& settings) {
  if (kinds.empty()) throw std::invalid_argument("envelopes: no curve kinds requested");
  if (settings.n_sim < 2) throw std::invalid_argument("envelopes: n_sim must be at least 2");
  if (!(settings.pixel_size > 0.0)) throw std::invalid_argument("envelopes: pixel_size must be positive");
  if (!(settings.q_lo >= 0.0 && settings.q_lo < settings.q_hi && settings.q_hi <= 1.0))
    throw std::invalid_argument("envelopes: need 0 <= q_lo < q_hi <= 1");
  validate_r_grid(settings.r_grid);

  std::size_t n_r = settings.r_grid.size(), n_kind = kinds.size();
  // values[k][rep * n_r + j]; NaN marks a failed replicate.
  std::vector<std::vector<double>> values(
      n_kind, std::vector<double>(settings.n_sim * n_r, std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::string> errors(settings.n_sim);

  bool want_morph = false;
  for (CurveKind k : kinds)
    if (k != CurveKind::Contact && k != CurveKind::Covariance) want_morph = true;

  parallel_for(settings.n_sim, settings.parallel, [&](std::size_t rep) {
    try {
      ChainSettings chain = settings.chain;
      chain.seed = derive_seed(settings.chain.seed, "envelope", rep);
      MarkedConfiguration sim = simulate(params, law, window, chain);
      BinaryRaster raster = rasterize(sim, settings.pixel_size);
      std::array<CurveEstimate, 4> morph;
      if (want_morph) morph = morph_curves(raster, settings.r_grid);
      for (std::size_t k = 0; k < n_kind; ++k) {
        CurveEstimate curve;
        switch (kinds[k]) {
          case CurveKind::Contact:
            curve = contact_distribution(raster, settings.r_grid);
            break;
          case CurveKind::Covariance:
            curve = covariance(raster, settings.r_grid);
            break;
          default:
            for (CurveEstimate& c : morph)
              if (c.kind == kinds[k]) curve = c;
            break;
        }
        for (std::size_t j = 0; j < n_r; ++j) values[k][rep * n_r + j] = curve.values[j];
      }
    } catch (const std::exception& e) {
      errors[rep] = e.what();
    }
  });

  EnvelopeResult result;
  for (std::size_t rep = 0; rep < settings.n_sim; ++rep)
    if (!errors[rep].empty())
      result.failures.push_back("replicate " + std::to_string(rep) + ": " + errors[rep]);
  result.n_used = settings.n_sim - result.failures.size();
  if (result.n_used < 2) {
    std::string msg = "envelopes: fewer than two replicates succeeded";
    for (const std::string& f : result.failures) msg += "; " + f;
    throw std::runtime_error(msg);
  }

  for (std::size_t k = 0; k < n_kind; ++k) {
    EnvelopeBand band;
    band.kind = kinds[k];
    band.r_grid = settings.r_grid;
    band.lower.resize(n_r);
    band.upper.resize(n_r);
    std::vector<double> column;
    for (std::size_t j = 0; j < n_r; ++j) {
      column.clear();
      for (std::size_t rep = 0; rep < settings.n_sim; ++rep) {
        double v = values[k][rep * n_r + j];
        if (!std::isnan(v)) column.push_back(v);
      }
      std::sort(column.begin(), column.end());
      band.lower[j] = quantile_sorted(column, settings.q_lo);
      band.upper[j] = quantile_sorted(column, settings.q_hi);
    }
    result.bands.push_back(std::move(band));
  }
  return result;
}

}  // namespace quermass
