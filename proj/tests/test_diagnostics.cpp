#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "quermass/diagnostics.hpp"
#include "quermass/rng.hpp"

using namespace quermass;

namespace {

constexpr double kPi = 3.14159265358979323846;

MarkedConfiguration make_config(std::vector<Disc> discs, Window w) {
  MarkedConfiguration c;
  c.discs = std::move(discs);
  c.window = w;
  return c;
}

// Fraction of foreground among pixels farther than r from the raster border,
// the conditioning set every morphological fraction is measured on.
double fg_fraction_minus(const BinaryRaster& r, double rad) {
  std::size_t eligible = 0, fg = 0;
  for (std::size_t iy = 0; iy < r.height; ++iy)
    for (std::size_t ix = 0; ix < r.width; ++ix) {
      double dx = std::min(static_cast<double>(ix) + 0.5, static_cast<double>(r.width - ix) - 0.5);
      double dy = std::min(static_cast<double>(iy) + 0.5, static_cast<double>(r.height - iy) - 0.5);
      if (std::min(dx, dy) * r.pixel_size <= rad) continue;
      ++eligible;
      fg += r.at(ix, iy) ? 1 : 0;
    }
  return eligible ? static_cast<double>(fg) / static_cast<double>(eligible) : 1.0;
}

}  // namespace

TEST_CASE("r grid construction and validation") {
  std::vector<double> g = make_r_grid(2.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == 0.0);
  CHECK(g[4] == 2.0);
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(make_r_grid(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(make_r_grid(1.0, 1), std::invalid_argument);

  BinaryRaster r;
  r.width = r.height = 4;
  r.bits = {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(contact_distribution(r, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(contact_distribution(r, {0.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(covariance(r, {}), std::invalid_argument);
}

TEST_CASE("curve kinds have stable names") {
  CHECK(curve_kind_name(CurveKind::Contact) == "contact");
  CHECK(curve_kind_name(CurveKind::Covariance) == "covariance");
  CHECK(curve_kind_name(CurveKind::Erosion) == "erosion");
  CHECK(curve_kind_name(CurveKind::Dilation) == "dilation");
  CHECK(curve_kind_name(CurveKind::Opening) == "opening");
  CHECK(curve_kind_name(CurveKind::Closing) == "closing");
}

TEST_CASE("contact distribution of a single disc") {
  BinaryRaster r = rasterize(make_config({{10, 10, 2}}, {0, 0, 20, 20}), 0.05);
  std::vector<double> grid = make_r_grid(1.0, 5);
  CurveEstimate h = contact_distribution(r, grid);
  CHECK(h.kind == CurveKind::Contact);
  REQUIRE(h.values.size() == 5);
  CHECK(h.values[0] == 0.0);
  for (std::size_t i = 1; i < h.values.size(); ++i) CHECK(h.values[i] >= h.values[i - 1]);

  // Annulus over the conditioned area, exact for a disc away from the border.
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double rad = grid[i];
    double expect = (kPi * (2 + rad) * (2 + rad) - kPi * 4.0) /
                    ((20 - 2 * rad) * (20 - 2 * rad) - kPi * 4.0);
    CHECK(h.values[i] == doctest::Approx(expect).epsilon(0.03));
  }
}

TEST_CASE("contact distribution edge cases") {
  BinaryRaster empty;
  empty.width = empty.height = 10;
  empty.pixel_size = 1.0;
  empty.bits.assign(100, 0);
  CurveEstimate h = contact_distribution(empty, {0.0, 2.0, 6.0});
  CHECK(h.values[0] == 0.0);
  CHECK(h.values[1] == 0.0);  // nothing to hit
  CHECK(h.values[2] == 1.0);  // minus-sampling exhausts the 10x10 grid at r = 6

  BinaryRaster full = empty;
  full.bits.assign(100, 1);
  CHECK_THROWS_AS(contact_distribution(full, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("covariance at lag zero is the coverage fraction") {
  Rng rng(3);
  BinaryRaster r;
  r.width = 200;
  r.height = 150;
  r.pixel_size = 0.1;
  r.bits.assign(r.pixel_count(), 0);
  for (auto& b : r.bits) b = rng.uniform01() < 0.35 ? 1 : 0;

  double p = static_cast<double>(r.foreground_count()) / static_cast<double>(r.pixel_count());
  CurveEstimate c = covariance(r, {0.0, 0.3, 0.8, 1.5});
  CHECK(c.values[0] == doctest::Approx(p).epsilon(1e-12));

  // Independent pixels: C(r) = p^2 for any nonzero lag, up to counting noise.
  for (std::size_t i = 1; i < c.values.size(); ++i)
    CHECK(c.values[i] == doctest::Approx(p * p).epsilon(0.05));

  // Lag beyond both dimensions cannot be estimated.
  CHECK_THROWS_AS(covariance(r, {0.0, 100.0}), std::invalid_argument);

  BinaryRaster full;
  full.width = full.height = 12;
  full.bits.assign(144, 1);
  CurveEstimate one = covariance(full, {0.0, 3.0});
  CHECK(one.values[0] == 1.0);
  CHECK(one.values[1] == 1.0);
}

TEST_CASE("morphological fractions of a single disc") {
  BinaryRaster r = rasterize(make_config({{5, 5, 1}}, {0, 0, 10, 10}), 0.05);
  std::vector<double> grid{0.0, 0.3, 0.6};
  std::array<CurveEstimate, 4> curves = morph_curves(r, grid);
  CHECK(curves[0].kind == CurveKind::Erosion);
  CHECK(curves[1].kind == CurveKind::Dilation);
  CHECK(curves[2].kind == CurveKind::Opening);
  CHECK(curves[3].kind == CurveKind::Closing);

  // r = 0 reduces all four maps to the identity.
  double p0 = fg_fraction_minus(r, 0.0);
  for (const CurveEstimate& c : curves) CHECK(c.values[0] == doctest::Approx(p0).epsilon(1e-12));

  for (std::size_t i = 1; i < grid.size(); ++i) {
    double rad = grid[i];
    double denom = (10 - 2 * rad) * (10 - 2 * rad);
    double ero = kPi * (1 - rad) * (1 - rad) / denom;
    double dil = kPi * (1 + rad) * (1 + rad) / denom;
    CHECK(curves[0].values[i] == doctest::Approx(ero).epsilon(0.10));
    CHECK(curves[1].values[i] == doctest::Approx(dil).epsilon(0.10));
    // A disc is invariant under opening and closing by a smaller disc.
    CHECK(curves[2].values[i] == doctest::Approx(fg_fraction_minus(r, rad)).epsilon(0.02));
    CHECK(curves[3].values[i] == doctest::Approx(fg_fraction_minus(r, rad)).epsilon(0.02));
  }
}

TEST_CASE("morphological ordering holds on irregular shapes") {
  Rng rng(77);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<Disc> discs;
    for (int i = 0; i < 6; ++i)
      discs.push_back({rng.uniform(2, 10), rng.uniform(2, 10), rng.uniform(0.4, 1.4)});
    BinaryRaster r = rasterize(make_config(std::move(discs), {0, 0, 12, 12}), 0.08);
    std::vector<double> grid = make_r_grid(1.0, 6);
    std::array<CurveEstimate, 4> curves = morph_curves(r, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double p = fg_fraction_minus(r, grid[i]);
      CHECK(curves[0].values[i] <= curves[2].values[i]);  // erosion <= opening
      CHECK(curves[2].values[i] <= p);                    // opening is anti-extensive
      CHECK(p <= curves[3].values[i]);                    // closing is extensive
      CHECK(curves[3].values[i] <= curves[1].values[i]);  // closing <= dilation
    }
  }
}

TEST_CASE("curve dispatch returns the requested kind") {
  BinaryRaster r = rasterize(make_config({{3, 3, 1}}, {0, 0, 6, 6}), 0.1);
  std::vector<double> grid{0.0, 0.4};
  for (CurveKind kind : {CurveKind::Contact, CurveKind::Covariance, CurveKind::Erosion,
                         CurveKind::Dilation, CurveKind::Opening, CurveKind::Closing}) {
    CurveEstimate c = curve_for_kind(kind, r, grid);
    CHECK(c.kind == kind);
    CHECK(c.values.size() == 2);
  }
}

TEST_CASE("envelope bands bracket the replicate curves") {
  QuermassParams params;
  params.z = 0.4;
  RadiusLaw law = RadiusLaw::uniform_law(0.3, 0.8);
  Window w{0, 0, 8, 8};

  EnvelopeSettings settings;
  settings.chain.n_steps = 2000;
  settings.chain.burn_in = 500;
  settings.chain.seed = 31;
  settings.r_grid = make_r_grid(0.5, 6);
  settings.pixel_size = 0.1;
  settings.n_sim = 2;
  settings.q_lo = 0.0;
  settings.q_hi = 1.0;

  std::vector<CurveKind> kinds{CurveKind::Contact, CurveKind::Erosion};
  EnvelopeResult env = envelopes(params, law, w, kinds, settings);
  CHECK(env.failures.empty());
  CHECK(env.n_used == 2);
  REQUIRE(env.bands.size() == 2);
  CHECK(env.bands[0].kind == CurveKind::Contact);
  CHECK(env.bands[1].kind == CurveKind::Erosion);

  // With two replicates and [0,1] quantiles the band is the pointwise
  // min/max of the two simulated curves; rebuild them by hand.
  for (std::size_t rep = 0; rep < 2; ++rep) {
    ChainSettings chain = settings.chain;
    chain.seed = derive_seed(settings.chain.seed, "envelope", rep);
    MarkedConfiguration sim = simulate(params, law, w, chain);
    BinaryRaster raster = rasterize(sim, settings.pixel_size);
    CurveEstimate contact = contact_distribution(raster, settings.r_grid);
    for (std::size_t j = 0; j < settings.r_grid.size(); ++j) {
      CHECK(env.bands[0].lower[j] <= contact.values[j]);
      CHECK(env.bands[0].upper[j] >= contact.values[j]);
    }
  }
  for (std::size_t j = 0; j < settings.r_grid.size(); ++j)
    CHECK(env.bands[0].lower[j] <= env.bands[0].upper[j]);
}

TEST_CASE("envelopes are deterministic and order-independent") {
  QuermassParams params;
  params.z = 0.3;
  RadiusLaw law = RadiusLaw::uniform_law(0.3, 0.8);
  Window w{0, 0, 8, 8};

  EnvelopeSettings settings;
  settings.chain.n_steps = 1500;
  settings.chain.burn_in = 400;
  settings.chain.seed = 9;
  settings.r_grid = make_r_grid(0.4, 5);
  settings.pixel_size = 0.1;
  settings.n_sim = 4;

  std::vector<CurveKind> kinds{CurveKind::Covariance, CurveKind::Closing};
  EnvelopeResult a = envelopes(params, law, w, kinds, settings);
  EnvelopeResult b = envelopes(params, law, w, kinds, settings);
  settings.parallel = false;
  EnvelopeResult c = envelopes(params, law, w, kinds, settings);
  REQUIRE(a.bands.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.bands[k].lower == b.bands[k].lower);
    CHECK(a.bands[k].upper == b.bands[k].upper);
    CHECK(a.bands[k].lower == c.bands[k].lower);
    CHECK(a.bands[k].upper == c.bands[k].upper);
  }
  CHECK(a.n_used == 4);
}

TEST_CASE("envelope input validation and total failure") {
  QuermassParams params;
  params.z = 0.3;
  RadiusLaw law = RadiusLaw::uniform_law(0.3, 0.8);
  Window w{0, 0, 8, 8};
  EnvelopeSettings s;
  s.r_grid = make_r_grid(0.4, 5);
  s.chain.n_steps = 1000;
  s.chain.burn_in = 100;

  CHECK_THROWS_AS(envelopes(params, law, w, {}, s), std::invalid_argument);
  {
    EnvelopeSettings bad = s;
    bad.n_sim = 1;
    CHECK_THROWS_AS(envelopes(params, law, w, {CurveKind::Contact}, bad), std::invalid_argument);
  }
  {
    EnvelopeSettings bad = s;
    bad.pixel_size = 0.0;
    CHECK_THROWS_AS(envelopes(params, law, w, {CurveKind::Contact}, bad), std::invalid_argument);
  }
  {
    EnvelopeSettings bad = s;
    bad.q_lo = 0.9;
    bad.q_hi = 0.1;
    CHECK_THROWS_AS(envelopes(params, law, w, {CurveKind::Contact}, bad), std::invalid_argument);
  }

  // Large grains at a healthy intensity flood the window in every replicate;
  // the contact curve is then undefined and the envelope reports the
  // collective failure.
  QuermassParams flood;
  flood.z = 20.0;
  RadiusLaw big = RadiusLaw::uniform_law(1.5, 2.5);
  Window small{0, 0, 2, 2};
  EnvelopeSettings fs = s;
  fs.n_sim = 3;
  fs.chain.n_steps = 400;
  fs.chain.burn_in = 100;
  CHECK_THROWS_AS(envelopes(flood, big, small, {CurveKind::Contact}, fs), std::runtime_error);
}
