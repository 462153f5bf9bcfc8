#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "quermass/estimator.hpp"
#include "quermass/raster.hpp"
#include "quermass/rng.hpp"
#include "quermass/sampler.hpp"

using namespace quermass;

namespace {

constexpr double kPi = 3.14159265358979323846;

MarkedConfiguration make_config(std::vector<Disc> discs, Window w) {
  MarkedConfiguration c;
  c.discs = std::move(discs);
  c.window = w;
  return c;
}

// Quadratic-time reference for the distance transform.
std::vector<double> brute_force_dt(const std::vector<std::uint8_t>& mask, std::size_t w,
                                   std::size_t h) {
  std::vector<double> out(w * h, 1e30);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double best = 1e30;
      for (std::size_t sy = 0; sy < h; ++sy)
        for (std::size_t sx = 0; sx < w; ++sx) {
          if (!mask[sy * w + sx]) continue;
          double dx = static_cast<double>(x) - static_cast<double>(sx);
          double dy = static_cast<double>(y) - static_cast<double>(sy);
          best = std::min(best, dx * dx + dy * dy);
        }
      out[y * w + x] = best;
    }
  return out;
}

std::size_t symmetric_difference(const BinaryRaster& a, const BinaryRaster& b) {
  REQUIRE(a.width == b.width);
  REQUIRE(a.height == b.height);
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) n += (a.bits[i] != b.bits[i]) ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("rasterize covers the window at the requested resolution") {
  MarkedConfiguration c = make_config({{5, 5, 3}}, {0, 0, 10, 10});
  BinaryRaster r = rasterize(c, 0.1);
  CHECK(r.width == 100);
  CHECK(r.height == 100);
  CHECK(r.pixel_size == 0.1);
  CHECK(r.origin_x == 0.0);
  CHECK(r.origin_y == 0.0);

  // Foreground count approximates the disc area.
  double frac = static_cast<double>(r.foreground_count()) * 0.01 / (kPi * 9.0);
  CHECK(frac > 0.99);
  CHECK(frac < 1.01);

  // Pixel-centre membership, spot checks: centre of pixel (50,50) is (5.05,5.05).
  CHECK(r.at(50, 50));
  CHECK(r.at(50, 20));   // (5.05, 2.05): distance 2.95 < 3
  CHECK_FALSE(r.at(50, 19));  // (5.05, 1.95): distance 3.05 > 3
  CHECK_FALSE(r.at(0, 0));

  Window w = r.world_window();
  CHECK(w.x1 == doctest::Approx(10.0));

  // Non-divisible width overhangs by under one pixel; degenerate sizes clamp to 1.
  BinaryRaster odd = rasterize(make_config({}, {0, 0, 1, 1}), 0.3);
  CHECK(odd.width == 4);
  BinaryRaster tiny = rasterize(make_config({}, {0, 0, 1, 1}), 2.0);
  CHECK(tiny.width == 1);
  CHECK(tiny.height == 1);

  CHECK_THROWS_AS(rasterize(c, 0.0), std::invalid_argument);
}

TEST_CASE("rasterize uses the window origin") {
  MarkedConfiguration c = make_config({{-3, 7, 1}}, {-5, 5, -1, 9});
  BinaryRaster r = rasterize(c, 0.1);
  CHECK(r.origin_x == -5.0);
  CHECK(r.origin_y == 5.0);
  CHECK(r.centre_x(0) == doctest::Approx(-4.95));
  // Disc centre sits at pixel (20, 20).
  CHECK(r.at(20, 20));
  double frac = static_cast<double>(r.foreground_count()) * 0.01 / kPi;
  CHECK(frac > 0.98);
  CHECK(frac < 1.02);
}

TEST_CASE("distance transform matches the brute force on random masks") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t w = 5 + rng.uniform_index(14), h = 5 + rng.uniform_index(11);
    std::vector<std::uint8_t> mask(w * h, 0);
    std::size_t n_set = 1 + rng.uniform_index(w * h / 3);
    for (std::size_t k = 0; k < n_set; ++k) mask[rng.uniform_index(w * h)] = 1;
    std::vector<double> fast = squared_distance_transform(mask, w, h);
    std::vector<double> slow = brute_force_dt(mask, w, h);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == slow[i]);
  }

  // All-set mask: zero everywhere.
  std::vector<std::uint8_t> full(12, 1);
  for (double v : squared_distance_transform(full, 4, 3)) CHECK(v == 0.0);

  // Empty mask: large sentinel everywhere.
  std::vector<std::uint8_t> empty(12, 0);
  for (double v : squared_distance_transform(empty, 4, 3)) CHECK(v > 1e17);
}

TEST_CASE("pgm round trip preserves bits and geometry") {
  Rng rng(19);
  BinaryRaster r;
  r.width = 37;
  r.height = 23;
  r.pixel_size = 0.05;
  r.origin_x = -2.25;
  r.origin_y = 3.125;
  r.bits.assign(r.pixel_count(), 0);
  for (std::size_t i = 0; i < r.bits.size(); ++i) r.bits[i] = rng.uniform01() < 0.4 ? 1 : 0;

  const std::string path = "/tmp/qm_test_roundtrip.pgm";
  write_pgm(r, path);
  BinaryRaster back = read_pgm(path);
  CHECK(back.width == r.width);
  CHECK(back.height == r.height);
  CHECK(back.pixel_size == r.pixel_size);
  CHECK(back.origin_x == r.origin_x);
  CHECK(back.origin_y == r.origin_y);
  CHECK(back.bits == r.bits);

  // The file itself is a binary P5.
  std::ifstream in(path, std::ios::binary);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  CHECK(magic == "P5");

  // Without the sidecar the geometry falls back to unit pixels at the origin.
  std::remove((path + ".meta").c_str());
  BinaryRaster bare = read_pgm(path);
  CHECK(bare.pixel_size == 1.0);
  CHECK(bare.origin_x == 0.0);
  CHECK(bare.bits == r.bits);
  std::remove(path.c_str());
}

TEST_CASE("pgm reader thresholds greys and rejects malformed input") {
  const std::string path = "/tmp/qm_test_grey.pgm";
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n# a comment line\n3 1\n255\n";
    char px[3] = {0, 127, static_cast<char>(128)};
    out.write(px, 3);
  }
  BinaryRaster r = read_pgm(path);
  REQUIRE(r.width == 3);
  REQUIRE(r.height == 1);
  CHECK_FALSE(r.at(0, 0));
  CHECK_FALSE(r.at(1, 0));  // 127 is background
  CHECK(r.at(2, 0));        // 128 is foreground

  {
    std::ofstream out(path, std::ios::binary);
    out << "P2\n3 1\n255\n0 0 0\n";
  }
  CHECK_THROWS_AS(read_pgm(path), std::runtime_error);

  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n3 1\n65535\n";
    char px[6] = {0, 0, 0, 0, 0, 0};
    out.write(px, 6);
  }
  CHECK_THROWS_AS(read_pgm(path), std::runtime_error);

  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n3 2\n255\n";
    char px[2] = {0, 0};  // four bytes short
    out.write(px, 2);
  }
  CHECK_THROWS_AS(read_pgm(path), std::runtime_error);

  CHECK_THROWS_AS(read_pgm("/tmp/qm_no_such_file.pgm"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("pgm writes rows top-down") {
  // One foreground pixel at the top-left in world coordinates (ix=0, iy=1)
  // must be the first pixel of the payload.
  BinaryRaster r;
  r.width = 2;
  r.height = 2;
  r.bits = {0, 0, 1, 0};  // iy=1 row holds the set pixel
  const std::string path = "/tmp/qm_test_flip.pgm";
  write_pgm(r, path);
  std::ifstream in(path, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(all.size() >= 4);
  std::string payload = all.substr(all.size() - 4);
  CHECK(static_cast<unsigned char>(payload[0]) == 255);
  CHECK(static_cast<unsigned char>(payload[1]) == 0);
  CHECK(static_cast<unsigned char>(payload[2]) == 0);
  CHECK(static_cast<unsigned char>(payload[3]) == 0);
  std::remove(path.c_str());
  std::remove((path + ".meta").c_str());
}

TEST_CASE("greedy covering reproduces a plain disc") {
  MarkedConfiguration c = make_config({{5, 5, 1}}, {0, 0, 10, 10});
  BinaryRaster r = rasterize(c, 0.1);
  ApproxReport report;
  MarkedConfiguration approx = approximate(r, 0.2, 2.0, 0.05, 50, &report);
  CHECK(report.tol_met);
  CHECK(report.achieved <= 0.05);
  CHECK(report.n_discs == approx.size());
  CHECK(approx.size() >= 1);
  CHECK(approx.size() <= 4);
  // The first disc lands on the medial axis with nearly the full radius.
  CHECK(std::abs(approx.discs[0].cx - 5.0) < 0.15);
  CHECK(std::abs(approx.discs[0].cy - 5.0) < 0.15);
  CHECK(approx.discs[0].r > 0.8);
  CHECK(approx.discs[0].r <= 1.1);

  // Pixel agreement of the re-rasterized approximation.
  BinaryRaster again = rasterize(approx, 0.1);
  double mismatch = static_cast<double>(symmetric_difference(r, again)) /
                    static_cast<double>(r.foreground_count());
  CHECK(mismatch <= 0.06);
}

TEST_CASE("greedy covering respects the radius clamp and disc budget") {
  MarkedConfiguration c = make_config({{5, 5, 3}}, {0, 0, 10, 10});
  BinaryRaster r = rasterize(c, 0.1);

  ApproxReport report;
  MarkedConfiguration capped = approximate(r, 0.1, 0.5, 0.02, 400, &report);
  for (const Disc& d : capped.discs) {
    CHECK(d.r >= 0.1);
    CHECK(d.r <= 0.5);
  }

  MarkedConfiguration floored = approximate(r, 0.8, 3.0, 0.02, 400, &report);
  for (const Disc& d : floored.discs) CHECK(d.r >= 0.8);

  // A budget of one disc cannot reach a 2% tolerance on a two-disc shape.
  MarkedConfiguration pair =
      make_config({{3, 5, 1}, {7, 5, 1}}, {0, 0, 10, 10});
  BinaryRaster pr = rasterize(pair, 0.1);
  MarkedConfiguration one = approximate(pr, 0.2, 2.0, 0.02, 1, &report);
  CHECK(one.size() == 1);
  CHECK_FALSE(report.tol_met);
  CHECK(report.achieved > 0.02);

  CHECK_THROWS_AS(approximate(r, 0.0, 1.0, 0.05, 10), std::invalid_argument);
  CHECK_THROWS_AS(approximate(r, 1.0, 0.5, 0.05, 10), std::invalid_argument);
  CHECK_THROWS_AS(approximate(r, 0.1, 1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(approximate(r, 0.1, 1.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("greedy covering of an empty raster is empty") {
  BinaryRaster r;
  r.width = 20;
  r.height = 20;
  r.pixel_size = 0.1;
  r.bits.assign(400, 0);
  ApproxReport report;
  MarkedConfiguration approx = approximate(r, 0.1, 1.0, 0.05, 10, &report);
  CHECK(approx.size() == 0);
  CHECK(report.tol_met);
  CHECK(report.achieved == 0.0);
}

TEST_CASE("greedy covering is deterministic and round-trip stable") {
  MarkedConfiguration c =
      make_config({{3, 4, 1.2}, {5.5, 4.5, 0.9}, {7, 8, 1.0}}, {0, 0, 11, 11});
  BinaryRaster r = rasterize(c, 0.05);

  ApproxReport rep1, rep2;
  MarkedConfiguration a = approximate(r, 0.1, 2.0, 0.03, 200, &rep1);
  MarkedConfiguration b = approximate(r, 0.1, 2.0, 0.03, 200, &rep2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.discs[i].cx == b.discs[i].cx);
    CHECK(a.discs[i].cy == b.discs[i].cy);
    CHECK(a.discs[i].r == b.discs[i].r);
  }
  CHECK(rep1.achieved == rep2.achieved);

  // Re-rasterized approximation agrees with the source mask almost everywhere.
  BinaryRaster again = rasterize(a, 0.05);
  double agreement = 1.0 - static_cast<double>(symmetric_difference(r, again)) /
                               static_cast<double>(r.pixel_count());
  CHECK(agreement >= 0.95);
  CHECK(rep1.tol_met);
}

namespace {

double suite_z_all(const MarkedConfiguration& obs) {
  SuiteResult suite = estimator_suite(obs, RadiusLaw::uniform_law(0.5, 2.0),
                                      {true, false, false}, 4221);
  for (const NamedEstimate& e : suite.estimates)
    if (e.name == "all" && e.ok) return e.fit.z_hat;
  throw std::runtime_error("joint estimate unavailable");
}

}  // namespace

TEST_CASE("intensity estimate does not depend on the covering used") {
  // Two coverings of the same raster, built with different radius bounds,
  // decompose the union into different discs; the estimator reads only the
  // union (disc count carries no intensity information), so the two joint
  // intensity estimates must agree to within the estimator's own spread
  // across replicates.
  QuermassParams params{0.1, {0.2, 0.0, 0.0}};
  RadiusLaw law = RadiusLaw::uniform_law(0.5, 2.0);
  Window window{0.0, 0.0, 20.0, 20.0};
  ChainSettings settings;
  settings.n_steps = 80000;
  settings.burn_in = 20000;
  settings.seed = 606;
  MarkedConfiguration state = simulate(params, law, window, settings);
  REQUIRE(state.size() >= 10);

  BinaryRaster raster = rasterize(state, 0.05);
  ApproxReport rep_a, rep_b;
  MarkedConfiguration cover_a = approximate(raster, 0.5, 2.0, 0.02, 5000, &rep_a);
  MarkedConfiguration cover_b = approximate(raster, 0.35, 2.3, 0.02, 5000, &rep_b);
  REQUIRE(rep_a.tol_met);
  REQUIRE(rep_b.tol_met);
  bool same = cover_a.size() == cover_b.size();
  for (std::size_t i = 0; same && i < cover_a.size(); ++i)
    same = cover_a.discs[i].cx == cover_b.discs[i].cx &&
           cover_a.discs[i].cy == cover_b.discs[i].cy && cover_a.discs[i].r == cover_b.discs[i].r;
  CHECK_FALSE(same);

  double z_a = suite_z_all(cover_a);
  double z_b = suite_z_all(cover_b);

  // Spread of the same estimator across independent replicates of the
  // process, fitted on the exact simulated discs.
  ChainSettings rep_settings = settings;
  rep_settings.seed = 616;
  std::vector<MarkedConfiguration> reps = replicate(params, law, window, rep_settings, 8);
  std::vector<double> z_reps;
  for (const MarkedConfiguration& r : reps) z_reps.push_back(suite_z_all(r));
  std::sort(z_reps.begin(), z_reps.end());
  double q1 = z_reps[1], q3 = z_reps[5];
  double iqr = q3 - q1;

  CHECK(z_a > 0.0);
  CHECK(std::abs(z_a - z_b) <= iqr);
}
