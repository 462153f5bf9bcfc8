#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "quermass/model.hpp"
#include "support/grid_oracle.hpp"

using namespace quermass;

namespace {

constexpr double kPi = 3.14159265358979323846;

MarkedConfiguration make_config(std::vector<Disc> discs, Window w = {0, 0, 10, 10}) {
  MarkedConfiguration c;
  c.discs = std::move(discs);
  c.window = w;
  return c;
}

}  // namespace

TEST_CASE("radius law validation") {
  CHECK_THROWS(RadiusLaw::uniform_law(-0.1, 1.0));
  CHECK_THROWS(RadiusLaw::uniform_law(1.0, 1.0));
  CHECK_THROWS(RadiusLaw::discrete_law({}));
  CHECK_THROWS(RadiusLaw::discrete_law({{0.5, 0.6}, {1.0, 0.1}}));  // probs sum != 1
  CHECK_THROWS(RadiusLaw::discrete_law({{-0.5, 1.0}}));
  CHECK_THROWS(RadiusLaw::discrete_law({{0.5, 0.0}, {1.0, 1.0}}));

  RadiusLaw u = RadiusLaw::uniform_law(0.5, 2.0);
  CHECK(u.r0() == 2.0);
  CHECK(std::abs(u.mean() - 1.25) <= 1e-15);

  RadiusLaw d = RadiusLaw::discrete_law({{0.5, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
  CHECK(d.r0() == 2.0);
  CHECK(std::abs(d.mean() - 1.125) <= 1e-15);
}

TEST_CASE("radius sampling matches the law") {
  Rng rng(7);
  RadiusLaw u = RadiusLaw::uniform_law(0.5, 2.0);
  double sum = 0.0;
  int n = 200000;
  for (int i = 0; i < n; ++i) {
    double r = u.sample(rng);
    CHECK(r >= 0.5);
    CHECK(r <= 2.0);
    sum += r;
  }
  CHECK(std::abs(sum / n - 1.25) < 0.01);

  RadiusLaw d = RadiusLaw::discrete_law({{0.3, 0.2}, {0.7, 0.5}, {1.1, 0.3}});
  std::map<double, int> counts;
  for (int i = 0; i < n; ++i) counts[d.sample(rng)]++;
  REQUIRE(counts.size() == 3);
  CHECK(std::abs(counts[0.3] / double(n) - 0.2) < 0.01);
  CHECK(std::abs(counts[0.7] / double(n) - 0.5) < 0.01);
  CHECK(std::abs(counts[1.1] / double(n) - 0.3) < 0.01);
}

TEST_CASE("hamiltonian closed-form cases") {
  QuermassParams p;
  CHECK(hamiltonian({0.7, -0.3, 1.1}, make_config({})) == 0.0);

  double h = hamiltonian({0.2, 0.0, 0.0}, make_config({{0, 0, 1}}));
  CHECK(std::abs(h - 0.2 * kPi) <= 1e-12);

  h = hamiltonian({0.0, 0.14, 0.22}, make_config({{0, 0, 1}, {1, 0, 1}}));
  CHECK(std::abs(h - (0.14 * 8.0 * kPi / 3.0 + 0.22)) <= 1e-9);
}

TEST_CASE("local energy closed-form cases") {
  CHECK(std::abs(local_energy({0.2, 0, 0}, {0, 0, 1}, make_config({}), 1.0) - 0.2 * kPi) <= 1e-12);
  CHECK(local_energy({0, 0, 1}, {0, 0, 0.3}, make_config({{0, 0, 1}}), 1.0) == 0.0);
  double e = local_energy({-0.2, 0.3, 0}, {0, 0, 1}, make_config({{1, 0, 1}}), 1.0);
  CHECK(std::abs(e - (-0.2 * 1.91322295498103 + 0.3 * 2.0 * kPi / 3.0)) <= 1e-9);
}

TEST_CASE("papangelou intensity") {
  QuermassParams poisson{0.1, {0, 0, 0}};
  CHECK(std::abs(papangelou(poisson, {3, 3, 0.7}, make_config({{1, 1, 1}}), 1.0) - 0.1) <= 1e-15);

  QuermassParams area{1.0, {0.2, 0, 0}};
  double lam = papangelou(area, {0, 0, 1}, make_config({}), 1.0);
  CHECK(std::abs(lam - std::exp(-0.2 * kPi)) <= 1e-12);

  QuermassParams heather{2.12, {0.0, 0.14, 0.22}};
  lam = papangelou(heather, {0, 0, 0.3}, make_config({}), 0.55);
  CHECK(std::abs(lam - 2.12 * std::exp(-0.14 * 0.6 * kPi - 0.22)) <= 1e-9);
}

TEST_CASE("papangelou and local energy are consistent") {
  Rng rng(11);
  Window w{0, 0, 10, 10};
  QuermassParams params{0.37, {0.15, -0.25, 0.4}};
  for (int rep = 0; rep < 30; ++rep) {
    auto discs = quermass::testing::random_discs(rng, 10, w, 0.3, 1.5, 0.0);
    MarkedConfiguration c = make_config(discs, w);
    Disc p{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0), rng.uniform(0.3, 1.5)};
    double lam = papangelou(params, p, c, 1.5);
    CHECK(lam > 0.0);
    CHECK(std::abs(lam * std::exp(local_energy(params.theta, p, c, 1.5)) - params.z) <= 1e-12);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(validate(QuermassParams{0.0, {0, 0, 0}}));
  CHECK_THROWS(validate(QuermassParams{-1.0, {0, 0, 0}}));
  CHECK_THROWS(validate(QuermassParams{1.0, {std::nan(""), 0, 0}}));
  validate(QuermassParams{1.0, {0.5, -0.5, 2.0}});
}

TEST_CASE("theta zero reduces to the Boolean model") {
  Rng rng(12);
  auto discs = quermass::testing::random_discs(rng, 12, {0, 0, 10, 10}, 0.3, 1.5, 0.0);
  MarkedConfiguration c = make_config(discs);
  CHECK(hamiltonian({0, 0, 0}, c) == 0.0);
  QuermassParams params{0.8, {0, 0, 0}};
  CHECK(papangelou(params, {5, 5, 1}, c, 1.5) == 0.8);
}
