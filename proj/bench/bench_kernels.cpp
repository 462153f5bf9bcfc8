// Times the handful of hot kernels serial vs parallel. Both paths must agree
// bitwise (the test suite enforces that); this reports the speedup only.

#include <chrono>
#include <cstdio>
#include <vector>

#include "quermass/diagnostics.hpp"
#include "quermass/estimator.hpp"
#include "quermass/parallel.hpp"
#include "quermass/sampler.hpp"

using namespace quermass;

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double time_s(Fn&& fn) {
  auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-24s %9.3f s %9.3f s %6.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", max_threads());
  std::printf("%-24s %11s %11s %7s\n", "kernel", "serial", "parallel", "speedup");

  QuermassParams params{0.1, {0.2, 0.0, 0.0}};
  RadiusLaw law = RadiusLaw::uniform_law(0.5, 2.0);
  Window window{0.0, 0.0, 50.0, 50.0};
  ChainSettings settings;
  settings.seed = 17;

  std::vector<MarkedConfiguration> reps;
  row("replicate x8",
      time_s([&] { replicate(params, law, window, settings, 8, false); }),
      time_s([&] { reps = replicate(params, law, window, settings, 8, true); }));

  const MarkedConfiguration& obs = reps.front();
  std::vector<TestFunctionSpec> specs;
  specs.push_back(TestFunctionSpec::f0());
  for (double a : default_alphas(law.r0())) specs.push_back(TestFunctionSpec::make_alpha(a));
  double margin = law.r0() + 0.2;

  row("observed statistics",
      time_s([&] { observed_statistics(specs, obs, margin, false); }),
      time_s([&] { observed_statistics(specs, obs, margin, true); }));

  SampleTable table;
  row("sample table (N=4000)",
      time_s([&] { build_sample_table(obs, law, specs, 4000, 3, false); }),
      time_s([&] { table = build_sample_table(obs, law, specs, 4000, 3, true); }));

  std::vector<double> S = observed_statistics(specs, obs, margin, true);
  GridSpec grid = GridSpec::for_free({true, true, true});
  row("grid fit (3 free)",
      time_s([&] { fit_with_table(table, S, grid, true, false); }),
      time_s([&] { fit_with_table(table, S, grid, true, true); }));

  EnvelopeSettings env;
  env.chain.n_steps = 30000;
  env.chain.burn_in = 10000;
  env.chain.seed = 5;
  env.r_grid = make_r_grid(1.0, 9);
  env.pixel_size = 0.1;
  env.n_sim = 8;
  Window small{0.0, 0.0, 15.0, 15.0};
  std::vector<CurveKind> kinds = {CurveKind::Contact, CurveKind::Opening};
  row("envelopes x8",
      time_s([&] {
        EnvelopeSettings serial = env;
        serial.parallel = false;
        envelopes(params, law, small, kinds, serial);
      }),
      time_s([&] { envelopes(params, law, small, kinds, env); }));

  return 0;
}
