#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "quermass/model.hpp"

namespace quermass {

// Birth / death / move Metropolis-Hastings chain settings.  Kind
// probabilities must lie in (0,1) and sum to 1; burn_in < n_steps.
// move_sd = 0 selects the default step (the radius-law supremum).
struct ChainSettings {
  long n_steps = 200000;
  long burn_in = 50000;
  double p_birth = 1.0 / 3.0;
  double p_death = 1.0 / 3.0;
  double p_move = 1.0 / 3.0;
  double move_sd = 0.0;
  std::uint64_t seed = 0;
};

struct ChainDiagnostics {
  long proposed_birth = 0, accepted_birth = 0;
  long proposed_death = 0, accepted_death = 0;
  long proposed_move = 0, accepted_move = 0;
  // Union functionals of the final state, maintained incrementally.
  MinkowskiTriple final_triple;
};

// Called every observe_every steps once past burn-in; the triple tracks the
// union functionals of the current state.
using ChainObserver =
    std::function<void(long step, const MarkedConfiguration& state, const MinkowskiTriple& triple)>;

// Unclamped Hastings ratios, exposed for the detailed-balance checks.
// n is the number of points before the proposal is applied.
double birth_ratio(const QuermassParams& params, const RadiusLaw& law,
                   const MarkedConfiguration& state, const Disc& p,
                   const ChainSettings& settings);
double death_ratio(const QuermassParams& params, const RadiusLaw& law,
                   const MarkedConfiguration& state, std::size_t index,
                   const ChainSettings& settings);

// Runs the chain from an empty configuration and returns the final state.
MarkedConfiguration simulate(const QuermassParams& params, const RadiusLaw& law,
                             const Window& window, const ChainSettings& settings,
                             ChainDiagnostics* diagnostics = nullptr,
                             const ChainObserver& observer = nullptr, long observe_every = 0);

// Independent replicates; replicate i runs with seed
// derive_seed(settings.seed, "replicate", i), so results do not depend on
// scheduling and replicate(n)[i] equals simulate with that seed.
std::vector<MarkedConfiguration> replicate(const QuermassParams& params, const RadiusLaw& law,
                                           const Window& window, const ChainSettings& settings,
                                           std::size_t n_rep, bool parallel = true);

}  // namespace quermass
