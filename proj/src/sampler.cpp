#include "quermass/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "quermass/parallel.hpp"

namespace quermass {

namespace {

void validate_settings(const ChainSettings& s) {
  if (s.n_steps < 0 || s.burn_in < 0 || s.burn_in >= s.n_steps)
    throw std::invalid_argument("chain settings: need 0 <= burn_in < n_steps");
  // Zero birth or death probability leaves the chain stuck in one count class.
  if (!(s.p_birth > 0.0) || !(s.p_death > 0.0) || !(s.p_move > 0.0) ||
      s.p_birth >= 1.0 || s.p_death >= 1.0 || s.p_move >= 1.0 ||
      std::abs(s.p_birth + s.p_death + s.p_move - 1.0) > 1e-9)
    throw std::invalid_argument("chain settings: kind probabilities must lie in (0,1) and sum to 1");
  if (s.move_sd < 0.0) throw std::invalid_argument("chain settings: move_sd must be positive");
}

double dot(const std::array<double, 3>& theta, const MinkowskiTriple& d) {
  return theta[0] * d.area + theta[1] * d.perimeter + theta[2] * static_cast<double>(d.euler);
}

}  // namespace

double birth_ratio(const QuermassParams& params, const RadiusLaw& law,
                   const MarkedConfiguration& state, const Disc& p,
                   const ChainSettings& settings) {
  double lambda = papangelou(params, p, state, law.r0());
  double n1 = static_cast<double>(state.size()) + 1.0;
  return lambda * state.window.area() / n1 * (settings.p_death / settings.p_birth);
}

double death_ratio(const QuermassParams& params, const RadiusLaw& law,
                   const MarkedConfiguration& state, std::size_t index,
                   const ChainSettings& settings) {
  if (index >= state.size()) throw std::invalid_argument("death_ratio: index out of range");
  MarkedConfiguration rest = state;
  rest.discs.erase(rest.discs.begin() + static_cast<std::ptrdiff_t>(index));
  Disc p = state.discs[index];
  double lambda = papangelou(params, p, rest, law.r0());
  double n = static_cast<double>(state.size());
  return n / (lambda * state.window.area()) * (settings.p_birth / settings.p_death);
}

MarkedConfiguration simulate(const QuermassParams& params, const RadiusLaw& law,
                             const Window& window, const ChainSettings& settings,
                             ChainDiagnostics* diagnostics, const ChainObserver& observer,
                             long observe_every) {
  validate(params);
  validate_settings(settings);
  if (!(window.area() > 0.0)) throw std::invalid_argument("simulate: empty window");

  double r0 = law.r0();
  double move_sd = settings.move_sd > 0.0 ? settings.move_sd : r0;
  double volume = window.area();
  Rng rng(settings.seed);

  MarkedConfiguration state;
  state.window = window;
  MinkowskiTriple triple;
  ChainDiagnostics diag;

  for (long step = 1; step <= settings.n_steps; ++step) {
    double kind = rng.uniform01();
    if (kind < settings.p_birth) {
      ++diag.proposed_birth;
      Disc p{rng.uniform(window.x0, window.x1), rng.uniform(window.y0, window.y1),
             law.sample(rng)};
      MinkowskiTriple delta = local_delta(p, state, r0);
      double lambda = params.z * std::exp(-dot(params.theta, delta));
      double ratio = lambda * volume / (static_cast<double>(state.size()) + 1.0) *
                     (settings.p_death / settings.p_birth);
      if (rng.uniform01() < ratio) {
        state.discs.push_back(p);
        triple.area += delta.area;
        triple.perimeter += delta.perimeter;
        triple.euler += delta.euler;
        ++diag.accepted_birth;
      }
    } else if (kind < settings.p_birth + settings.p_death) {
      ++diag.proposed_death;
      if (!state.discs.empty()) {
        std::size_t k = rng.uniform_index(state.size());
        // Swap-remove so the energy is evaluated against the state without
        // the victim; restored on rejection.
        std::swap(state.discs[k], state.discs.back());
        Disc p = state.discs.back();
        state.discs.pop_back();
        MinkowskiTriple delta = local_delta(p, state, r0);
        double lambda = params.z * std::exp(-dot(params.theta, delta));
        double ratio = (static_cast<double>(state.size()) + 1.0) / (lambda * volume) *
                       (settings.p_birth / settings.p_death);
        if (rng.uniform01() < ratio) {
          triple.area -= delta.area;
          triple.perimeter -= delta.perimeter;
          triple.euler -= delta.euler;
          ++diag.accepted_death;
        } else {
          state.discs.push_back(p);
        }
      }
    } else {
      ++diag.proposed_move;
      if (!state.discs.empty()) {
        std::size_t k = rng.uniform_index(state.size());
        std::swap(state.discs[k], state.discs.back());
        Disc p_old = state.discs.back();
        state.discs.pop_back();
        auto [gx, gy] = rng.normal2();
        Disc p_new{p_old.cx + move_sd * gx, p_old.cy + move_sd * gy, law.sample(rng)};
        double u = rng.uniform01();
        if (window.contains(p_new.cx, p_new.cy)) {
          MinkowskiTriple d_old = local_delta(p_old, state, r0);
          MinkowskiTriple d_new = local_delta(p_new, state, r0);
          double ratio = std::exp(dot(params.theta, d_old) - dot(params.theta, d_new));
          if (u < ratio) {
            state.discs.push_back(p_new);
            triple.area += d_new.area - d_old.area;
            triple.perimeter += d_new.perimeter - d_old.perimeter;
            triple.euler += d_new.euler - d_old.euler;
            ++diag.accepted_move;
          } else {
            state.discs.push_back(p_old);
          }
        } else {
          state.discs.push_back(p_old);
        }
      }
    }
    if (observer && observe_every > 0 && step > settings.burn_in &&
        (step - settings.burn_in) % observe_every == 0)
      observer(step, state, triple);
  }

  diag.final_triple = triple;
  if (diagnostics) *diagnostics = diag;
  return state;
}

std::vector<MarkedConfiguration> replicate(const QuermassParams& params, const RadiusLaw& law,
                                           const Window& window, const ChainSettings& settings,
                                           std::size_t n_rep, bool parallel) {
  std::vector<MarkedConfiguration> out(n_rep);
  parallel_for(n_rep, parallel, [&](std::size_t i) {
    ChainSettings s = settings;
    s.seed = derive_seed(settings.seed, "replicate", i);
    out[i] = simulate(params, law, window, s);
  });
  return out;
}

}  // namespace quermass
