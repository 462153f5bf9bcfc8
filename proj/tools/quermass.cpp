// Command-line front end. Every run is determined by (flags, config file,
// inputs); a `--config` file overrides flags, environment variables are never
// consulted, and identical inputs reproduce outputs byte for byte.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quermass/diagnostics.hpp"
#include "quermass/estimator.hpp"
#include "quermass/io.hpp"
#include "quermass/model.hpp"
#include "quermass/raster.hpp"
#include "quermass/rng.hpp"
#include "quermass/sampler.hpp"

using namespace quermass;
using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_number(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': not a number: " + value);
  }
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(to_number(item, what));
  }
  if (out.empty()) throw std::runtime_error(what + ": expected a comma-separated number list");
  return out;
}

// Applies "key = value" config entries over already-parsed flag values; the
// file wins. Unknown keys are rejected by name.
class ConfigBinder {
 public:
  void bind(const std::string& key, std::function<void(const std::string&)> setter) {
    keys_.push_back(key);
    setters_[key] = std::move(setter);
  }
  void number(const std::string& key, double* target) {
    bind(key, [key, target](const std::string& v) { *target = to_number(v, key); });
  }
  void integer(const std::string& key, long* target) {
    bind(key, [key, target](const std::string& v) {
      *target = static_cast<long>(to_number(v, key));
    });
  }
  void count(const std::string& key, std::size_t* target) {
    bind(key, [key, target](const std::string& v) {
      double x = to_number(v, key);
      if (x < 0) throw std::runtime_error("config key '" + key + "': must be >= 0");
      *target = static_cast<std::size_t>(x);
    });
  }
  void seed(const std::string& key, std::uint64_t* target) {
    bind(key, [key, target](const std::string& v) {
      try {
        *target = std::stoull(v);
      } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': not a seed: " + v);
      }
    });
  }
  void text(const std::string& key, std::string* target) {
    bind(key, [target](const std::string& v) { *target = v; });
  }

  void apply_file(const std::string& path) const {
    if (path.empty()) return;
    KeyValues kv = read_key_values_file(path);
    kv.ensure_known(keys_);
    for (const auto& [key, value] : kv.entries()) setters_.at(key)(value);
  }

 private:
  std::vector<std::string> keys_;
  std::map<std::string, std::function<void(const std::string&)>> setters_;
};

// Model + chain options shared by the sampling commands.
struct ModelOptions {
  double z = 0.1;
  double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
  std::string radius_law = "uniform(0.5,2)";
  std::string window = "(0,0,50,50)";
  long steps = 200000, burn_in = 50000;
  std::uint64_t seed = 0;

  QuermassParams params() const { return QuermassParams{z, {theta1, theta2, theta3}}; }
  RadiusLaw law() const { return parse_radius_law(radius_law); }
  Window win() const { return parse_window(window); }
  ChainSettings chain() const {
    ChainSettings s;
    s.n_steps = steps;
    s.burn_in = burn_in;
    s.seed = seed;
    return s;
  }

  void add_flags(CLI::App* cmd, ConfigBinder* binder, bool with_chain = true) {
    cmd->add_option("--z", z, "intensity (> 0)");
    cmd->add_option("--theta1", theta1, "area weight");
    cmd->add_option("--theta2", theta2, "perimeter weight");
    cmd->add_option("--theta3", theta3, "Euler characteristic weight");
    cmd->add_option("--radius-law", radius_law,
                    "uniform(r_min,r_max) or discrete[(r,p),...]");
    cmd->add_option("--window", window, "observation window (x0,y0,x1,y1)");
    binder->number("z", &z);
    binder->number("theta1", &theta1);
    binder->number("theta2", &theta2);
    binder->number("theta3", &theta3);
    binder->text("radius_law", &radius_law);
    binder->text("window", &window);
    if (with_chain) {
      cmd->add_option("--steps", steps, "chain length");
      cmd->add_option("--burn-in", burn_in, "burn-in steps");
      cmd->add_option("--seed", seed, "master seed");
      binder->integer("steps", &steps);
      binder->integer("burn_in", &burn_in);
      binder->seed("seed", &seed);
    }
  }
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Observation input: disc CSV (window required separately) or PGM raster
// (window and discs recovered from the pixels).
MarkedConfiguration load_observation(const std::string& path, const std::string& window_text,
                                     const RadiusLaw& law, double approx_tol,
                                     std::size_t approx_max_discs) {
  bool is_pgm = path.size() >= 4 && path.substr(path.size() - 4) == ".pgm";
  MarkedConfiguration obs;
  if (is_pgm) {
    BinaryRaster raster = read_pgm(path);
    double r_min = law.is_uniform() ? law.uniform_min() : law.atoms().front().first;
    double r_max = law.r0();
    ApproxReport report;
    obs = approximate(raster, r_min, r_max, approx_tol, approx_max_discs, &report);
    std::fprintf(stderr, "approximated %zu discs, coverage error %s%s\n", obs.size(),
                 num(report.achieved).c_str(), report.tol_met ? "" : " (tolerance not met)");
  } else {
    obs.discs = read_discs_csv(path);
    if (window_text.empty())
      throw std::runtime_error("disc CSV input needs --window (x0,y0,x1,y1)");
  }
  if (!window_text.empty()) obs.window = parse_window(window_text);
  return obs;
}

std::array<bool, 3> model_mask(const std::string& model) {
  if (model == "A") return {true, false, false};
  if (model == "L") return {false, true, false};
  if (model == "Chi") return {false, false, true};
  if (model == "AL") return {true, true, false};
  if (model == "LChi") return {false, true, true};
  if (model == "full") return {true, true, true};
  throw std::runtime_error("unknown --model '" + model + "' (use A, L, Chi, AL, LChi or full)");
}

CurveKind kind_from_name(const std::string& name) {
  for (CurveKind k : {CurveKind::Contact, CurveKind::Covariance, CurveKind::Erosion,
                      CurveKind::Dilation, CurveKind::Opening, CurveKind::Closing})
    if (curve_kind_name(k) == name) return k;
  throw std::runtime_error("unknown curve kind '" + name +
                           "' (use contact, covariance, erosion, dilation, opening, closing)");
}

// ---------------------------------------------------------------------------

int run_simulate(const ModelOptions& model, const std::string& out, const std::string& render,
                 double pixel_size, const std::string& trace, long trace_every) {
  QuermassParams params = model.params();
  validate(params);
  RadiusLaw law = model.law();
  Window window = model.win();

  std::ostringstream trace_rows;
  ChainObserver observer;
  if (!trace.empty()) {
    trace_rows << "step,n,area,perimeter,euler\n";
    observer = [&](long step, const MarkedConfiguration& state, const MinkowskiTriple& t) {
      trace_rows << step << ',' << state.size() << ',' << num(t.area) << ',' << num(t.perimeter)
                 << ',' << t.euler << '\n';
    };
  }

  MarkedConfiguration state = simulate(params, law, window, model.chain(), nullptr, observer,
                                       observer ? trace_every : 0);
  write_discs_csv(out, state.discs);
  std::printf("wrote %zu discs to %s\n", state.size(), out.c_str());
  if (!trace.empty()) {
    write_text_file(trace, trace_rows.str());
    std::printf("wrote trace to %s\n", trace.c_str());
  }
  if (!render.empty()) {
    write_pgm(rasterize(state, pixel_size), render);
    std::printf("wrote render to %s\n", render.c_str());
  }
  return 0;
}

int run_replicate(const ModelOptions& model, std::size_t reps, const std::string& prefix) {
  QuermassParams params = model.params();
  validate(params);
  std::vector<MarkedConfiguration> states =
      replicate(params, model.law(), model.win(), model.chain(), reps);
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::string path = prefix + "_" + std::to_string(i) + ".csv";
    write_discs_csv(path, states[i].discs);
    std::printf("wrote %zu discs to %s\n", states[i].size(), path.c_str());
  }
  return 0;
}

int run_estimate(const std::string& obs_path, const std::string& window_text,
                 const std::string& model, const std::string& radius_law,
                 const std::string& alphas_text, std::size_t n_points, const std::string& grid_text,
                 std::uint64_t seed, double approx_tol, std::size_t approx_max,
                 const std::string& out) {
  RadiusLaw law = parse_radius_law(radius_law);
  MarkedConfiguration obs = load_observation(obs_path, window_text, law, approx_tol, approx_max);
  std::array<bool, 3> mask = model_mask(model);

  std::vector<double> alphas =
      alphas_text.empty() ? default_alphas(law.r0()) : parse_number_list(alphas_text, "--alphas");

  SuiteResult suite = estimator_suite(obs, law, mask, seed, n_points, alphas);
  if (!grid_text.empty()) {
    // Grid override re-runs the battery on the requested axis range.
    std::vector<double> g = parse_number_list(grid_text, "--grid");
    if (g.size() != 3) throw std::runtime_error("--grid expects lo,hi,step");
    GridSpec spec;
    for (std::size_t a = 0; a < 3; ++a)
      if (mask[a]) spec.axes[a] = AxisSpec{g[0], g[1], g[2]};
    std::vector<TestFunctionSpec> specs;
    specs.push_back(TestFunctionSpec::f0());
    for (double a : alphas) specs.push_back(TestFunctionSpec::make_alpha(a));
    FitResult f = fit(obs, law, specs, spec, true, n_points, seed);
    for (NamedEstimate& e : suite.estimates)
      if (e.name == "all") {
        e.fit = f;
        e.ok = true;
        e.error.clear();
      }
  }

  json doc = json::parse(suite_to_json(
      suite, {"command=estimate", "model=" + model, "obs=" + obs_path,
              "radius_law=" + law.describe(),
              "window=(" + num(obs.window.x0) + "," + num(obs.window.y0) + "," +
                  num(obs.window.x1) + "," + num(obs.window.y1) + ")",
              "n_points=" + std::to_string(n_points), "seed=" + std::to_string(seed)}));

  // Balance residuals at the pooled fit: near zero when the model fits.
  const NamedEstimate* at = nullptr;
  for (const NamedEstimate& e : suite.estimates)
    if (e.ok && e.name == "all") at = &e;
  if (at) {
    QuermassParams fitted{at->fit.z_hat, at->fit.theta_hat};
    double margin = at->fit.margin;
    double inner = obs.window.eroded(margin).area();
    json residuals = json::array();
    std::vector<TestFunctionSpec> specs;
    specs.push_back(TestFunctionSpec::f0());
    for (double a : alphas) specs.push_back(TestFunctionSpec::make_alpha(a));
    for (std::size_t k = 0; k < specs.size(); ++k) {
      double res = gnz_residual(fitted, law, obs, specs[k], margin, n_points,
                                derive_seed(seed, "gnz", k));
      residuals.push_back(
          {{"test_function", specs[k].name()}, {"residual", res}, {"per_area", res / inner}});
    }
    doc["gnz"] = {{"at_estimate", "all"}, {"residuals", residuals}};
  }

  write_text_file(out, doc.dump(2) + "\n");
  std::printf("wrote fit to %s\n", out.c_str());
  return 0;
}

int run_approximate(const std::string& in, double tol, double r_min, double r_max,
                    std::size_t max_discs, const std::string& out) {
  BinaryRaster raster = read_pgm(in);
  ApproxReport report;
  MarkedConfiguration config = approximate(raster, r_min, r_max, tol, max_discs, &report);
  write_discs_csv(out, config.discs);
  Window w = config.window;
  std::printf("wrote %zu discs to %s (coverage error %s, tolerance %s; window (%s,%s,%s,%s))\n",
              config.size(), out.c_str(), num(report.achieved).c_str(),
              report.tol_met ? "met" : "NOT met", num(w.x0).c_str(), num(w.y0).c_str(),
              num(w.x1).c_str(), num(w.y1).c_str());
  return 0;
}

int run_diagnose(const std::string& data_path, const std::string& model_json, std::size_t n_sim,
                 const std::string& kinds_text, double r_max, std::size_t n_r, long steps,
                 long burn_in, std::uint64_t seed, const std::string& out) {
  BinaryRaster raster = read_pgm(data_path);

  std::ifstream in(model_json);
  if (!in) throw std::runtime_error("cannot read " + model_json);
  json doc = json::parse(in, nullptr, true, true);

  QuermassParams params;
  std::string law_text;
  if (doc.contains("z_hat")) {  // bare fit document
    params.z = doc.at("z_hat").get<double>();
    auto t = doc.at("theta_hat");
    params.theta = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  } else if (doc.contains("estimates")) {  // estimate battery document
    const json* chosen = nullptr;
    for (const json& e : doc.at("estimates"))
      if (e.at("ok").get<bool>() && e.at("name") == "all") chosen = &e;
    if (!chosen)
      for (const json& e : doc.at("estimates"))
        if (e.at("ok").get<bool>()) {
          chosen = &e;
          break;
        }
    if (!chosen) throw std::runtime_error(model_json + ": no successful estimate to diagnose");
    const json& f = chosen->at("fit");
    params.z = f.at("z_hat").get<double>();
    auto t = f.at("theta_hat");
    params.theta = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  } else {
    throw std::runtime_error(model_json + ": expected a fit or estimate document");
  }
  if (doc.contains("radius_law")) law_text = doc.at("radius_law").get<std::string>();
  if (law_text.empty()) throw std::runtime_error(model_json + ": missing radius_law");
  RadiusLaw law = parse_radius_law(law_text);
  validate(params);

  std::vector<CurveKind> kinds;
  for (const std::string& name : [&] {
         std::vector<std::string> names;
         std::stringstream ss(kinds_text);
         std::string item;
         while (std::getline(ss, item, ','))
           if (!item.empty()) names.push_back(item);
         return names;
       }())
    kinds.push_back(kind_from_name(name));
  if (kinds.empty()) throw std::runtime_error("--kinds must name at least one curve");

  if (r_max <= 0.0) r_max = 2.0 * law.r0();
  std::vector<double> r_grid = make_r_grid(r_max, n_r);

  EnvelopeSettings settings;
  settings.chain.n_steps = steps;
  settings.chain.burn_in = burn_in;
  settings.chain.seed = seed;
  settings.r_grid = r_grid;
  settings.pixel_size = raster.pixel_size;
  settings.n_sim = n_sim;
  EnvelopeResult env = envelopes(params, law, raster.world_window(), kinds, settings);
  for (const std::string& failure : env.failures)
    std::fprintf(stderr, "simulation failed: %s\n", failure.c_str());

  std::ostringstream csv;
  csv << "kind,r,data,lower,upper\n";
  for (const EnvelopeBand& band : env.bands) {
    CurveEstimate curve = curve_for_kind(band.kind, raster, r_grid);
    for (std::size_t j = 0; j < r_grid.size(); ++j)
      csv << curve_kind_name(band.kind) << ',' << num(r_grid[j]) << ',' << num(curve.values[j])
          << ',' << num(band.lower[j]) << ',' << num(band.upper[j]) << '\n';
  }
  write_text_file(out, csv.str());
  std::printf("wrote %zu curve bands (%zu of %zu simulations used) to %s\n", env.bands.size(),
              env.n_used, n_sim, out.c_str());
  return 0;
}

int run_gnz_check(const ModelOptions& model, const std::string& obs_path,
                  const std::string& alphas_text, std::size_t n_points, std::uint64_t seed,
                  double approx_tol, std::size_t approx_max, const std::string& out) {
  QuermassParams params = model.params();
  validate(params);
  RadiusLaw law = model.law();
  MarkedConfiguration obs =
      load_observation(obs_path, model.window, law, approx_tol, approx_max);

  std::vector<double> alphas =
      alphas_text.empty() ? default_alphas(law.r0()) : parse_number_list(alphas_text, "--alphas");
  std::vector<TestFunctionSpec> specs;
  specs.push_back(TestFunctionSpec::f0());
  for (double a : alphas) specs.push_back(TestFunctionSpec::make_alpha(a));
  double margin = law.r0() + *std::max_element(alphas.begin(), alphas.end());
  double inner = obs.window.eroded(margin).area();

  std::ostringstream csv;
  csv << "test_function,residual,residual_per_area\n";
  for (std::size_t k = 0; k < specs.size(); ++k) {
    double res =
        gnz_residual(params, law, obs, specs[k], margin, n_points, derive_seed(seed, "gnz", k));
    csv << specs[k].name() << ',' << num(res) << ',' << num(res / inner) << '\n';
  }
  if (out.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    write_text_file(out, csv.str());
    std::printf("wrote residuals to %s\n", out.c_str());
  }
  return 0;
}

// Named replicate studies at the simulation-study scale; summary rows give
// per-estimator medians and interquartile ranges over replicates.
struct Preset {
  const char* name;
  QuermassParams truth;
  std::array<bool, 3> mask;
  std::size_t default_reps;
  std::uint64_t default_seed;
};

const Preset kPresets[] = {
    {"A-process", {0.1, {0.2, 0.0, 0.0}}, {true, false, false}, 20, 501},
    {"L-process", {0.2, {0.0, 0.4, 0.0}}, {false, true, false}, 20, 502},
    {"Chi-process", {0.1, {0.0, 0.0, 1.0}}, {false, false, true}, 20, 503},
    {"AL-process", {0.1, {-0.2, 0.3, 0.0}}, {true, true, false}, 10, 707},
};

double quantile_sorted_values(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double w = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - w) + v[hi] * w;
}

int run_experiment(const std::string& preset_name, std::size_t reps, std::uint64_t seed,
                   bool seed_given, const std::string& out_dir) {
  const Preset* preset = nullptr;
  for (const Preset& p : kPresets)
    if (preset_name == p.name) preset = &p;
  if (!preset) {
    std::string names;
    for (const Preset& p : kPresets) names += std::string(names.empty() ? "" : ", ") + p.name;
    throw std::runtime_error("unknown experiment '" + preset_name + "' (presets: " + names + ")");
  }
  if (reps == 0) reps = preset->default_reps;
  if (!seed_given) seed = preset->default_seed;

  RadiusLaw law = RadiusLaw::uniform_law(0.5, 2.0);
  Window window{0.0, 0.0, 50.0, 50.0};
  ChainSettings settings;
  settings.seed = seed;
  std::vector<MarkedConfiguration> states = replicate(preset->truth, law, window, settings, reps);
  std::vector<SuiteResult> suites;
  for (std::size_t i = 0; i < states.size(); ++i) {
    suites.push_back(
        estimator_suite(states[i], law, preset->mask, derive_seed(seed, "estimate", i)));
    std::fprintf(stderr, "replicate %zu/%zu: %zu discs\n", i + 1, reps, states[i].size());
  }

  std::ostringstream csv;
  csv << "estimator,n_ok,median_z,iqr_z";
  for (std::size_t a = 0; a < 3; ++a)
    if (preset->mask[a]) csv << ",median_theta" << a + 1 << ",iqr_theta" << a + 1;
  csv << '\n';
  for (const NamedEstimate& probe : suites.front().estimates) {
    std::vector<double> zs;
    std::array<std::vector<double>, 3> ts;
    for (const SuiteResult& s : suites)
      for (const NamedEstimate& e : s.estimates)
        if (e.name == probe.name && e.ok) {
          zs.push_back(e.fit.z_hat);
          for (std::size_t a = 0; a < 3; ++a) ts[a].push_back(e.fit.theta_hat[a]);
        }
    csv << probe.name << ',' << zs.size();
    auto cells = [&](const std::vector<double>& v) {
      if (v.empty()) {
        csv << ",,";
        return;
      }
      csv << ',' << num(quantile_sorted_values(v, 0.5))
          << ',' << num(quantile_sorted_values(v, 0.75) - quantile_sorted_values(v, 0.25));
    };
    cells(zs);
    for (std::size_t a = 0; a < 3; ++a)
      if (preset->mask[a]) cells(ts[a]);
    csv << '\n';
  }

  std::string path = out_dir + "/" + preset_name + "-summary.csv";
  write_text_file(path, csv.str());
  std::fputs(csv.str().c_str(), stdout);
  std::printf("wrote summary to %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation, estimation and diagnostics for planar interacting disc processes"};
  app.require_subcommand(1);
  int status = 0;

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "run one chain and write the final configuration");
  auto sim_binder = std::make_shared<ConfigBinder>();
  auto sim_model = std::make_shared<ModelOptions>();
  auto sim_out = std::make_shared<std::string>("discs.csv");
  auto sim_render = std::make_shared<std::string>();
  auto sim_ps = std::make_shared<double>(0.05);
  auto sim_trace = std::make_shared<std::string>();
  auto sim_trace_every = std::make_shared<long>(100);
  auto sim_config = std::make_shared<std::string>();
  sim_model->add_flags(sim, sim_binder.get());
  sim->add_option("--out", *sim_out, "output disc CSV");
  sim->add_option("--render", *sim_render, "also write a PGM raster here");
  sim->add_option("--pixel-size", *sim_ps, "render resolution");
  sim->add_option("--trace", *sim_trace, "write a step,n,area,perimeter,euler trace CSV");
  sim->add_option("--trace-every", *sim_trace_every, "steps between trace rows");
  sim->add_option("--config", *sim_config, "key=value file; overrides flags");
  sim_binder->text("out", sim_out.get());
  sim_binder->text("render", sim_render.get());
  sim_binder->number("pixel_size", sim_ps.get());
  sim_binder->text("trace", sim_trace.get());
  sim_binder->integer("trace_every", sim_trace_every.get());
  sim->callback([=, &status] {
    sim_binder->apply_file(*sim_config);
    status = run_simulate(*sim_model, *sim_out, *sim_render, *sim_ps, *sim_trace,
                          *sim_trace_every);
  });

  // replicate --------------------------------------------------------------
  auto* rep = app.add_subcommand("replicate", "run independent chains with derived seeds");
  auto rep_binder = std::make_shared<ConfigBinder>();
  auto rep_model = std::make_shared<ModelOptions>();
  auto rep_n = std::make_shared<std::size_t>(5);
  auto rep_prefix = std::make_shared<std::string>("replicate");
  auto rep_config = std::make_shared<std::string>();
  rep_model->add_flags(rep, rep_binder.get());
  rep->add_option("--reps", *rep_n, "replicate count");
  rep->add_option("--out-prefix", *rep_prefix, "CSV name prefix");
  rep->add_option("--config", *rep_config, "key=value file; overrides flags");
  rep_binder->count("reps", rep_n.get());
  rep_binder->text("out_prefix", rep_prefix.get());
  rep->callback([=, &status] {
    rep_binder->apply_file(*rep_config);
    status = run_replicate(*rep_model, *rep_n, *rep_prefix);
  });

  // estimate ---------------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "fit interaction parameters to an observation");
  auto est_binder = std::make_shared<ConfigBinder>();
  auto est_obs = std::make_shared<std::string>();
  auto est_window = std::make_shared<std::string>();
  auto est_model = std::make_shared<std::string>("A");
  auto est_law = std::make_shared<std::string>("uniform(0.5,2)");
  auto est_alphas = std::make_shared<std::string>();
  auto est_n = std::make_shared<std::size_t>(2500);
  auto est_grid = std::make_shared<std::string>();
  auto est_seed = std::make_shared<std::uint64_t>(0);
  auto est_tol = std::make_shared<double>(0.05);
  auto est_max = std::make_shared<std::size_t>(5000);
  auto est_out = std::make_shared<std::string>("fit.json");
  auto est_config = std::make_shared<std::string>();
  est->add_option("--obs", *est_obs, "observation (.csv discs or .pgm raster)")->required();
  est->add_option("--window", *est_window, "window for CSV input (x0,y0,x1,y1)");
  est->add_option("--model", *est_model, "free interactions: A, L, Chi, AL, LChi or full");
  est->add_option("--radius-law", *est_law, "reference radius law");
  est->add_option("--alphas", *est_alphas, "comma-separated inflation radii");
  est->add_option("--N", *est_n, "dummy points for the intensity integrals");
  est->add_option("--grid", *est_grid, "free-axis search grid lo,hi,step");
  est->add_option("--seed", *est_seed, "master seed");
  est->add_option("--approx-tol", *est_tol, "coverage tolerance for PGM input");
  est->add_option("--approx-max-discs", *est_max, "disc budget for PGM input");
  est->add_option("--out", *est_out, "output JSON path");
  est->add_option("--config", *est_config, "key=value file; overrides flags");
  est_binder->text("obs", est_obs.get());
  est_binder->text("window", est_window.get());
  est_binder->text("model", est_model.get());
  est_binder->text("radius_law", est_law.get());
  est_binder->text("alphas", est_alphas.get());
  est_binder->count("n_points", est_n.get());
  est_binder->text("grid", est_grid.get());
  est_binder->seed("seed", est_seed.get());
  est_binder->number("approx_tol", est_tol.get());
  est_binder->count("approx_max_discs", est_max.get());
  est_binder->text("out", est_out.get());
  est->callback([=, &status] {
    est_binder->apply_file(*est_config);
    status = run_estimate(*est_obs, *est_window, *est_model, *est_law, *est_alphas, *est_n,
                          *est_grid, *est_seed, *est_tol, *est_max, *est_out);
  });

  // approximate ------------------------------------------------------------
  auto* apx = app.add_subcommand("approximate", "cover a raster's foreground with discs");
  auto apx_binder = std::make_shared<ConfigBinder>();
  auto apx_in = std::make_shared<std::string>();
  auto apx_tol = std::make_shared<double>(0.05);
  auto apx_rmin = std::make_shared<double>(0.0);
  auto apx_rmax = std::make_shared<double>(0.55);
  auto apx_max = std::make_shared<std::size_t>(5000);
  auto apx_out = std::make_shared<std::string>("discs.csv");
  auto apx_config = std::make_shared<std::string>();
  apx->add_option("--in", *apx_in, "input PGM raster")->required();
  apx->add_option("--tol", *apx_tol, "stop when symmetric difference <= tol * foreground");
  apx->add_option("--rmin", *apx_rmin, "smallest disc radius");
  apx->add_option("--rmax", *apx_rmax, "largest disc radius");
  apx->add_option("--max-discs", *apx_max, "disc budget");
  apx->add_option("--out", *apx_out, "output disc CSV");
  apx->add_option("--config", *apx_config, "key=value file; overrides flags");
  apx_binder->text("in", apx_in.get());
  apx_binder->number("tol", apx_tol.get());
  apx_binder->number("rmin", apx_rmin.get());
  apx_binder->number("rmax", apx_rmax.get());
  apx_binder->count("max_discs", apx_max.get());
  apx_binder->text("out", apx_out.get());
  apx->callback([=, &status] {
    apx_binder->apply_file(*apx_config);
    status = run_approximate(*apx_in, *apx_tol, *apx_rmin, *apx_rmax, *apx_max, *apx_out);
  });

  // diagnose ---------------------------------------------------------------
  auto* dia = app.add_subcommand("diagnose",
                                 "summary curves of a data raster with model envelopes");
  auto dia_binder = std::make_shared<ConfigBinder>();
  auto dia_data = std::make_shared<std::string>();
  auto dia_fit = std::make_shared<std::string>();
  auto dia_nsim = std::make_shared<std::size_t>(99);
  auto dia_kinds = std::make_shared<std::string>(
      "contact,covariance,erosion,dilation,opening,closing");
  auto dia_rmax = std::make_shared<double>(0.0);
  auto dia_nr = std::make_shared<std::size_t>(21);
  auto dia_steps = std::make_shared<long>(200000);
  auto dia_burn = std::make_shared<long>(50000);
  auto dia_seed = std::make_shared<std::uint64_t>(0);
  auto dia_out = std::make_shared<std::string>("curves.csv");
  auto dia_config = std::make_shared<std::string>();
  dia->add_option("--data", *dia_data, "data PGM raster")->required();
  dia->add_option("--model-json", *dia_fit, "fit document from `estimate`")->required();
  dia->add_option("--nsim", *dia_nsim, "envelope simulations");
  dia->add_option("--kinds", *dia_kinds, "comma-separated curve kinds");
  dia->add_option("--rmax", *dia_rmax, "largest radius/lag (default 2 * max grain radius)");
  dia->add_option("--points", *dia_nr, "radius grid size");
  dia->add_option("--steps", *dia_steps, "chain length per simulation");
  dia->add_option("--burn-in", *dia_burn, "burn-in steps");
  dia->add_option("--seed", *dia_seed, "master seed");
  dia->add_option("--out", *dia_out, "output long-format CSV (kind,r,data,lower,upper)");
  dia->add_option("--config", *dia_config, "key=value file; overrides flags");
  dia_binder->text("data", dia_data.get());
  dia_binder->text("model_json", dia_fit.get());
  dia_binder->count("nsim", dia_nsim.get());
  dia_binder->text("kinds", dia_kinds.get());
  dia_binder->number("rmax", dia_rmax.get());
  dia_binder->count("points", dia_nr.get());
  dia_binder->integer("steps", dia_steps.get());
  dia_binder->integer("burn_in", dia_burn.get());
  dia_binder->seed("seed", dia_seed.get());
  dia_binder->text("out", dia_out.get());
  dia->callback([=, &status] {
    dia_binder->apply_file(*dia_config);
    status = run_diagnose(*dia_data, *dia_fit, *dia_nsim, *dia_kinds, *dia_rmax, *dia_nr,
                          *dia_steps, *dia_burn, *dia_seed, *dia_out);
  });

  // gnz-check --------------------------------------------------------------
  auto* gnz = app.add_subcommand("gnz-check",
                                 "balance residuals of an observation at given parameters");
  auto gnz_binder = std::make_shared<ConfigBinder>();
  auto gnz_model = std::make_shared<ModelOptions>();
  auto gnz_obs = std::make_shared<std::string>();
  auto gnz_alphas = std::make_shared<std::string>();
  auto gnz_n = std::make_shared<std::size_t>(2500);
  auto gnz_seed = std::make_shared<std::uint64_t>(0);
  auto gnz_tol = std::make_shared<double>(0.05);
  auto gnz_max = std::make_shared<std::size_t>(5000);
  auto gnz_out = std::make_shared<std::string>();
  auto gnz_config = std::make_shared<std::string>();
  gnz_model->add_flags(gnz, gnz_binder.get(), /*with_chain=*/false);
  gnz->add_option("--obs", *gnz_obs, "observation (.csv discs or .pgm raster)")->required();
  gnz->add_option("--alphas", *gnz_alphas, "comma-separated inflation radii");
  gnz->add_option("--N", *gnz_n, "dummy points");
  gnz->add_option("--seed", *gnz_seed, "master seed");
  gnz->add_option("--approx-tol", *gnz_tol, "coverage tolerance for PGM input");
  gnz->add_option("--approx-max-discs", *gnz_max, "disc budget for PGM input");
  gnz->add_option("--out", *gnz_out, "output CSV (default: stdout)");
  gnz->add_option("--config", *gnz_config, "key=value file; overrides flags");
  gnz_binder->text("obs", gnz_obs.get());
  gnz_binder->text("alphas", gnz_alphas.get());
  gnz_binder->count("n_points", gnz_n.get());
  gnz_binder->seed("seed", gnz_seed.get());
  gnz_binder->number("approx_tol", gnz_tol.get());
  gnz_binder->count("approx_max_discs", gnz_max.get());
  gnz_binder->text("out", gnz_out.get());
  gnz->callback([=, &status] {
    gnz_binder->apply_file(*gnz_config);
    status = run_gnz_check(*gnz_model, *gnz_obs, *gnz_alphas, *gnz_n, *gnz_seed, *gnz_tol,
                           *gnz_max, *gnz_out);
  });

  // experiment -------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "run a named replicate study and summarize it");
  auto exp_name = std::make_shared<std::string>();
  auto exp_reps = std::make_shared<std::size_t>(0);
  auto exp_seed = std::make_shared<std::uint64_t>(0);
  auto exp_dir = std::make_shared<std::string>(".");
  exp->add_option("preset", *exp_name, "A-process, L-process, Chi-process or AL-process")
      ->required();
  auto* seed_opt = exp->add_option("--seed", *exp_seed, "master seed (default: preset seed)");
  exp->add_option("--reps", *exp_reps, "replicate count (default: preset count)");
  exp->add_option("--out-dir", *exp_dir, "summary output directory");
  exp->callback([=, &status] {
    status = run_experiment(*exp_name, *exp_reps, *exp_seed, seed_opt->count() > 0, *exp_dir);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return status;
}
