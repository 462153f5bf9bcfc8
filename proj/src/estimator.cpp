#include "quermass/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "quermass/parallel.hpp"
#include "quermass/rng.hpp"

namespace quermass {

namespace {

double dot3(const std::array<double, 3>& theta, double a, double l, int e) {
  return theta[0] * a + theta[1] * l + theta[2] * static_cast<double>(e);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TestFunctionSpec TestFunctionSpec::make_alpha(double a) {
  if (a < 0.0) throw std::invalid_argument("test function inflation alpha must be >= 0");
  TestFunctionSpec s;
  s.kind = Kind::FAlpha;
  s.alpha = a;
  return s;
}

TestFunctionSpec TestFunctionSpec::make_sum(std::vector<double> as) {
  if (as.empty()) throw std::invalid_argument("sum test function requires alphas");
  for (double a : as)
    if (a < 0.0) throw std::invalid_argument("test function inflation alpha must be >= 0");
  std::vector<double> sorted = as;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("sum test function requires distinct alphas");
  TestFunctionSpec s;
  s.kind = Kind::FSum;
  s.alphas = std::move(as);
  return s;
}

TestFunctionSpec TestFunctionSpec::iso() {
  TestFunctionSpec s;
  s.kind = Kind::FIso;
  return s;
}

double TestFunctionSpec::max_alpha() const {
  switch (kind) {
    case Kind::FAlpha:
      return alpha;
    case Kind::FSum:
      return *std::max_element(alphas.begin(), alphas.end());
    default:
      return 0.0;
  }
}

std::string TestFunctionSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::F0:
      return "f0";
    case Kind::FAlpha:
      os << "f_alpha(" << alpha << ")";
      return os.str();
    case Kind::FSum:
      return "f_sum";
    case Kind::FIso:
      return "f_iso";
  }
  return "?";
}

double evaluate_test_function(const TestFunctionSpec& spec, const Disc& p,
                              const MarkedConfiguration& config) {
  switch (spec.kind) {
    case TestFunctionSpec::Kind::F0:
      return uncovered_arc_length(p, config);
    case TestFunctionSpec::Kind::FAlpha:
      return f_alpha(p, config, spec.alpha);
    case TestFunctionSpec::Kind::FSum: {
      double total = 0.0;
      for (double a : spec.alphas) total += f_alpha(p, config, a);
      return total;
    }
    case TestFunctionSpec::Kind::FIso:
      return is_isolated(p, config) ? 1.0 : 0.0;
  }
  return 0.0;
}

namespace {

// Test-function value for an observed disc, with the disc itself skipped.
double evaluate_skip(const TestFunctionSpec& spec, const MarkedConfiguration& obs,
                     std::size_t index) {
  const Disc& p = obs.discs[index];
  std::ptrdiff_t skip = static_cast<std::ptrdiff_t>(index);
  switch (spec.kind) {
    case TestFunctionSpec::Kind::F0:
      return uncovered_arc_length_skip(p, obs, 0.0, skip);
    case TestFunctionSpec::Kind::FAlpha: {
      Disc q{p.cx, p.cy, p.r + spec.alpha};
      return uncovered_arc_length_skip(q, obs, spec.alpha, skip);
    }
    case TestFunctionSpec::Kind::FSum: {
      double total = 0.0;
      for (double a : spec.alphas) {
        Disc q{p.cx, p.cy, p.r + a};
        total += uncovered_arc_length_skip(q, obs, a, skip);
      }
      return total;
    }
    case TestFunctionSpec::Kind::FIso:
      return is_isolated_skip(p, obs, skip) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

std::vector<double> observed_statistics(const std::vector<TestFunctionSpec>& specs,
                                        const MarkedConfiguration& obs, double margin,
                                        bool parallel) {
  Window inner = obs.window.eroded(margin);
  std::size_t n = obs.size(), k_count = specs.size();
  std::vector<double> vals(n * k_count, 0.0);
  parallel_for(n, parallel, [&](std::size_t i) {
    const Disc& p = obs.discs[i];
    if (!inner.contains(p.cx, p.cy)) return;
    for (std::size_t k = 0; k < k_count; ++k) vals[i * k_count + k] = evaluate_skip(specs[k], obs, i);
  });
  // Fixed-order reduction keeps the result independent of thread count.
  std::vector<double> S(k_count, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < k_count; ++k) S[k] += vals[i * k_count + k];
  return S;
}

double observed_statistic(const TestFunctionSpec& spec, const MarkedConfiguration& obs,
                          double margin) {
  return observed_statistics({spec}, obs, margin, true)[0];
}

namespace {

SampleTable build_table_with_margin(const MarkedConfiguration& obs, const RadiusLaw& law,
                                    const std::vector<TestFunctionSpec>& specs,
                                    std::size_t n_points, std::uint64_t seed, double margin,
                                    bool parallel) {
  if (n_points == 0) throw std::invalid_argument("sample table requires at least one dummy point");
  if (specs.empty()) throw std::invalid_argument("sample table requires test functions");

  SampleTable table;
  table.specs = specs;
  table.margin = margin;
  table.seed = seed;
  table.domain = obs.window.eroded(margin);

  // Dummy points are drawn up front in a fixed order; the parallel phase
  // below only fills per-point slots.
  Rng rng(seed);
  table.rows.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    Disc& p = table.rows[i].point;
    p.cx = rng.uniform(table.domain.x0, table.domain.x1);
    p.cy = rng.uniform(table.domain.y0, table.domain.y1);
    p.r = law.sample(rng);
  }

  table.f.assign(specs.size(), std::vector<double>(n_points, 0.0));
  double r0 = law.r0();
  parallel_for(n_points, parallel, [&](std::size_t i) {
    SampleTable::Row& row = table.rows[i];
    MinkowskiTriple d = local_delta(row.point, obs, r0);
    row.d_area = d.area;
    row.d_perimeter = d.perimeter;
    row.d_euler = d.euler;
    for (std::size_t k = 0; k < specs.size(); ++k)
      table.f[k][i] = evaluate_test_function(specs[k], row.point, obs);
  });
  return table;
}

}  // namespace

SampleTable build_sample_table(const MarkedConfiguration& obs, const RadiusLaw& law,
                               const std::vector<TestFunctionSpec>& specs, std::size_t n_points,
                               std::uint64_t seed, bool parallel) {
  double max_alpha = 0.0;
  for (const TestFunctionSpec& s : specs) max_alpha = std::max(max_alpha, s.max_alpha());
  return build_table_with_margin(obs, law, specs, n_points, seed, law.r0() + max_alpha, parallel);
}

std::vector<double> integrals(const SampleTable& table, const std::array<double, 3>& theta) {
  std::size_t k_count = table.specs.size(), n = table.size();
  std::vector<double> acc(k_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const SampleTable::Row& row = table.rows[i];
    double w = std::exp(-dot3(theta, row.d_area, row.d_perimeter, row.d_euler));
    for (std::size_t k = 0; k < k_count; ++k) acc[k] += w * table.f[k][i];
  }
  double scale = table.domain.area() / static_cast<double>(n);
  for (double& a : acc) a *= scale;
  return acc;
}

double profile_intensity(const SampleTable& table, const std::vector<double>& S,
                         const std::array<double, 3>& theta) {
  if (S.size() != table.specs.size())
    throw std::invalid_argument("profile_intensity: statistic count mismatch");
  std::vector<double> I = integrals(table, theta);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    num += S[k] * I[k];
    den += I[k] * I[k];
  }
  if (!(den > 0.0))
    throw std::runtime_error("degenerate test-function set: all integrals vanish");
  return num / den;
}

ContrastEvaluation contrast(const SampleTable& table, const std::vector<double>& S,
                            const std::array<double, 3>& theta) {
  ContrastEvaluation ev;
  ev.theta = theta;
  std::vector<double> I = integrals(table, theta);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    num += S[k] * I[k];
    den += I[k] * I[k];
  }
  if (!(den > 0.0))
    throw std::runtime_error("degenerate test-function set: all integrals vanish");
  ev.z_profile = num / den;
  ev.residuals.resize(I.size());
  ev.total = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    ev.residuals[k] = S[k] - ev.z_profile * I[k];
    ev.total += ev.residuals[k] * ev.residuals[k];
  }
  return ev;
}

double contrast_at(const SampleTable& table, const std::vector<double>& S,
                   const std::array<double, 3>& theta, double z) {
  std::vector<double> I = integrals(table, theta);
  double total = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    double r = S[k] - z * I[k];
    total += r * r;
  }
  return total;
}

std::size_t AxisSpec::count() const {
  if (!(step > 0.0)) throw std::invalid_argument("grid axis step must be positive");
  if (hi < lo) throw std::invalid_argument("grid axis has hi < lo (empty grid)");
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

GridSpec GridSpec::for_free(const std::array<bool, 3>& free_mask) {
  std::size_t n_free = 0;
  for (bool b : free_mask) n_free += b ? 1 : 0;
  double step = n_free >= 3 ? 0.1 : 0.05;
  GridSpec g;
  for (std::size_t a = 0; a < 3; ++a)
    if (free_mask[a]) g.axes[a] = AxisSpec{-2.0, 2.0, step};
  return g;
}

std::array<bool, 3> GridSpec::free_mask() const {
  return {axes[0].has_value(), axes[1].has_value(), axes[2].has_value()};
}

std::size_t GridSpec::n_free() const {
  std::size_t n = 0;
  for (const auto& a : axes) n += a.has_value() ? 1 : 0;
  return n;
}

namespace {

// Nelder-Mead on the free components; terminates when the contrast spread
// over the simplex drops below 1e-10 or after 200 iterations.
struct NmResult {
  std::vector<double> x;
  double f = 0.0;
};

template <class Objective>
NmResult nelder_mead(std::vector<double> x0, double edge, const Objective& obj) {
  std::size_t d = x0.size();
  std::vector<std::vector<double>> xs(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += edge;
  std::vector<double> fs(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fs[i] = obj(xs[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(d + 1);
    for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (fs[a] != fs[b]) return fs[a] < fs[b];
      return a < b;
    });
    std::vector<std::vector<double>> nxs(d + 1);
    std::vector<double> nfs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      nxs[i] = xs[idx[i]];
      nfs[i] = fs[idx[i]];
    }
    xs.swap(nxs);
    fs.swap(nfs);
  };

  for (int iter = 0; iter < 200; ++iter) {
    order();
    if (fs[d] - fs[0] < 1e-10) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += xs[i][j] / static_cast<double>(d);

    auto blend = [&](double t) {
      std::vector<double> p(d);
      for (std::size_t j = 0; j < d; ++j) p[j] = centroid[j] + t * (xs[d][j] - centroid[j]);
      return p;
    };

    std::vector<double> xr = blend(-1.0);
    double fr = obj(xr);
    if (fr < fs[0]) {
      std::vector<double> xe = blend(-2.0);
      double fe = obj(xe);
      if (fe < fr) {
        xs[d] = xe;
        fs[d] = fe;
      } else {
        xs[d] = xr;
        fs[d] = fr;
      }
    } else if (fr < fs[d - 1]) {
      xs[d] = xr;
      fs[d] = fr;
    } else {
      std::vector<double> xc = blend(fr < fs[d] ? -0.5 : 0.5);
      double fc = obj(xc);
      if (fc < std::min(fr, fs[d])) {
        xs[d] = xc;
        fs[d] = fc;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t j = 0; j < d; ++j) xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
          fs[i] = obj(xs[i]);
        }
      }
    }
  }
  order();
  return {xs[0], fs[0]};
}

}  // namespace

FitResult fit_with_table(const SampleTable& table, const std::vector<double>& S,
                         const GridSpec& grid, bool refine, bool parallel) {
  if (S.size() != table.specs.size())
    throw std::invalid_argument("fit: statistic count does not match the table");
  // z is always estimated, so K test functions face n_free + 1 parameters.
  std::size_t n_params = grid.n_free() + 1;
  if (S.size() < n_params)
    throw std::invalid_argument("fit: " + std::to_string(S.size()) +
                                " test functions cannot identify " + std::to_string(n_params) +
                                " free parameters");

  std::array<std::size_t, 3> sizes{1, 1, 1};
  for (std::size_t a = 0; a < 3; ++a)
    if (grid.axes[a]) sizes[a] = grid.axes[a]->count();
  std::size_t n_cells = sizes[0] * sizes[1] * sizes[2];

  auto theta_of_cell = [&](std::size_t c) {
    std::array<double, 3> theta{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> ix{c % sizes[0], (c / sizes[0]) % sizes[1],
                                  c / (sizes[0] * sizes[1])};
    for (std::size_t a = 0; a < 3; ++a)
      if (grid.axes[a]) theta[a] = grid.axes[a]->lo + grid.axes[a]->step * static_cast<double>(ix[a]);
    return theta;
  };

  std::vector<double> totals(n_cells), zs(n_cells);
  parallel_for(n_cells, parallel, [&](std::size_t c) {
    ContrastEvaluation ev = contrast(table, S, theta_of_cell(c));
    totals[c] = ev.total;
    zs[c] = ev.z_profile;
  });

  for (std::size_t c = 0; c < n_cells; ++c)
    if (!std::isfinite(totals[c])) {
      std::array<double, 3> t = theta_of_cell(c);
      std::ostringstream os;
      os << "non-finite contrast at theta = (" << t[0] << "," << t[1] << "," << t[2] << ")";
      throw std::runtime_error(os.str());
    }

  std::size_t best = 0;
  for (std::size_t c = 1; c < n_cells; ++c)
    if (totals[c] < totals[best]) best = c;

  // Local minima: cells strictly below every axis neighbour.  A flat
  // surface (e.g. a single test function, where the profile absorbs the
  // only equation) has none; report the best cell then.
  auto cell_of = [&](std::size_t i0, std::size_t i1, std::size_t i2) {
    return i0 + sizes[0] * (i1 + sizes[1] * i2);
  };
  std::vector<std::size_t> minima;
  for (std::size_t c = 0; c < n_cells; ++c) {
    std::array<std::size_t, 3> ix{c % sizes[0], (c / sizes[0]) % sizes[1],
                                  c / (sizes[0] * sizes[1])};
    bool is_min = true;
    for (std::size_t a = 0; a < 3 && is_min; ++a) {
      if (sizes[a] == 1) continue;
      if (ix[a] > 0) {
        auto j = ix;
        --j[a];
        if (totals[cell_of(j[0], j[1], j[2])] <= totals[c]) is_min = false;
      }
      if (is_min && ix[a] + 1 < sizes[a]) {
        auto j = ix;
        ++j[a];
        if (totals[cell_of(j[0], j[1], j[2])] <= totals[c]) is_min = false;
      }
    }
    if (is_min) minima.push_back(c);
  }
  if (minima.empty()) minima.push_back(best);
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) {
    if (totals[a] != totals[b]) return totals[a] < totals[b];
    return a < b;
  });

  FitResult result;
  result.free_mask = grid.free_mask();
  result.n_points = table.size();
  result.seed = table.seed;
  result.margin = table.margin;
  result.S = S;
  for (const TestFunctionSpec& s : table.specs) result.spec_names.push_back(s.name());
  result.grid_minima.reserve(minima.size());
  for (std::size_t c : minima) result.grid_minima.push_back({theta_of_cell(c), zs[c], totals[c]});

  if (S.size() == n_params)
    result.warning = "exactly determined system (K == free parameter count); "
                     "estimates lack overdetermination";
  std::array<double, 3> theta_best = theta_of_cell(best);
  double total_best = totals[best];

  if (refine && grid.n_free() > 0) {
    std::vector<std::size_t> free_axes;
    for (std::size_t a = 0; a < 3; ++a)
      if (grid.axes[a]) free_axes.push_back(a);
    auto embed = [&](const std::vector<double>& x) {
      std::array<double, 3> theta{0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < free_axes.size(); ++i) theta[free_axes[i]] = x[i];
      return theta;
    };
    auto objective = [&](const std::vector<double>& x) {
      return contrast(table, S, embed(x)).total;
    };
    std::vector<double> x0(free_axes.size());
    for (std::size_t i = 0; i < free_axes.size(); ++i) x0[i] = theta_best[free_axes[i]];
    double edge = grid.axes[free_axes[0]]->step;
    NmResult nm = nelder_mead(std::move(x0), edge, objective);
    if (nm.f <= total_best) {
      theta_best = embed(nm.x);
      total_best = nm.f;
      result.refined = true;
    }
  }

  ContrastEvaluation final_ev = contrast(table, S, theta_best);
  result.z_hat = final_ev.z_profile;
  result.theta_hat = theta_best;
  result.total = final_ev.total;
  return result;
}

FitResult fit(const MarkedConfiguration& obs, const RadiusLaw& law,
              const std::vector<TestFunctionSpec>& specs, const GridSpec& grid, bool refine,
              std::size_t n_points, std::uint64_t seed, bool parallel) {
  double max_alpha = 0.0;
  for (const TestFunctionSpec& s : specs) max_alpha = std::max(max_alpha, s.max_alpha());
  double margin = law.r0() + max_alpha;
  std::vector<double> S = observed_statistics(specs, obs, margin, parallel);
  SampleTable table = build_table_with_margin(obs, law, specs, n_points, seed, margin, parallel);
  return fit_with_table(table, S, grid, refine, parallel);
}

std::vector<double> default_alphas(double r0) {
  std::vector<double> as(10);
  for (int i = 1; i <= 10; ++i) as[i - 1] = static_cast<double>(i) * r0 / 100.0;
  return as;
}

namespace {

SampleTable subset_table(const SampleTable& table, const std::vector<std::size_t>& cols) {
  SampleTable sub;
  sub.rows = table.rows;
  sub.domain = table.domain;
  sub.margin = table.margin;
  sub.seed = table.seed;
  for (std::size_t k : cols) {
    sub.specs.push_back(table.specs[k]);
    sub.f.push_back(table.f[k]);
  }
  return sub;
}

std::vector<double> subset_values(const std::vector<double>& S, const std::vector<std::size_t>& cols) {
  std::vector<double> out;
  for (std::size_t k : cols) out.push_back(S[k]);
  return out;
}

}  // namespace

SuiteResult estimator_suite(const MarkedConfiguration& obs, const RadiusLaw& law,
                            const std::array<bool, 3>& free_mask, std::uint64_t seed,
                            std::size_t n_points, std::vector<double> alphas, bool refine,
                            bool parallel) {
  if (alphas.empty()) alphas = default_alphas(law.r0());
  std::size_t n_alpha = alphas.size();

  std::vector<TestFunctionSpec> specs;
  specs.push_back(TestFunctionSpec::f0());
  for (double a : alphas) specs.push_back(TestFunctionSpec::make_alpha(a));
  specs.push_back(TestFunctionSpec::make_sum(alphas));
  specs.push_back(TestFunctionSpec::iso());

  double margin = law.r0() + *std::max_element(alphas.begin(), alphas.end());
  std::vector<double> S = observed_statistics(specs, obs, margin, parallel);
  SampleTable table = build_table_with_margin(obs, law, specs, n_points, seed, margin, parallel);
  GridSpec grid = GridSpec::for_free(free_mask);

  SuiteResult suite;
  suite.alphas = alphas;
  auto run_variant = [&](const std::string& name, const std::vector<std::size_t>& cols) {
    NamedEstimate est;
    est.name = name;
    try {
      est.fit = fit_with_table(subset_table(table, cols), subset_values(S, cols), grid, refine,
                               parallel);
      est.ok = true;
    } catch (const std::exception& e) {
      est.error = e.what();
    }
    suite.estimates.push_back(std::move(est));
  };

  for (std::size_t i = 0; i < n_alpha; ++i)
    run_variant("alpha_" + std::to_string(i + 1), {0, i + 1});
  run_variant("sum", {0, n_alpha + 1});
  run_variant("iso", {0, n_alpha + 2});
  std::vector<std::size_t> all_cols(n_alpha + 1);
  for (std::size_t k = 0; k <= n_alpha; ++k) all_cols[k] = k;
  run_variant("all", all_cols);

  // Componentwise median of the per-alpha estimates.
  NamedEstimate med;
  med.name = "median";
  std::vector<double> z_vals;
  std::array<std::vector<double>, 3> t_vals;
  for (std::size_t i = 0; i < n_alpha; ++i) {
    const NamedEstimate& e = suite.estimates[i];
    if (!e.ok) continue;
    z_vals.push_back(e.fit.z_hat);
    for (std::size_t a = 0; a < 3; ++a) t_vals[a].push_back(e.fit.theta_hat[a]);
  }
  if (!z_vals.empty()) {
    med.ok = true;
    med.fit.z_hat = median_of(z_vals);
    for (std::size_t a = 0; a < 3; ++a)
      med.fit.theta_hat[a] = free_mask[a] ? median_of(t_vals[a]) : 0.0;
    med.fit.free_mask = free_mask;
    med.fit.total = std::numeric_limits<double>::quiet_NaN();
    med.fit.n_points = n_points;
    med.fit.seed = seed;
    med.fit.margin = margin;
  } else {
    med.error = "no per-alpha estimate succeeded";
  }
  suite.estimates.push_back(std::move(med));
  return suite;
}

double gnz_residual(const QuermassParams& params, const RadiusLaw& law,
                    const MarkedConfiguration& obs, const TestFunctionSpec& spec, double margin,
                    std::size_t n_points, std::uint64_t seed) {
  validate(params);
  std::vector<TestFunctionSpec> specs{spec};
  double S = observed_statistics(specs, obs, margin, true)[0];
  SampleTable table = build_table_with_margin(obs, law, specs, n_points, seed, margin, true);
  double I = integrals(table, params.theta)[0];
  return S - params.z * I;
}

}  // namespace quermass
