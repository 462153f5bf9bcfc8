#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quermass/model.hpp"

namespace quermass {

// Test function used in the estimating equations:
//   F0      uncovered arc length of the grain's own circle,
//   FAlpha  uncovered arc length after inflating everything by alpha,
//   FSum    sum of FAlpha over a list of alphas,
//   FIso    indicator that the grain is an isolated ball.
struct TestFunctionSpec {
  enum class Kind { F0, FAlpha, FSum, FIso };

  Kind kind = Kind::F0;
  double alpha = 0.0;
  std::vector<double> alphas;

  static TestFunctionSpec f0() { return {}; }
  static TestFunctionSpec make_alpha(double a);
  static TestFunctionSpec make_sum(std::vector<double> as);
  static TestFunctionSpec iso();

  // Largest radius inflation the function looks at (0 for F0 / FIso).
  double max_alpha() const;
  std::string name() const;
};

// Value of the test function for marked point p against config; the caller
// is responsible for excluding p from config when p belongs to it.
double evaluate_test_function(const TestFunctionSpec& spec, const Disc& p,
                              const MarkedConfiguration& config);

// S_k: sum of the test function over the observed discs with centre in the
// window eroded by margin, each evaluated against the remaining discs.
double observed_statistic(const TestFunctionSpec& spec, const MarkedConfiguration& obs,
                          double margin);
std::vector<double> observed_statistics(const std::vector<TestFunctionSpec>& specs,
                                        const MarkedConfiguration& obs, double margin,
                                        bool parallel = true);

// Monte-Carlo integration table: dummy points uniform on the eroded window
// with radii from the law, each carrying its local functional changes and
// test-function values.  The table is independent of (z, theta), so the
// integrals I_k(theta) are evaluable for any theta without re-running
// geometry.
struct SampleTable {
  struct Row {
    Disc point;
    double d_area = 0.0;
    double d_perimeter = 0.0;
    int d_euler = 0;
  };

  std::vector<Row> rows;
  std::vector<std::vector<double>> f;  // f[k][i]: spec k at dummy point i
  std::vector<TestFunctionSpec> specs;
  Window domain;       // eroded window the points were drawn on
  double margin = 0.0; // law.r0() + max alpha over specs
  std::uint64_t seed = 0;

  std::size_t size() const { return rows.size(); }
};

SampleTable build_sample_table(const MarkedConfiguration& obs, const RadiusLaw& law,
                               const std::vector<TestFunctionSpec>& specs, std::size_t n_points,
                               std::uint64_t seed, bool parallel = true);

// I_k(theta) = (|domain| / N) * sum_i exp(-theta . delta_i) * f_k[i].
std::vector<double> integrals(const SampleTable& table, const std::array<double, 3>& theta);

// Least-squares intensity given theta: sum_k S_k I_k / sum_k I_k^2.
double profile_intensity(const SampleTable& table, const std::vector<double>& S,
                         const std::array<double, 3>& theta);

struct ContrastEvaluation {
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  double z_profile = 0.0;
  std::vector<double> residuals;  // S_k - z_profile * I_k
  double total = 0.0;             // sum of squared residuals
};

ContrastEvaluation contrast(const SampleTable& table, const std::vector<double>& S,
                            const std::array<double, 3>& theta);

// Contrast with the intensity held at z instead of profiled out.
double contrast_at(const SampleTable& table, const std::vector<double>& S,
                   const std::array<double, 3>& theta, double z);

struct AxisSpec {
  double lo = -2.0, hi = 2.0, step = 0.05;
  std::size_t count() const;
};

// Search grid over the free interaction components; an absent axis pins the
// component to zero (sub-models).
struct GridSpec {
  std::array<std::optional<AxisSpec>, 3> axes;

  // Default ranges [-2,2]; step 0.05 with one or two free components, 0.1
  // with three.
  static GridSpec for_free(const std::array<bool, 3>& free_mask);
  std::array<bool, 3> free_mask() const;
  std::size_t n_free() const;
};

struct GridMinimum {
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  double z = 0.0;
  double total = 0.0;
};

struct FitResult {
  double z_hat = 0.0;
  std::array<double, 3> theta_hat{0.0, 0.0, 0.0};
  std::array<bool, 3> free_mask{false, false, false};
  double total = 0.0;
  std::vector<GridMinimum> grid_minima;  // sorted by contrast, best first
  bool refined = false;
  std::string warning;  // set when the fit is exactly determined (K == p)
  // settings echo
  std::size_t n_points = 0;
  std::uint64_t seed = 0;
  double margin = 0.0;
  std::vector<std::string> spec_names;
  std::vector<double> S;  // observed statistics, same order as spec_names
};

// Grid scan of the profiled contrast with optional Nelder-Mead refinement of
// the best cell; grid minima are cells strictly below every axis neighbour
// (falling back to the best cell when the surface has no strict minimum).
FitResult fit(const MarkedConfiguration& obs, const RadiusLaw& law,
              const std::vector<TestFunctionSpec>& specs, const GridSpec& grid, bool refine,
              std::size_t n_points, std::uint64_t seed, bool parallel = true);

// Same search on a prebuilt table (the estimator suite shares one table).
FitResult fit_with_table(const SampleTable& table, const std::vector<double>& S,
                         const GridSpec& grid, bool refine, bool parallel = true);

struct NamedEstimate {
  std::string name;
  bool ok = false;
  std::string error;
  FitResult fit;
};

struct SuiteResult {
  std::vector<NamedEstimate> estimates;
  std::vector<double> alphas;
};

// The named estimator family: per-alpha pairs (f0, f_alpha_i), (f0, f_sum),
// (f0, f_iso), the joint {f0, f_alpha_1..10} variant, and the componentwise
// median of the per-alpha estimates.  All variants share one sample table.
SuiteResult estimator_suite(const MarkedConfiguration& obs, const RadiusLaw& law,
                            const std::array<bool, 3>& free_mask, std::uint64_t seed,
                            std::size_t n_points = 2500, std::vector<double> alphas = {},
                            bool refine = true, bool parallel = true);

// Default inflation ladder alpha_i = i * r0 / 100, i = 1..10.
std::vector<double> default_alphas(double r0);

// Takacs-Fiksel residual S_f - z * I_f(theta) at the given parameters.
double gnz_residual(const QuermassParams& params, const RadiusLaw& law,
                    const MarkedConfiguration& obs, const TestFunctionSpec& spec, double margin,
                    std::size_t n_points, std::uint64_t seed);

}  // namespace quermass
