#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cptlitho/errors.hpp"
#include "cptlitho/fields.hpp"
#include "cptlitho/pattern.hpp"

namespace cptlitho {

struct FitOptions {
  std::size_t starts = 32;
  std::size_t max_iterations = 20000;
  std::uint64_t seed = 0;
  double step_tolerance = 1e-12;
  /// Worker threads for the multi-start loop; 0 uses the machine's
  /// hardware concurrency.
  unsigned threads = 0;
};

/// Default multi-start counts.
inline constexpr std::size_t kDefaultStarts1D = 32;
inline constexpr std::size_t kDefaultStarts2D = 64;

/// A target sampled on a grid plus the shape of the plan to fit. The plan
/// has `steps_per_angle` factors for each entry of `angles`, in order.
struct FitProblem {
  std::vector<double> target;
  std::variant<Grid1D, Grid2D> grid;
  std::vector<double> angles{0.0};
  int steps_per_angle = 10;
  FitOptions options;

  static FitProblem one_d(std::vector<double> target, Grid1D grid, int order, FitOptions options = {});
  static FitProblem two_d(std::vector<double> target, Grid2D grid, std::vector<double> angles,
                          int steps_per_angle, FitOptions options = {});

  bool is_2d() const noexcept { return std::holds_alternative<Grid2D>(grid); }
  std::size_t factor_count() const noexcept;
  std::size_t sample_count() const noexcept;

  /// Throws std::invalid_argument when the target is empty, negative, all
  /// zero, mismatched with the grid, or has fewer samples than parameters.
  void validate() const;
};

struct StartDiagnostics {
  std::size_t start = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double distance = 0.0;
  std::string stop_reason;
};

struct FitResult {
  ExposurePlan plan;
  double distance = 0.0;
  /// Maximum of the unnormalized fitted profile on a dense grid (1D: 4096
  /// points over one period; 2D: the sample extent refined fourfold).
  double peak_density = 0.0;
  std::size_t best_start = 0;
  std::vector<StartDiagnostics> starts;
};

/// No start met a convergence criterion. Carries the best result anyway.
class FitConvergenceError : public ConvergenceError {
 public:
  FitConvergenceError(const std::string& what, FitResult best)
      : ConvergenceError(what, best.distance), best_(std::move(best)) {}

  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// zeta = pi/20 * nu for nu = -10..9.
Grid1D sample_grid_1d();

/// || a/|a| - b/|b| ||_2. Throws std::invalid_argument on length mismatch or
/// a zero-norm input.
double normalized_distance(std::span<const double> a, std::span<const double> b);

/// r = (1/2) sin^2(u) e^{i phi}; keeps |r| <= 1/2 for any real (u, phi).
Complex coefficient_from_parameters(double u, double phi);

/// The least-squares residual v_tr/|v_tr| - v_ta/|v_ta| as a function of
/// the packed parameters [u_0 .. u_{K-1}, phi_0 .. phi_{K-1}].
class NormalizedResidualModel {
 public:
  explicit NormalizedResidualModel(const FitProblem& problem);

  std::size_t parameter_count() const noexcept { return 2 * factors_; }
  std::size_t residual_count() const noexcept { return samples_; }

  /// Unnormalized trial profile at the sample points.
  Eigen::VectorXd trial(const Eigen::VectorXd& params) const;
  /// Returns false (leaving `out` unspecified) if the trial vector is zero.
  bool residual(const Eigen::VectorXd& params, Eigen::VectorXd& out) const;
  /// Analytic Jacobian of residual(); false if the trial vector is zero.
  bool jacobian(const Eigen::VectorXd& params, Eigen::MatrixXd& out) const;

  ExposurePlan plan(const Eigen::VectorXd& params) const;

 private:
  void factor_values(const Eigen::VectorXd& params, Eigen::MatrixXd& values) const;

  std::size_t factors_;
  std::size_t samples_;
  std::vector<std::size_t> direction_of_;  // factor -> angle index
  std::vector<double> angles_;
  Eigen::MatrixXd cos2_;  // samples x angles, cos(2 k.x)
  Eigen::MatrixXd sin2_;
  Eigen::VectorXd target_unit_;
};

FitResult fit_1d(const FitProblem& problem);
FitResult fit_2d(const FitProblem& problem);

}  // namespace cptlitho
