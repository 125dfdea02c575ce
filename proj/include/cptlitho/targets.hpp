#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cptlitho/pattern.hpp"

namespace cptlitho {

enum class TargetKind { kSquare, kCShape, kSamples };

/// Target description as it appears in run configs.
struct TargetSpec {
  TargetKind kind = TargetKind::kSquare;
  double duty = 0.5;    ///< square: fraction of the period that is on
  double center = 0.0;  ///< square: center position in zeta
  double r_inner = std::numbers::pi / 3;
  double r_outer = 2 * std::numbers::pi / 3;
  double theta_lo = std::numbers::pi / 4;  ///< C shape: the arc spans (theta_lo, theta_hi)
  double theta_hi = 7 * std::numbers::pi / 4;
  std::filesystem::path path;  ///< samples file

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// 1 if the pi-periodic distance from center is below duty * pi / 2.
double square_target(double zeta, double duty = 0.5, double center = 0.0);

/// 1 inside the annular arc r_inner < r < r_outer, theta_lo < theta < theta_hi,
/// with theta = atan2(y, x) mapped to [0, 2 pi).
double c_shape_target(double zeta_x, double zeta_y, const TargetSpec& spec = {});

/// Samples read from a target CSV. Exactly one of the grids is set; 2D
/// values are stored x-major, as in Profile2D.
struct TargetSamples {
  std::vector<double> values;
  std::optional<Grid1D> grid_1d;
  std::optional<Grid2D> grid_2d;

  bool is_2d() const noexcept { return grid_2d.has_value(); }
};

/// Reads `zeta,value` or `zeta_x,zeta_y,value` CSV. 2D files must cover a
/// full tensor grid, one row per point, in any order. Throws ParseError on
/// malformed rows (with line number) and std::domain_error on negative or
/// non-finite values.
TargetSamples load_target_samples(const std::filesystem::path& path);

/// Target tabulated on a grid.
std::vector<double> sample_target(const TargetSpec& spec, const Grid1D& g);
std::vector<double> sample_target(const TargetSpec& spec, const Grid2D& g);

std::string to_string(TargetKind kind);
TargetKind target_kind_from_string(const std::string& s);

}  // namespace cptlitho
