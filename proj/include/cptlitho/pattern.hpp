#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cptlitho/atom.hpp"
#include "cptlitho/fields.hpp"

namespace cptlitho {

/// Strictly increasing, finite dimensionless positions zeta = k0 z.
class Grid1D {
 public:
  explicit Grid1D(std::vector<double> zeta);

  /// `count` points over [lo, hi), endpoint excluded.
  static Grid1D uniform(double lo, double hi, std::size_t count);

  /// 400 points over [-pi/2, pi/2): one full period.
  static Grid1D standard(std::size_t count = 400);

  std::span<const double> zeta() const noexcept { return zeta_; }
  std::size_t size() const noexcept { return zeta_.size(); }
  double operator[](std::size_t i) const { return zeta_[i]; }

 private:
  std::vector<double> zeta_;
};

/// Tensor grid over (k0 x, k0 y).
class Grid2D {
 public:
  Grid2D(Grid1D x, Grid1D y) : x_(std::move(x)), y_(std::move(y)) {}

  /// n x n points over [-pi, pi)^2.
  static Grid2D standard(std::size_t n = 50);

  const Grid1D& x() const noexcept { return x_; }
  const Grid1D& y() const noexcept { return y_; }
  std::size_t size() const noexcept { return x_.size() * y_.size(); }
  /// Flat index used by Profile2D::values.
  std::size_t index(std::size_t ix, std::size_t iy) const noexcept { return ix * y_.size() + iy; }

 private:
  Grid1D x_;
  Grid1D y_;
};

struct Profile1D {
  Grid1D grid;
  std::vector<double> values;
};

/// values[grid.index(ix, iy)].
struct Profile2D {
  Grid2D grid;
  std::vector<double> values;

  double at(std::size_t ix, std::size_t iy) const { return values[grid.index(ix, iy)]; }
};

/// (1 + 2 Re(r e^{2 i zeta})) / (1 + 2|r|) at a single point.
double factor_value(const StandingWaveFactor& f, double zeta);

Profile1D factor_profile(const StandingWaveFactor& f, const Grid1D& g);

/// Product of factor profiles. zeta runs along the plan's common wave
/// direction; plans mixing directions throw std::invalid_argument.
Profile1D product_profile(const ExposurePlan& plan, const Grid1D& g);

/// sin^2(n zeta) / 4^{n-1}, the closed form of the uniform-phase product.
Profile1D closed_form_uniform(int n, const Grid1D& g);

/// cos^{2n}(zeta).
Profile1D point_spread(int n, const Grid1D& g);

/// Per-step retention from the master equation, multiplied over steps.
/// Each factor is realized as beams whose intensities are scaled so that
/// |S|^2 + |R|^2 = total_intensity; the field entries of `atom` are
/// ignored, only its rates are used. Solver failures are rethrown with the
/// step index and position attached.
Profile1D decoherent_product_profile(const ExposurePlan& plan, const LambdaParams& atom,
                                     double total_intensity, const Grid1D& g);

/// Retention for a uniform signal-1 field s_uniform and a signal-2
/// standing wave r_peak sin(zeta); the density peaks at the signal-2 node.
Profile1D quench_localization_profile(double s_uniform, double r_peak, const Grid1D& g,
                                      const LambdaParams& atom);

Profile2D product_profile_2d(const ExposurePlan& plan, const Grid2D& g);

/// lambda / (2 n).
double fringe_period(double wavelength, int n);

/// Full width at half maximum of the peak containing the profile maximum,
/// with linear interpolation of the crossings. Throws std::domain_error if
/// the peak does not fall below half maximum on both sides within the grid.
double fwhm(const Profile1D& p);

}  // namespace cptlitho
