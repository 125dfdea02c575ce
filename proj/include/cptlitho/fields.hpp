#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cptlitho {

using Complex = std::complex<double>;

/// Largest admissible modulation |r| of a single exposure.
inline constexpr double kMaxModulus = 0.5;

/// One exposure step: a standing wave whose retention factor is
///
///   (1 + r e^{2i k.x} + r* e^{-2i k.x}) / (1 + 2|r|),
///
/// with k.x = zeta_x cos(theta) + zeta_y sin(theta).
///
/// theta is reduced modulo pi: theta and theta + pi name the same standing
/// wave, and the phase of r is always referred to the direction in [0, pi).
class StandingWaveFactor {
 public:
  StandingWaveFactor() = default;

  /// Throws std::invalid_argument if |r| > 1/2 (beyond a 1e-12 rounding
  /// allowance) or if r or theta is not finite.
  explicit StandingWaveFactor(Complex r, double theta = 0.0);

  Complex r() const noexcept { return r_; }
  double theta() const noexcept { return theta_; }
  double modulus() const noexcept { return std::abs(r_); }

  friend bool operator==(const StandingWaveFactor&, const StandingWaveFactor&) = default;

 private:
  Complex r_{0.0, 0.0};
  double theta_ = 0.0;
};

/// Ordered, non-empty sequence of exposure steps.
class ExposurePlan {
 public:
  /// Throws std::invalid_argument on an empty list.
  explicit ExposurePlan(std::vector<StandingWaveFactor> factors);

  std::size_t size() const noexcept { return factors_.size(); }
  const StandingWaveFactor& operator[](std::size_t i) const { return factors_[i]; }
  std::span<const StandingWaveFactor> factors() const noexcept { return factors_; }
  auto begin() const noexcept { return factors_.begin(); }
  auto end() const noexcept { return factors_.end(); }

  /// True when every factor shares the same direction.
  bool single_direction() const noexcept;

  /// prod_v 1 / (1 + 2|r_v|).
  double normalization() const noexcept;

  friend bool operator==(const ExposurePlan&, const ExposurePlan&) = default;

 private:
  std::vector<StandingWaveFactor> factors_;
};

/// Beams that produce a given factor. Signal 1 is a pair of
/// counterpropagating beams with amplitudes a >= b; signal 2 is a fully
/// modulated standing wave whose ac part matches that of signal 1:
///
///   |S(zeta)|^2 = a^2 + b^2 + 2ab cos(2 zeta + phase)
///   |R(zeta)|^2 = r_amplitude^2 (1 - cos(2 zeta + phase))
///
/// so |S|^2 + |R|^2 = (a + b)^2 everywhere and the ideal retention
/// |S|^2 / (|S|^2 + |R|^2) equals the factor profile.
struct BeamRealization {
  double a = 1.0;
  double b = 0.0;
  double phase = 0.0;
  double r_amplitude = 0.0;

  /// Field magnitudes (|S|, |R|) at zeta, scaled so |S|^2 + |R|^2 equals
  /// total_intensity.
  std::pair<double, double> amplitudes_at(double zeta, double total_intensity) const;
};

/// N steps with phases 2 pi (v - 1) / N, i.e. r_v = -(1/2) exp(i 2 pi (v-1) / N).
ExposurePlan uniform_phase_plan(int n);

/// N identical factors r = 1/2; the product is cos^{2N}(zeta).
ExposurePlan point_plan(int n);

/// Concatenates per-angle plans, re-tagging each factor with its angle.
ExposurePlan rotated_plan(std::span<const double> angles, std::span<const ExposurePlan> per_angle);

BeamRealization realize_factor(const StandingWaveFactor& f);

/// Inverse of realize_factor: ab / (a^2 + b^2) e^{i phase}.
Complex factor_coefficient(const BeamRealization& beams);

}  // namespace cptlitho
