#include "cptlitho/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cptlitho {

namespace {

constexpr double kModulusSlack = 1e-12;

void require_order(int n, const char* who) {
  if (n < 1) {
    throw std::invalid_argument(std::string(who) + ": order must be >= 1, got " + std::to_string(n));
  }
}

}  // namespace

StandingWaveFactor::StandingWaveFactor(Complex r, double theta) : r_(r), theta_(theta) {
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || !std::isfinite(theta)) {
    throw std::invalid_argument("StandingWaveFactor: non-finite coefficient or angle");
  }
  if (std::abs(r) > kMaxModulus + kModulusSlack) {
    throw std::invalid_argument("StandingWaveFactor: |r| = " + std::to_string(std::abs(r)) +
                                " exceeds 1/2");
  }
  constexpr double pi = std::numbers::pi;
  double t = std::fmod(theta, pi);
  if (t < 0.0) t += pi;
  // t + pi can round to exactly pi for tiny negative inputs.
  theta_ = (t >= pi) ? 0.0 : t;
}

ExposurePlan::ExposurePlan(std::vector<StandingWaveFactor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw std::invalid_argument("ExposurePlan: a plan needs at least one factor");
  }
}

bool ExposurePlan::single_direction() const noexcept {
  for (const auto& f : factors_) {
    if (f.theta() != factors_.front().theta()) return false;
  }
  return true;
}

double ExposurePlan::normalization() const noexcept {
  double norm = 1.0;
  for (const auto& f : factors_) norm /= 1.0 + 2.0 * f.modulus();
  return norm;
}

std::pair<double, double> BeamRealization::amplitudes_at(double zeta, double total_intensity) const {
  const double c = std::cos(2.0 * zeta + phase);
  const double s2 = std::max(0.0, a * a + b * b + 2.0 * a * b * c);
  const double r2 = std::max(0.0, r_amplitude * r_amplitude * (1.0 - c));
  const double scale = total_intensity / ((a + b) * (a + b));
  return {std::sqrt(s2 * scale), std::sqrt(r2 * scale)};
}

ExposurePlan uniform_phase_plan(int n) {
  require_order(n, "uniform_phase_plan");
  std::vector<StandingWaveFactor> factors;
  factors.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const double phi = 2.0 * std::numbers::pi * v / n;
    factors.emplace_back(-0.5 * std::polar(1.0, phi));
  }
  return ExposurePlan(std::move(factors));
}

ExposurePlan point_plan(int n) {
  require_order(n, "point_plan");
  return ExposurePlan(std::vector<StandingWaveFactor>(static_cast<std::size_t>(n),
                                                      StandingWaveFactor(Complex(0.5, 0.0))));
}

ExposurePlan rotated_plan(std::span<const double> angles, std::span<const ExposurePlan> per_angle) {
  if (angles.size() != per_angle.size()) {
    throw std::invalid_argument("rotated_plan: " + std::to_string(angles.size()) + " angles but " +
                                std::to_string(per_angle.size()) + " per-angle plans");
  }
  if (angles.empty()) {
    throw std::invalid_argument("rotated_plan: no angles given");
  }
  std::vector<StandingWaveFactor> factors;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    for (const auto& f : per_angle[i]) {
      // The per-angle plans are 1D recipes; their own theta is replaced.
      factors.emplace_back(f.r(), angles[i]);
    }
  }
  return ExposurePlan(std::move(factors));
}

BeamRealization realize_factor(const StandingWaveFactor& f) {
  const double m = f.modulus();
  if (m > kMaxModulus + kModulusSlack) {
    throw std::invalid_argument("realize_factor: |r| > 1/2 has no physical beam ratio");
  }
  BeamRealization beams;
  beams.a = 1.0;
  // Smaller root of m t^2 - t + m = 0, written to stay accurate as m -> 0.
  const double disc = std::max(0.0, 1.0 - 4.0 * m * m);
  beams.b = (m == 0.0) ? 0.0 : std::min(1.0, 2.0 * m / (1.0 + std::sqrt(disc)));
  beams.phase = (m == 0.0) ? 0.0 : std::arg(f.r());
  beams.r_amplitude = std::sqrt(2.0 * beams.a * beams.b);
  return beams;
}

Complex factor_coefficient(const BeamRealization& beams) {
  const double denom = beams.a * beams.a + beams.b * beams.b;
  if (denom == 0.0) return {0.0, 0.0};
  return std::polar(beams.a * beams.b / denom, beams.phase);
}

}  // namespace cptlitho
