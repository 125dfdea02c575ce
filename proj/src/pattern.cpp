#include "cptlitho/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "cptlitho/errors.hpp"

namespace cptlitho {

namespace {

constexpr double kPi = std::numbers::pi;

void require_order(int n, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": order must be >= 1");
}

template <typename Fn>
Profile1D tabulate(const Grid1D& g, Fn&& fn) {
  Profile1D out{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = fn(g[i]);
  return out;
}

template <typename E>
[[noreturn]] void rethrow_at(const E& e, std::size_t step, double zeta) {
  const std::string where = " (exposure step " + std::to_string(step) + ", zeta = " + std::to_string(zeta) + ")";
  if constexpr (std::is_same_v<E, ConvergenceError>) {
    throw ConvergenceError(e.what() + where, e.residual());
  } else {
    throw E(e.what() + where);
  }
}

}  // namespace

Grid1D::Grid1D(std::vector<double> zeta) : zeta_(std::move(zeta)) {
  if (zeta_.empty()) throw std::invalid_argument("Grid1D: empty grid");
  for (std::size_t i = 0; i < zeta_.size(); ++i) {
    if (!std::isfinite(zeta_[i])) throw std::invalid_argument("Grid1D: non-finite position");
    if (i > 0 && !(zeta_[i] > zeta_[i - 1])) {
      throw std::invalid_argument("Grid1D: positions must be strictly increasing");
    }
  }
}

Grid1D Grid1D::uniform(double lo, double hi, std::size_t count) {
  if (count == 0 || !(hi > lo)) throw std::invalid_argument("Grid1D::uniform: need count > 0 and hi > lo");
  std::vector<double> z(count);
  const double step = (hi - lo) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) z[i] = lo + step * static_cast<double>(i);
  return Grid1D(std::move(z));
}

Grid1D Grid1D::standard(std::size_t count) { return uniform(-kPi / 2, kPi / 2, count); }

Grid2D Grid2D::standard(std::size_t n) {
  return Grid2D(Grid1D::uniform(-kPi, kPi, n), Grid1D::uniform(-kPi, kPi, n));
}

double factor_value(const StandingWaveFactor& f, double zeta) {
  const Complex r = f.r();
  // Re(r e^{2 i zeta})
  const double re = r.real() * std::cos(2.0 * zeta) - r.imag() * std::sin(2.0 * zeta);
  return (1.0 + 2.0 * re) / (1.0 + 2.0 * f.modulus());
}

Profile1D factor_profile(const StandingWaveFactor& f, const Grid1D& g) {
  return tabulate(g, [&](double z) { return factor_value(f, z); });
}

Profile1D product_profile(const ExposurePlan& plan, const Grid1D& g) {
  if (!plan.single_direction()) {
    throw std::invalid_argument("product_profile: plan mixes wave directions; use product_profile_2d");
  }
  return tabulate(g, [&](double z) {
    double v = 1.0;
    for (const auto& f : plan) v *= factor_value(f, z);
    return v;
  });
}

Profile1D closed_form_uniform(int n, const Grid1D& g) {
  require_order(n, "closed_form_uniform");
  const double scale = std::pow(4.0, -(n - 1));
  return tabulate(g, [&](double z) {
    const double s = std::sin(n * z);
    return s * s * scale;
  });
}

Profile1D point_spread(int n, const Grid1D& g) {
  require_order(n, "point_spread");
  return tabulate(g, [&](double z) { return std::pow(std::cos(z), 2 * n); });
}

Profile1D decoherent_product_profile(const ExposurePlan& plan, const LambdaParams& atom,
                                     double total_intensity, const Grid1D& g) {
  if (!(total_intensity > 0.0) || !std::isfinite(total_intensity)) {
    throw std::invalid_argument("decoherent_product_profile: total intensity must be > 0");
  }
  if (!plan.single_direction()) {
    throw std::invalid_argument("decoherent_product_profile: plan mixes wave directions");
  }
  atom.validate();
  std::vector<BeamRealization> beams;
  beams.reserve(plan.size());
  for (const auto& f : plan) beams.push_back(realize_factor(f));

  Profile1D out{g, std::vector<double>(g.size(), 1.0)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t v = 0; v < beams.size(); ++v) {
      const auto [s, r] = beams[v].amplitudes_at(g[i], total_intensity);
      try {
        out.values[i] *= unit_step_retention(s, r, atom);
      } catch (const ConvergenceError& e) {
        rethrow_at(e, v, g[i]);
      } catch (const NumericError& e) {
        rethrow_at(e, v, g[i]);
      }
    }
  }
  return out;
}

Profile1D quench_localization_profile(double s_uniform, double r_peak, const Grid1D& g,
                                      const LambdaParams& atom) {
  if (!(r_peak > 0.0)) throw std::invalid_argument("quench_localization_profile: r_peak must be > 0");
  if (!std::isfinite(s_uniform)) throw std::invalid_argument("quench_localization_profile: bad s");
  atom.validate();
  return tabulate(g, [&](double z) {
    return unit_step_retention(s_uniform, r_peak * std::sin(z), atom);
  });
}

Profile2D product_profile_2d(const ExposurePlan& plan, const Grid2D& g) {
  Profile2D out{g, std::vector<double>(g.size(), 1.0)};
  for (const auto& f : plan) {
    const double c = std::cos(f.theta());
    const double s = std::sin(f.theta());
    for (std::size_t ix = 0; ix < g.x().size(); ++ix) {
      for (std::size_t iy = 0; iy < g.y().size(); ++iy) {
        out.values[g.index(ix, iy)] *= factor_value(f, g.x()[ix] * c + g.y()[iy] * s);
      }
    }
  }
  return out;
}

double fringe_period(double wavelength, int n) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("fringe_period: wavelength must be > 0");
  require_order(n, "fringe_period");
  return wavelength / (2.0 * n);
}

double fwhm(const Profile1D& p) {
  const auto& v = p.values;
  const auto z = p.grid.zeta();
  const std::size_t peak = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double half = 0.5 * v[peak];

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (v[inside] - half) / (v[inside] - v[outside]);
    return z[inside] + t * (z[outside] - z[inside]);
  };

  std::size_t lo = peak;
  while (lo > 0 && v[lo - 1] >= half) --lo;
  std::size_t hi = peak;
  while (hi + 1 < v.size() && v[hi + 1] >= half) ++hi;
  if (lo == 0 || hi + 1 == v.size()) {
    throw std::domain_error("fwhm: peak does not fall to half maximum inside the grid");
  }
  return crossing(hi, hi + 1) - crossing(lo, lo - 1);
}

}  // namespace cptlitho
