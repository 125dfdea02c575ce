#include "cptlitho/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cptlitho/errors.hpp"

namespace cptlitho {

namespace {

void require_single_direction(const ExposurePlan& plan, const char* who) {
  if (!plan.single_direction()) {
    throw std::invalid_argument(std::string(who) + ": plan mixes wave directions");
  }
}

}  // namespace

Complex LaurentCoeffs::c(int mu) const {
  if (mu < -order || mu > order) throw std::out_of_range("LaurentCoeffs::c: harmonic out of range");
  return mu >= 0 ? coeffs[static_cast<std::size_t>(mu)] : std::conj(coeffs[static_cast<std::size_t>(-mu)]);
}

Complex LaurentCoeffs::f(int mu) const {
  if (mu < 0 || mu > order) throw std::out_of_range("LaurentCoeffs::f: harmonic out of range");
  return mu == 0 ? 0.5 * coeffs[0] : coeffs[static_cast<std::size_t>(mu)];
}

double LaurentCoeffs::evaluate(double zeta) const {
  double sum = coeffs[0].real();
  for (int mu = 1; mu <= order; ++mu) {
    sum += 2.0 * (coeffs[static_cast<std::size_t>(mu)] * std::polar(1.0, 2.0 * mu * zeta)).real();
  }
  return sum;
}

double LaurentCoeffs::evaluate_imag(double zeta) const {
  Complex sum = 0.0;
  for (int mu = -order; mu <= order; ++mu) sum += c(mu) * std::polar(1.0, 2.0 * mu * zeta);
  return sum.imag();
}

LaurentCoeffs product_coefficients(const ExposurePlan& plan) {
  require_single_direction(plan, "product_coefficients");
  // Two-sided array, index mu + degree.
  std::vector<Complex> poly{1.0};
  for (const auto& f : plan) {
    const Complex r = f.r();
    std::vector<Complex> next(poly.size() + 2, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += std::conj(r) * poly[k];
      next[k + 1] += poly[k];
      next[k + 2] += r * poly[k];
    }
    poly = std::move(next);
  }
  const int n = static_cast<int>(plan.size());
  LaurentCoeffs out{n, std::vector<Complex>(plan.size() + 1)};
  for (int mu = 0; mu <= n; ++mu) out.coeffs[static_cast<std::size_t>(mu)] = poly[static_cast<std::size_t>(mu + n)];
  return out;
}

LaurentCoeffs symmetric_coefficients(const ExposurePlan& plan) {
  require_single_direction(plan, "symmetric_coefficients");
  const std::size_t n = plan.size();
  if (n > kMaxSymmetricOrder) {
    throw SizeLimitError("symmetric_coefficients: plan of " + std::to_string(n) +
                         " factors exceeds the enumeration limit of " +
                         std::to_string(kMaxSymmetricOrder) + "; use product_coefficients");
  }
  LaurentCoeffs out{static_cast<int>(n), std::vector<Complex>(n + 1, 0.0)};

  // Each index is in A (0), in B (1), or in neither (2): walk all 3^n
  // assignments as a base-3 counter.
  std::vector<int> slot(n, 2);
  while (true) {
    int a_count = 0;
    int b_count = 0;
    Complex term = 1.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (slot[v] == 0) {
        term *= plan[v].r();
        ++a_count;
      } else if (slot[v] == 1) {
        term *= std::conj(plan[v].r());
        ++b_count;
      }
    }
    if (a_count >= b_count) out.coeffs[static_cast<std::size_t>(a_count - b_count)] += term;

    std::size_t k = 0;
    while (k < n && slot[k] == 0) {
      slot[k] = 2;
      ++k;
    }
    if (k == n) break;
    slot[k] = (slot[k] == 2) ? 1 : 0;
  }
  return out;
}

Profile1D evaluate_product_series(const LaurentCoeffs& c, double normalization, const Grid1D& g) {
  Profile1D out{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = normalization * c.evaluate(g[i]);
  return out;
}

Complex TruncatedSeries::coefficient(int mu) const {
  if (mu < -order || mu >= order) throw std::out_of_range("TruncatedSeries: harmonic out of range");
  return coeffs[static_cast<std::size_t>(mu + order)];
}

double TruncatedSeries::evaluate(double zeta) const {
  double sum = 0.0;
  for (int mu = -order; mu < order; ++mu) {
    sum += (coeffs[static_cast<std::size_t>(mu + order)] * std::polar(1.0, 2.0 * mu * zeta)).real();
  }
  return sum;
}

Profile1D TruncatedSeries::evaluate(const Grid1D& g) const {
  Profile1D out{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = evaluate(g[i]);
  return out;
}

Grid1D series_sample_grid(int n) {
  if (n < 1) throw std::invalid_argument("series_sample_grid: order must be >= 1");
  std::vector<double> z(static_cast<std::size_t>(2 * n));
  for (int nu = -n; nu < n; ++nu) z[static_cast<std::size_t>(nu + n)] = std::numbers::pi / (2.0 * n) * nu;
  return Grid1D(std::move(z));
}

TruncatedSeries truncated_target_series(std::span<const double> samples, int n) {
  if (n < 1) throw std::invalid_argument("truncated_target_series: order must be >= 1");
  if (samples.size() != static_cast<std::size_t>(2 * n)) {
    throw std::invalid_argument("truncated_target_series: expected " + std::to_string(2 * n) +
                                " samples, got " + std::to_string(samples.size()));
  }
  const Grid1D grid = series_sample_grid(n);
  TruncatedSeries out{n, std::vector<Complex>(samples.size(), 0.0)};
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (int mu = -n; mu < n; ++mu) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) acc += samples[j] * std::polar(1.0, -2.0 * mu * grid[j]);
    out.coeffs[static_cast<std::size_t>(mu + n)] = acc * inv;
  }
  return out;
}

}  // namespace cptlitho
