#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cptlitho/fields.hpp"
#include "cptlitho/pattern.hpp"

namespace cptlitho {

/// Coefficients c_0..c_n of the real Laurent series
///
///   profile(zeta) * prod_v (1 + 2|r_v|) = sum_{mu=-n}^{n} c_mu e^{2 i mu zeta},
///
/// with c_{-mu} = conj(c_mu). In the two-sided "f_mu + c.c." form the
/// constant term is f_0 = c_0 / 2 and f_mu = c_mu otherwise.
struct LaurentCoeffs {
  int order = 0;
  std::vector<Complex> coeffs;  // index mu = 0..order

  Complex c(int mu) const;  ///< any mu in [-order, order]
  Complex f(int mu) const;  ///< two-sided form, mu in [0, order]

  /// sum_mu c_mu e^{2 i mu zeta} (real part; the imaginary part is zero up
  /// to rounding for conjugate-symmetric coefficients).
  double evaluate(double zeta) const;
  /// Imaginary part of the same sum, for symmetry checks.
  double evaluate_imag(double zeta) const;
};

/// Iterated convolution of the trinomials (conj r_v, 1, r_v).
LaurentCoeffs product_coefficients(const ExposurePlan& plan);

/// Largest plan symmetric_coefficients will enumerate (3^16 assignments).
inline constexpr std::size_t kMaxSymmetricOrder = 16;

/// Direct enumeration over disjoint index sets (A, B) with |A| - |B| = mu:
/// c_mu = sum (prod_{a in A} r_a)(prod_{b in B} conj r_b). Exists as an
/// independent check on product_coefficients. Throws SizeLimitError above
/// kMaxSymmetricOrder.
LaurentCoeffs symmetric_coefficients(const ExposurePlan& plan);

/// Profile reconstructed from the coefficients with the normalization
/// prod 1/(1 + 2|r_v|) restored.
Profile1D evaluate_product_series(const LaurentCoeffs& c, double normalization, const Grid1D& g);

/// Discrete Fourier series of 2n samples taken one period apart at
/// zeta_j = -pi/2 + j pi/(2n), j = 0..2n-1. Harmonics run over
/// mu = -n..n-1 of the base frequency 2 (in zeta).
struct TruncatedSeries {
  int order = 0;
  std::vector<Complex> coeffs;  // index mu + order

  Complex coefficient(int mu) const;
  /// Real part of sum_mu c_mu e^{2 i mu zeta}. For real samples this is the
  /// trigonometric interpolant with the Nyquist term taken as a cosine.
  double evaluate(double zeta) const;
  Profile1D evaluate(const Grid1D& g) const;
};

/// The sampling positions for a series of order n (2n points).
Grid1D series_sample_grid(int n);

/// Throws std::invalid_argument unless samples.size() == 2n.
TruncatedSeries truncated_target_series(std::span<const double> samples, int n);

}  // namespace cptlitho
