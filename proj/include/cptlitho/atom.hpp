#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "cptlitho/fields.hpp"

namespace cptlitho {

/// Basis order of the Lambda system.
enum class Level : int { kG1 = 0, kG2 = 1, kE1 = 2 };

/// Parameters of the resonantly driven Lambda system, in units of the
/// total excited-state decay rate.
///
/// omega_s couples |g2> <-> |e1> and omega_r couples |g1> <-> |e1>, so the
/// state S|g1> - R|g2> is dark and a vanishing signal-1 field leaves no
/// population in |g1>.
struct LambdaParams {
  Complex omega_s{0.0, 0.0};
  Complex omega_r{0.0, 0.0};
  double gamma1 = 0.5;   ///< |e1> -> |g1>
  double gamma2 = 0.5;   ///< |e1> -> |g2>
  double gamma_d = 0.0;  ///< extra damping of every coherence

  /// Throws std::invalid_argument on negative or non-finite rates.
  void validate() const;

  LambdaParams with_fields(Complex s, Complex r) const {
    LambdaParams p = *this;
    p.omega_s = s;
    p.omega_r = r;
    return p;
  }
};

using Matrix3c = Eigen::Matrix3cd;
using Matrix9c = Eigen::Matrix<std::complex<double>, 9, 9>;
using Vector9c = Eigen::Matrix<std::complex<double>, 9, 1>;

/// A valid 3x3 density matrix over (g1, g2, e1).
class DensityMatrix3 {
 public:
  /// Hermiticity and trace are checked to 1e-10, eigenvalues to -1e-9.
  explicit DensityMatrix3(const Matrix3c& m);

  static DensityMatrix3 ground();  ///< |g1><g1|
  static DensityMatrix3 pure(const Eigen::Vector3cd& psi);

  /// Symmetrizes m, rescales it to unit trace, and validates.
  static DensityMatrix3 from_numeric(const Matrix3c& m);

  const Matrix3c& matrix() const noexcept { return m_; }
  double population(Level l) const noexcept {
    const int i = static_cast<int>(l);
    return m_(i, i).real();
  }
  std::complex<double> operator()(Level i, Level j) const noexcept {
    return m_(static_cast<int>(i), static_cast<int>(j));
  }

 private:
  Matrix3c m_;
};

/// Column-stacked vec(rho)[i + 3 j] = rho(i, j).
Vector9c vectorize(const Matrix3c& m);
Matrix3c unvectorize(const Vector9c& v);

/// The master-equation generator as a 9x9 superoperator.
struct Liouvillian {
  Matrix9c generator = Matrix9c::Zero();

  Matrix3c apply(const Matrix3c& rho) const { return unvectorize(generator * vectorize(rho)); }
};

/// Hamiltonian (1/2)(omega_r |e1><g1| + omega_s |e1><g2| + h.c.) in the
/// rotating frame on resonance.
Matrix3c hamiltonian(const LambdaParams& p);

/// d rho / dt evaluated directly in matrix form. Independent of the
/// superoperator assembly and used to check it.
Matrix3c master_equation_rhs(const LambdaParams& p, const Matrix3c& rho);

Liouvillian build_liouvillian(const LambdaParams& p);

/// Fixed-step RK4 of the master equation. The step is shrunk so that an
/// integer number of steps lands exactly on t. Throws NumericError on
/// non-finite values.
DensityMatrix3 evolve(const LambdaParams& p, const DensityMatrix3& rho0, double t, double dt = 1e-3);

struct SteadyStateOptions {
  double dt = 1e-3;
  std::size_t max_steps = 1'000'000;
  double residual_tolerance = 1e-10;
  /// Singular values below this (relative to max(1, sigma_max)) count as
  /// null directions of the generator.
  double null_tolerance = 1e-9;
};

enum class SteadyStateMethod { kTrivial, kNullSpace, kIntegration };

/// Steady state plus how it was obtained. Step A is assumed to run to this
/// state; `residual` is ||L rho||.
struct SteadyStateSolution {
  DensityMatrix3 rho;
  SteadyStateMethod method;
  double residual = 0.0;
  std::size_t null_dimension = 0;
  std::size_t steps = 0;
};

/// Long-time limit of evolution from |g1><g1|. A one-dimensional null space
/// is solved directly; a degenerate one is resolved by integrating from the
/// initial state. Throws ConvergenceError if the integration budget runs
/// out, std::invalid_argument if fields are on but no decay channel exists.
SteadyStateSolution solve_steady_state(const LambdaParams& p, const SteadyStateOptions& opts = {});

inline DensityMatrix3 steady_state(const LambdaParams& p, const SteadyStateOptions& opts = {}) {
  return solve_steady_state(p, opts).rho;
}

/// Probability of ending step B in |g1>: rho_g1g1 plus the gamma1 share of
/// the excited population. Everything else goes to the reservoir.
double quench_retention(const DensityMatrix3& rho, double gamma1, double gamma2);

/// Steady state under fields (s, r) followed by the quench. Returns 1 when
/// both fields vanish.
double unit_step_retention(Complex s, Complex r, const LambdaParams& p,
                           const SteadyStateOptions& opts = {});

}  // namespace cptlitho
