#include "cptlitho/atom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cptlitho/errors.hpp"

namespace cptlitho {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPositivityTol = 1e-9;

Matrix9c kron(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    }
  }
  return out;
}

// |to><from|
Matrix3c transition(Level to, Level from) {
  Matrix3c m = Matrix3c::Zero();
  m(static_cast<int>(to), static_cast<int>(from)) = 1.0;
  return m;
}

bool all_finite(const Vector9c& v) {
  for (int i = 0; i < 9; ++i) {
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  }
  return true;
}

Vector9c rk4_step(const Matrix9c& gen, const Vector9c& x, double h) {
  const Vector9c k1 = gen * x;
  const Vector9c k2 = gen * (x + (0.5 * h) * k1);
  const Vector9c k3 = gen * (x + (0.5 * h) * k2);
  const Vector9c k4 = gen * (x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void LambdaParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string("LambdaParams: ") + name + " must be finite and >= 0");
    }
  };
  check(gamma1, "gamma1");
  check(gamma2, "gamma2");
  check(gamma_d, "gamma_d");
  for (auto z : {omega_s, omega_r}) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("LambdaParams: non-finite Rabi frequency");
    }
  }
}

DensityMatrix3::DensityMatrix3(const Matrix3c& m) : m_(m) {
  if (!m_.allFinite()) throw std::invalid_argument("DensityMatrix3: non-finite entries");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix3: not Hermitian");
  }
  if (std::abs(m_.trace() - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix3: trace differs from 1");
  }
  const Matrix3c h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityTol) {
    throw std::invalid_argument("DensityMatrix3: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix3 DensityMatrix3::ground() {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 1.0;
  return DensityMatrix3(m);
}

DensityMatrix3 DensityMatrix3::pure(const Eigen::Vector3cd& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0)) throw std::invalid_argument("DensityMatrix3::pure: zero vector");
  return DensityMatrix3(psi * psi.adjoint() / n);
}

DensityMatrix3 DensityMatrix3::from_numeric(const Matrix3c& m) {
  Matrix3c h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!std::isfinite(tr) || tr <= 0.0) {
    throw NumericError("DensityMatrix3: cannot renormalize a matrix with trace " + std::to_string(tr));
  }
  h /= tr;
  return DensityMatrix3(h);
}

Vector9c vectorize(const Matrix3c& m) {
  Vector9c v;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) v(i + 3 * j) = m(i, j);
  }
  return v;
}

Matrix3c unvectorize(const Vector9c& v) {
  Matrix3c m;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) m(i, j) = v(i + 3 * j);
  }
  return m;
}

Matrix3c hamiltonian(const LambdaParams& p) {
  Matrix3c h = Matrix3c::Zero();
  h(2, 0) = 0.5 * p.omega_r;
  h(2, 1) = 0.5 * p.omega_s;
  h(0, 2) = std::conj(h(2, 0));
  h(1, 2) = std::conj(h(2, 1));
  return h;
}

Matrix3c master_equation_rhs(const LambdaParams& p, const Matrix3c& rho) {
  const std::complex<double> i(0.0, 1.0);
  const Matrix3c h = hamiltonian(p);
  Matrix3c d = -i * (h * rho - rho * h);
  const std::pair<double, Matrix3c> jumps[] = {
      {p.gamma1, transition(Level::kG1, Level::kE1)},
      {p.gamma2, transition(Level::kG2, Level::kE1)},
  };
  for (const auto& [rate, jump] : jumps) {
    const Matrix3c jdj = jump.adjoint() * jump;
    d += rate * (jump * rho * jump.adjoint() - 0.5 * (jdj * rho + rho * jdj));
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r != c) d(r, c) -= p.gamma_d * rho(r, c);
    }
  }
  return d;
}

Liouvillian build_liouvillian(const LambdaParams& p) {
  p.validate();
  const std::complex<double> i(0.0, 1.0);
  const Matrix3c id = Matrix3c::Identity();
  const Matrix3c h = hamiltonian(p);

  Liouvillian l;
  l.generator = -i * (kron(id, h) - kron(h.transpose(), id));
  const std::pair<double, Matrix3c> jumps[] = {
      {p.gamma1, transition(Level::kG1, Level::kE1)},
      {p.gamma2, transition(Level::kG2, Level::kE1)},
  };
  for (const auto& [rate, jump] : jumps) {
    if (rate == 0.0) continue;
    const Matrix3c jdj = jump.adjoint() * jump;
    l.generator += rate * (kron(jump.conjugate(), jump) - 0.5 * kron(id, jdj) -
                           0.5 * kron(jdj.transpose(), id));
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r != c) l.generator(r + 3 * c, r + 3 * c) -= p.gamma_d;
    }
  }
  return l;
}

DensityMatrix3 evolve(const LambdaParams& p, const DensityMatrix3& rho0, double t, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("evolve: dt must be > 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("evolve: t must be >= 0");
  if (t == 0.0) return rho0;

  const Liouvillian l = build_liouvillian(p);
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  const double h = t / static_cast<double>(std::max<std::size_t>(steps, 1));
  Vector9c x = vectorize(rho0.matrix());
  for (std::size_t k = 0; k < steps; ++k) {
    x = rk4_step(l.generator, x, h);
    if (!all_finite(x)) {
      throw NumericError("evolve: non-finite state after step " + std::to_string(k + 1));
    }
  }
  return DensityMatrix3::from_numeric(unvectorize(x));
}

SteadyStateSolution solve_steady_state(const LambdaParams& p, const SteadyStateOptions& opts) {
  p.validate();
  if (p.omega_s == 0.0 && p.omega_r == 0.0) {
    return {DensityMatrix3::ground(), SteadyStateMethod::kTrivial, 0.0, 9, 0};
  }
  if (p.gamma1 + p.gamma2 <= 0.0) {
    throw std::invalid_argument("steady_state: driven system needs gamma1 + gamma2 > 0");
  }

  const Liouvillian l = build_liouvillian(p);
  Eigen::JacobiSVD<Matrix9c> svd(l.generator, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double cutoff = opts.null_tolerance * std::max(1.0, sigma(0));
  std::size_t null_dim = 0;
  for (int k = 0; k < 9; ++k) {
    if (sigma(k) <= cutoff) ++null_dim;
  }

  if (null_dim == 1) {
    const Vector9c v = svd.matrixV().col(8);
    Matrix3c m = unvectorize(v);
    const std::complex<double> tr = m.trace();
    if (std::abs(tr) > 0.0) {
      m /= tr;
      const DensityMatrix3 rho = DensityMatrix3::from_numeric(m);
      const double residual = (l.generator * vectorize(rho.matrix())).norm();
      if (residual <= opts.residual_tolerance) {
        return {rho, SteadyStateMethod::kNullSpace, residual, null_dim, 0};
      }
    }
  }

  // Degenerate (or numerically unsatisfactory) null space: the physical
  // limit depends on the initial condition, so integrate from |g1><g1|.
  constexpr std::size_t kCheckEvery = 100;
  Vector9c x = vectorize(DensityMatrix3::ground().matrix());
  double residual = (l.generator * x).norm();
  std::size_t steps = 0;
  while (residual > opts.residual_tolerance) {
    if (steps >= opts.max_steps) {
      throw ConvergenceError("steady_state: residual " + std::to_string(residual) + " after " +
                                 std::to_string(steps) + " integration steps",
                             residual);
    }
    for (std::size_t k = 0; k < kCheckEvery; ++k) x = rk4_step(l.generator, x, opts.dt);
    steps += kCheckEvery;
    if (!all_finite(x)) throw NumericError("steady_state: non-finite state during integration");
    residual = (l.generator * x).norm();
  }
  const DensityMatrix3 rho = DensityMatrix3::from_numeric(unvectorize(x));
  return {rho, SteadyStateMethod::kIntegration, (l.generator * vectorize(rho.matrix())).norm(),
          null_dim, steps};
}

double quench_retention(const DensityMatrix3& rho, double gamma1, double gamma2) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    throw std::invalid_argument("quench_retention: decay rates must be >= 0");
  }
  const double g1 = rho.population(Level::kG1);
  const double e1 = rho.population(Level::kE1);
  double retained = g1;
  if (gamma1 + gamma2 > 0.0) {
    retained += gamma1 / (gamma1 + gamma2) * e1;
  } else if (e1 > 0.0) {
    throw std::invalid_argument("quench_retention: excited population with no decay channel");
  }
  return std::clamp(retained, 0.0, 1.0);
}

double unit_step_retention(Complex s, Complex r, const LambdaParams& p, const SteadyStateOptions& opts) {
  p.validate();
  if (s == 0.0 && r == 0.0) return 1.0;
  const DensityMatrix3 rho = steady_state(p.with_fields(s, r), opts);
  return quench_retention(rho, p.gamma1, p.gamma2);
}

}  // namespace cptlitho
