#include "cptlitho/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace cptlitho {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kPeakPoints1D = 4096;
constexpr std::size_t kPeakRefine2D = 4;

constexpr double kCostTolerance = 1e-15;
constexpr double kGradientTolerance = 1e-15;

struct StartOutcome {
  Eigen::VectorXd params;
  StartDiagnostics diag;
};

Eigen::VectorXd initial_parameters(std::size_t factors, std::uint64_t seed, std::size_t start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(start >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u_dist(0.0, kPi / 2);
  std::uniform_real_distribution<double> phi_dist(0.0, 2 * kPi);
  Eigen::VectorXd p(2 * factors);
  for (std::size_t v = 0; v < factors; ++v) p(static_cast<Eigen::Index>(v)) = u_dist(rng);
  for (std::size_t v = 0; v < factors; ++v) p(static_cast<Eigen::Index>(factors + v)) = phi_dist(rng);
  return p;
}

// Adapts the residual model to Eigen's MINPACK-style solver.
struct ResidualFunctor : Eigen::DenseFunctor<double> {
  explicit ResidualFunctor(const NormalizedResidualModel& m)
      : Eigen::DenseFunctor<double>(static_cast<int>(m.parameter_count()), static_cast<int>(m.residual_count())),
        model(m) {}

  // A nonzero return aborts the solve (zero trial vector).
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const { return model.residual(p, r) ? 0 : -1; }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const { return model.jacobian(p, j) ? 0 : -1; }

  const NormalizedResidualModel& model;
};

std::string describe(Eigen::LevenbergMarquardtSpace::Status status) {
  using namespace Eigen::LevenbergMarquardtSpace;
  switch (status) {
    case RelativeReductionTooSmall: return "cost";
    case RelativeErrorTooSmall: return "step";
    case RelativeErrorAndReductionTooSmall: return "cost and step";
    case CosinusTooSmall: return "gradient";
    case FtolTooSmall: return "cost at machine precision";
    case XtolTooSmall: return "step at machine precision";
    case GtolTooSmall: return "gradient at machine precision";
    case UserAsked: return "zero trial vector";
    case ImproperInputParameters: return "improper input";
    default: return "iterations";
  }
}

StartOutcome levenberg_marquardt(const NormalizedResidualModel& model, Eigen::VectorXd p,
                                 const FitOptions& opts, std::size_t start) {
  using namespace Eigen::LevenbergMarquardtSpace;
  StartOutcome out;
  out.diag.start = start;

  ResidualFunctor functor(model);
  Eigen::LevenbergMarquardt<ResidualFunctor> lm(functor);
  lm.setXtol(opts.step_tolerance);
  lm.setFtol(kCostTolerance);
  lm.setGtol(kGradientTolerance);
  lm.setMaxfev(std::numeric_limits<Eigen::Index>::max());

  // Step manually so the budget counts iterations, not evaluations.
  Status status = lm.minimizeInit(p);
  std::size_t it = 0;
  if (status == NotStarted) {
    status = Running;
    while (status == Running && it < opts.max_iterations) {
      status = lm.minimizeOneStep(p);
      ++it;
    }
  }
  const bool failed = status == Running || status == UserAsked || status == ImproperInputParameters;
  out.diag.converged = !failed;
  out.diag.stop_reason = describe(status);
  out.diag.iterations = it;

  Eigen::VectorXd r(model.residual_count());
  out.diag.distance = model.residual(p, r) ? r.norm() : std::numeric_limits<double>::infinity();
  out.params = std::move(p);
  return out;
}

unsigned resolve_threads(unsigned requested, std::size_t starts) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(starts, 1)));
}

Grid1D refined_axis(const Grid1D& axis, std::size_t factor) {
  if (axis.size() < 2) return axis;
  const double lo = axis[0];
  const double hi = axis[axis.size() - 1];
  const std::size_t count = factor * (axis.size() - 1) + 1;
  std::vector<double> z(count);
  for (std::size_t i = 0; i < count; ++i) z[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return Grid1D(std::move(z));
}

std::vector<double> trial_on_grid(const ExposurePlan& plan, const std::variant<Grid1D, Grid2D>& grid) {
  if (const auto* g1 = std::get_if<Grid1D>(&grid)) return product_profile(plan, *g1).values;
  return product_profile_2d(plan, std::get<Grid2D>(grid)).values;
}

double peak_density(const ExposurePlan& plan, const std::variant<Grid1D, Grid2D>& grid) {
  std::vector<double> dense;
  if (std::holds_alternative<Grid1D>(grid)) {
    dense = product_profile(plan, Grid1D::standard(kPeakPoints1D)).values;
  } else {
    const auto& g = std::get<Grid2D>(grid);
    dense = product_profile_2d(plan, Grid2D(refined_axis(g.x(), kPeakRefine2D), refined_axis(g.y(), kPeakRefine2D)))
                .values;
  }
  return *std::max_element(dense.begin(), dense.end());
}

FitResult run_fit(const FitProblem& problem) {
  problem.validate();
  const NormalizedResidualModel model(problem);
  const FitOptions& opts = problem.options;
  const std::size_t starts = opts.starts;

  std::vector<StartOutcome> outcomes(starts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < starts; s = next++) {
      outcomes[s] = levenberg_marquardt(model, initial_parameters(problem.factor_count(), opts.seed, s), opts, s);
    }
  };
  const unsigned n_threads = resolve_threads(opts.threads, starts);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  // Reduce in start order; the lowest index wins ties.
  std::size_t best = 0;
  bool any_converged = false;
  for (std::size_t s = 0; s < starts; ++s) {
    any_converged = any_converged || outcomes[s].diag.converged;
    if (outcomes[s].diag.distance < outcomes[best].diag.distance) best = s;
  }

  FitResult result{model.plan(outcomes[best].params), 0.0, 0.0, best, {}};
  result.distance = normalized_distance(problem.target, trial_on_grid(result.plan, problem.grid));
  result.peak_density = peak_density(result.plan, problem.grid);
  for (auto& o : outcomes) result.starts.push_back(std::move(o.diag));

  if (!any_converged) {
    throw FitConvergenceError("fit: none of " + std::to_string(starts) + " starts converged within " +
                                  std::to_string(opts.max_iterations) + " iterations",
                              std::move(result));
  }
  return result;
}

}  // namespace

FitProblem FitProblem::one_d(std::vector<double> target, Grid1D grid, int order, FitOptions options) {
  return FitProblem{std::move(target), std::move(grid), {0.0}, order, options};
}

FitProblem FitProblem::two_d(std::vector<double> target, Grid2D grid, std::vector<double> angles,
                             int steps_per_angle, FitOptions options) {
  return FitProblem{std::move(target), std::move(grid), std::move(angles), steps_per_angle, options};
}

std::size_t FitProblem::factor_count() const noexcept {
  return angles.size() * static_cast<std::size_t>(std::max(steps_per_angle, 0));
}

std::size_t FitProblem::sample_count() const noexcept {
  return std::visit([](const auto& g) { return g.size(); }, grid);
}

void FitProblem::validate() const {
  if (steps_per_angle < 1) throw std::invalid_argument("fit: steps per angle must be >= 1");
  if (angles.empty()) throw std::invalid_argument("fit: at least one angle is required");
  for (double a : angles) {
    if (!std::isfinite(a)) throw std::invalid_argument("fit: non-finite angle");
  }
  if (target.size() != sample_count()) {
    throw std::invalid_argument("fit: target has " + std::to_string(target.size()) + " samples but the grid has " +
                                std::to_string(sample_count()));
  }
  bool positive = false;
  for (double v : target) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("fit: target samples must be finite and >= 0");
    positive = positive || v > 0.0;
  }
  if (!positive) throw std::invalid_argument("fit: target needs at least one positive sample");
  if (target.size() < 2 * factor_count()) {
    throw std::invalid_argument("fit: " + std::to_string(target.size()) + " samples cannot constrain " +
                                std::to_string(2 * factor_count()) + " parameters");
  }
  if (options.starts == 0) throw std::invalid_argument("fit: need at least one start");
  if (!(options.step_tolerance > 0.0)) throw std::invalid_argument("fit: step tolerance must be > 0");
}

Grid1D sample_grid_1d() {
  std::vector<double> z;
  for (int nu = -10; nu <= 9; ++nu) z.push_back(kPi / 20.0 * nu);
  return Grid1D(std::move(z));
}

double normalized_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("normalized_distance: length mismatch");
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("normalized_distance: zero-norm vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] / na - b[i] / nb;
    sum += d * d;
  }
  return std::sqrt(sum);
}

Complex coefficient_from_parameters(double u, double phi) {
  const double s = std::sin(u);
  return std::polar(0.5 * s * s, phi);
}

NormalizedResidualModel::NormalizedResidualModel(const FitProblem& problem)
    : factors_(problem.factor_count()), samples_(problem.sample_count()), angles_(problem.angles) {
  for (std::size_t a = 0; a < angles_.size(); ++a) {
    for (int s = 0; s < problem.steps_per_angle; ++s) direction_of_.push_back(a);
  }
  const auto m = static_cast<Eigen::Index>(samples_);
  const auto n_dir = static_cast<Eigen::Index>(angles_.size());
  cos2_.resize(m, n_dir);
  sin2_.resize(m, n_dir);
  auto fill = [&](Eigen::Index k, double x, double y) {
    for (Eigen::Index a = 0; a < n_dir; ++a) {
      const double proj = x * std::cos(angles_[a]) + y * std::sin(angles_[a]);
      cos2_(k, a) = std::cos(2.0 * proj);
      sin2_(k, a) = std::sin(2.0 * proj);
    }
  };
  if (const auto* g1 = std::get_if<Grid1D>(&problem.grid)) {
    // 1D positions already run along the wave direction.
    for (std::size_t i = 0; i < g1->size(); ++i) {
      cos2_(static_cast<Eigen::Index>(i), 0) = std::cos(2.0 * (*g1)[i]);
      sin2_(static_cast<Eigen::Index>(i), 0) = std::sin(2.0 * (*g1)[i]);
    }
  } else {
    const auto& g2 = std::get<Grid2D>(problem.grid);
    for (std::size_t ix = 0; ix < g2.x().size(); ++ix) {
      for (std::size_t iy = 0; iy < g2.y().size(); ++iy) {
        fill(static_cast<Eigen::Index>(g2.index(ix, iy)), g2.x()[ix], g2.y()[iy]);
      }
    }
  }
  target_unit_ = Eigen::Map<const Eigen::VectorXd>(problem.target.data(), m);
  target_unit_ /= target_unit_.norm();
}

void NormalizedResidualModel::factor_values(const Eigen::VectorXd& params, Eigen::MatrixXd& values) const {
  const auto k_fac = static_cast<Eigen::Index>(factors_);
  values.resize(k_fac, static_cast<Eigen::Index>(samples_));
  for (Eigen::Index v = 0; v < k_fac; ++v) {
    const double s = std::sin(params(v));
    const double mod = 0.5 * s * s;
    const double cp = std::cos(params(k_fac + v));
    const double sp = std::sin(params(k_fac + v));
    const double inv = 1.0 / (1.0 + 2.0 * mod);
    const auto a = static_cast<Eigen::Index>(direction_of_[static_cast<std::size_t>(v)]);
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      values(v, k) = (1.0 + 2.0 * mod * (cos2_(k, a) * cp - sin2_(k, a) * sp)) * inv;
    }
  }
}

Eigen::VectorXd NormalizedResidualModel::trial(const Eigen::VectorXd& params) const {
  Eigen::MatrixXd values;
  factor_values(params, values);
  return values.colwise().prod().transpose();
}

bool NormalizedResidualModel::residual(const Eigen::VectorXd& params, Eigen::VectorXd& out) const {
  const Eigen::VectorXd v = trial(params);
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) return false;
  out = v / norm - target_unit_;
  return true;
}

bool NormalizedResidualModel::jacobian(const Eigen::VectorXd& params, Eigen::MatrixXd& out) const {
  const auto k_fac = static_cast<Eigen::Index>(factors_);
  const auto m = static_cast<Eigen::Index>(samples_);
  Eigen::MatrixXd values;
  factor_values(params, values);

  // Per-factor derivatives of F = (1 + 2 mod cos(2p + phi)) / (1 + 2 mod).
  Eigen::VectorXd dmod_du(k_fac), mod(k_fac), cp(k_fac), sp(k_fac);
  for (Eigen::Index v = 0; v < k_fac; ++v) {
    const double u = params(v);
    mod(v) = 0.5 * std::sin(u) * std::sin(u);
    dmod_du(v) = std::sin(u) * std::cos(u);
    cp(v) = std::cos(params(k_fac + v));
    sp(v) = std::sin(params(k_fac + v));
  }

  out.resize(m, 2 * k_fac);
  Eigen::VectorXd v_trial(m);
  Eigen::VectorXd prefix(k_fac + 1);
  for (Eigen::Index k = 0; k < m; ++k) {
    prefix(0) = 1.0;
    for (Eigen::Index v = 0; v < k_fac; ++v) prefix(v + 1) = prefix(v) * values(v, k);
    v_trial(k) = prefix(k_fac);
    double suffix = 1.0;
    for (Eigen::Index v = k_fac - 1; v >= 0; --v) {
      const double others = prefix(v) * suffix;
      const auto a = static_cast<Eigen::Index>(direction_of_[static_cast<std::size_t>(v)]);
      const double c = cos2_(k, a) * cp(v) - sin2_(k, a) * sp(v);  // cos(2p + phi)
      const double s = sin2_(k, a) * cp(v) + cos2_(k, a) * sp(v);  // sin(2p + phi)
      const double denom = 1.0 + 2.0 * mod(v);
      const double dF_dmod = 2.0 * (c - 1.0) / (denom * denom);
      const double dF_dphi = -2.0 * mod(v) * s / denom;
      out(k, v) = others * dF_dmod * dmod_du(v);
      out(k, k_fac + v) = others * dF_dphi;
      suffix *= values(v, k);
    }
  }

  const double norm = v_trial.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) return false;
  const Eigen::VectorXd unit = v_trial / norm;
  const Eigen::RowVectorXd proj = unit.transpose() * out;
  out -= unit * proj;
  out /= norm;
  return true;
}

ExposurePlan NormalizedResidualModel::plan(const Eigen::VectorXd& params) const {
  std::vector<StandingWaveFactor> factors;
  factors.reserve(factors_);
  const auto k_fac = static_cast<Eigen::Index>(factors_);
  for (Eigen::Index v = 0; v < k_fac; ++v) {
    factors.emplace_back(coefficient_from_parameters(params(v), params(k_fac + v)),
                         angles_[direction_of_[static_cast<std::size_t>(v)]]);
  }
  return ExposurePlan(std::move(factors));
}

FitResult fit_1d(const FitProblem& problem) {
  if (problem.is_2d()) throw std::invalid_argument("fit_1d: problem is two-dimensional");
  if (problem.angles.size() != 1) throw std::invalid_argument("fit_1d: a 1D plan has a single direction");
  return run_fit(problem);
}

FitResult fit_2d(const FitProblem& problem) {
  if (!problem.is_2d()) throw std::invalid_argument("fit_2d: problem is one-dimensional");
  return run_fit(problem);
}

}  // namespace cptlitho
