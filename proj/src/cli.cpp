#include "cptlitho/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "cptlitho/atom.hpp"
#include "cptlitho/fields.hpp"
#include "cptlitho/fit.hpp"
#include "cptlitho/fourier.hpp"
#include "cptlitho/pattern.hpp"
#include "cptlitho/serialization.hpp"
#include "cptlitho/targets.hpp"

namespace cptlitho::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string config_path;
  std::string out_path;
  std::string profile_out;
  std::string plan_file;
  std::string target_file;
  std::optional<std::string> target;
  std::string method = "convolution";
  std::optional<int> n;
  std::size_t points = 400;
  bool closed_form = false;
  int repeat = 1;
  double s = 1.0;
  double r_peak = 10.0;
  double gamma_d = 0.0;
  double branch = 1.0;
  double intensity = 1.0;
  double duty = 0.5;
  double center = 0.0;
  int angles = 6;
  int steps = 6;
  std::size_t grid = 50;
  std::optional<std::size_t> starts;
  std::uint64_t seed = 0;
  std::size_t max_iter = FitOptions{}.max_iterations;
  std::optional<unsigned> threads;
  double wavelength = 0.0;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

// Sends output to --out if given, else to the data stream.
void emit(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (cfg.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(cfg.out_path);
  if (!file) throw std::runtime_error("cannot write " + cfg.out_path);
  write(file);
}

void write_json(const RunConfig& cfg, std::ostream& out, const Json& j) {
  emit(cfg, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

LambdaParams atom_from(const RunConfig& cfg) {
  require(std::isfinite(cfg.branch) && cfg.branch >= 0.0, "--branch must be finite and >= 0");
  require(std::isfinite(cfg.gamma_d) && cfg.gamma_d >= 0.0, "--gamma-d must be finite and >= 0");
  LambdaParams p;
  p.gamma1 = 1.0 / (1.0 + cfg.branch);
  p.gamma2 = cfg.branch / (1.0 + cfg.branch);
  p.gamma_d = cfg.gamma_d;
  return p;
}

TargetKind parse_kind(const std::optional<std::string>& given, const char* fallback) {
  try {
    return target_kind_from_string(given.value_or(fallback));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int order(const RunConfig& cfg, int fallback) {
  const int n = cfg.n.value_or(fallback);
  require(n >= 1, "--n must be >= 1");
  return n;
}

Grid1D profile_grid(const RunConfig& cfg) {
  require(cfg.points >= 1, "--points must be >= 1");
  return Grid1D::standard(cfg.points);
}

ExposurePlan plan_from(const RunConfig& cfg, int fallback_order) {
  if (!cfg.plan_file.empty()) return load_plan(cfg.plan_file);
  return uniform_phase_plan(order(cfg, fallback_order));
}

FitOptions fit_options(const RunConfig& cfg, std::size_t default_starts) {
  FitOptions o;
  o.starts = cfg.starts.value_or(default_starts);
  require(o.starts >= 1, "--starts must be >= 1");
  o.max_iterations = cfg.max_iter;
  o.seed = cfg.seed;
  if (cfg.threads) {
    o.threads = *cfg.threads;
  } else if (const char* env = std::getenv("CPT_LITHO_THREADS")) {
    try {
      o.threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw UsageError("CPT_LITHO_THREADS must be a non-negative integer");
    }
  }
  return o;
}

void write_fit_report(const RunConfig& cfg, std::ostream& out, const FitResult& r, const FitProblem& problem) {
  write_json(cfg, out, fit_result_to_json(r));
  if (cfg.profile_out.empty()) return;
  std::ofstream file(cfg.profile_out);
  if (!file) throw std::runtime_error("cannot write " + cfg.profile_out);
  if (problem.is_2d()) {
    write_csv(file, product_profile_2d(r.plan, std::get<Grid2D>(problem.grid)));
  } else {
    write_csv(file, product_profile(r.plan, profile_grid(cfg)));
  }
}

FitResult run_fit_command(const RunConfig& cfg, std::ostream& out, const FitProblem& problem) {
  try {
    FitResult r = problem.is_2d() ? fit_2d(problem) : fit_1d(problem);
    write_fit_report(cfg, out, r, problem);
    return r;
  } catch (const FitConvergenceError& e) {
    write_fit_report(cfg, out, e.best(), problem);
    throw;
  }
}

FitProblem fit1d_problem(const RunConfig& cfg) {
  const int n = order(cfg, 10);
  const auto kind = parse_kind(cfg.target, "square");
  const FitOptions opts = fit_options(cfg, kDefaultStarts1D);
  if (kind == TargetKind::kSamples) {
    require(!cfg.target_file.empty(), "--target samples needs --target-file");
    TargetSamples t = load_target_samples(cfg.target_file);
    require(!t.is_2d(), "fit1d needs a 1D target file (zeta,value)");
    return FitProblem::one_d(std::move(t.values), *t.grid_1d, n, opts);
  }
  require(kind == TargetKind::kSquare, "fit1d targets: square or samples");
  TargetSpec spec;
  spec.kind = kind;
  spec.duty = cfg.duty;
  spec.center = cfg.center;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Grid1D grid = series_sample_grid(n);
  return FitProblem::one_d(sample_target(spec, grid), grid, n, opts);
}

FitProblem fit2d_problem(const RunConfig& cfg) {
  require(cfg.angles >= 1, "--angles must be >= 1");
  require(cfg.steps >= 1, "--steps must be >= 1");
  require(cfg.grid >= 2, "--grid must be >= 2");
  const auto kind = parse_kind(cfg.target, "c-shape");
  const FitOptions opts = fit_options(cfg, kDefaultStarts2D);
  std::vector<double> angles;
  for (int a = 0; a < cfg.angles; ++a) angles.push_back(std::numbers::pi * a / cfg.angles);
  if (kind == TargetKind::kSamples) {
    require(!cfg.target_file.empty(), "--target samples needs --target-file");
    TargetSamples t = load_target_samples(cfg.target_file);
    require(t.is_2d(), "fit2d needs a 2D target file (zeta_x,zeta_y,value)");
    return FitProblem::two_d(std::move(t.values), *t.grid_2d, angles, cfg.steps, opts);
  }
  require(kind == TargetKind::kCShape, "fit2d targets: c-shape or samples");
  TargetSpec spec;
  spec.kind = kind;
  const Grid2D grid = Grid2D::standard(cfg.grid);
  return FitProblem::two_d(sample_target(spec, grid), grid, angles, cfg.steps, opts);
}

std::string json_to_arg(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("config values must be strings, numbers, or booleans");
}

// Fills options that were not given on the command line from the JSON
// config. Keys are long flag names; '_' and '-' are interchangeable.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + name);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("config: unknown option '" + key + "' for " + sub.get_name());
    }
    if (opt->count() > 0) continue;
    opt->add_result(json_to_arg(value));
    opt->run_callback();
  }
}

CLI::App* add_sub(CLI::App& app, RunConfig& cfg, const std::string& name, const std::string& description) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", cfg.config_path, "JSON file with option values; flags take precedence");
  sub->add_option("--out", cfg.out_path, "Output file (default: standard output)");
  return sub;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Multi-exposure CPT lithography simulator and pattern fitter", "cptlitho"};
  app.require_subcommand(1);

  auto* fringe = add_sub(app, cfg, "fringe", "Ideal multi-exposure fringe profile (CSV)");
  fringe->add_option("--n", cfg.n, "Exposure count for the uniform-phase plan (default 10)");
  fringe->add_option("--plan-file", cfg.plan_file, "Plan JSON to evaluate instead");
  fringe->add_option("--points", cfg.points, "Grid points over one period");
  fringe->add_flag("--closed-form", cfg.closed_form, "Use sin^2(n zeta)/4^(n-1) instead of the product");

  auto* point = add_sub(app, cfg, "point", "cos^(2n) point-spread profile (CSV)");
  point->add_option("--n", cfg.n, "Exposure count (default 10)");
  point->add_option("--points", cfg.points, "Grid points over one period");

  auto* localize = add_sub(app, cfg, "localize", "Quench-localization profile near a signal-2 node (CSV)");
  localize->add_option("--s", cfg.s, "Uniform signal-1 Rabi frequency");
  localize->add_option("--r-peak", cfg.r_peak, "Signal-2 standing-wave peak Rabi frequency");
  localize->add_option("--repeat", cfg.repeat, "Number of repeated exposures");
  localize->add_option("--gamma-d", cfg.gamma_d, "Dephasing rate");
  localize->add_option("--branch", cfg.branch, "Branching ratio gamma2/gamma1 (gamma1 + gamma2 = 1)");
  localize->add_option("--points", cfg.points, "Grid points over one period");

  auto* decohere = add_sub(app, cfg, "decohere", "Master-equation retention profile (CSV)");
  decohere->add_option("--gamma-d", cfg.gamma_d, "Dephasing rate");
  decohere->add_option("--branch", cfg.branch, "Branching ratio gamma2/gamma1 (gamma1 + gamma2 = 1)");
  decohere->add_option("--intensity", cfg.intensity, "|S|^2 + |R|^2 per exposure");
  decohere->add_option("--n", cfg.n, "Exposure count for the uniform-phase plan (default 1)");
  decohere->add_option("--plan-file", cfg.plan_file, "Plan JSON to evaluate instead");
  decohere->add_option("--points", cfg.points, "Grid points over one period");

  auto* fourier = add_sub(app, cfg, "fourier", "Laurent coefficients of a plan (JSON)");
  fourier->add_option("--plan-file", cfg.plan_file, "Plan JSON");
  fourier->add_option("--n", cfg.n, "Uniform-phase plan order when no plan file is given (default 10)");
  fourier->add_option("--method", cfg.method, "convolution or symmetric");

  auto* realize = add_sub(app, cfg, "realize", "Beam amplitudes realizing each factor of a plan (JSON)");
  realize->add_option("--plan-file", cfg.plan_file, "Plan JSON");
  realize->add_option("--n", cfg.n, "Uniform-phase plan order when no plan file is given (default 10)");

  CLI::App* fits[2] = {add_sub(app, cfg, "fit1d", "Fit a 1D plan to a target (JSON report)"),
                       add_sub(app, cfg, "fit2d", "Fit a rotated 2D plan to a target (JSON report)")};
  for (auto* f : fits) {
    f->add_option("--target", cfg.target, "square | c-shape | samples");
    f->add_option("--target-file", cfg.target_file, "CSV samples for --target samples");
    f->add_option("--starts", cfg.starts, "Multi-start count (default 32 in 1D, 64 in 2D)");
    f->add_option("--seed", cfg.seed, "Seed for start initialization");
    f->add_option("--max-iter", cfg.max_iter, "Iterations per start");
    f->add_option("--threads", cfg.threads, "Worker threads (default: CPT_LITHO_THREADS or all cores)");
    f->add_option("--profile-out", cfg.profile_out, "CSV of the fitted profile");
  }
  fits[0]->add_option("--n", cfg.n, "Number of exposures (default 10)");
  fits[0]->add_option("--duty", cfg.duty, "Square target duty cycle");
  fits[0]->add_option("--center", cfg.center, "Square target center");
  fits[0]->add_option("--points", cfg.points, "Grid points for --profile-out");
  fits[1]->add_option("--angles", cfg.angles, "Number of substrate angles k pi / angles");
  fits[1]->add_option("--steps", cfg.steps, "Exposures per angle");
  fits[1]->add_option("--grid", cfg.grid, "Samples per axis over [-pi, pi)");

  auto* period = add_sub(app, cfg, "period", "Fringe period lambda / (2 n)");
  period->add_option("--wavelength", cfg.wavelength, "Signal wavelength")->required();
  period->add_option("--n", cfg.n, "Exposure count (default 10)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    CLI::App* sub = app.get_subcommands().front();
    if (!cfg.config_path.empty()) apply_config(*sub, cfg.config_path);
    const std::string name = sub->get_name();

    if (name == "fringe") {
      const Grid1D grid = profile_grid(cfg);
      Profile1D p = cfg.closed_form ? closed_form_uniform(order(cfg, 10), grid) : product_profile(plan_from(cfg, 10), grid);
      emit(cfg, out, [&](std::ostream& os) { write_csv(os, p); });
    } else if (name == "point") {
      const Profile1D p = point_spread(order(cfg, 10), profile_grid(cfg));
      emit(cfg, out, [&](std::ostream& os) { write_csv(os, p); });
    } else if (name == "localize") {
      require(cfg.r_peak > 0.0, "--r-peak must be > 0");
      require(cfg.repeat >= 1, "--repeat must be >= 1");
      Profile1D p = quench_localization_profile(cfg.s, cfg.r_peak, profile_grid(cfg), atom_from(cfg));
      for (auto& v : p.values) v = std::pow(v, cfg.repeat);
      emit(cfg, out, [&](std::ostream& os) { write_csv(os, p); });
    } else if (name == "decohere") {
      require(cfg.intensity > 0.0, "--intensity must be > 0");
      const LambdaParams atom = atom_from(cfg);
      const Profile1D p = decoherent_product_profile(plan_from(cfg, 1), atom, cfg.intensity, profile_grid(cfg));
      emit(cfg, out, [&](std::ostream& os) { write_csv(os, p); });
    } else if (name == "fourier") {
      const ExposurePlan plan = plan_from(cfg, 10);
      require(cfg.method == "convolution" || cfg.method == "symmetric", "--method: convolution or symmetric");
      const LaurentCoeffs c = cfg.method == "symmetric" ? symmetric_coefficients(plan) : product_coefficients(plan);
      write_json(cfg, out, coeffs_to_json(c));
    } else if (name == "realize") {
      Json arr = Json::array();
      for (const auto& f : plan_from(cfg, 10)) {
        Json b = beams_to_json(realize_factor(f));
        b["theta"] = f.theta();
        arr.push_back(b);
      }
      write_json(cfg, out, arr);
    } else if (name == "fit1d") {
      run_fit_command(cfg, out, fit1d_problem(cfg));
    } else if (name == "fit2d") {
      run_fit_command(cfg, out, fit2d_problem(cfg));
    } else if (name == "period") {
      require(cfg.wavelength > 0.0, "--wavelength must be > 0");
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.15g", fringe_period(cfg.wavelength, order(cfg, 10)));
      emit(cfg, out, [&](std::ostream& os) { os << buf << '\n'; });
    }
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace cptlitho::cli
