#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cptlitho/serialization.hpp"

using namespace cptlitho;
using std::numbers::pi;

TEST_CASE("plan JSON round trip") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> mod(0.0, 0.5);
  std::uniform_real_distribution<double> ph(-pi, pi);
  std::vector<StandingWaveFactor> f;
  for (int k = 0; k < 36; ++k) f.emplace_back(std::polar(mod(rng), ph(rng)), (k / 6) * pi / 6);
  const ExposurePlan plan(f);

  const auto back = plan_from_json(Json::parse(plan_to_json(plan).dump()));
  REQUIRE(back.size() == plan.size());
  for (std::size_t v = 0; v < plan.size(); ++v) {
    CHECK(std::abs(back[v].r() - plan[v].r()) <= 1e-15);
    CHECK(back[v].theta() == plan[v].theta());
  }

  const auto path = std::filesystem::temp_directory_path() / "cptlitho_plan.json";
  save_plan(plan, path);
  const auto loaded = load_plan(path);
  for (std::size_t v = 0; v < plan.size(); ++v) CHECK(loaded[v].r() == plan[v].r());
}

TEST_CASE("plan JSON schema") {
  const auto p = plan_from_json(Json::parse(R"([{"re": 0.1, "im": -0.2}])"));
  CHECK(p[0].theta() == 0.0);
  CHECK_THROWS_AS(plan_from_json(Json::parse("[]")), std::invalid_argument);
  CHECK_THROWS_AS(plan_from_json(Json::parse(R"([{"re": 0.1}])")), std::invalid_argument);
  CHECK_THROWS_AS(plan_from_json(Json::parse(R"({"re": 0.1, "im": 0})")), std::invalid_argument);
  CHECK_THROWS_AS(plan_from_json(Json::parse(R"([{"re": 0.6, "im": 0}])")), std::invalid_argument);
}

TEST_CASE("coefficient JSON") {
  const auto c = product_coefficients(ExposurePlan({StandingWaveFactor(Complex(0.2, 0.1))}));
  const auto j = coeffs_to_json(c);
  CHECK(j["order"] == 1);
  REQUIRE(j["coeffs"].size() == 2);
  CHECK(j["coeffs"][1]["mu"] == 1);
  CHECK(j["coeffs"][1]["re"].get<double>() == 0.2);
  CHECK(j["coeffs"][1]["im"].get<double>() == 0.1);

  const auto s = truncated_target_series(std::vector<double>(4, 1.0), 2);
  const auto js = coeffs_to_json(s);
  CHECK(js["coeffs"].size() == 4);
  CHECK(js["coeffs"][0]["mu"] == -2);
}

TEST_CASE("fit result and target spec JSON") {
  FitResult r{uniform_phase_plan(2), 0.25, 1e-5, 1, {{0, true, 12, 0.3, "cost"}, {1, false, 20, 0.25, "iterations"}}};
  const auto j = fit_result_to_json(r);
  CHECK(j["distance"] == 0.25);
  CHECK(j["peak_density"] == 1e-5);
  CHECK(j["best_start"] == 1);
  CHECK(j["plan"].size() == 2);
  CHECK(j["starts"][1]["stop_reason"] == "iterations");
  CHECK(j["starts"][0]["converged"] == true);

  TargetSpec t;
  t.kind = TargetKind::kCShape;
  t.r_inner = 0.9;
  const auto back = target_spec_from_json(target_spec_to_json(t));
  CHECK(back.kind == TargetKind::kCShape);
  CHECK(back.r_inner == 0.9);
  CHECK(back.theta_hi == t.theta_hi);
}

TEST_CASE("CSV output") {
  SUBCASE("1D") {
    std::ostringstream out;
    write_csv(out, Profile1D{Grid1D({0.1, 0.2}), {1.0 / 3.0, 0.5}});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "zeta,density");
    std::getline(in, line);
    double z = 0;
    double v = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &z, &v) == 2);
    CHECK(z == 0.1);
    CHECK(v == 1.0 / 3.0);
  }
  SUBCASE("2D is x-major") {
    std::ostringstream out;
    write_csv(out, Profile2D{Grid2D(Grid1D({0.0, 1.0}), Grid1D({2.0, 3.0})), {1, 2, 3, 4}});
    CHECK(out.str() == "zeta_x,zeta_y,density\n0,2,1\n0,3,2\n1,2,3\n1,3,4\n");
  }
}
