#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cptlitho/cli.hpp"
#include "cptlitho/serialization.hpp"

using namespace cptlitho;
using std::numbers::pi;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cptlitho_cli_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::pair<double, double>> read_profile(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    double z = 0;
    double v = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &z, &v) == 2);
    rows.emplace_back(z, v);
  }
  return rows;
}

}  // namespace

TEST_CASE("fringe writes the n = 10 profile") {
  const auto path = temp("fringe.csv");
  const auto r = run({"fringe", "--n", "10", "--points", "400", "--out", path.string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto text = slurp(path);
  CHECK(text.rfind("zeta,density\n", 0) == 0);
  const auto rows = read_profile(text);
  REQUIRE(rows.size() == 400);
  int zeros = 0;
  for (const auto& [z, v] : rows) {
    const double m = z / (pi / 10);
    if (std::abs(m - std::round(m)) < 1e-9) {
      CHECK(std::abs(v) < 1e-15);
      ++zeros;
    }
    CHECK(v == doctest::Approx(std::pow(std::sin(10 * z), 2) / std::pow(4.0, 9)).epsilon(1e-9));
  }
  CHECK(zeros == 10);

  const auto closed = run({"fringe", "--n", "3", "--points", "8", "--closed-form"});
  CHECK(closed.code == cli::kExitOk);
  CHECK(read_profile(closed.out).size() == 8);
}

TEST_CASE("period") {
  const auto r = run({"period", "--wavelength", "817e-9", "--n", "10"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "4.085e-08\n");
  CHECK(run({"period", "--n", "10"}).code == cli::kExitUsage);
  CHECK(run({"period", "--wavelength", "-1"}).code == cli::kExitUsage);
}

TEST_CASE("fourier of a uniform plan file") {
  const auto plan_path = temp("uniform10.json");
  save_plan(uniform_phase_plan(10), plan_path);
  for (const char* method : {"convolution", "symmetric"}) {
    const auto r = run({"fourier", "--plan-file", plan_path.string(), "--method", method});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = Json::parse(r.out);
    CHECK(j["order"] == 10);
    for (const auto& c : j["coeffs"]) {
      const int mu = c["mu"];
      if (mu >= 1 && mu <= 9) CHECK(std::hypot(c["re"].get<double>(), c["im"].get<double>()) < 1e-10);
    }
  }
  CHECK(run({"fourier", "--method", "fft"}).code == cli::kExitUsage);
  CHECK(run({"fourier", "--n", "17", "--method", "symmetric"}).code == cli::kExitNumeric);
}

TEST_CASE("realize, point, localize and decohere run") {
  const auto realize = run({"realize", "--n", "2"});
  REQUIRE(realize.code == cli::kExitOk);
  const auto beams = Json::parse(realize.out);
  REQUIRE(beams.size() == 2);
  CHECK(beams[0]["a"] == 1.0);

  const auto point = run({"point", "--n", "4", "--points", "16"});
  CHECK(point.code == cli::kExitOk);
  CHECK(read_profile(point.out).size() == 16);

  const auto loc = run({"localize", "--s", "0.1", "--r-peak", "1", "--repeat", "2", "--points", "20"});
  REQUIRE(loc.code == cli::kExitOk);
  double peak = 0.0;
  for (const auto& [z, v] : read_profile(loc.out)) peak = std::max(peak, v);
  CHECK(peak == doctest::Approx(1.0));

  const auto path = temp("fig3a.csv");
  const auto deco = run({"decohere", "--gamma-d", "1.0", "--branch", "1.0", "--intensity", "1.0", "--points", "40",
                         "--out", path.string()});
  REQUIRE(deco.code == cli::kExitOk);
  const auto rows = read_profile(slurp(path));
  REQUIRE(rows.size() == 40);
  for (const auto& [z, v] : rows) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1 + 1e-12);
  }
  CHECK(run({"decohere", "--intensity", "0"}).code == cli::kExitUsage);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kExitUsage);
  const auto r = run({"fringe", "--bogus"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"nonsense"}).code == cli::kExitUsage);
  CHECK(run({"fit1d", "--target", "triangle"}).code == cli::kExitUsage);
  CHECK(run({"fit1d", "--duty", "1.5"}).code == cli::kExitUsage);
  CHECK(run({"fringe", "--plan-file", "/nonexistent/plan.json"}).code == cli::kExitNumeric);
  CHECK(run({"fringe", "--help"}).code == cli::kExitOk);
}

TEST_CASE("fit1d report, seed reproducibility and config files") {
  const std::vector<std::string> base{"fit1d", "--target", "square", "--n", "10", "--starts", "3", "--seed", "7"};
  auto with_out = [&](const std::string& name) {
    auto a = base;
    a.insert(a.end(), {"--out", temp(name).string()});
    return a;
  };
  REQUIRE(run(with_out("a.json")).code == cli::kExitOk);
  REQUIRE(run(with_out("b.json")).code == cli::kExitOk);
  CHECK(slurp(temp("a.json")) == slurp(temp("b.json")));
  const auto report = Json::parse(slurp(temp("a.json")));
  CHECK(report.contains("peak_density"));
  CHECK(report["plan"].size() == 10);
  CHECK(report["starts"].size() == 3);

  const auto cfg = temp("cfg.json");
  std::ofstream(cfg) << R"({"target": "square", "n": 10, "starts": 3, "seed": 7})";
  REQUIRE(run({"fit1d", "--config", cfg.string(), "--out", temp("c.json").string()}).code == cli::kExitOk);
  CHECK(slurp(temp("c.json")) == slurp(temp("a.json")));

  // Flags override the config.
  REQUIRE(run({"fit1d", "--config", cfg.string(), "--seed", "8", "--out", temp("d.json").string()}).code ==
          cli::kExitOk);
  CHECK(slurp(temp("d.json")) != slurp(temp("a.json")));

  std::ofstream(temp("bad_cfg.json")) << R"({"no_such_flag": 1})";
  CHECK(run({"fit1d", "--config", temp("bad_cfg.json").string()}).code == cli::kExitUsage);
  std::ofstream(temp("cfg_underscore.json")) << R"({"max_iter": 5, "starts": 1})";
  const auto under = run({"fit1d", "--config", temp("cfg_underscore.json").string()});
  CHECK(under.code != cli::kExitUsage);
}

TEST_CASE("fit1d with too small a budget still writes the report and exits 2") {
  const auto path = temp("budget.json");
  const auto r = run({"fit1d", "--starts", "1", "--max-iter", "1", "--out", path.string()});
  CHECK(r.code == cli::kExitNumeric);
  CHECK(Json::parse(slurp(path))["starts"][0]["converged"] == false);
}

TEST_CASE("fit2d on a small configuration") {
  const auto profile = temp("fit2d.csv");
  const auto r = run({"fit2d", "--angles", "2", "--steps", "2", "--grid", "12", "--starts", "2", "--threads", "1",
                      "--profile-out", profile.string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto report = Json::parse(r.out);
  CHECK(report["plan"].size() == 4);
  CHECK(report["plan"][2]["theta"].get<double>() == doctest::Approx(pi / 2));
  std::istringstream in(slurp(profile));
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  CHECK(line == "zeta_x,zeta_y,density");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 144);
}

TEST_CASE("installed executable maps exit codes") {
  const std::string exe = CPTLITHO_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("period --wavelength 817e-9 --n 10") == 0);
  CHECK(status("fringe --unknown-flag") == 1);
  CHECK(status("fourier --n 20 --method symmetric") == 2);
}
