#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "cptlitho/fields.hpp"
#include "cptlitho/pattern.hpp"

using namespace cptlitho;
using std::numbers::pi;

TEST_CASE("uniform_phase_plan encodes the fringe phases") {
  SUBCASE("n = 1") {
    const auto plan = uniform_phase_plan(1);
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].r().real() == doctest::Approx(-0.5));
    CHECK(std::abs(plan[0].r().imag()) < 1e-16);
    CHECK(plan[0].theta() == 0.0);
  }
  SUBCASE("n = 2 flips the sign of the second factor") {
    const auto plan = uniform_phase_plan(2);
    CHECK(std::abs(plan[0].r() - Complex(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(plan[1].r() - Complex(0.5, 0.0)) < 1e-15);
  }
  SUBCASE("n = 10 arguments are pi + 2 pi (v - 1) / 10") {
    const auto plan = uniform_phase_plan(10);
    REQUIRE(plan.size() == 10);
    for (std::size_t v = 0; v < 10; ++v) {
      const Complex expected = std::polar(0.5, pi + 2 * pi * static_cast<double>(v) / 10);
      CHECK(std::abs(plan[v].r() - expected) < 1e-15);
    }
  }
  CHECK_THROWS_AS(uniform_phase_plan(0), std::invalid_argument);
}

TEST_CASE("uniform_phase_plan phases are rotated roots of unity") {
  for (int n = 1; n <= 12; ++n) {
    const auto plan = uniform_phase_plan(n);
    for (const auto& f : plan) {
      // (-e^{i arg r})^n = 1 for every n-th root of unity rotated by pi.
      const Complex w = -f.r() / std::abs(f.r());
      CHECK(std::abs(std::pow(w, n) - 1.0) < 1e-12);
    }
    // distinct roots
    std::set<long> buckets;
    for (const auto& f : plan) buckets.insert(std::lround(std::arg(-f.r()) * n / (2 * pi) + n) % n);
    CHECK(buckets.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("point_plan") {
  const auto one = point_plan(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].r() == Complex(0.5, 0.0));
  const auto three = point_plan(3);
  CHECK(three.size() == 3);
  for (const auto& f : three) CHECK(f.r() == Complex(0.5, 0.0));
  CHECK(product_profile(point_plan(2), Grid1D({0.0})).values[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(point_plan(0), std::invalid_argument);
}

TEST_CASE("rotated_plan") {
  std::vector<double> angles;
  std::vector<ExposurePlan> per;
  for (int a = 0; a < 6; ++a) {
    angles.push_back(a * pi / 6);
    per.push_back(point_plan(6));
  }
  const auto plan = rotated_plan(angles, per);
  CHECK(plan.size() == 36);
  CHECK(plan[6].theta() == doctest::Approx(pi / 6));
  CHECK(plan[35].theta() == doctest::Approx(5 * pi / 6));

  const double zero[] = {0.0};
  const ExposurePlan base = uniform_phase_plan(4);
  CHECK(rotated_plan(zero, std::span(&base, 1)) == base);

  const double two[] = {0.0, pi / 2};
  const ExposurePlan singles[] = {point_plan(1), point_plan(1)};
  const auto p2 = rotated_plan(two, singles);
  CHECK(p2.size() == 2);
  CHECK(p2[0].theta() != p2[1].theta());

  CHECK_THROWS_AS(rotated_plan(two, std::span(&base, 1)), std::invalid_argument);
}

TEST_CASE("StandingWaveFactor rejects out-of-range modulation") {
  CHECK_THROWS_AS(StandingWaveFactor(Complex(0.6, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(StandingWaveFactor(Complex(0.4, 0.4)), std::invalid_argument);
  CHECK_NOTHROW(StandingWaveFactor(std::polar(0.5, 1.234)));
  CHECK_THROWS_AS(StandingWaveFactor(Complex(NAN, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(ExposurePlan({}), std::invalid_argument);
}

TEST_CASE("theta + pi canonicalizes to the same wave") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mod(0.0, 0.5);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi);
  const Grid2D grid(Grid1D::uniform(-2.0, 2.0, 17), Grid1D::uniform(-1.5, 2.5, 13));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<StandingWaveFactor> a;
    std::vector<StandingWaveFactor> b;
    for (int k = 0; k < 4; ++k) {
      const Complex r = std::polar(mod(rng), ang(rng));
      const double theta = ang(rng) / 2;  // [0, pi)
      a.emplace_back(r, theta);
      b.emplace_back(r, theta + pi);
    }
    const auto pa = product_profile_2d(ExposurePlan(a), grid);
    const auto pb = product_profile_2d(ExposurePlan(b), grid);
    for (std::size_t i = 0; i < pa.values.size(); ++i) CHECK(pa.values[i] == doctest::Approx(pb.values[i]).epsilon(1e-12));
    for (const auto& f : ExposurePlan(b)) {
      CHECK(f.theta() >= 0.0);
      CHECK(f.theta() < pi);
    }
  }
  CHECK(StandingWaveFactor(Complex(0.1, 0.2), -pi / 3).theta() == doctest::Approx(2 * pi / 3));
  CHECK(StandingWaveFactor(Complex(0.1, 0.2), -pi / 3).r() == Complex(0.1, 0.2));
  CHECK(StandingWaveFactor(Complex(0.1, 0.2), 7 * pi).theta() < 1e-12);
}

TEST_CASE("realize_factor") {
  SUBCASE("|r| = 1/2 gives equal beams") {
    const auto b = realize_factor(StandingWaveFactor(Complex(0.5, 0.0)));
    CHECK(b.a == doctest::Approx(1.0));
    CHECK(b.b == doctest::Approx(1.0));
  }
  SUBCASE("|r| = 0 is a single traveling beam") {
    const auto b = realize_factor(StandingWaveFactor(Complex(0.0, 0.0)));
    CHECK(b.b == 0.0);
    CHECK(b.r_amplitude == 0.0);
  }
  SUBCASE("|r| = 0.3 gives b/a = 1/3") {
    const auto b = realize_factor(StandingWaveFactor(std::polar(0.3, 0.7)));
    CHECK(b.b / b.a == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(b.phase == doctest::Approx(0.7));
    // oracle: (1/3) / (1 + 1/9) = 0.3
    CHECK((1.0 / 3.0) / (1.0 + 1.0 / 9.0) == doctest::Approx(0.3));
  }
}

TEST_CASE("realize_factor round trip and intensity bookkeeping") {
  for (int k = 0; k <= 1000; ++k) {
    const double m = 0.5 * k / 1000.0;
    const StandingWaveFactor f(std::polar(m, 0.37 * k));
    const auto beams = realize_factor(f);
    CHECK(beams.a >= beams.b);
    CHECK(beams.b >= 0.0);
    CHECK(std::abs(std::abs(factor_coefficient(beams)) - m) <= 1e-12);
    CHECK(beams.a * beams.b / (beams.a * beams.a + beams.b * beams.b) == doctest::Approx(m).epsilon(1e-12));
  }
  // |S|^2 + |R|^2 is flat and the ideal retention is the factor profile.
  const StandingWaveFactor f(std::polar(0.37, -1.1));
  const auto beams = realize_factor(f);
  for (double z = -1.5; z < 1.5; z += 0.01) {
    const auto [s, r] = beams.amplitudes_at(z, 0.7);
    CHECK(s * s + r * r == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s * s / (s * s + r * r) == doctest::Approx(factor_value(f, z)).epsilon(1e-12));
  }
}
