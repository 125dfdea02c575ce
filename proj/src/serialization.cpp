#include "cptlitho/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cptlitho {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw std::invalid_argument(std::string("expected numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

Json plan_to_json(const ExposurePlan& plan) {
  Json arr = Json::array();
  for (const auto& f : plan) arr.push_back({{"re", f.r().real()}, {"im", f.r().imag()}, {"theta", f.theta()}});
  return arr;
}

ExposurePlan plan_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("plan JSON must be an array of factors");
  std::vector<StandingWaveFactor> factors;
  for (const auto& item : j) {
    if (!item.is_object()) throw std::invalid_argument("plan factor must be an object");
    const double theta = item.contains("theta") ? number_field(item, "theta") : 0.0;
    factors.emplace_back(Complex(number_field(item, "re"), number_field(item, "im")), theta);
  }
  return ExposurePlan(std::move(factors));
}

ExposurePlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("plan file " + path.string() + ": " + e.what());
  }
  return plan_from_json(j);
}

void save_plan(const ExposurePlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan file " + path.string());
  out << plan_to_json(plan).dump(2) << '\n';
}

Json coeffs_to_json(const LaurentCoeffs& c) {
  Json arr = Json::array();
  for (int mu = 0; mu <= c.order; ++mu) {
    const Complex v = c.c(mu);
    arr.push_back({{"mu", mu}, {"re", v.real()}, {"im", v.imag()}});
  }
  return {{"order", c.order}, {"coeffs", arr}};
}

Json coeffs_to_json(const TruncatedSeries& s) {
  Json arr = Json::array();
  for (int mu = -s.order; mu < s.order; ++mu) {
    const Complex v = s.coefficient(mu);
    arr.push_back({{"mu", mu}, {"re", v.real()}, {"im", v.imag()}});
  }
  return {{"order", s.order}, {"coeffs", arr}};
}

Json beams_to_json(const BeamRealization& b) {
  return {{"a", b.a}, {"b", b.b}, {"phase", b.phase}, {"r_amplitude", b.r_amplitude}};
}

Json fit_result_to_json(const FitResult& r) {
  Json starts = Json::array();
  for (const auto& s : r.starts) {
    starts.push_back({{"start", s.start},
                      {"converged", s.converged},
                      {"iterations", s.iterations},
                      {"distance", s.distance},
                      {"stop_reason", s.stop_reason}});
  }
  return {{"plan", plan_to_json(r.plan)},
          {"distance", r.distance},
          {"peak_density", r.peak_density},
          {"best_start", r.best_start},
          {"starts", starts}};
}

Json target_spec_to_json(const TargetSpec& t) {
  Json j = {{"kind", to_string(t.kind)}};
  switch (t.kind) {
    case TargetKind::kSquare:
      j["duty"] = t.duty;
      j["center"] = t.center;
      break;
    case TargetKind::kCShape:
      j["r_inner"] = t.r_inner;
      j["r_outer"] = t.r_outer;
      j["theta_lo"] = t.theta_lo;
      j["theta_hi"] = t.theta_hi;
      break;
    case TargetKind::kSamples:
      j["path"] = t.path.string();
      break;
  }
  return j;
}

TargetSpec target_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("target spec needs a 'kind'");
  TargetSpec t;
  t.kind = target_kind_from_string(j.at("kind").get<std::string>());
  auto opt = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = number_field(j, key);
  };
  opt("duty", t.duty);
  opt("center", t.center);
  opt("r_inner", t.r_inner);
  opt("r_outer", t.r_outer);
  opt("theta_lo", t.theta_lo);
  opt("theta_hi", t.theta_hi);
  if (j.contains("path")) t.path = j.at("path").get<std::string>();
  t.validate();
  return t;
}

void write_csv(std::ostream& out, const Profile1D& p) {
  out << "zeta,density\n";
  for (std::size_t i = 0; i < p.values.size(); ++i) out << fmt17(p.grid[i]) << ',' << fmt17(p.values[i]) << '\n';
}

void write_csv(std::ostream& out, const Profile2D& p) {
  out << "zeta_x,zeta_y,density\n";
  for (std::size_t ix = 0; ix < p.grid.x().size(); ++ix) {
    for (std::size_t iy = 0; iy < p.grid.y().size(); ++iy) {
      out << fmt17(p.grid.x()[ix]) << ',' << fmt17(p.grid.y()[iy]) << ',' << fmt17(p.at(ix, iy)) << '\n';
    }
  }
}

}  // namespace cptlitho
