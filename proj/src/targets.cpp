#include "cptlitho/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cptlitho/errors.hpp"

namespace cptlitho {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t line) {
  if (cell.empty()) throw ParseError("empty field", line);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + cell + "'", line);
  }
  if (used != cell.size()) throw ParseError("trailing characters in '" + cell + "'", line);
  return v;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

void TargetSpec::validate() const {
  switch (kind) {
    case TargetKind::kSquare:
      if (!(duty > 0.0 && duty < 1.0)) throw std::invalid_argument("square target: duty must be in (0, 1)");
      if (!std::isfinite(center)) throw std::invalid_argument("square target: center must be finite");
      break;
    case TargetKind::kCShape:
      if (!(r_inner > 0.0 && r_inner < r_outer)) {
        throw std::invalid_argument("c-shape target: need 0 < r_inner < r_outer");
      }
      if (!(theta_lo < theta_hi)) throw std::invalid_argument("c-shape target: need theta_lo < theta_hi");
      break;
    case TargetKind::kSamples:
      if (path.empty()) throw std::invalid_argument("samples target: no file given");
      break;
  }
}

double square_target(double zeta, double duty, double center) {
  // Distance to the nearest copy of center, in [0, pi/2].
  double d = std::fmod(zeta - center, kPi);
  if (d < 0.0) d += kPi;
  d = std::min(d, kPi - d);
  return d < duty * kPi / 2.0 ? 1.0 : 0.0;
}

double c_shape_target(double zeta_x, double zeta_y, const TargetSpec& spec) {
  const double r = std::hypot(zeta_x, zeta_y);
  double theta = std::atan2(zeta_y, zeta_x);
  if (theta < 0.0) theta += 2.0 * kPi;
  const bool in_ring = r > spec.r_inner && r < spec.r_outer;
  const bool in_arc = theta > spec.theta_lo && theta < spec.theta_hi;
  return (in_ring && in_arc) ? 1.0 : 0.0;
}

TargetSamples load_target_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("empty target file", line_no == 0 ? 1 : line_no);

  const bool is_1d = header == std::vector<std::string>{"zeta", "value"};
  const bool is_2d = header == std::vector<std::string>{"zeta_x", "zeta_y", "value"};
  if (!is_1d && !is_2d) {
    throw ParseError("header must be 'zeta,value' or 'zeta_x,zeta_y,value'", line_no);
  }
  const std::size_t columns = header.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(cells.size()),
                       line_no);
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    const double value = row.back();
    if (!std::isfinite(value) || value < 0.0) {
      throw std::domain_error("line " + std::to_string(line_no) + ": target value must be finite and >= 0");
    }
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      if (!std::isfinite(row[k])) throw ParseError("non-finite coordinate", line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("target file has no data rows", line_no);

  TargetSamples out;
  if (is_1d) {
    std::sort(rows.begin(), rows.end());
    std::vector<double> z;
    for (const auto& r : rows) {
      z.push_back(r[0]);
      out.values.push_back(r[1]);
    }
    try {
      out.grid_1d = Grid1D(std::move(z));
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("positions: ") + e.what(), line_no);
    }
    return out;
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    xs.push_back(r[0]);
    ys.push_back(r[1]);
  }
  Grid2D grid(Grid1D(sorted_unique(xs)), Grid1D(sorted_unique(ys)));
  if (grid.size() != rows.size()) {
    throw ParseError("2D samples do not form a full tensor grid without duplicates", line_no);
  }
  std::map<std::pair<double, double>, double> by_point;
  for (const auto& r : rows) by_point[{r[0], r[1]}] = r[2];
  if (by_point.size() != rows.size()) throw ParseError("duplicate 2D sample position", line_no);
  out.values.resize(grid.size());
  for (std::size_t ix = 0; ix < grid.x().size(); ++ix) {
    for (std::size_t iy = 0; iy < grid.y().size(); ++iy) {
      const auto it = by_point.find({grid.x()[ix], grid.y()[iy]});
      if (it == by_point.end()) throw ParseError("2D samples do not form a full tensor grid", line_no);
      out.values[grid.index(ix, iy)] = it->second;
    }
  }
  out.grid_2d = std::move(grid);
  return out;
}

std::vector<double> sample_target(const TargetSpec& spec, const Grid1D& g) {
  spec.validate();
  if (spec.kind != TargetKind::kSquare) {
    throw std::invalid_argument("sample_target: only the square target is one-dimensional");
  }
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = square_target(g[i], spec.duty, spec.center);
  return out;
}

std::vector<double> sample_target(const TargetSpec& spec, const Grid2D& g) {
  spec.validate();
  if (spec.kind != TargetKind::kCShape) {
    throw std::invalid_argument("sample_target: only the c-shape target is two-dimensional");
  }
  std::vector<double> out(g.size());
  for (std::size_t ix = 0; ix < g.x().size(); ++ix) {
    for (std::size_t iy = 0; iy < g.y().size(); ++iy) {
      out[g.index(ix, iy)] = c_shape_target(g.x()[ix], g.y()[iy], spec);
    }
  }
  return out;
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::kSquare: return "square";
    case TargetKind::kCShape: return "c-shape";
    case TargetKind::kSamples: return "samples";
  }
  return "?";
}

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "square") return TargetKind::kSquare;
  if (s == "c-shape" || s == "c_shape") return TargetKind::kCShape;
  if (s == "samples") return TargetKind::kSamples;
  throw std::invalid_argument("unknown target kind '" + s + "'");
}

}  // namespace cptlitho
