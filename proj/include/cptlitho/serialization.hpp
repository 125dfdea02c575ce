#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "cptlitho/fields.hpp"
#include "cptlitho/fit.hpp"
#include "cptlitho/fourier.hpp"
#include "cptlitho/pattern.hpp"
#include "cptlitho/targets.hpp"

namespace cptlitho {

using Json = nlohmann::json;

/// [{"re": .., "im": .., "theta": ..}, ...]
Json plan_to_json(const ExposurePlan& plan);
/// Throws std::invalid_argument on schema violations.
ExposurePlan plan_from_json(const Json& j);

ExposurePlan load_plan(const std::filesystem::path& path);
void save_plan(const ExposurePlan& plan, const std::filesystem::path& path);

/// {"order": n, "coeffs": [{"mu": m, "re": x, "im": y}, ...]}
Json coeffs_to_json(const LaurentCoeffs& c);
Json coeffs_to_json(const TruncatedSeries& s);

Json beams_to_json(const BeamRealization& b);

/// {"plan": [...], "distance": .., "peak_density": .., "best_start": ..,
///  "starts": [{"start", "converged", "iterations", "distance", "stop_reason"}]}
Json fit_result_to_json(const FitResult& r);

Json target_spec_to_json(const TargetSpec& t);
TargetSpec target_spec_from_json(const Json& j);

/// `zeta,density` rows, 17 significant digits.
void write_csv(std::ostream& out, const Profile1D& p);
/// `zeta_x,zeta_y,density` rows, x-major.
void write_csv(std::ostream& out, const Profile2D& p);

}  // namespace cptlitho
