#pragma once

#include <array>
#include <string>
#include <vector>

#include "resmap/io/json_util.hpp"
#include "resmap/mapping/distribution.hpp"
#include "resmap/raster.hpp"

namespace resmap::carbon {

using LevelValues = std::array<double, kNumLevels>;

/// Illustrative sequestration rates in Mg C / ha / yr, none -> ponding.
inline constexpr LevelValues kDefaultRates{0.0, 0.1, 0.2, 0.4, 0.5};

struct CarbonParams {
  LevelValues rates = kDefaultRates;
  /// Optional per-pixel soil multiplier; empty means 1 everywhere.
  std::vector<double> adjustment;

  /// Mean of the adjustment map, 1 when none is given.
  double mean_adjustment() const;
  /// Throws std::invalid_argument on negative or non-finite values.
  void validate() const;
};

/// {"rates": [5 numbers]}; unknown keys rejected. The adjustment map is not
/// part of the JSON form.
void parse(const io::Json& j, CarbonParams& out, std::string_view where);
io::Json to_json(const CarbonParams& params);

struct CarbonEstimate {
  LevelValues area_ha{};
  LevelValues rate{};
  LevelValues carbon_mg{};  // Mg C / yr
  double total_mg = 0.0;
  double total_tg = 0.0;

  io::Json to_json() const;
  /// level,area_ha,rate,carbon_Mg_yr plus a closing total row.
  std::string to_csv() const;
};

/// Pixel area is resolution^2 m^2 = resolution^2 * 1e-4 ha. Distribution
/// maps give probability-weighted areas. Throws std::invalid_argument
/// unless resolution is positive and finite.
LevelValues area_per_level(const LevelMap& map, double resolution);
LevelValues area_per_level(const mapping::DistributionMap& dist, double resolution);

/// carbon_k = area_k * rate_k * mean adjustment. Throws
/// std::invalid_argument on negative areas or invalid params.
CarbonEstimate sequestration_potential(const LevelValues& areas, const CarbonParams& params);

struct CarbonDelta {
  CarbonEstimate current;
  CarbonEstimate scenario;
  double delta_mg = 0.0;  // scenario - current, Mg C / yr

  io::Json to_json() const;
};

/// Estimates for the observed map and a management scenario on the same
/// field. Throws ShapeError on extent mismatch.
CarbonDelta achieved_vs_potential(const LevelMap& current, const LevelMap& scenario,
                                  double resolution, const CarbonParams& params);

}  // namespace resmap::carbon
