#include "resmap/carbon/carbon.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "resmap/errors.hpp"

namespace resmap::carbon {

namespace {

double pixel_area_ha(double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("resolution must be positive, got " + std::to_string(resolution));
  }
  return resolution * resolution * 1e-4;
}

io::Json level_table(const CarbonEstimate& e) {
  io::Json rows = io::Json::array();
  for (int k = 0; k < kNumLevels; ++k) {
    rows.push_back({{"level", level_name(k)},
                    {"area_ha", e.area_ha[k]},
                    {"rate", e.rate[k]},
                    {"carbon_Mg_yr", e.carbon_mg[k]}});
  }
  return rows;
}

}  // namespace

double CarbonParams::mean_adjustment() const {
  if (adjustment.empty()) return 1.0;
  double sum = 0.0;
  for (double a : adjustment) sum += a;
  return sum / static_cast<double>(adjustment.size());
}

void CarbonParams::validate() const {
  for (int k = 0; k < kNumLevels; ++k) {
    if (!(rates[k] >= 0.0) || !std::isfinite(rates[k])) {
      throw std::invalid_argument("carbon: rate for " + std::string(level_name(k)) +
                                  " must be a non-negative number");
    }
  }
  for (double a : adjustment) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("carbon: adjustment factors must be non-negative");
    }
  }
}

void parse(const io::Json& j, CarbonParams& out, std::string_view where) {
  io::require_object(j, {"rates"}, where);
  std::vector<double> rates(out.rates.begin(), out.rates.end());
  io::read_field(j, "rates", rates, where);
  if (rates.size() != kNumLevels) {
    throw DataError(std::string(where) + ".rates: expected 5 values, got " +
                    std::to_string(rates.size()));
  }
  std::copy(rates.begin(), rates.end(), out.rates.begin());
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(where) + ": " + e.what());
  }
}

io::Json to_json(const CarbonParams& params) { return io::Json{{"rates", params.rates}}; }

LevelValues area_per_level(const LevelMap& map, double resolution) {
  const double cell = pixel_area_ha(resolution);
  map.validate();
  std::array<std::size_t, kNumLevels> counts{};
  for (auto v : map.levels) ++counts[v];
  LevelValues out{};
  for (int k = 0; k < kNumLevels; ++k) out[k] = static_cast<double>(counts[k]) * cell;
  return out;
}

LevelValues area_per_level(const mapping::DistributionMap& dist, double resolution) {
  const double cell = pixel_area_ha(resolution);
  LevelValues out{};
  const std::size_t n = dist.pixel_count();
  for (int k = 0; k < kNumLevels; ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += dist.p(k, i);
    out[k] = mass * cell;
  }
  return out;
}

CarbonEstimate sequestration_potential(const LevelValues& areas, const CarbonParams& params) {
  params.validate();
  const double adjust = params.mean_adjustment();
  CarbonEstimate e;
  for (int k = 0; k < kNumLevels; ++k) {
    if (!(areas[k] >= 0.0) || !std::isfinite(areas[k])) {
      throw std::invalid_argument("carbon: area for " + std::string(level_name(k)) +
                                  " must be a non-negative number");
    }
    e.area_ha[k] = areas[k];
    e.rate[k] = params.rates[k];
    e.carbon_mg[k] = areas[k] * params.rates[k] * adjust;
    e.total_mg += e.carbon_mg[k];
  }
  e.total_tg = e.total_mg * 1e-6;
  return e;
}

io::Json CarbonEstimate::to_json() const {
  return io::Json{{"levels", level_table(*this)},
                  {"total_Mg_yr", total_mg},
                  {"total_Tg_yr", total_tg}};
}

std::string CarbonEstimate::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "level,area_ha,rate,carbon_Mg_yr\n";
  double area = 0.0;
  for (int k = 0; k < kNumLevels; ++k) {
    out << level_name(k) << ',' << area_ha[k] << ',' << rate[k] << ',' << carbon_mg[k] << '\n';
    area += area_ha[k];
  }
  out << "total," << area << ",," << total_mg << '\n';
  return out.str();
}

CarbonDelta achieved_vs_potential(const LevelMap& current, const LevelMap& scenario,
                                  double resolution, const CarbonParams& params) {
  require_same_extent(current, scenario);
  if (!params.adjustment.empty() && params.adjustment.size() != current.size()) {
    throw ShapeError("carbon: adjustment map has " + std::to_string(params.adjustment.size()) +
                     " pixels, field has " + std::to_string(current.size()));
  }
  CarbonDelta d;
  d.current = sequestration_potential(area_per_level(current, resolution), params);
  d.scenario = sequestration_potential(area_per_level(scenario, resolution), params);
  d.delta_mg = d.scenario.total_mg - d.current.total_mg;
  return d;
}

io::Json CarbonDelta::to_json() const {
  return io::Json{{"current", current.to_json()},
                  {"scenario", scenario.to_json()},
                  {"delta_Mg_yr", delta_mg}};
}

}  // namespace resmap::carbon
