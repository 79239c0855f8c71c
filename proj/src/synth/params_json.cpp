#include "resmap/synth/params_json.hpp"

#include <string>

#include "resmap/errors.hpp"

namespace resmap::synth {

using io::Json;

namespace {

std::string join(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}

std::string_view pattern_name(ManagementPattern::Kind k) {
  switch (k) {
    case ManagementPattern::Kind::kUniform: return "uniform";
    case ManagementPattern::Kind::kStripes: return "stripes";
    case ManagementPattern::Kind::kPatchwork: return "patchwork";
  }
  return "patchwork";
}

Json rgbn_json(const Rgbn& c) { return Json::array({c[0], c[1], c[2], c[3]}); }

}  // namespace

std::string_view management_name(Management m) {
  switch (m) {
    case Management::kTill: return "till";
    case Management::kNoTill: return "no_till";
    case Management::kStrip: return "strip";
  }
  return "till";
}

Management parse_management(std::string_view name) {
  if (name == "till") return Management::kTill;
  if (name == "no_till") return Management::kNoTill;
  if (name == "strip") return Management::kStrip;
  throw DataError("unknown management \"" + std::string(name) + "\"");
}

Json to_json(const SceneParams& p) {
  return Json{
      {"size", p.size},
      {"resolution", p.resolution},
      {"relief", p.relief},
      {"roughness", p.roughness},
      {"soil_correlation", p.soil_correlation},
      {"management",
       {{"kind", pattern_name(p.management.kind)},
        {"uniform", management_name(p.management.uniform)},
        {"stripe_width", p.management.stripe_width},
        {"patch_size", p.management.patch_size}}},
      {"weights",
       {{"management", p.weights.management},
        {"soil", p.weights.soil},
        {"wetness", p.weights.wetness},
        {"slope", p.weights.slope}}},
      {"noise_amplitude", p.noise_amplitude},
      {"ponding_threshold", p.ponding_threshold},
      {"terrain_smoothing", p.terrain_smoothing},
      {"seed", p.seed},
  };
}

void parse(const Json& j, SceneParams& out, std::string_view where) {
  io::require_object(j,
                     {"size", "resolution", "relief", "roughness", "soil_correlation",
                      "management", "weights", "noise_amplitude", "ponding_threshold",
                      "terrain_smoothing", "seed"},
                     where);
  io::read_field(j, "size", out.size, where);
  io::read_field(j, "resolution", out.resolution, where);
  io::read_field(j, "relief", out.relief, where);
  io::read_field(j, "roughness", out.roughness, where);
  io::read_field(j, "soil_correlation", out.soil_correlation, where);
  io::read_field(j, "noise_amplitude", out.noise_amplitude, where);
  io::read_field(j, "ponding_threshold", out.ponding_threshold, where);
  io::read_field(j, "terrain_smoothing", out.terrain_smoothing, where);
  io::read_field(j, "seed", out.seed, where);
  if (out.resolution <= 0.0) throw DataError(join(where, "resolution") + ": must be positive");

  if (const auto it = j.find("management"); it != j.end()) {
    const std::string w = join(where, "management");
    io::require_object(*it, {"kind", "uniform", "stripe_width", "patch_size"}, w);
    std::string kind(pattern_name(out.management.kind));
    std::string uniform(management_name(out.management.uniform));
    io::read_field(*it, "kind", kind, w);
    io::read_field(*it, "uniform", uniform, w);
    io::read_field(*it, "stripe_width", out.management.stripe_width, w);
    io::read_field(*it, "patch_size", out.management.patch_size, w);
    if (kind == "uniform") {
      out.management.kind = ManagementPattern::Kind::kUniform;
    } else if (kind == "stripes") {
      out.management.kind = ManagementPattern::Kind::kStripes;
    } else if (kind == "patchwork") {
      out.management.kind = ManagementPattern::Kind::kPatchwork;
    } else {
      throw DataError(w + ".kind: unknown pattern \"" + kind + "\"");
    }
    try {
      out.management.uniform = parse_management(uniform);
    } catch (const DataError& e) {
      throw DataError(w + ".uniform: " + e.what());
    }
    if (out.management.stripe_width == 0 || out.management.patch_size == 0) {
      throw DataError(w + ": stripe_width and patch_size must be positive");
    }
  }
  if (const auto it = j.find("weights"); it != j.end()) {
    const std::string w = join(where, "weights");
    io::require_object(*it, {"management", "soil", "wetness", "slope"}, w);
    io::read_field(*it, "management", out.weights.management, w);
    io::read_field(*it, "soil", out.weights.soil, w);
    io::read_field(*it, "wetness", out.weights.wetness, w);
    io::read_field(*it, "slope", out.weights.slope, w);
  }
}

Json to_json(const RenderParams& p) {
  return Json{
      {"soil_poor", rgbn_json(p.soil_poor)}, {"soil_rich", rgbn_json(p.soil_rich)},
      {"residue", rgbn_json(p.residue)},     {"buildup", rgbn_json(p.buildup)},
      {"shading", p.shading},                {"noise_sigma", p.noise_sigma},
  };
}

void parse(const Json& j, RenderParams& out, std::string_view where) {
  io::require_object(j, {"soil_poor", "soil_rich", "residue", "buildup", "shading", "noise_sigma"},
                     where);
  io::read_field(j, "soil_poor", out.soil_poor, where);
  io::read_field(j, "soil_rich", out.soil_rich, where);
  io::read_field(j, "residue", out.residue, where);
  io::read_field(j, "buildup", out.buildup, where);
  io::read_field(j, "shading", out.shading, where);
  io::read_field(j, "noise_sigma", out.noise_sigma, where);
  if (out.noise_sigma < 0.0f) throw DataError(join(where, "noise_sigma") + ": must be >= 0");
}

Json to_json(const AnnotatorProfile& p) {
  return Json{
      {"threshold_shift", p.threshold_shift},
      {"boundary_jitter", p.boundary_jitter},
      {"confusion_rate", p.confusion_rate},
      {"seed", p.seed},
  };
}

void parse(const Json& j, AnnotatorProfile& out, std::string_view where) {
  io::require_object(j, {"threshold_shift", "boundary_jitter", "confusion_rate", "seed"}, where);
  io::read_field(j, "threshold_shift", out.threshold_shift, where);
  io::read_field(j, "boundary_jitter", out.boundary_jitter, where);
  io::read_field(j, "confusion_rate", out.confusion_rate, where);
  io::read_field(j, "seed", out.seed, where);
  if (out.confusion_rate < 0.0 || out.confusion_rate > 1.0) {
    throw DataError(join(where, "confusion_rate") + ": must lie in [0, 1]");
  }
}

}  // namespace resmap::synth
