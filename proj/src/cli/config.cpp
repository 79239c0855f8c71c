#include "resmap/cli/config.hpp"

#include "resmap/errors.hpp"
#include "resmap/rng.hpp"
#include "resmap/synth/params_json.hpp"

namespace resmap::cli {

namespace {

void reject_seed(const io::Json& section, const std::string& where) {
  if (section.is_object() && section.contains("seed")) {
    throw DataError(where + ".seed: stage seeds derive from the top-level \"seed\"");
  }
}

}  // namespace

std::uint64_t stage_seed(std::uint64_t run_seed, Stage stage) {
  return Rng(run_seed).split(static_cast<std::uint64_t>(stage)).key();
}

std::vector<synth::AnnotatorProfile> annotator_panel(const RunConfig& config) {
  if (!config.annotators.empty()) {
    std::vector<synth::AnnotatorProfile> panel = config.annotators;
    Rng rng(stage_seed(config.seed, Stage::kAnnotators));
    for (auto& p : panel) p.seed = rng.next_u64();
    return panel;
  }
  return synth::default_annotators(config.default_panel_size,
                                   stage_seed(config.seed, Stage::kAnnotators));
}

io::Json RunConfig::to_json() const {
  io::Json spec = dataset.params_json();
  spec.erase("seed");
  spec.erase("annotators");
  io::Json panel = io::Json::array();
  for (const auto& a : annotators) {
    io::Json p = synth::to_json(a);
    p.erase("seed");
    panel.push_back(p);
  }
  io::Json train_json = train.to_json();
  train_json.erase("seed");
  return io::Json{{"seed", seed},
                  {"out", out.string()},
                  {"dataset", spec},
                  {"annotators", panel},
                  {"default_panel_size", default_panel_size},
                  {"model", model.to_json()},
                  {"train", train_json},
                  {"infer", {{"samples", samples}}},
                  {"map", {{"risk_threshold", risk_threshold}}},
                  {"carbon", carbon::to_json(carbon)}};
}

RunConfig parse_run_config(const io::Json& j) {
  const std::string w = "config";
  io::require_object(j,
                     {"seed", "out", "dataset", "annotators", "default_panel_size", "model",
                      "train", "infer", "map", "carbon"},
                     w);
  RunConfig c;
  io::read_field(j, "seed", c.seed, w);
  std::string out = c.out.string();
  io::read_field(j, "out", out, w);
  c.out = out;
  io::read_field(j, "default_panel_size", c.default_panel_size, w);
  if (c.default_panel_size < 1) throw DataError(w + ".default_panel_size: must be at least 1");

  if (const auto it = j.find("dataset"); it != j.end()) {
    reject_seed(*it, w + ".dataset");
    if (it->is_object() && it->contains("annotators")) {
      throw DataError(w + ".dataset.annotators: use the top-level \"annotators\" list");
    }
    synth::parse(*it, c.dataset, w + ".dataset");
  }
  if (const auto it = j.find("annotators"); it != j.end()) {
    if (!it->is_array()) throw DataError(w + ".annotators: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = w + ".annotators[" + std::to_string(k) + "]";
      reject_seed((*it)[k], where);
      synth::AnnotatorProfile p;
      synth::parse((*it)[k], p, where);
      c.annotators.push_back(p);
    }
  }
  if (const auto it = j.find("model"); it != j.end()) probseg::parse(*it, c.model, w + ".model");
  if (const auto it = j.find("train"); it != j.end()) {
    reject_seed(*it, w + ".train");
    probseg::parse(*it, c.train, w + ".train");
  }
  if (const auto it = j.find("infer"); it != j.end()) {
    io::require_object(*it, {"samples"}, w + ".infer");
    io::read_field(*it, "samples", c.samples, w + ".infer");
    if (c.samples < 1) throw DataError(w + ".infer.samples: must be at least 1");
  }
  if (const auto it = j.find("map"); it != j.end()) {
    io::require_object(*it, {"risk_threshold"}, w + ".map");
    io::read_field(*it, "risk_threshold", c.risk_threshold, w + ".map");
    if (!(c.risk_threshold >= 0.0 && c.risk_threshold <= 1.0)) {
      throw DataError(w + ".map.risk_threshold: must lie in [0, 1]");
    }
  }
  if (const auto it = j.find("carbon"); it != j.end()) carbon::parse(*it, c.carbon, w + ".carbon");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(io::read_json(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace resmap::cli
