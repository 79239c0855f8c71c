#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "resmap/carbon/carbon.hpp"
#include "resmap/io/json_util.hpp"
#include "resmap/probseg/model.hpp"
#include "resmap/probseg/train.hpp"
#include "resmap/synth/annotate.hpp"
#include "resmap/synth/dataset.hpp"

namespace resmap::cli {

/// Everything a pipeline run needs. Sections mirror the JSON keys:
///
///   seed, out, dataset, annotators, model, train, infer, map, carbon
///
/// All stage seeds derive from `seed`; sections may not carry their own.
struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out = "resmap_run";
  synth::DatasetSpec dataset;
  /// Empty selects the default three-annotator panel.
  std::vector<synth::AnnotatorProfile> annotators;
  std::uint32_t default_panel_size = 3;
  probseg::UNetConfig model;
  probseg::TrainConfig train;
  std::uint32_t samples = 16;
  double risk_threshold = 0.5;
  carbon::CarbonParams carbon;

  io::Json to_json() const;
};

/// Strict parse; unknown keys and type errors raise DataError naming the
/// offending location, e.g. "config.train.epochs".
RunConfig parse_run_config(const io::Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Stream ids for seeds derived from the run seed.
enum class Stage : std::uint64_t { kDataset = 1, kAnnotators = 2, kModel = 3, kTrain = 4, kInfer = 5 };
std::uint64_t stage_seed(std::uint64_t run_seed, Stage stage);

/// Annotator panel with tile-independent seeds derived from the run seed.
std::vector<synth::AnnotatorProfile> annotator_panel(const RunConfig& config);

}  // namespace resmap::cli
