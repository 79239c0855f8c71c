#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "resmap/io/json_util.hpp"
#include "resmap/probseg/model.hpp"
#include "resmap/synth/dataset.hpp"

namespace resmap::probseg {

struct TrainConfig {
  double beta = 1.0;
  double learning_rate = 1e-3;
  std::uint32_t epochs = 15;
  std::uint32_t batch_size = 4;
  std::uint64_t seed = 1;
  bool deterministic = true;  // serial execution; results never depend on threads anyway
  std::uint32_t threads = 1;  // batch items evaluated concurrently when > 1

  void validate() const;
  io::Json to_json() const;
};

void parse(const io::Json& j, TrainConfig& out, std::string_view where);

/// Mean loss terms of every optimizer step.
struct ElboReport {
  std::vector<double> total;
  std::vector<double> recon;
  std::vector<double> kl;

  std::size_t steps() const { return total.size(); }
  /// step,total,recon,kl with a header row.
  std::string to_csv() const;
};

/// Inputs and per-annotator labels, already converted for the model.
struct TrainingSet {
  std::vector<ModelInput<float>> inputs;
  std::vector<std::vector<LevelMap>> labels;  // labels[tile][annotator]

  std::size_t size() const { return inputs.size(); }
};

TrainingSet training_set(const synth::Dataset& dataset);

/// Called after every step with (step index, mean total, recon, kl).
using StepObserver = std::function<void(std::int64_t, double, double, double)>;

/// ELBO training with Adam. Each epoch visits the tiles in a shuffled order;
/// every tile in a step draws one annotator uniformly and its own latent
/// noise, all from streams derived from cfg.seed. Gradients are averaged
/// over the batch in tile order, so results do not depend on `threads`.
/// Throws std::invalid_argument for an empty set and NumericalError when a
/// loss is not finite.
ElboReport train(ProbUNet<float>& model, const TrainingSet& data, const TrainConfig& cfg,
                 const StepObserver& observer = {});

/// Pixel accuracy of prior-mean predictions against one label per tile.
double pixel_accuracy(const ProbUNet<float>& model, const std::vector<ModelInput<float>>& inputs,
                      const std::vector<LevelMap>& labels);

}  // namespace resmap::probseg
