#include "resmap/probseg/train.hpp"

#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "resmap/errors.hpp"
#include "resmap/rng.hpp"
#include "resmap/tensor/adam.hpp"

namespace resmap::probseg {

namespace {

struct ItemResult {
  std::vector<Tensor<float>> grads;
  double total = 0, recon = 0, kl = 0;
};

ItemResult run_item(const ProbUNet<float>& model, const ModelInput<float>& input,
                    const LevelMap& label, double beta, const Tensor<float>& eps) {
  Tape<float> tape;
  const Bound<float> m(tape, model, true);
  const InputVars<float> in = bind_input(tape, input);
  const ElboTerms<float> loss = elbo_loss(m, in, label, beta, eps);
  ItemResult r;
  r.total = loss.total.value()[0];
  r.recon = loss.recon.value()[0];
  r.kl = loss.kl.value()[0];
  if (!std::isfinite(r.total) || !std::isfinite(r.recon) || !std::isfinite(r.kl)) return r;
  tape.backward(loss.total);
  r.grads.reserve(m.vars().size());
  for (const Var<float>& v : m.vars()) r.grads.push_back(tape.grad(v));
  return r;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(beta >= 0.0)) throw std::invalid_argument("train: beta must be >= 0");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("train: learning_rate must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (threads < 1) throw std::invalid_argument("train: threads must be >= 1");
}

io::Json TrainConfig::to_json() const {
  return io::Json{{"beta", beta},         {"learning_rate", learning_rate},
                  {"epochs", epochs},     {"batch_size", batch_size},
                  {"seed", seed},         {"deterministic", deterministic},
                  {"threads", threads}};
}

void parse(const io::Json& j, TrainConfig& out, std::string_view where) {
  io::require_object(
      j, {"beta", "learning_rate", "epochs", "batch_size", "seed", "deterministic", "threads"},
      where);
  io::read_field(j, "beta", out.beta, where);
  io::read_field(j, "learning_rate", out.learning_rate, where);
  io::read_field(j, "epochs", out.epochs, where);
  io::read_field(j, "batch_size", out.batch_size, where);
  io::read_field(j, "seed", out.seed, where);
  io::read_field(j, "deterministic", out.deterministic, where);
  io::read_field(j, "threads", out.threads, where);
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(where) + ": " + e.what());
  }
}

std::string ElboReport::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "step,total,recon,kl\n";
  for (std::size_t i = 0; i < total.size(); ++i) {
    out << i << ',' << total[i] << ',' << recon[i] << ',' << kl[i] << '\n';
  }
  return out.str();
}

TrainingSet training_set(const synth::Dataset& dataset) {
  TrainingSet set;
  for (const synth::Tile& t : dataset.tiles) {
    set.inputs.push_back(split_input<float>(t.input));
    set.labels.push_back(t.annotations);
  }
  return set;
}

ElboReport train(ProbUNet<float>& model, const TrainingSet& data, const TrainConfig& cfg,
                 const StepObserver& observer) {
  cfg.validate();
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.labels.size() != data.size()) throw std::invalid_argument("train: labels per tile missing");
  for (const auto& l : data.labels) {
    if (l.empty()) throw std::invalid_argument("train: tile without annotations");
  }

  std::vector<Tensor<float>*> params;
  for (auto& p : model.params()) params.push_back(&p.value);
  tensor::AdamOptions opts;
  opts.learning_rate = cfg.learning_rate;
  tensor::OptimizerState<float> state(params, opts);

  const std::size_t latent = model.config().latent_dim;
  const Rng root(cfg.seed);
  const Rng shuffle_root = root.split(1);
  const Rng step_root = root.split(2);
  const std::uint32_t workers = cfg.deterministic ? 1 : cfg.threads;

  ElboReport report;
  std::int64_t step = 0;
  std::vector<std::size_t> order(data.size());
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = shuffle_root.split(epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::size_t count = end - start;
      std::vector<const LevelMap*> labels(count);
      std::vector<Tensor<float>> noise(count, Tensor<float>(Shape{latent, 1, 1}));
      const Rng step_rng = step_root.split(static_cast<std::uint64_t>(step));
      for (std::size_t k = 0; k < count; ++k) {
        Rng rng = step_rng.split(k);
        const auto& options = data.labels[order[start + k]];
        labels[k] = &options[rng.below(options.size())];
        for (auto& v : noise[k].values()) v = static_cast<float>(rng.normal());
      }

      std::vector<ItemResult> results(count);
      auto run = [&](std::size_t k) {
        results[k] = run_item(model, data.inputs[order[start + k]], *labels[k], cfg.beta, noise[k]);
      };
      if (workers <= 1 || count == 1) {
        for (std::size_t k = 0; k < count; ++k) run(k);
      } else {
        for (std::size_t first = 0; first < count; first += workers) {
          std::vector<std::future<void>> jobs;
          for (std::size_t k = first; k < std::min(count, first + workers); ++k) {
            jobs.push_back(std::async(std::launch::async, run, k));
          }
          for (auto& j : jobs) j.get();
        }
      }

      double total = 0, recon = 0, kl = 0;
      for (std::size_t k = 0; k < count; ++k) {
        const ItemResult& r = results[k];
        if (r.grads.empty()) {
          std::ostringstream msg;
          msg << "non-finite loss at step " << step << " (epoch " << epoch << ", tile "
              << order[start + k] << "): total=" << r.total << " recon=" << r.recon
              << " kl=" << r.kl;
          throw NumericalError(msg.str());
        }
        total += r.total, recon += r.recon, kl += r.kl;
      }
      // Fixed-order reduction keeps the update independent of scheduling.
      std::vector<Tensor<float>> grads = std::move(results[0].grads);
      for (std::size_t k = 1; k < count; ++k) {
        for (std::size_t p = 0; p < grads.size(); ++p) {
          auto dst = grads[p].values();
          const auto src = results[k].grads[p].values();
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
      }
      const float inv = 1.0f / static_cast<float>(count);
      for (auto& g : grads)
        for (auto& v : g.values()) v *= inv;
      tensor::adam_step<float>(params, grads, state);

      report.total.push_back(total / count);
      report.recon.push_back(recon / count);
      report.kl.push_back(kl / count);
      if (observer) observer(step, report.total.back(), report.recon.back(), report.kl.back());
    }
  }
  return report;
}

double pixel_accuracy(const ProbUNet<float>& model, const std::vector<ModelInput<float>>& inputs,
                      const std::vector<LevelMap>& labels) {
  if (inputs.size() != labels.size() || inputs.empty()) {
    throw std::invalid_argument("pixel_accuracy: inputs and labels must align and be non-empty");
  }
  std::size_t hit = 0, total = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const LevelMap pred = predict_prior_mean(model, inputs[i]);
    require_same_extent(pred, labels[i]);
    for (std::size_t p = 0; p < pred.size(); ++p) hit += pred.levels[p] == labels[i].levels[p];
    total += pred.size();
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace resmap::probseg
