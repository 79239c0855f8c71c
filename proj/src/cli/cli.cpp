#include "resmap/cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "resmap/carbon/carbon.hpp"
#include "resmap/cli/config.hpp"
#include "resmap/errors.hpp"
#include "resmap/io/fgrid.hpp"
#include "resmap/io/palette.hpp"
#include "resmap/mapping/distribution.hpp"
#include "resmap/mapping/metrics.hpp"
#include "resmap/probseg/checkpoint.hpp"
#include "resmap/rng.hpp"
#include "resmap/synth/params_json.hpp"

namespace resmap::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr int kManifestVersion = 1;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::uint32_t> samples;
  bool deterministic = false;
};

struct Context {
  RunConfig config;
  fs::path root;
  bool deterministic = false;
  std::ostream* log = nullptr;

  fs::path dir(const char* stage) const { return root / stage; }
};

std::string tile_dir(std::uint32_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tiles/%05u", id);
  return buf;
}

std::string numbered(const char* stem, std::size_t k) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%03zu.fgrid", stem, k);
  return buf;
}

Json stage_manifest(const Context& ctx, const char* format) {
  Json j{{"format", format}, {"version", kManifestVersion}};
  if (!ctx.deterministic) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["created"] = buf;
  }
  return j;
}

Json read_manifest(const Context& ctx, const char* stage, const char* format, const char* producer) {
  const fs::path path = ctx.dir(stage) / kManifest;
  if (!fs::exists(path)) {
    throw DataError(path.string() + " not found; run `resmap " + producer + "` first");
  }
  Json j = io::read_json(path);
  if (j.value("format", "") != format || j.value("version", 0) != kManifestVersion) {
    throw DataError(path.string() + ": not a " + std::string(format) + " v1 manifest");
  }
  return j;
}

LevelMap read_levels(const fs::path& path) { return to_level_map(io::read_fgrid(path)); }

synth::Dataset load_dataset(const Context& ctx) {
  const fs::path path = ctx.dir(kDatasetDir) / synth::kDatasetManifest;
  if (!fs::exists(path)) throw DataError(path.string() + " not found; run `resmap synth` first");
  return synth::read_dataset(path);
}

/// labels[tile index][annotator]
std::vector<std::vector<LevelMap>> load_labels(const Context& ctx, const synth::Dataset& ds) {
  const Json j = read_manifest(ctx, kLabelsDir, "resmap-labels", "annotate");
  const Json& tiles = j.at("tiles");
  if (tiles.size() != ds.tiles.size()) throw DataError("labels do not match the dataset tiles");
  std::vector<std::vector<LevelMap>> out;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (tiles[i].at("id").get<std::uint32_t>() != ds.tiles[i].id) {
      throw DataError("labels: tile order differs from the dataset");
    }
    std::vector<LevelMap> maps;
    for (const Json& rel : tiles[i].at("annotations")) {
      maps.push_back(read_levels(ctx.dir(kLabelsDir) / rel.get<std::string>()));
      require_same_extent(maps.back(), ds.tiles[i].truth);
    }
    out.push_back(std::move(maps));
  }
  return out;
}

/// samples[tile index][m]
std::vector<std::vector<LevelMap>> load_samples(const Context& ctx, const synth::Dataset& ds,
                                                Json* manifest = nullptr) {
  const Json j = read_manifest(ctx, kSamplesDir, "resmap-samples", "infer");
  const Json& tiles = j.at("tiles");
  if (tiles.size() != ds.tiles.size()) throw DataError("samples do not match the dataset tiles");
  std::vector<std::vector<LevelMap>> out;
  for (const Json& t : tiles) {
    std::vector<LevelMap> maps;
    for (const Json& rel : t.at("samples")) maps.push_back(read_levels(ctx.dir(kSamplesDir) / rel.get<std::string>()));
    out.push_back(std::move(maps));
  }
  if (manifest) *manifest = j;
  return out;
}

Json config_json(const RunConfig& c) {
  Json j = c.to_json();
  j.erase("out");  // keeps manifests independent of where the run lives
  return j;
}

void cmd_synth(const Context& ctx) {
  synth::DatasetSpec spec = ctx.config.dataset;
  spec.seed = stage_seed(ctx.config.seed, Stage::kDataset);
  spec.annotators = {synth::AnnotatorProfile{}};  // the truth itself; `annotate` adds the panel
  const synth::Dataset ds = synth::make_dataset(spec);
  synth::write_dataset(ctx.dir(kDatasetDir), ds);
  *ctx.log << "synth: " << ds.tiles.size() << " tiles -> " << ctx.dir(kDatasetDir).string() << "\n";
}

void cmd_annotate(const Context& ctx) {
  const synth::Dataset ds = load_dataset(ctx);
  const auto panel = annotator_panel(ctx.config);
  Json manifest = stage_manifest(ctx, "resmap-labels");
  Json profiles = Json::array();
  for (const auto& p : panel) profiles.push_back(synth::to_json(p));
  manifest["annotators"] = profiles;
  manifest["dataset"] = std::string("../") + kDatasetDir + "/" + synth::kDatasetManifest;
  Json tiles = Json::array();
  for (const synth::Tile& t : ds.tiles) {
    const synth::VisibilityMap vis = synth::visibility(synth::tile_scene(ds.spec, t.seed));
    Json files = Json::array();
    for (std::size_t k = 0; k < panel.size(); ++k) {
      const LevelMap labels = synth::annotate(t.truth, synth::for_tile(panel[k], t.seed), &vis);
      const std::string rel = tile_dir(t.id) + "/" + numbered("annotator", k);
      io::write_fgrid(ctx.dir(kLabelsDir) / rel, to_raster(labels, t.input.resolution));
      files.push_back(rel);
    }
    tiles.push_back({{"id", t.id}, {"annotations", files}});
  }
  manifest["tiles"] = tiles;
  io::write_json(ctx.dir(kLabelsDir) / kManifest, manifest);
  *ctx.log << "annotate: " << panel.size() << " annotators x " << ds.tiles.size() << " tiles\n";
}

void cmd_train(const Context& ctx) {
  const synth::Dataset ds = load_dataset(ctx);
  probseg::TrainingSet set = probseg::training_set(ds);
  set.labels = load_labels(ctx, ds);
  probseg::TrainConfig cfg = ctx.config.train;
  cfg.seed = stage_seed(ctx.config.seed, Stage::kTrain);
  if (ctx.deterministic) cfg.deterministic = true;
  probseg::ProbUNet<float> model =
      probseg::build_model(ctx.config.model, stage_seed(ctx.config.seed, Stage::kModel));
  const probseg::ElboReport report = probseg::train(model, set, cfg);

  const fs::path dir = ctx.dir(kModelDir);
  fs::create_directories(dir);
  probseg::write_checkpoint(dir / "checkpoint.ckpt", model,
                            {static_cast<std::int64_t>(report.steps()), cfg.seed, cfg.to_json()});
  const std::string csv = report.to_csv();
  io::write_bytes(dir / "loss.csv", std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  Json manifest = stage_manifest(ctx, "resmap-model");
  manifest["checkpoint"] = "checkpoint.ckpt";
  manifest["loss"] = "loss.csv";
  manifest["config"] = config_json(ctx.config);
  manifest["steps"] = report.steps();
  manifest["final"] = {{"total", report.total.back()},
                       {"recon", report.recon.back()},
                       {"kl", report.kl.back()}};
  io::write_json(dir / kManifest, manifest);
  *ctx.log << "train: " << report.steps() << " steps, final recon " << report.recon.back()
           << " kl " << report.kl.back() << "\n";
}

void cmd_infer(const Context& ctx) {
  const synth::Dataset ds = load_dataset(ctx);
  read_manifest(ctx, kModelDir, "resmap-model", "train");
  const probseg::Checkpoint ckpt = probseg::read_checkpoint(ctx.dir(kModelDir) / "checkpoint.ckpt");
  const std::uint32_t m = ctx.config.samples;
  const Rng root(stage_seed(ctx.config.seed, Stage::kInfer));
  Json manifest = stage_manifest(ctx, "resmap-samples");
  manifest["samples"] = m;
  Json tiles = Json::array();
  for (const synth::Tile& t : ds.tiles) {
    const auto x = probseg::split_input<float>(t.input);
    const auto maps = probseg::predict_samples(ckpt.model, x, m, root.split(t.id).key());
    Json files = Json::array();
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const std::string rel = tile_dir(t.id) + "/" + numbered("sample", k);
      io::write_fgrid(ctx.dir(kSamplesDir) / rel, to_raster(maps[k], t.input.resolution));
      files.push_back(rel);
    }
    tiles.push_back({{"id", t.id}, {"samples", files}});
  }
  manifest["tiles"] = tiles;
  io::write_json(ctx.dir(kSamplesDir) / kManifest, manifest);
  *ctx.log << "infer: " << m << " samples x " << ds.tiles.size() << " tiles\n";
}

void cmd_map(const Context& ctx) {
  const synth::Dataset ds = load_dataset(ctx);
  const auto samples = load_samples(ctx, ds);
  const double tau = ctx.config.risk_threshold;
  const fs::path dir = ctx.dir(kMapsDir);
  Json manifest = stage_manifest(ctx, "resmap-maps");
  manifest["risk_threshold"] = tau;
  Json tiles = Json::array();
  mapping::Fractions total{};
  for (std::size_t i = 0; i < ds.tiles.size(); ++i) {
    const synth::Tile& t = ds.tiles[i];
    const double res = t.input.resolution;
    const mapping::DistributionMap dist = mapping::aggregate(samples[i]);
    const std::string sub = tile_dir(t.id) + "/";
    io::write_fgrid(dir / (sub + "probabilities.fgrid"), mapping::probability_raster(dist, res));
    io::write_fgrid(dir / (sub + "entropy.fgrid"), mapping::entropy_raster(dist, res));
    const LevelMap mode = mapping::mode_map(dist);
    io::write_fgrid(dir / (sub + "mode.fgrid"), to_raster(mode, res));
    io::write_level_ppm(dir / (sub + "mode.ppm"), mode);
    const Raster ent = mapping::entropy_raster(dist);
    io::write_gray_pgm(dir / (sub + "entropy.pgm"), ent.f32, dist.width, dist.height, 0.0f,
                       static_cast<float>(std::log(5.0)));
    const auto risk = mapping::flag_risk(dist, tau);
    io::write_mask_pgm(dir / (sub + "risk.pgm"), risk, dist.width, dist.height);
    std::size_t flagged = 0;
    for (auto v : risk) flagged += v;
    const mapping::Fractions cov = mapping::coverage_fractions(dist);
    for (int k = 0; k < kNumLevels; ++k) total[k] += cov[k] / static_cast<double>(ds.tiles.size());
    tiles.push_back({{"id", t.id},
                     {"samples", dist.samples},
                     {"probabilities", sub + "probabilities.fgrid"},
                     {"entropy", sub + "entropy.fgrid"},
                     {"mode", sub + "mode.fgrid"},
                     {"mode_image", sub + "mode.ppm"},
                     {"entropy_image", sub + "entropy.pgm"},
                     {"risk_mask", sub + "risk.pgm"},
                     {"coverage", cov},
                     {"risk_fraction", static_cast<double>(flagged) / static_cast<double>(risk.size())}});
  }
  manifest["tiles"] = tiles;
  manifest["coverage"] = total;
  io::write_json(dir / kManifest, manifest);
  *ctx.log << "map: " << ds.tiles.size() << " tiles\n";
}

void cmd_carbon(const Context& ctx) {
  const synth::Dataset ds = load_dataset(ctx);
  const Json maps = read_manifest(ctx, kMapsDir, "resmap-maps", "map");
  const Json& tiles = maps.at("tiles");
  if (tiles.size() != ds.tiles.size()) throw DataError("maps do not match the dataset tiles");
  carbon::LevelValues expected{}, mode_area{}, no_till{};
  auto add = [](carbon::LevelValues& acc, const carbon::LevelValues& v) {
    for (int k = 0; k < kNumLevels; ++k) acc[k] += v[k];
  };
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const synth::Tile& t = ds.tiles[i];
    const double res = t.input.resolution;
    const fs::path dir = ctx.dir(kMapsDir);
    const auto dist = mapping::distribution_from_raster(
        io::read_fgrid(dir / tiles[i].at("probabilities").get<std::string>()));
    add(expected, carbon::area_per_level(dist, res));
    add(mode_area, carbon::area_per_level(read_levels(dir / tiles[i].at("mode").get<std::string>()), res));
    // Potential: the same field regenerated under uniform no-till.
    synth::SceneParams params = synth::tile_scene_params(ds.spec, t.seed);
    params.management.kind = synth::ManagementPattern::Kind::kUniform;
    params.management.uniform = synth::Management::kNoTill;
    const LevelMap potential = synth::levels_from_visibility(synth::visibility(synth::generate_scene(params)));
    add(no_till, carbon::area_per_level(potential, res));
  }
  const carbon::CarbonParams& p = ctx.config.carbon;
  const carbon::CarbonEstimate achieved = carbon::sequestration_potential(expected, p);
  const carbon::CarbonEstimate mode = carbon::sequestration_potential(mode_area, p);
  const carbon::CarbonEstimate potential = carbon::sequestration_potential(no_till, p);
  Json report = stage_manifest(ctx, "resmap-carbon");
  report["params"] = carbon::to_json(p);
  report["achieved"] = achieved.to_json();
  report["achieved_mode"] = mode.to_json();
  report["potential_no_till"] = potential.to_json();
  report["delta_Mg_yr"] = potential.total_mg - achieved.total_mg;
  report["report_csv"] = "report.csv";
  const fs::path dir = ctx.dir(kCarbonDir);
  io::write_json(dir / kManifest, report);
  const std::string csv = achieved.to_csv();
  io::write_bytes(dir / "report.csv", std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  *ctx.log << "carbon: achieved " << achieved.total_mg << " Mg/yr, no-till potential "
           << potential.total_mg << " Mg/yr\n";
}

void cmd_eval(const Context& ctx) {
  const synth::Dataset ds = load_dataset(ctx);
  const auto samples = load_samples(ctx, ds);
  const auto labels = load_labels(ctx, ds);
  std::vector<mapping::TileEvaluation> tiles;
  for (std::size_t i = 0; i < ds.tiles.size(); ++i) {
    tiles.push_back({samples[i], labels[i], ds.tiles[i].truth});
  }
  const mapping::MetricsReport r = mapping::evaluate(tiles);
  Json manifest = stage_manifest(ctx, "resmap-metrics");
  manifest["metrics"] = r.to_json();
  io::write_json(ctx.dir(kEvalDir) / kManifest, manifest);
  *ctx.log << "eval: accuracy " << r.accuracy << " mean IoU " << r.mean_iou << " GED " << r.ged << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crop residue level mapping pipeline", "resmap"};
  app.require_subcommand(1, 1);
  Options opt;
  const std::vector<std::pair<std::string, std::function<void(const Context&)>>> commands{
      {"synth", cmd_synth}, {"annotate", cmd_annotate}, {"train", cmd_train}, {"infer", cmd_infer},
      {"map", cmd_map},     {"carbon", cmd_carbon},     {"eval", cmd_eval}};
  const std::vector<std::string> help{
      "generate a synthetic dataset", "label the dataset with the annotator panel",
      "train the probabilistic U-Net", "draw segmentation samples per tile",
      "aggregate samples into distribution, entropy and risk maps",
      "carbon report from the maps", "metrics against the annotator labels"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--config", opt.config, "run configuration (JSON)");
    sub->add_option("--seed", opt.seed, "global seed");
    sub->add_option("--out", opt.out, "run directory");
    sub->add_option("--samples", opt.samples, "samples per tile")->check(CLI::PositiveNumber);
    sub->add_flag("--deterministic", opt.deterministic, "serial execution, no timestamps");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "resmap: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    Context ctx;
    if (!opt.config.empty()) ctx.config = load_run_config(opt.config);
    if (opt.seed) ctx.config.seed = *opt.seed;
    if (!opt.out.empty()) ctx.config.out = opt.out;
    if (opt.samples) ctx.config.samples = *opt.samples;
    ctx.root = ctx.config.out;
    ctx.deterministic = opt.deterministic;
    ctx.log = &out;
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) fn(ctx);
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "resmap: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "resmap: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace resmap::cli
