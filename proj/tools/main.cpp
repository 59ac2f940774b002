// Command-line front end: train the step scorer, dump the shaping curve,
// run the shaped-vs-unshaped ablation, score step features, and generate
// the bundled synthetic dataset. All randomness is seeded from the config;
// reruns with the same config and seed are byte-identical.

#include <cstdint>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "stepreward/commands.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "output directory (default: config output.directory)");
  cmd->add_option("--seed", args.seed, "override the config seed(s)")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

stepreward::ExperimentConfig load_config(const CommonArgs& args) {
  auto config = stepreward::ExperimentConfig::load(args.config_path);
  if (args.seed_set) config.override_seed(args.seed);
  return config;
}

fs::path resolve_out(const CommonArgs& args, const stepreward::ExperimentConfig& config) {
  return args.out_dir.empty() ? fs::path(config.output.directory) : fs::path(args.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"step-level reward shaping experiments"};
  app.require_subcommand(1);

  CommonArgs train_args, curve_args, ablation_args, score_args;
  std::string score_model, score_input;

  CLI::App* train = app.add_subcommand("train-prm", "train the step scorer on a dataset");
  add_common(train, train_args);

  CLI::App* curve = app.add_subcommand("shape-curve", "dump the shaping curve over step counts");
  add_common(curve, curve_args);

  CLI::App* ablation =
      app.add_subcommand("ablation", "train shaped and unshaped policies and compare");
  add_common(ablation, ablation_args);

  CLI::App* score = app.add_subcommand("score", "score a step-features file with a trained model");
  add_common(score, score_args);
  score->add_option("--model", score_model,
                    "trained model file (default: <output.directory>/prm_model.json)");
  score->add_option("--input", score_input, "features file (default: prm.dataset)");

  stepreward::ClusterDatasetSpec gen_spec;
  std::string gen_out = "data/steps_train.jsonl";
  CLI::App* gen = app.add_subcommand("gen-dataset", "write the bundled synthetic step dataset");
  gen->add_option("--out", gen_out, "output file path");
  gen->add_option("--points", gen_spec.n_points, "number of labeled steps");
  gen->add_option("--dim", gen_spec.dim, "feature dimension");
  gen->add_option("--separation", gen_spec.separation, "distance of each class mean from origin");
  gen->add_option("--sigma", gen_spec.sigma, "cluster standard deviation");
  gen->add_option("--seed", gen_spec.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are validation errors
  }

  return stepreward::run_guarded([&] {
    if (train->parsed()) {
      const auto config = load_config(train_args);
      stepreward::run_train_prm(config, resolve_out(train_args, config));
    } else if (curve->parsed()) {
      const auto config = load_config(curve_args);
      stepreward::run_shape_curve(config, resolve_out(curve_args, config));
    } else if (ablation->parsed()) {
      const auto config = load_config(ablation_args);
      stepreward::run_ablation(config, resolve_out(ablation_args, config));
    } else if (score->parsed()) {
      const auto config = load_config(score_args);
      stepreward::run_score(config, resolve_out(score_args, config), score_model, score_input);
    } else if (gen->parsed()) {
      stepreward::run_gen_dataset(gen_spec, gen_out);
    }
  });
}
