#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepreward/policy_opt.hpp"

namespace stepreward {

/// Experiment configuration, one section per concern. Every field has a
/// default, so {} is a valid config; unknown keys anywhere are a hard error.
struct ExperimentConfig {
  struct Prm {
    std::string dataset = "data/steps_train.jsonl";
    int epochs = 400;
    double learning_rate = 0.1;
    std::uint64_t seed = 7;
    int replication_factor = 1;
  } prm;

  struct Environment {
    int t_max = kDefaultTMax;
    double noise_scale = 0.05;
    double difficulty_per_step = 0.3;
    std::uint64_t oracle_seed = 1234;
    double initial_quality = 2.0;  // squashed to q ~ 0.88
  } environment;

  struct ObjectiveSection {
    Accumulation accumulation = Accumulation::geomean;
    Shaping shaping = Shaping::weibull;
    double c = 10.735;
    double k = 1.5;
    double lambda = 8.0;
    double beta = 0.1;
  } objective;

  struct Optimizer {
    Estimator estimator = Estimator::reinforce;
    int rollouts_per_step = 128;
    int steps = 400;
    double learning_rate = 0.25;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    bool parallel = false;
  } optimizer;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv"};  // subset of {csv, json}
  } output;

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& origin);

  nlohmann::json to_json() const;
  void validate() const;  // throws validation_error

  bool wants_json() const;

  /// Replaces the seed-bearing fields: prm.seed and the optimizer seed list
  /// (regenerated as seed, seed+1, ... keeping the configured count).
  void override_seed(std::uint64_t seed);
};

WeibullShaping make_weibull(const ExperimentConfig::ObjectiveSection& section);
Objective make_objective(const ExperimentConfig::ObjectiveSection& section);
OracleConfig make_oracle(const ExperimentConfig::Environment& section);
AblationSettings make_ablation_settings(const ExperimentConfig& config);

}  // namespace stepreward
