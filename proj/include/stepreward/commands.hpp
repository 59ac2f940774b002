#pragma once

#include <filesystem>
#include <functional>

#include "stepreward/config.hpp"
#include "stepreward/synthetic.hpp"

namespace stepreward {

/// Command bodies shared by the CLI and the tests. Each writes its outputs
/// plus effective_config.json under out_dir and throws on failure.

void run_train_prm(const ExperimentConfig& config, const std::filesystem::path& out_dir);

void run_shape_curve(const ExperimentConfig& config, const std::filesystem::path& out_dir);

void run_ablation(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Scores every record of `input` (defaults to prm.dataset) with the model at
/// `model` (defaults to <output.directory>/prm_model.json).
void run_score(const ExperimentConfig& config, const std::filesystem::path& out_dir,
               std::filesystem::path model = {}, std::filesystem::path input = {});

void run_gen_dataset(const ClusterDatasetSpec& spec, const std::filesystem::path& out_file);

/// Runs a command body and maps failures onto the CLI exit-code contract:
/// 0 ok, 1 validation error, 2 numerical error.
int run_guarded(const std::function<void()>& body);

}  // namespace stepreward
