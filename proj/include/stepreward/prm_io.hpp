#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stepreward/prm.hpp"

namespace stepreward {

/// Step dataset files are line-delimited JSON: a header record {"d": N}
/// followed by one {"features": [...], "label": -1|0|1} record per step.
/// Any malformed line is a hard error naming the file and line number.
std::vector<LabeledStep> load_step_dataset(const std::filesystem::path& path);

void save_step_dataset(const std::filesystem::path& path, const std::vector<LabeledStep>& dataset);

/// Feature-only variant for scoring: label fields are optional and ignored.
std::vector<std::vector<double>> load_feature_records(const std::filesystem::path& path);

/// Trained-model files are a single JSON object: weights (3 x d, row-major),
/// biases, class_order, dim, and the training seed. Byte-stable: the same
/// params always serialize to the same bytes.
void save_model(const std::filesystem::path& path, const ClassifierParams& params);

ClassifierParams load_model(const std::filesystem::path& path);

}  // namespace stepreward
