#include "stepreward/prm_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stepreward/errors.hpp"
#include "stepreward/numeric.hpp"

namespace stepreward {

using nlohmann::json;

namespace {

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw validation_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

json parse_line(const std::filesystem::path& path, std::size_t line_no, const std::string& line) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    line_error(path, line_no, "not a JSON object");
  }
  return record;
}

std::vector<double> read_features(const std::filesystem::path& path, std::size_t line_no,
                                  const json& record, std::size_t expected_dim) {
  if (!record.contains("features") || !record["features"].is_array()) {
    line_error(path, line_no, "missing \"features\" array");
  }
  std::vector<double> features;
  features.reserve(record["features"].size());
  for (const auto& v : record["features"]) {
    if (!v.is_number()) line_error(path, line_no, "non-numeric feature value");
    features.push_back(v.get<double>());
  }
  if (features.size() != expected_dim) {
    line_error(path, line_no,
               "feature vector has length " + std::to_string(features.size()) + ", header says " +
                   std::to_string(expected_dim));
  }
  if (!all_finite(features)) line_error(path, line_no, "non-finite feature value");
  return features;
}

/// Shared walk over a dataset file; `with_label` demands label fields.
template <typename OnRecord>
void for_each_record(const std::filesystem::path& path, bool with_label, OnRecord&& on_record) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open dataset file: " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json record = parse_line(path, line_no, line);
    if (!have_header) {
      if (!record.contains("d") || !record["d"].is_number_unsigned() || record["d"] == 0) {
        line_error(path, line_no, "expected header record {\"d\": N} with N >= 1");
      }
      if (record.size() != 1) line_error(path, line_no, "header record has extra keys");
      dim = record["d"].get<std::size_t>();
      have_header = true;
      continue;
    }
    for (const auto& item : record.items()) {
      if (item.key() != "features" && item.key() != "label") {
        line_error(path, line_no, "unknown key \"" + item.key() + "\"");
      }
    }
    int label = 0;
    if (record.contains("label")) {
      if (!record["label"].is_number_integer()) line_error(path, line_no, "label is not an integer");
      label = record["label"].get<int>();
      if (label < -1 || label > 1) {
        line_error(path, line_no, "label " + std::to_string(label) + " not in {-1, 0, 1}");
      }
    } else if (with_label) {
      line_error(path, line_no, "missing \"label\"");
    }
    on_record(read_features(path, line_no, record, dim), label);
  }
  if (!have_header) throw validation_error(path.string() + ": empty dataset (no header record)");
}

}  // namespace

std::vector<LabeledStep> load_step_dataset(const std::filesystem::path& path) {
  std::vector<LabeledStep> dataset;
  for_each_record(path, /*with_label=*/true, [&](std::vector<double> features, int label) {
    dataset.push_back(LabeledStep{std::move(features), label});
  });
  if (dataset.empty()) throw validation_error(path.string() + ": dataset has no step records");
  return dataset;
}

std::vector<std::vector<double>> load_feature_records(const std::filesystem::path& path) {
  std::vector<std::vector<double>> records;
  for_each_record(path, /*with_label=*/false,
                  [&](std::vector<double> features, int) { records.push_back(std::move(features)); });
  if (records.empty()) throw validation_error(path.string() + ": no feature records");
  return records;
}

void save_step_dataset(const std::filesystem::path& path,
                       const std::vector<LabeledStep>& dataset) {
  if (dataset.empty()) throw validation_error("refusing to write an empty dataset");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write dataset file: " + path.string());
  out << json{{"d", dataset.front().features.size()}}.dump() << "\n";
  for (const LabeledStep& step : dataset) {
    out << json{{"features", step.features}, {"label", step.label}}.dump() << "\n";
  }
}

void save_model(const std::filesystem::path& path, const ClassifierParams& params) {
  params.validate();
  json model;
  model["class_order"] = kClassOrder;
  model["dim"] = params.dim;
  model["seed"] = params.seed;
  model["weights"] = params.weights;
  model["biases"] = params.biases;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write model file: " + path.string());
  out << model.dump(2) << "\n";
}

ClassifierParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open model file: " + path.string());
  json model = json::parse(in, nullptr, false);
  if (model.is_discarded() || !model.is_object()) {
    throw validation_error(path.string() + ": not a JSON object");
  }
  for (const char* key : {"class_order", "dim", "seed", "weights", "biases"}) {
    if (!model.contains(key)) {
      throw validation_error(path.string() + ": missing key \"" + key + "\"");
    }
  }
  const auto order = model["class_order"].get<std::vector<std::string>>();
  if (order.size() != kNumClasses || order[0] != kClassOrder[0] || order[1] != kClassOrder[1] ||
      order[2] != kClassOrder[2]) {
    throw validation_error(path.string() + ": unexpected class_order");
  }
  ClassifierParams params;
  params.dim = model["dim"].get<std::size_t>();
  params.seed = model["seed"].get<std::uint64_t>();
  params.weights = model["weights"].get<std::vector<double>>();
  const auto biases = model["biases"].get<std::vector<double>>();
  if (biases.size() != kNumClasses) {
    throw validation_error(path.string() + ": biases must have 3 entries");
  }
  std::copy(biases.begin(), biases.end(), params.biases.begin());
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw validation_error(path.string() + ": " + e.what());
  }
  return params;
}

}  // namespace stepreward
