#include "stepreward/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "stepreward/csv.hpp"
#include "stepreward/errors.hpp"
#include "stepreward/prm_io.hpp"

namespace stepreward {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void prepare_out_dir(const ExperimentConfig& config, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw validation_error("cannot create output directory: " + out_dir.string());
  std::ofstream out(out_dir / "effective_config.json", std::ios::binary);
  if (!out) throw validation_error("cannot write effective config in " + out_dir.string());
  out << config.to_json().dump(2) << "\n";
}

double checked(double v, const char* context) {
  if (!std::isfinite(v)) {
    throw numerical_error(std::string("non-finite value in ") + context);
  }
  return v;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write output file: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace

void run_train_prm(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  prepare_out_dir(config, out_dir);

  std::vector<LabeledStep> dataset = load_step_dataset(config.prm.dataset);
  if (config.prm.replication_factor > 1) {
    dataset = balance_dataset(dataset, config.prm.replication_factor);
  }

  std::vector<EpochMetrics> history;
  const ClassifierParams params =
      train(dataset, config.prm.epochs, config.prm.learning_rate, config.prm.seed, &history);

  save_model(out_dir / "prm_model.json", params);

  CsvWriter csv(out_dir / "prm_metrics.csv", "epoch,mean_loss,accuracy");
  for (std::size_t e = 0; e < history.size(); ++e) {
    csv.row(e + 1, history[e].mean_loss, history[e].accuracy);
  }

  if (config.wants_json()) {
    json metrics = json::array();
    for (std::size_t e = 0; e < history.size(); ++e) {
      metrics.push_back({{"epoch", e + 1},
                         {"mean_loss", checked(history[e].mean_loss, "prm_metrics.json")},
                         {"accuracy", checked(history[e].accuracy, "prm_metrics.json")}});
    }
    write_json_file(out_dir / "prm_metrics.json", metrics);
  }
}

void run_shape_curve(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  prepare_out_dir(config, out_dir);
  const WeibullShaping shaping = make_weibull(config.objective);

  CsvWriter csv(out_dir / "shape_curve.csv", "t,shape");
  json rows = json::array();
  for (int t = 0; t <= config.environment.t_max; ++t) {
    const double value = weibull_shape(shaping, t);
    csv.row(t, value);
    if (config.wants_json()) {
      rows.push_back({{"t", t}, {"shape", checked(value, "shape_curve.json")}});
    }
  }
  if (config.wants_json()) write_json_file(out_dir / "shape_curve.json", rows);
}

void run_ablation(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  if (config.optimizer.seeds.size() < 3) {
    throw validation_error("ablation needs at least 3 optimizer.seeds, got " +
                           std::to_string(config.optimizer.seeds.size()));
  }
  prepare_out_dir(config, out_dir);

  const AblationReport report = ablation_run(make_ablation_settings(config));

  CsvWriter summary(out_dir / "summary.csv", "config,mean_step_count,mean_reward");
  for (const AblationConfigResult* result : {&report.baseline, &report.weibull}) {
    summary.row(result->name, result->mean_step_count, result->mean_reward);
  }

  for (const AblationConfigResult* result : {&report.baseline, &report.weibull}) {
    CsvWriter hist(out_dir / ("hist_" + result->name + ".csv"), "t,probability");
    for (std::size_t i = 0; i < result->length_histogram.size(); ++i) {
      hist.row(i + 1, result->length_histogram[i]);
    }
    CsvWriter rbs(out_dir / ("reward_by_steps_" + result->name + ".csv"), "t,mean_reward");
    for (std::size_t i = 0; i < result->reward_by_steps.size(); ++i) {
      rbs.row(i + 1, result->reward_by_steps[i]);
    }
  }

  if (config.wants_json()) {
    json j;
    j["epochs"] = report.epochs;
    j["beta"] = checked(report.beta, "summary.json");
    j["seeds"] = report.seeds;
    for (const AblationConfigResult* result : {&report.baseline, &report.weibull}) {
      json c;
      c["mean_step_count"] = checked(result->mean_step_count, "summary.json");
      c["mean_reward"] = checked(result->mean_reward, "summary.json");
      c["per_seed_mean_steps"] = result->per_seed_mean_steps;
      c["length_histogram"] = result->length_histogram;
      c["reward_by_steps"] = result->reward_by_steps;
      j["configs"][result->name] = std::move(c);
    }
    write_json_file(out_dir / "summary.json", j);
  }
}

void run_score(const ExperimentConfig& config, const fs::path& out_dir, fs::path model,
               fs::path input) {
  config.validate();
  if (model.empty()) model = fs::path(config.output.directory) / "prm_model.json";
  if (input.empty()) input = config.prm.dataset;
  prepare_out_dir(config, out_dir);

  const ClassifierParams params = load_model(model);
  const auto records = load_feature_records(input);

  CsvWriter csv(out_dir / "scores.csv", "index,step_reward");
  json rows = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].size() != params.dim) {
      throw validation_error(input.string() + ": record " + std::to_string(i + 1) +
                             " has feature length " + std::to_string(records[i].size()) +
                             ", model expects " + std::to_string(params.dim));
    }
    const double score = step_reward(params, records[i]).value;
    csv.row(i, score);
    if (config.wants_json()) {
      rows.push_back({{"index", i}, {"step_reward", checked(score, "scores.json")}});
    }
  }
  if (config.wants_json()) write_json_file(out_dir / "scores.json", rows);
}

void run_gen_dataset(const ClusterDatasetSpec& spec, const fs::path& out_file) {
  if (out_file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out_file.parent_path(), ec);
    if (ec) {
      throw validation_error("cannot create directory: " + out_file.parent_path().string());
    }
  }
  save_step_dataset(out_file, make_cluster_dataset(spec));
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stepreward
