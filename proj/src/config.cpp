#include "stepreward/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "stepreward/errors.hpp"

namespace stepreward {

using nlohmann::json;

namespace {

/// Checked cursor into one config section; rejects unknown keys and wrong
/// types with messages that name the offending path.
class Section {
 public:
  Section(const json& j, std::string origin, std::string name)
      : j_(j), prefix_(std::move(origin) + ": " + std::move(name) + ".") {
    if (!j_.is_object()) fail("", "must be an object");
  }

  ~Section() = default;

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) fail(item.key(), "is not a recognized key");
    }
  }

  template <typename T>
  void number(const char* key, T& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_number()) fail(key, "must be a number");
    out = j_[key].get<T>();
  }

  void integer(const char* key, int& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_number_integer()) fail(key, "must be an integer");
    out = j_[key].get<int>();
  }

  void unsigned64(const char* key, std::uint64_t& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_number_unsigned() && !j_[key].is_number_integer()) {
      fail(key, "must be a non-negative integer");
    }
    if (j_[key].is_number_integer() && j_[key].get<std::int64_t>() < 0) {
      fail(key, "must be non-negative");
    }
    out = j_[key].get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_boolean()) fail(key, "must be a boolean");
    out = j_[key].get<bool>();
  }

  void string(const char* key, std::string& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_string()) fail(key, "must be a string");
    out = j_[key].get<std::string>();
  }

  void string_list(const char* key, std::vector<std::string>& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_array()) fail(key, "must be an array of strings");
    out.clear();
    for (const auto& v : j_[key]) {
      if (!v.is_string()) fail(key, "must be an array of strings");
      out.push_back(v.get<std::string>());
    }
  }

  void seed_list(const char* key, std::vector<std::uint64_t>& out) const {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_[key].is_array()) fail(key, "must be an array of seeds");
    out.clear();
    for (const auto& v : j_[key]) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        fail(key, "must contain non-negative integers");
      }
      out.push_back(v.get<std::uint64_t>());
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw validation_error(prefix_ + key + " " + what);
  }

 private:
  const json& j_;
  std::string prefix_;
  mutable std::set<std::string> seen_;
};

Accumulation parse_accumulation(const std::string& s, const Section& section) {
  if (s == "product") return Accumulation::product;
  if (s == "geomean") return Accumulation::geomean;
  section.fail("accumulation", "must be \"product\" or \"geomean\"");
}

Shaping parse_shaping(const std::string& s, const Section& section) {
  if (s == "none") return Shaping::none;
  if (s == "weibull") return Shaping::weibull;
  section.fail("shaping", "must be \"none\" or \"weibull\"");
}

Estimator parse_estimator(const std::string& s, const Section& section) {
  if (s == "reinforce") return Estimator::reinforce;
  if (s == "ppo_clip") return Estimator::ppo_clip;
  section.fail("estimator", "must be \"reinforce\" or \"ppo_clip\"");
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw validation_error(path.string() + ": invalid JSON");
  return from_json(j, path.string());
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::string& origin) {
  if (!j.is_object()) throw validation_error(origin + ": config must be a JSON object");
  static const std::set<std::string> kSections = {"prm", "environment", "objective", "optimizer",
                                                  "output"};
  for (const auto& item : j.items()) {
    if (!kSections.count(item.key())) {
      throw validation_error(origin + ": \"" + item.key() + "\" is not a recognized section");
    }
  }

  ExperimentConfig config;
  if (j.contains("prm")) {
    Section s(j["prm"], origin, "prm");
    s.string("dataset", config.prm.dataset);
    s.integer("epochs", config.prm.epochs);
    s.number("learning_rate", config.prm.learning_rate);
    s.unsigned64("seed", config.prm.seed);
    s.integer("replication_factor", config.prm.replication_factor);
    s.finish();
  }
  if (j.contains("environment")) {
    Section s(j["environment"], origin, "environment");
    s.integer("t_max", config.environment.t_max);
    s.number("noise_scale", config.environment.noise_scale);
    s.number("difficulty_per_step", config.environment.difficulty_per_step);
    s.unsigned64("oracle_seed", config.environment.oracle_seed);
    s.number("initial_quality", config.environment.initial_quality);
    s.finish();
  }
  if (j.contains("objective")) {
    Section s(j["objective"], origin, "objective");
    std::string accumulation = to_string(config.objective.accumulation);
    std::string shaping = to_string(config.objective.shaping);
    s.string("accumulation", accumulation);
    s.string("shaping", shaping);
    config.objective.accumulation = parse_accumulation(accumulation, s);
    config.objective.shaping = parse_shaping(shaping, s);
    s.number("c", config.objective.c);
    s.number("k", config.objective.k);
    s.number("lambda", config.objective.lambda);
    s.number("beta", config.objective.beta);
    s.finish();
  }
  if (j.contains("optimizer")) {
    Section s(j["optimizer"], origin, "optimizer");
    std::string estimator = to_string(config.optimizer.estimator);
    s.string("estimator", estimator);
    config.optimizer.estimator = parse_estimator(estimator, s);
    s.integer("rollouts_per_step", config.optimizer.rollouts_per_step);
    s.integer("steps", config.optimizer.steps);
    s.number("learning_rate", config.optimizer.learning_rate);
    s.seed_list("seeds", config.optimizer.seeds);
    s.boolean("parallel", config.optimizer.parallel);
    s.finish();
  }
  if (j.contains("output")) {
    Section s(j["output"], origin, "output");
    s.string("directory", config.output.directory);
    s.string_list("formats", config.output.formats);
    s.finish();
  }
  config.validate();
  return config;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw validation_error(std::string("config: ") + what);
  };
  require(prm.epochs >= 1, "prm.epochs must be >= 1");
  require(prm.learning_rate > 0.0, "prm.learning_rate must be > 0");
  require(prm.replication_factor >= 1, "prm.replication_factor must be >= 1");
  require(!prm.dataset.empty(), "prm.dataset must not be empty");
  require(environment.t_max >= 1, "environment.t_max must be >= 1");
  require(environment.noise_scale >= 0.0, "environment.noise_scale must be >= 0");
  require(environment.difficulty_per_step >= 0.0 && environment.difficulty_per_step <= 1.0,
          "environment.difficulty_per_step must be in [0, 1]");
  require(std::isfinite(environment.initial_quality),
          "environment.initial_quality must be finite");
  require(objective.c > 0.0 && objective.k > 0.0 && objective.lambda > 0.0,
          "objective.c, .k, .lambda must all be > 0");
  require(objective.beta >= 0.0, "objective.beta must be >= 0");
  require(optimizer.rollouts_per_step >= 1, "optimizer.rollouts_per_step must be >= 1");
  require(optimizer.steps >= 1, "optimizer.steps must be >= 1");
  require(optimizer.learning_rate > 0.0, "optimizer.learning_rate must be > 0");
  require(!optimizer.seeds.empty(), "optimizer.seeds must not be empty");
  require(!output.directory.empty(), "output.directory must not be empty");
  require(!output.formats.empty(), "output.formats must not be empty");
  for (const std::string& f : output.formats) {
    require(f == "csv" || f == "json", "output.formats entries must be \"csv\" or \"json\"");
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["prm"] = {{"dataset", prm.dataset},
              {"epochs", prm.epochs},
              {"learning_rate", prm.learning_rate},
              {"seed", prm.seed},
              {"replication_factor", prm.replication_factor}};
  j["environment"] = {{"t_max", environment.t_max},
                      {"noise_scale", environment.noise_scale},
                      {"difficulty_per_step", environment.difficulty_per_step},
                      {"oracle_seed", environment.oracle_seed},
                      {"initial_quality", environment.initial_quality}};
  j["objective"] = {{"accumulation", to_string(objective.accumulation)},
                    {"shaping", to_string(objective.shaping)},
                    {"c", objective.c},
                    {"k", objective.k},
                    {"lambda", objective.lambda},
                    {"beta", objective.beta}};
  j["optimizer"] = {{"estimator", to_string(optimizer.estimator)},
                    {"rollouts_per_step", optimizer.rollouts_per_step},
                    {"steps", optimizer.steps},
                    {"learning_rate", optimizer.learning_rate},
                    {"seeds", optimizer.seeds},
                    {"parallel", optimizer.parallel}};
  j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
  return j;
}

bool ExperimentConfig::wants_json() const {
  return std::find(output.formats.begin(), output.formats.end(), "json") != output.formats.end();
}

void ExperimentConfig::override_seed(std::uint64_t seed) {
  prm.seed = seed;
  for (std::size_t i = 0; i < optimizer.seeds.size(); ++i) {
    optimizer.seeds[i] = seed + i;
  }
}

WeibullShaping make_weibull(const ExperimentConfig::ObjectiveSection& section) {
  return WeibullShaping{section.c, section.k, section.lambda};
}

Objective make_objective(const ExperimentConfig::ObjectiveSection& section) {
  Objective objective;
  objective.accumulation = section.accumulation;
  objective.shaping = section.shaping;
  objective.weibull = make_weibull(section);
  objective.beta = section.beta;
  return objective;
}

OracleConfig make_oracle(const ExperimentConfig::Environment& section) {
  return OracleConfig{section.noise_scale, section.difficulty_per_step, section.oracle_seed};
}

AblationSettings make_ablation_settings(const ExperimentConfig& config) {
  AblationSettings settings;
  settings.beta = config.objective.beta;
  settings.epochs = config.optimizer.steps;
  settings.seeds = config.optimizer.seeds;
  settings.t_max = config.environment.t_max;
  settings.oracle = make_oracle(config.environment);
  settings.initial_quality_param = config.environment.initial_quality;
  settings.rollouts_per_step = config.optimizer.rollouts_per_step;
  settings.learning_rate = config.optimizer.learning_rate;
  settings.estimator = config.optimizer.estimator;
  settings.weibull = make_weibull(config.objective);
  settings.parallel = config.optimizer.parallel;
  return settings;
}

}  // namespace stepreward
