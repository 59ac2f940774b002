// Acceptance suite: exercises the project's headline guarantees end to end
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepreward/commands.hpp"
#include "stepreward/config.hpp"
#include "stepreward/policy_opt.hpp"
#include "stepreward/prm.hpp"
#include "stepreward/prm_io.hpp"
#include "stepreward/rng.hpp"
#include "stepreward/synthetic.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace stepreward;

namespace {

int g_failures = 0;

void criterion(int index, const std::string& name,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  if (!ok) ++g_failures;
  std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

// Independent long-double log-space route for the shaping curve.
double shaping_reference(double c, double k, double lambda, int t) {
  if (t == 0) {
    if (k > 1.0) return 0.0;
    if (k == 1.0) return c / lambda;
    return std::numeric_limits<double>::infinity();
  }
  const long double lc = std::log(static_cast<long double>(c));
  const long double lk = std::log(static_cast<long double>(k));
  const long double ll = std::log(static_cast<long double>(lambda));
  const long double lt = std::log(static_cast<long double>(t));
  const long double log_pdf_part = lc + lk - ll + (static_cast<long double>(k) - 1.0L) * (lt - ll);
  const long double hazard = std::exp(static_cast<long double>(k) * (lt - ll));
  return static_cast<double>(std::exp(log_pdf_part - hazard));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: shaping-curve reproduction.
// ---------------------------------------------------------------------------
bool shaping_curve(std::string& detail) {
  const WeibullShaping params{10.735, 1.5, 8.0};
  std::vector<double> curve;
  for (int t = 0; t <= 10; ++t) curve.push_back(weibull_shape(params, t));

  bool ok = curve[0] == 0.0;

  const std::size_t peak = std::max_element(curve.begin(), curve.end()) - curve.begin();
  ok = ok && peak == 4;
  ok = ok && std::abs(curve[4] - 0.9997) <= 1e-3;

  for (std::size_t t = 0; t + 1 <= peak; ++t) ok = ok && curve[t] < curve[t + 1];
  for (std::size_t t = peak; t + 1 < curve.size(); ++t) ok = ok && curve[t] > curve[t + 1];

  double worst_rel = 0.0;
  for (int t = 0; t <= 10; ++t) {
    const double want = shaping_reference(params.c, params.k, params.lambda, t);
    if (t == 0) {
      ok = ok && curve[0] == want;
    } else {
      worst_rel = std::max(worst_rel, std::abs(curve[t] - want) / std::abs(want));
    }
  }
  ok = ok && worst_rel <= 1e-9;
  detail = "peak t=" + std::to_string(peak) + ", value " + fmt(curve[4]) +
           ", worst rel vs independent eval " + fmt(worst_rel);
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: shaped training prefers longer chains (directional, p < 0.05).
// ---------------------------------------------------------------------------
bool step_count_shift(std::string& detail) {
  AblationSettings settings;  // the default environment and 5 default seeds
  const AblationReport report = ablation_run(settings);

  std::vector<double> diffs;
  for (std::size_t i = 0; i < report.seeds.size(); ++i) {
    diffs.push_back(report.weibull.per_seed_mean_steps[i] -
                    report.baseline.per_seed_mean_steps[i]);
  }
  const double p = testutil::paired_t_pvalue(diffs);
  const bool direction = report.weibull.mean_step_count > report.baseline.mean_step_count;
  detail = "mean steps " + fmt(report.weibull.mean_step_count) + " (shaped) vs " +
           fmt(report.baseline.mean_step_count) + " (baseline), one-sided p = " + fmt(p) +
           " over " + std::to_string(report.seeds.size()) + " seeds";
  return direction && p < 0.05;
}

// ---------------------------------------------------------------------------
// Criterion 3: product-accumulated reward declines with step count.
// ---------------------------------------------------------------------------
bool reward_decline(std::string& detail) {
  Objective objective;
  objective.accumulation = Accumulation::product;
  objective.shaping = Shaping::none;
  objective.beta = 0.0;
  const OracleConfig noiseless{0.0, 0.0, 1};  // constant step score
  const auto rewards = exact_reward_by_length(objective, noiseless, 0.9, 10);

  bool ok = true;
  for (std::size_t t = 1; t < rewards.size(); ++t) ok = ok && rewards[t] < rewards[t - 1];
  for (std::size_t t = 3; t < rewards.size(); ++t) ok = ok && rewards[t] < rewards[2];
  detail = "r(1)=" + fmt(rewards[0]) + ", r(3)=" + fmt(rewards[2]) + ", r(10)=" + fmt(rewards[9]);
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: analytic policy gradient vs central finite differences.
// ---------------------------------------------------------------------------
bool gradient_correctness(std::string& detail) {
  const OracleConfig noiseless{0.0, 0.3, 1};
  PolicyParams policy;
  policy.length_logits = {0.3, -0.2, 0.1, 0.0};
  policy.quality_param = 1.2;
  const PolicyParams reference = PolicyParams::uniform(4, 1.2);

  Objective shaped;
  shaped.accumulation = Accumulation::geomean;
  shaped.shaping = Shaping::weibull;
  shaped.beta = 0.1;
  Objective plain;
  plain.accumulation = Accumulation::product;
  plain.shaping = Shaping::none;
  plain.beta = 0.1;

  double worst = 0.0;
  for (const Objective& objective : {shaped, plain}) {
    const PolicyGradient grad = exact_objective_gradient(objective, noiseless, policy, reference);
    for (std::size_t i = 0; i < policy.length_logits.size(); ++i) {
      const double fd = testutil::central_difference(
          [&](double z) {
            PolicyParams perturbed = policy;
            perturbed.length_logits[i] = z;
            return exact_objective(objective, noiseless, perturbed, reference);
          },
          policy.length_logits[i]);
      worst = std::max(worst, testutil::relative_error(grad.length_logits[i], fd));
    }
    const double fd_quality = testutil::central_difference(
        [&](double qp) {
          PolicyParams perturbed = policy;
          perturbed.quality_param = qp;
          return exact_objective(objective, noiseless, perturbed, reference);
        },
        policy.quality_param);
    worst = std::max(worst, testutil::relative_error(grad.quality_param, fd_quality));
  }
  detail = "worst relative deviation " + fmt(worst) + " (tolerance 1e-3)";
  return worst <= 1e-3;
}

// ---------------------------------------------------------------------------
// Criterion 5: scorer training on the bundled separable dataset.
// ---------------------------------------------------------------------------
bool prm_training(std::string& detail) {
  const auto dataset = make_cluster_dataset(ClusterDatasetSpec{});
  if (dataset.size() != 300) {
    detail = "bundled dataset is not 300 points";
    return false;
  }
  const ExperimentConfig defaults;
  std::vector<EpochMetrics> history;
  const ClassifierParams trained =
      train(dataset, defaults.prm.epochs, defaults.prm.learning_rate, defaults.prm.seed, &history);
  const double final_accuracy = accuracy(trained, dataset);
  const double final_loss = mean_loss(trained, dataset);

  // analytic vs finite-difference gradients at the starting point
  const ClassifierParams start = initial_params(3, defaults.prm.seed);
  const LossGradient grad = loss_gradient(start, dataset);
  double worst = 0.0;
  for (std::size_t i = 0; i < start.weights.size(); ++i) {
    const double fd = testutil::central_difference(
        [&](double w) {
          ClassifierParams perturbed = start;
          perturbed.weights[i] = w;
          return mean_loss(perturbed, dataset);
        },
        start.weights[i]);
    worst = std::max(worst, testutil::relative_error(grad.weights[i], fd));
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double fd = testutil::central_difference(
        [&](double b) {
          ClassifierParams perturbed = start;
          perturbed.biases[c] = b;
          return mean_loss(perturbed, dataset);
        },
        start.biases[c]);
    worst = std::max(worst, testutil::relative_error(grad.biases[c], fd));
  }

  detail = "accuracy " + fmt(final_accuracy) + ", mean CE " + fmt(final_loss) +
           ", worst gradient deviation " + fmt(worst);
  return final_accuracy >= 0.95 && final_loss < 0.2 && worst <= 1e-4;
}

// ---------------------------------------------------------------------------
// Criterion 6: formula unit suite over 1000 randomized instances each.
// ---------------------------------------------------------------------------
bool formula_suite(std::string& detail) {
  Rng rng(60601);
  bool ok = true;

  // softmax normalization and shift invariance
  for (int i = 0; i < 1000 && ok; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 6);
    std::vector<double> logits, shifted;
    const double shift = rng.uniform(-40.0, 40.0);
    for (int j = 0; j < n; ++j) {
      logits.push_back(rng.uniform(-25.0, 25.0));
      shifted.push_back(logits.back() + shift);
    }
    const auto p = softmax(logits);
    const auto q = softmax(shifted);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      sum += p[j];
      ok = ok && p[j] > 0.0 && std::abs(p[j] - q[j]) < 1e-12;
    }
    ok = ok && std::abs(sum - 1.0) < 1e-9;
  }
  if (!ok) {
    detail = "softmax properties violated";
    return false;
  }

  // cross-entropy trivial cases
  ok = cross_entropy_loss(ClassProbabilities{0.0, 0.0, 1.0}, 1) == 0.0;
  const double third = 1.0 / 3.0;
  for (int label : {-1, 0, 1}) {
    ok = ok && std::abs(cross_entropy_loss(ClassProbabilities{third, third, third}, label) -
                        std::log(3.0)) < 1e-12;
  }
  if (!ok) {
    detail = "cross-entropy trivial cases violated";
    return false;
  }

  // Bradley-Terry symmetry
  for (int i = 0; i < 1000 && ok; ++i) {
    const double a = rng.uniform(-30.0, 30.0);
    const double b = rng.uniform(-30.0, 30.0);
    ok = std::abs(bradley_terry_preference(a, b) + bradley_terry_preference(b, a) - 1.0) <= 1e-12;
  }
  if (!ok) {
    detail = "Bradley-Terry symmetry violated";
    return false;
  }

  // geomean >= product, and geomean of constants is the constant
  for (int i = 0; i < 1000 && ok; ++i) {
    const int t = 1 + static_cast<int>(rng.uniform01() * 10);
    std::vector<StepScore> scores;
    for (int j = 0; j < t; ++j) scores.emplace_back(rng.uniform01());
    ok = accumulate_geomean(scores) >= accumulate_product(scores) - 1e-15;
    const double c = rng.uniform(0.01, 1.0);
    const std::vector<StepScore> constant(static_cast<std::size_t>(t), StepScore(c));
    ok = ok && std::abs(accumulate_geomean(constant) - c) < 1e-12;
  }
  if (!ok) {
    detail = "accumulation inequalities violated";
    return false;
  }
  detail = "softmax, cross-entropy, Bradley-Terry, accumulation: 1000 instances each";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 7: CLI determinism, byte for byte.
// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STEPREWARD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& detail) {
  std::map<std::string, fs::path> files_a, files_b;
  for (const auto& entry : fs::directory_iterator(a)) {
    files_a[entry.path().filename().string()] = entry.path();
  }
  for (const auto& entry : fs::directory_iterator(b)) {
    files_b[entry.path().filename().string()] = entry.path();
  }
  if (files_a.size() != files_b.size() || files_a.empty()) {
    detail = "output file sets differ under " + a.string();
    return false;
  }
  for (const auto& [name, path] : files_a) {
    if (!files_b.count(name)) {
      detail = "missing " + name;
      return false;
    }
    if (!testutil::same_bytes(path, files_b[name])) {
      detail = name + " differs between reruns";
      return false;
    }
  }
  return true;
}

bool cli_determinism(std::string& detail) {
  const fs::path root = fs::temp_directory_path() / "stepreward_acceptance";
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);

  const fs::path data = root / "steps.jsonl";
  if (run_cli("gen-dataset --out " + (root / "gen_a.jsonl").string()) != 0 ||
      run_cli("gen-dataset --out " + (root / "gen_b.jsonl").string()) != 0) {
    detail = "gen-dataset failed";
    return false;
  }
  if (!testutil::same_bytes(root / "gen_a.jsonl", root / "gen_b.jsonl")) {
    detail = "gen-dataset outputs differ";
    return false;
  }
  fs::copy_file(root / "gen_a.jsonl", data);

  ExperimentConfig config;
  config.prm.dataset = data.string();
  config.prm.epochs = 120;
  config.optimizer.steps = 40;
  config.optimizer.rollouts_per_step = 16;
  config.optimizer.seeds = {1, 2, 3};
  config.output.directory = (root / "default_out").string();
  config.output.formats = {"csv", "json"};
  const fs::path config_path = root / "config.json";
  {
    std::ofstream out(config_path, std::ios::binary);
    out << config.to_json().dump(2) << "\n";
  }

  const std::string base = "--config " + config_path.string();
  struct Verb {
    std::string name;
    std::string extra;
  };
  const fs::path model_dir = root / "model";
  if (run_cli("train-prm " + base + " --out " + model_dir.string()) != 0) {
    detail = "train-prm failed";
    return false;
  }
  const std::vector<Verb> verbs = {
      {"train-prm", ""},
      {"shape-curve", ""},
      {"ablation", ""},
      {"score", " --model " + (model_dir / "prm_model.json").string()},
  };
  for (const Verb& verb : verbs) {
    const fs::path out_a = root / (verb.name + "_a");
    const fs::path out_b = root / (verb.name + "_b");
    if (run_cli(verb.name + " " + base + verb.extra + " --out " + out_a.string()) != 0 ||
        run_cli(verb.name + " " + base + verb.extra + " --out " + out_b.string()) != 0) {
      detail = verb.name + " exited nonzero";
      return false;
    }
    if (!dirs_identical(out_a, out_b, detail)) {
      detail = verb.name + ": " + detail;
      return false;
    }
  }
  detail = "gen-dataset, train-prm, shape-curve, ablation, score all byte-identical";
  return true;
}

}  // namespace

int main() {
  criterion(1, "shaping curve: zero at origin, peak 0.9997 at t=4, matches independent eval",
            shaping_curve);
  criterion(2, "shaped policies take more steps than product baselines (5 seeds, p < 0.05)",
            step_count_shift);
  criterion(3, "product-accumulated reward strictly declines with step count", reward_decline);
  criterion(4, "policy gradient matches finite differences of the enumerated objective",
            gradient_correctness);
  criterion(5, "scorer reaches 95% / CE < 0.2 on the bundled dataset with exact gradients",
            prm_training);
  criterion(6, "formula unit suite holds on 1000 randomized instances each", formula_suite);
  criterion(7, "every CLI command is byte-identical across reruns", cli_determinism);

  if (g_failures == 0) {
    std::printf("all %d acceptance criteria passed\n", 7);
  } else {
    std::printf("%d of 7 acceptance criteria FAILED\n", g_failures);
  }
  return g_failures;
}
