#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stepreward/chain_env.hpp"
#include "stepreward/reward_math.hpp"

namespace stepreward {

enum class Accumulation { product, geomean };
enum class Shaping { none, weibull };
enum class Estimator { reinforce, ppo_clip };

/// Chain-level objective: how per-step scores are accumulated, the optional
/// shaping factor applied to the accumulated value, and the KL coefficient.
/// (product, none) is the prior-practice baseline; (geomean, weibull) is the
/// shaped configuration this project is about.
struct Objective {
  Accumulation accumulation = Accumulation::geomean;
  Shaping shaping = Shaping::weibull;
  WeibullShaping weibull{};
  double beta = 0.1;

  void validate() const;
};

/// Optimization state. `reference` is a frozen copy of the initial policy and
/// never mutates; `baseline` is a running mean of rewards used for variance
/// reduction only.
struct OptState {
  PolicyParams policy;
  PolicyParams reference;
  int iteration = 0;
  double baseline = 0.0;

  static OptState init(const PolicyParams& initial) {
    return OptState{initial, initial, 0, 0.0};
  }
};

/// Accumulates step scores into one chain reward under the objective,
/// applying the shaping factor at the chain's step count.
double chain_reward(const Objective& objective, std::span<const StepScore> scores);

/// Exact KL divergence between the categorical length distributions,
/// KL(policy || reference). Zero iff the distributions coincide.
double kl_length(const PolicyParams& policy, const PolicyParams& reference);

/// Monte-Carlo estimate of E[chain reward] minus beta * KL (KL exact, not
/// sampled). Deterministic given the seed.
double objective_estimate(const Objective& objective, const OracleConfig& oracle,
                          const OptState& state, int n_rollouts, std::uint64_t seed);

/// One REINFORCE-with-baseline ascent step. Length logits move along the
/// score-function gradient; the shared quality parameter moves along the
/// pathwise derivative of the reward through the oracle's clamped-linear
/// scores (its log-probability gradient is identically zero). The exact KL
/// gradient is subtracted with weight beta.
OptState policy_gradient_step(const Objective& objective, const OracleConfig& oracle,
                              OptState state, int n_rollouts, double learning_rate,
                              std::uint64_t seed);

/// Clipped-surrogate variant behind the same interface: a few full-batch
/// inner iterations on the sampled rollouts with ratio clip 0.2. Whole-chain
/// returns only; no value network or minibatching.
OptState ppo_clip_step(const Objective& objective, const OracleConfig& oracle, OptState state,
                       int n_rollouts, double learning_rate, std::uint64_t seed);

OptState optimizer_step(Estimator estimator, const Objective& objective,
                        const OracleConfig& oracle, OptState state, int n_rollouts,
                        double learning_rate, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Exact enumeration over the length distribution. These require a noiseless
// oracle; they are the slow-but-checkable route the sampled estimators are
// verified against.
// ---------------------------------------------------------------------------

/// Reward of a length-t chain under noise-free oracle scores, for t = 1..t_max.
std::vector<double> exact_reward_by_length(const Objective& objective, const OracleConfig& oracle,
                                           double quality, int t_max);

/// sum_t pi(t) * reward(t).
double exact_expected_reward(const Objective& objective, const OracleConfig& oracle,
                             const PolicyParams& policy);

/// exact_expected_reward minus beta * KL(policy || reference).
double exact_objective(const Objective& objective, const OracleConfig& oracle,
                       const PolicyParams& policy, const PolicyParams& reference);

struct PolicyGradient {
  std::vector<double> length_logits;
  double quality_param = 0.0;
};

/// Analytic gradient of exact_objective: score-function form over the
/// enumerated lengths plus the pathwise quality term and the exact KL term.
PolicyGradient exact_objective_gradient(const Objective& objective, const OracleConfig& oracle,
                                        const PolicyParams& policy,
                                        const PolicyParams& reference);

/// Smallest step count attaining the maximal enumerated reward.
int exact_argmax_length(const Objective& objective, const OracleConfig& oracle, double quality,
                        int t_max);

// ---------------------------------------------------------------------------
// Shaped-vs-unshaped ablation.
// ---------------------------------------------------------------------------

struct AblationSettings {
  double beta = 0.1;
  int epochs = 400;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int t_max = kDefaultTMax;
  OracleConfig oracle{};
  double initial_quality_param = 2.0;
  int rollouts_per_step = 128;
  double learning_rate = 0.25;
  Estimator estimator = Estimator::reinforce;
  WeibullShaping weibull{};
  int eval_rollouts_per_length = 200;
  bool parallel = false;
};

/// Results for one objective configuration, aggregated over seeds.
struct AblationConfigResult {
  std::string name;
  std::vector<double> per_seed_mean_steps;  // expected step count of each trained policy
  double mean_step_count = 0.0;             // mean of the above
  double mean_reward = 0.0;                 // expected chain reward under the trained policies
  std::vector<double> length_histogram;     // final length distribution, mean over seeds
  std::vector<double> reward_by_steps;      // mean chain reward at each forced length
};

struct AblationReport {
  AblationConfigResult baseline;  // product accumulation, no shaping
  AblationConfigResult weibull;   // geomean accumulation, Weibull shaping
  std::vector<std::uint64_t> seeds;
  int epochs = 0;
  double beta = 0.0;
};

/// Trains both configurations from identical initializations on identical
/// seeds and reports step-count and reward summaries. Needs >= 3 seeds.
AblationReport ablation_run(const AblationSettings& settings);

/// Default-environment convenience overload.
AblationReport ablation_run(double beta, int epochs, const std::vector<std::uint64_t>& seeds);

const char* to_string(Accumulation a);
const char* to_string(Shaping s);
const char* to_string(Estimator e);

}  // namespace stepreward
