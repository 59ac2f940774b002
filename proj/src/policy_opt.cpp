#include "stepreward/policy_opt.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "stepreward/numeric.hpp"
#include "stepreward/rng.hpp"

namespace stepreward {

namespace {

constexpr double kBaselineMomentum = 0.9;
constexpr double kPpoClip = 0.2;
constexpr int kPpoInnerIters = 4;

struct RewardGrad {
  double reward = 0.0;
  double dreward_dq = 0.0;  // derivative w.r.t. the squashed quality q
};

// A step score is locally linear in q unless the clamp is active; clamped
// steps contribute zero derivative.
bool interior(double s) { return s > 0.0 && s < 1.0; }

RewardGrad reward_and_qgrad(const Objective& objective, std::span<const StepScore> scores) {
  if (scores.empty()) throw std::invalid_argument("chain_reward: empty score list");
  const std::size_t t = scores.size();
  double acc = 0.0;
  double dacc = 0.0;

  if (objective.accumulation == Accumulation::product) {
    // Leave-one-out products via prefix/suffix scans.
    std::vector<double> prefix(t + 1, 1.0), suffix(t + 1, 1.0);
    for (std::size_t j = 0; j < t; ++j) prefix[j + 1] = prefix[j] * scores[j].value;
    for (std::size_t j = t; j-- > 0;) suffix[j] = suffix[j + 1] * scores[j].value;
    acc = prefix[t];
    for (std::size_t j = 0; j < t; ++j) {
      if (interior(scores[j].value)) dacc += prefix[j] * suffix[j + 1];
    }
  } else {
    acc = accumulate_geomean(scores);
    if (acc > 0.0) {
      double inv_sum = 0.0;
      for (const StepScore& s : scores) {
        if (interior(s.value)) inv_sum += 1.0 / s.value;
      }
      dacc = acc * inv_sum / static_cast<double>(t);
    }
  }

  const double shape = objective.shaping == Shaping::weibull
                           ? weibull_shape(objective.weibull, static_cast<int>(t))
                           : 1.0;
  return RewardGrad{shape * acc, shape * dacc};
}

struct Rollout {
  int t = 0;
  double reward = 0.0;
  double dreward_dq = 0.0;
};

Rollout roll_once(const Objective& objective, const OracleConfig& oracle,
                  const PolicyParams& policy, std::uint64_t seed) {
  const ChainSample chain = sample_chain(policy, seed);
  const auto scores = oracle_step_scores(chain, oracle);
  const RewardGrad rg = reward_and_qgrad(objective, scores);
  return Rollout{chain.t, rg.reward, rg.dreward_dq};
}

/// d KL(pi || ref) / d logit_i = pi_i * ((log pi_i - log ref_i) - KL).
std::vector<double> kl_gradient(const PolicyParams& policy, const PolicyParams& reference) {
  const auto lp = log_softmax(policy.length_logits);
  const auto lr = log_softmax(reference.length_logits);
  const double kl = kl_length(policy, reference);
  std::vector<double> grad(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) {
    grad[i] = std::exp(lp[i]) * ((lp[i] - lr[i]) - kl);
  }
  return grad;
}

void require_noiseless(const OracleConfig& oracle, const char* what) {
  if (oracle.noise_scale != 0.0) {
    throw std::invalid_argument(std::string(what) + " requires a noiseless oracle");
  }
}

}  // namespace

void Objective::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("Objective: beta must be finite and >= 0");
  }
  if (shaping == Shaping::weibull) weibull.validate();
}

double chain_reward(const Objective& objective, std::span<const StepScore> scores) {
  objective.validate();
  if (objective.accumulation == Accumulation::product && objective.shaping == Shaping::none) {
    return accumulate_product(scores);
  }
  return reward_and_qgrad(objective, scores).reward;
}

double kl_length(const PolicyParams& policy, const PolicyParams& reference) {
  policy.validate();
  reference.validate();
  if (policy.t_max() != reference.t_max()) {
    throw std::invalid_argument("kl_length: policies have different t_max");
  }
  const auto lp = log_softmax(policy.length_logits);
  const auto lr = log_softmax(reference.length_logits);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const double p = std::exp(lp[i]);
    if (p > 0.0) kl += p * (lp[i] - lr[i]);
  }
  return std::max(kl, 0.0);  // clip the tiny negative residue of rounding
}

double objective_estimate(const Objective& objective, const OracleConfig& oracle,
                          const OptState& state, int n_rollouts, std::uint64_t seed) {
  objective.validate();
  if (n_rollouts < 1) throw std::invalid_argument("objective_estimate: n_rollouts must be >= 1");
  double sum = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    sum += roll_once(objective, oracle, state.policy, mix_seed(seed, static_cast<std::uint64_t>(i)))
               .reward;
  }
  return sum / n_rollouts - objective.beta * kl_length(state.policy, state.reference);
}

OptState policy_gradient_step(const Objective& objective, const OracleConfig& oracle,
                              OptState state, int n_rollouts, double learning_rate,
                              std::uint64_t seed) {
  objective.validate();
  if (n_rollouts < 1) throw std::invalid_argument("policy_gradient_step: n_rollouts must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("policy_gradient_step: learning rate must be > 0");
  }

  const std::size_t t_max = state.policy.length_logits.size();
  const auto probs = softmax(state.policy.length_logits);
  std::vector<double> grad_logits(t_max, 0.0);
  double grad_q = 0.0;
  double reward_sum = 0.0;

  for (int i = 0; i < n_rollouts; ++i) {
    const Rollout r =
        roll_once(objective, oracle, state.policy, mix_seed(seed, static_cast<std::uint64_t>(i)));
    const double advantage = r.reward - state.baseline;
    grad_logits[static_cast<std::size_t>(r.t - 1)] += advantage;
    for (std::size_t k = 0; k < t_max; ++k) grad_logits[k] -= advantage * probs[k];
    grad_q += r.dreward_dq;
    reward_sum += r.reward;
  }
  const double inv_n = 1.0 / n_rollouts;
  for (double& g : grad_logits) g *= inv_n;

  const double q = state.policy.quality();
  grad_q *= inv_n * q * (1.0 - q);  // chain rule through the logistic squashing

  if (objective.beta > 0.0) {
    const auto klg = kl_gradient(state.policy, state.reference);
    for (std::size_t k = 0; k < t_max; ++k) grad_logits[k] -= objective.beta * klg[k];
  }

  for (std::size_t k = 0; k < t_max; ++k) {
    state.policy.length_logits[k] += learning_rate * grad_logits[k];
  }
  state.policy.quality_param += learning_rate * grad_q;

  state.baseline =
      kBaselineMomentum * state.baseline + (1.0 - kBaselineMomentum) * (reward_sum * inv_n);
  state.iteration += 1;
  return state;
}

OptState ppo_clip_step(const Objective& objective, const OracleConfig& oracle, OptState state,
                       int n_rollouts, double learning_rate, std::uint64_t seed) {
  objective.validate();
  if (n_rollouts < 1) throw std::invalid_argument("ppo_clip_step: n_rollouts must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("ppo_clip_step: learning rate must be > 0");
  }

  const std::size_t t_max = state.policy.length_logits.size();
  const auto old_logp = log_softmax(state.policy.length_logits);

  std::vector<Rollout> rollouts;
  rollouts.reserve(static_cast<std::size_t>(n_rollouts));
  double reward_sum = 0.0;
  double grad_q = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    rollouts.push_back(
        roll_once(objective, oracle, state.policy, mix_seed(seed, static_cast<std::uint64_t>(i))));
    reward_sum += rollouts.back().reward;
    grad_q += rollouts.back().dreward_dq;
  }
  const double inv_n = 1.0 / n_rollouts;

  for (int iter = 0; iter < kPpoInnerIters; ++iter) {
    const auto lp = log_softmax(state.policy.length_logits);
    const auto probs = softmax(state.policy.length_logits);
    std::vector<double> grad_logits(t_max, 0.0);
    for (const Rollout& r : rollouts) {
      const std::size_t idx = static_cast<std::size_t>(r.t - 1);
      const double advantage = r.reward - state.baseline;
      const double ratio = std::exp(lp[idx] - old_logp[idx]);
      // The clipped surrogate min(ratio*A, clip(ratio)*A) passes gradient
      // only while the unclipped branch is active.
      const bool pass = advantage >= 0.0 ? ratio < 1.0 + kPpoClip : ratio > 1.0 - kPpoClip;
      if (!pass) continue;
      const double w = advantage * ratio;
      grad_logits[idx] += w;
      for (std::size_t k = 0; k < t_max; ++k) grad_logits[k] -= w * probs[k];
    }
    for (double& g : grad_logits) g *= inv_n;
    if (objective.beta > 0.0) {
      const auto klg = kl_gradient(state.policy, state.reference);
      for (std::size_t k = 0; k < t_max; ++k) grad_logits[k] -= objective.beta * klg[k];
    }
    for (std::size_t k = 0; k < t_max; ++k) {
      state.policy.length_logits[k] += learning_rate * grad_logits[k];
    }
  }

  const double q = sigmoid(state.policy.quality_param);
  state.policy.quality_param += learning_rate * grad_q * inv_n * q * (1.0 - q);

  state.baseline =
      kBaselineMomentum * state.baseline + (1.0 - kBaselineMomentum) * (reward_sum * inv_n);
  state.iteration += 1;
  return state;
}

OptState optimizer_step(Estimator estimator, const Objective& objective,
                        const OracleConfig& oracle, OptState state, int n_rollouts,
                        double learning_rate, std::uint64_t seed) {
  switch (estimator) {
    case Estimator::reinforce:
      return policy_gradient_step(objective, oracle, std::move(state), n_rollouts, learning_rate,
                                  seed);
    case Estimator::ppo_clip:
      return ppo_clip_step(objective, oracle, std::move(state), n_rollouts, learning_rate, seed);
  }
  throw std::invalid_argument("optimizer_step: unknown estimator");
}

std::vector<double> exact_reward_by_length(const Objective& objective, const OracleConfig& oracle,
                                           double quality, int t_max) {
  objective.validate();
  require_noiseless(oracle, "exact_reward_by_length");
  std::vector<double> rewards(static_cast<std::size_t>(t_max));
  for (int t = 1; t <= t_max; ++t) {
    const auto scores =
        make_scores(noiseless_step_scores(quality, t, t_max, oracle.difficulty_per_step));
    rewards[static_cast<std::size_t>(t - 1)] = chain_reward(objective, scores);
  }
  return rewards;
}

double exact_expected_reward(const Objective& objective, const OracleConfig& oracle,
                             const PolicyParams& policy) {
  policy.validate();
  const auto rewards = exact_reward_by_length(objective, oracle, policy.quality(), policy.t_max());
  const auto probs = softmax(policy.length_logits);
  double expected = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) expected += probs[i] * rewards[i];
  return expected;
}

double exact_objective(const Objective& objective, const OracleConfig& oracle,
                       const PolicyParams& policy, const PolicyParams& reference) {
  return exact_expected_reward(objective, oracle, policy) -
         objective.beta * kl_length(policy, reference);
}

PolicyGradient exact_objective_gradient(const Objective& objective, const OracleConfig& oracle,
                                        const PolicyParams& policy,
                                        const PolicyParams& reference) {
  objective.validate();
  policy.validate();
  require_noiseless(oracle, "exact_objective_gradient");
  const int t_max = policy.t_max();
  const double q = policy.quality();
  const auto probs = softmax(policy.length_logits);

  std::vector<double> rewards(static_cast<std::size_t>(t_max));
  std::vector<double> dreward_dq(static_cast<std::size_t>(t_max));
  for (int t = 1; t <= t_max; ++t) {
    const auto scores =
        make_scores(noiseless_step_scores(q, t, t_max, oracle.difficulty_per_step));
    const RewardGrad rg = reward_and_qgrad(objective, scores);
    rewards[static_cast<std::size_t>(t - 1)] = rg.reward;
    dreward_dq[static_cast<std::size_t>(t - 1)] = rg.dreward_dq;
  }

  double expected = 0.0;
  double expected_dq = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    expected += probs[i] * rewards[i];
    expected_dq += probs[i] * dreward_dq[i];
  }

  PolicyGradient grad;
  grad.length_logits.resize(static_cast<std::size_t>(t_max));
  for (std::size_t i = 0; i < probs.size(); ++i) {
    grad.length_logits[i] = probs[i] * (rewards[i] - expected);
  }
  if (objective.beta > 0.0) {
    const auto klg = kl_gradient(policy, reference);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      grad.length_logits[i] -= objective.beta * klg[i];
    }
  }
  grad.quality_param = expected_dq * q * (1.0 - q);
  return grad;
}

int exact_argmax_length(const Objective& objective, const OracleConfig& oracle, double quality,
                        int t_max) {
  const auto rewards = exact_reward_by_length(objective, oracle, quality, t_max);
  int best = 1;
  for (int t = 2; t <= t_max; ++t) {
    if (rewards[static_cast<std::size_t>(t - 1)] > rewards[static_cast<std::size_t>(best - 1)]) {
      best = t;  // ties keep the smallest step count
    }
  }
  return best;
}

namespace {

struct SeedResult {
  double mean_steps = 0.0;
  double mean_reward = 0.0;
  std::vector<double> histogram;
  std::vector<double> reward_by_steps;
};

SeedResult run_one_seed(const Objective& objective, const AblationSettings& settings,
                        std::uint64_t seed) {
  OptState state =
      OptState::init(PolicyParams::uniform(settings.t_max, settings.initial_quality_param));
  for (int step = 0; step < settings.epochs; ++step) {
    state = optimizer_step(settings.estimator, objective, settings.oracle, std::move(state),
                           settings.rollouts_per_step, settings.learning_rate,
                           mix_seed(seed, static_cast<std::uint64_t>(step)));
  }

  SeedResult result;
  result.histogram = softmax(state.policy.length_logits);
  for (std::size_t i = 0; i < result.histogram.size(); ++i) {
    result.mean_steps += static_cast<double>(i + 1) * result.histogram[i];
  }

  // Length-conditioned reward: sample chains forced to each length under the
  // trained quality and score them with the (noisy) oracle.
  const std::uint64_t eval_root = mix_seed(seed, 0xab1a7e);
  result.reward_by_steps.resize(static_cast<std::size_t>(settings.t_max));
  for (int t = 1; t <= settings.t_max; ++t) {
    double sum = 0.0;
    for (int i = 0; i < settings.eval_rollouts_per_length; ++i) {
      const ChainSample chain = make_chain(
          state.policy, t,
          mix_seed(eval_root, static_cast<std::uint64_t>(t) * 1000003ULL +
                                  static_cast<std::uint64_t>(i)));
      sum += chain_reward(objective, oracle_step_scores(chain, settings.oracle));
    }
    result.reward_by_steps[static_cast<std::size_t>(t - 1)] =
        sum / settings.eval_rollouts_per_length;
  }
  for (std::size_t i = 0; i < result.histogram.size(); ++i) {
    result.mean_reward += result.histogram[i] * result.reward_by_steps[i];
  }
  return result;
}

AblationConfigResult run_config(const std::string& name, const Objective& objective,
                                const AblationSettings& settings) {
  const std::size_t n_seeds = settings.seeds.size();
  std::vector<SeedResult> per_seed(n_seeds);
  if (settings.parallel) {
    std::vector<std::future<SeedResult>> futures;
    futures.reserve(n_seeds);
    for (std::size_t i = 0; i < n_seeds; ++i) {
      futures.push_back(std::async(std::launch::async, run_one_seed, objective, settings,
                                   settings.seeds[i]));
    }
    for (std::size_t i = 0; i < n_seeds; ++i) per_seed[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < n_seeds; ++i) {
      per_seed[i] = run_one_seed(objective, settings, settings.seeds[i]);
    }
  }

  AblationConfigResult result;
  result.name = name;
  result.length_histogram.assign(static_cast<std::size_t>(settings.t_max), 0.0);
  result.reward_by_steps.assign(static_cast<std::size_t>(settings.t_max), 0.0);
  for (const SeedResult& sr : per_seed) {
    result.per_seed_mean_steps.push_back(sr.mean_steps);
    result.mean_step_count += sr.mean_steps;
    result.mean_reward += sr.mean_reward;
    for (std::size_t i = 0; i < sr.histogram.size(); ++i) {
      result.length_histogram[i] += sr.histogram[i];
      result.reward_by_steps[i] += sr.reward_by_steps[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(n_seeds);
  result.mean_step_count *= inv;
  result.mean_reward *= inv;
  for (double& h : result.length_histogram) h *= inv;
  for (double& r : result.reward_by_steps) r *= inv;
  return result;
}

}  // namespace

AblationReport ablation_run(const AblationSettings& settings) {
  if (settings.seeds.size() < 3) {
    throw std::invalid_argument("ablation_run: need at least 3 seeds");
  }
  if (settings.epochs < 1) throw std::invalid_argument("ablation_run: epochs must be >= 1");
  if (settings.t_max < 1) throw std::invalid_argument("ablation_run: t_max must be >= 1");
  settings.oracle.validate();
  settings.weibull.validate();

  Objective baseline_objective;
  baseline_objective.accumulation = Accumulation::product;
  baseline_objective.shaping = Shaping::none;
  baseline_objective.beta = settings.beta;

  Objective weibull_objective;
  weibull_objective.accumulation = Accumulation::geomean;
  weibull_objective.shaping = Shaping::weibull;
  weibull_objective.weibull = settings.weibull;
  weibull_objective.beta = settings.beta;

  AblationReport report;
  report.baseline = run_config("baseline", baseline_objective, settings);
  report.weibull = run_config("weibull", weibull_objective, settings);
  report.seeds = settings.seeds;
  report.epochs = settings.epochs;
  report.beta = settings.beta;
  return report;
}

AblationReport ablation_run(double beta, int epochs, const std::vector<std::uint64_t>& seeds) {
  AblationSettings settings;
  settings.beta = beta;
  settings.epochs = epochs;
  settings.seeds = seeds;
  return ablation_run(settings);
}

const char* to_string(Accumulation a) {
  return a == Accumulation::product ? "product" : "geomean";
}
const char* to_string(Shaping s) { return s == Shaping::none ? "none" : "weibull"; }
const char* to_string(Estimator e) { return e == Estimator::reinforce ? "reinforce" : "ppo_clip"; }

}  // namespace stepreward
