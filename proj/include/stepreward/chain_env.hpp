#pragma once

#include <cstdint>
#include <vector>

#include "stepreward/reward_math.hpp"

namespace stepreward {

inline constexpr int kDefaultTMax = 10;

/// Feature layout emitted per step: [noisy quality, step position, bias term].
inline constexpr std::size_t kStepFeatureDim = 3;

/// Jitter half-width applied to the quality component of emitted features.
/// The scorer sees a perturbed view of the step; the oracle does not.
inline constexpr double kFeatureJitter = 0.05;

/// Stochastic chain-generating policy: a categorical distribution over step
/// counts 1..t_max plus a single unconstrained quality parameter squashed to
/// per-step quality q in (0,1).
struct PolicyParams {
  std::vector<double> length_logits;  // one logit per step count
  double quality_param = 0.0;

  int t_max() const { return static_cast<int>(length_logits.size()); }
  double quality() const;  // sigmoid(quality_param)

  static PolicyParams uniform(int t_max, double quality_param = 0.0);

  void validate() const;
};

/// One sampled chain. The chain carries its ground-truth quality for the
/// oracle; step_features are the (noisier) view a trained scorer consumes.
struct ChainSample {
  int t = 0;
  int t_max = 0;
  std::vector<std::vector<double>> step_features;
  double log_prob = 0.0;  // log-probability of the drawn length under the policy
  double quality = 0.0;

  void validate() const;
};

/// Ground-truth scorer configuration. Per-step score is
///   clamp(q - difficulty_per_step * (j-1)/t_max + noise, 0, 1)
/// with noise uniform in [-noise_scale, +noise_scale].
struct OracleConfig {
  double noise_scale = 0.05;
  double difficulty_per_step = 0.3;
  std::uint64_t seed = 1234;

  void validate() const;
};

/// Draws a step count from softmax(length_logits) and fills in features.
/// Pure given (policy, seed); callers hand disjoint seeds to parallel workers.
ChainSample sample_chain(const PolicyParams& policy, std::uint64_t seed);

/// Builds a chain of a forced length; used by length-conditioned evaluation.
ChainSample make_chain(const PolicyParams& policy, int length, std::uint64_t seed);

/// Scores every step of a chain. Deterministic given (oracle seed, chain):
/// the noise stream is derived from both.
std::vector<StepScore> oracle_step_scores(const ChainSample& chain, const OracleConfig& oracle);

/// Noise-free oracle scores for a hypothetical chain of the given length.
std::vector<double> noiseless_step_scores(double quality, int length, int t_max,
                                          double difficulty_per_step);

}  // namespace stepreward
