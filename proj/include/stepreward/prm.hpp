#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stepreward/numeric.hpp"  // softmax / log_softmax used for class scores
#include "stepreward/reward_math.hpp"

namespace stepreward {

/// One annotated reasoning step: a feature vector standing in for
/// (context, preceding steps, current step), and a label in {-1, 0, 1}.
struct LabeledStep {
  std::vector<double> features;
  int label = 0;
};

/// Class ordering is fixed and must be identical for training and scoring.
inline constexpr std::array<const char*, 3> kClassOrder{"negative", "neutral", "positive"};
inline constexpr std::size_t kNumClasses = 3;

/// Maps a {-1, 0, 1} label onto the fixed class index; throws otherwise.
std::size_t class_index(int label);

/// Linear 3-way scorer over step features. The scorer sits behind this one
/// interface so a heavier backbone can be swapped in without touching callers.
struct ClassifierParams {
  std::size_t dim = 0;
  std::vector<double> weights;     // kNumClasses x dim, row-major
  std::array<double, 3> biases{};  // one per class
  std::uint64_t seed = 0;          // seed the parameters were trained from

  void validate() const;  // throws std::invalid_argument on shape/finiteness problems
};

struct ClassProbabilities {
  double p_negative = 0.0;
  double p_neutral = 0.0;
  double p_positive = 0.0;
};

/// weights * features + biases.
std::array<double, 3> score_logits(const ClassifierParams& params, std::span<const double> features);

ClassProbabilities class_probabilities(const ClassifierParams& params,
                                       std::span<const double> features);

/// -log of the probability assigned to the true class.
double cross_entropy_loss(const ClassProbabilities& probs, int label);

/// Probability of the positive class; the per-step reward score.
StepScore step_reward(const ClassifierParams& params, std::span<const double> features);

double mean_loss(const ClassifierParams& params, std::span<const LabeledStep> dataset);
double accuracy(const ClassifierParams& params, std::span<const LabeledStep> dataset);

/// Gradient of mean cross-entropy, same layout as the parameters.
struct LossGradient {
  std::vector<double> weights;
  std::array<double, 3> biases{};
};
LossGradient loss_gradient(const ClassifierParams& params, std::span<const LabeledStep> dataset);

/// Small random initialization, deterministic per seed.
ClassifierParams initial_params(std::size_t dim, std::uint64_t seed);

struct EpochMetrics {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

/// Full-batch gradient descent on mean cross-entropy, `epochs` steps from
/// initial_params(d, seed). Deterministic per seed; single-threaded.
ClassifierParams train(std::span<const LabeledStep> dataset, int epochs, double learning_rate,
                       std::uint64_t seed, std::vector<EpochMetrics>* history = nullptr);

/// Replicates steps labeled 0 and -1 `replication_factor` times each (in
/// place in the original order); positives pass through once.
std::vector<LabeledStep> balance_dataset(std::span<const LabeledStep> dataset,
                                         int replication_factor);

/// sigma(reward_w - reward_l): preference probability for the winner.
double bradley_terry_preference(double reward_w, double reward_l);

/// -log bradley_terry_preference, evaluated stably for large gaps.
double pairwise_logistic_loss(double reward_w, double reward_l);

}  // namespace stepreward
