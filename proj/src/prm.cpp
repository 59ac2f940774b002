#include "stepreward/prm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stepreward/numeric.hpp"
#include "stepreward/rng.hpp"

namespace stepreward {

std::size_t class_index(int label) {
  switch (label) {
    case -1: return 0;
    case 0: return 1;
    case 1: return 2;
    default:
      throw std::invalid_argument("label must be -1, 0, or 1, got " + std::to_string(label));
  }
}

void ClassifierParams::validate() const {
  if (weights.size() != kNumClasses * dim) {
    throw std::invalid_argument("ClassifierParams: weight matrix is not 3 x dim");
  }
  if (!all_finite(weights) || !all_finite(biases)) {
    throw std::invalid_argument("ClassifierParams: non-finite parameter");
  }
}

static void check_dim(const ClassifierParams& params, std::span<const double> features) {
  if (features.size() != params.dim) {
    throw std::invalid_argument("feature vector length " + std::to_string(features.size()) +
                                " does not match classifier dim " + std::to_string(params.dim));
  }
}

std::array<double, 3> score_logits(const ClassifierParams& params,
                                   std::span<const double> features) {
  check_dim(params, features);
  std::array<double, 3> logits{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double z = params.biases[c];
    const double* row = params.weights.data() + c * params.dim;
    for (std::size_t j = 0; j < params.dim; ++j) z += row[j] * features[j];
    logits[c] = z;
  }
  return logits;
}

ClassProbabilities class_probabilities(const ClassifierParams& params,
                                       std::span<const double> features) {
  const auto logits = score_logits(params, features);
  const auto p = softmax(logits);
  return ClassProbabilities{p[0], p[1], p[2]};
}

double cross_entropy_loss(const ClassProbabilities& probs, int label) {
  const std::array<double, 3> p{probs.p_negative, probs.p_neutral, probs.p_positive};
  const double p_true = p[class_index(label)];
  constexpr double kFloor = 1e-300;  // keep the loss finite if a class collapses
  return -std::log(p_true > kFloor ? p_true : kFloor);
}

StepScore step_reward(const ClassifierParams& params, std::span<const double> features) {
  return StepScore(class_probabilities(params, features).p_positive);
}

static void check_dataset(std::span<const LabeledStep> dataset) {
  if (dataset.empty()) throw std::invalid_argument("dataset is empty");
  const std::size_t d = dataset.front().features.size();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].features.size() != d) {
      throw std::invalid_argument("dataset record " + std::to_string(i) +
                                  " has feature length " +
                                  std::to_string(dataset[i].features.size()) + ", expected " +
                                  std::to_string(d));
    }
    class_index(dataset[i].label);
  }
}

double mean_loss(const ClassifierParams& params, std::span<const LabeledStep> dataset) {
  check_dataset(dataset);
  double sum = 0.0;
  for (const LabeledStep& step : dataset) {
    sum += cross_entropy_loss(class_probabilities(params, step.features), step.label);
  }
  return sum / static_cast<double>(dataset.size());
}

double accuracy(const ClassifierParams& params, std::span<const LabeledStep> dataset) {
  check_dataset(dataset);
  std::size_t correct = 0;
  for (const LabeledStep& step : dataset) {
    const auto logits = score_logits(params, step.features);
    std::size_t argmax = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (logits[c] > logits[argmax]) argmax = c;
    }
    if (argmax == class_index(step.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

LossGradient loss_gradient(const ClassifierParams& params, std::span<const LabeledStep> dataset) {
  check_dataset(dataset);
  LossGradient grad;
  grad.weights.assign(params.weights.size(), 0.0);
  for (const LabeledStep& step : dataset) {
    const auto logits = score_logits(params, step.features);
    const auto p = softmax(logits);
    const std::size_t truth = class_index(step.label);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double delta = p[c] - (c == truth ? 1.0 : 0.0);
      grad.biases[c] += delta;
      double* row = grad.weights.data() + c * params.dim;
      for (std::size_t j = 0; j < params.dim; ++j) row[j] += delta * step.features[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(dataset.size());
  for (double& g : grad.weights) g *= inv_n;
  for (double& g : grad.biases) g *= inv_n;
  return grad;
}

ClassifierParams initial_params(std::size_t dim, std::uint64_t seed) {
  ClassifierParams params;
  params.dim = dim;
  params.seed = seed;
  params.weights.resize(kNumClasses * dim);
  Rng rng(mix_seed(seed, 0));
  for (double& w : params.weights) w = 0.01 * rng.normal();
  params.biases.fill(0.0);
  return params;
}

ClassifierParams train(std::span<const LabeledStep> dataset, int epochs, double learning_rate,
                       std::uint64_t seed, std::vector<EpochMetrics>* history) {
  check_dataset(dataset);
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");

  ClassifierParams params = initial_params(dataset.front().features.size(), seed);
  if (history) {
    history->clear();
    history->reserve(static_cast<std::size_t>(epochs));
  }
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const LossGradient grad = loss_gradient(params, dataset);
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
      params.weights[i] -= learning_rate * grad.weights[i];
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      params.biases[c] -= learning_rate * grad.biases[c];
    }
    if (history) {
      history->push_back(EpochMetrics{mean_loss(params, dataset), accuracy(params, dataset)});
    }
  }
  params.validate();
  return params;
}

std::vector<LabeledStep> balance_dataset(std::span<const LabeledStep> dataset,
                                         int replication_factor) {
  if (replication_factor < 1) {
    throw std::invalid_argument("balance_dataset: replication factor must be >= 1");
  }
  std::vector<LabeledStep> out;
  out.reserve(dataset.size());
  for (const LabeledStep& step : dataset) {
    const int copies = step.label == 1 ? 1 : replication_factor;
    for (int i = 0; i < copies; ++i) out.push_back(step);
  }
  return out;
}

double bradley_terry_preference(double reward_w, double reward_l) {
  return sigmoid(reward_w - reward_l);
}

double pairwise_logistic_loss(double reward_w, double reward_l) {
  // -log sigma(x) = softplus(-x)
  return softplus(reward_l - reward_w);
}

}  // namespace stepreward
