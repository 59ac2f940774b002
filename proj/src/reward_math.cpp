#include "stepreward/reward_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stepreward {

StepScore::StepScore(double v) : value(v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("StepScore: value " + std::to_string(v) + " outside [0,1]");
  }
}

std::vector<StepScore> make_scores(const std::vector<double>& values) {
  std::vector<StepScore> out;
  out.reserve(values.size());
  for (double v : values) out.emplace_back(v);
  return out;
}

void WeibullShaping::validate() const {
  if (!(c > 0.0) || !(k > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("WeibullShaping: c, k, lambda must all be > 0");
  }
}

double accumulate_product(std::span<const StepScore> scores) {
  if (scores.empty()) throw std::invalid_argument("accumulate_product: empty score list");
  double prod = 1.0;
  for (const StepScore& s : scores) prod *= s.value;
  return prod;
}

double accumulate_geomean(std::span<const StepScore> scores) {
  if (scores.empty()) throw std::invalid_argument("accumulate_geomean: empty score list");
  double log_sum = 0.0;
  for (const StepScore& s : scores) {
    if (s.value == 0.0) return 0.0;
    log_sum += std::log(s.value);
  }
  return std::exp(log_sum / static_cast<double>(scores.size()));
}

double weibull_shape(const WeibullShaping& params, int step_count) {
  params.validate();
  if (step_count < 0) throw std::invalid_argument("weibull_shape: negative step count");
  if (step_count == 0 && params.k > 1.0) return 0.0;  // continuous extension
  const double x = static_cast<double>(step_count) / params.lambda;
  return params.c * (params.k / params.lambda) * std::pow(x, params.k - 1.0) *
         std::exp(-std::pow(x, params.k));
}

double weibull_peak_location(const WeibullShaping& params) {
  params.validate();
  if (params.k <= 1.0) return 0.0;  // mode sits at the origin for k <= 1
  return params.lambda * std::pow((params.k - 1.0) / params.k, 1.0 / params.k);
}

ChainEvaluation shaped_reward(const WeibullShaping& params, std::span<const StepScore> scores) {
  if (scores.empty()) throw std::invalid_argument("shaped_reward: empty score list");
  ChainEvaluation eval;
  eval.step_scores.assign(scores.begin(), scores.end());
  eval.accumulated = accumulate_geomean(scores);
  eval.shaped = weibull_shape(params, static_cast<int>(scores.size())) * eval.accumulated;
  return eval;
}

}  // namespace stepreward
