#pragma once

#include <span>
#include <vector>

namespace stepreward {

/// Probability that one reasoning step is positive, in [0, 1].
struct StepScore {
  double value = 0.0;

  StepScore() = default;
  explicit StepScore(double v);  // throws std::invalid_argument outside [0,1]
};

std::vector<StepScore> make_scores(const std::vector<double>& values);

/// Parameters of the adjusted-Weibull shaping curve: overall coefficient c,
/// shape k, scale lambda. All strictly positive.
struct WeibullShaping {
  double c = 10.735;
  double k = 1.5;
  double lambda = 8.0;

  /// Settings that normalize the continuous peak to ~1 over step counts 0..10.
  static WeibullShaping defaults() { return WeibullShaping{}; }

  void validate() const;  // throws std::invalid_argument on a nonpositive parameter
};

/// Per-step scores of one chain plus the derived chain-level rewards.
struct ChainEvaluation {
  std::vector<StepScore> step_scores;
  double accumulated = 0.0;  // step-count-normalized accumulation
  double shaped = 0.0;       // shaping(t) * accumulated
};

/// Product of the step scores. Empty input is an error: the reward of a
/// zero-step chain is undefined.
double accumulate_product(std::span<const StepScore> scores);

/// Geometric mean (prod)^(1/t). Computed in log space; a zero score maps the
/// whole result to zero directly so long chains cannot underflow.
double accumulate_geomean(std::span<const StepScore> scores);

/// c * (k/lambda) * (t/lambda)^(k-1) * e^{-(t/lambda)^k} at integer step
/// count t >= 0. For k > 1 the value at t = 0 is 0 by continuous extension.
double weibull_shape(const WeibullShaping& params, int step_count);

/// Step count t* at which the continuous shaping curve peaks (k > 1).
double weibull_peak_location(const WeibullShaping& params);

ChainEvaluation shaped_reward(const WeibullShaping& params, std::span<const StepScore> scores);

}  // namespace stepreward
