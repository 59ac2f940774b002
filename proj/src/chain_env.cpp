#include "stepreward/chain_env.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "stepreward/numeric.hpp"
#include "stepreward/rng.hpp"

namespace stepreward {

double PolicyParams::quality() const { return sigmoid(quality_param); }

PolicyParams PolicyParams::uniform(int t_max, double quality_param) {
  if (t_max < 1) throw std::invalid_argument("PolicyParams: t_max must be >= 1");
  PolicyParams p;
  p.length_logits.assign(static_cast<std::size_t>(t_max), 0.0);
  p.quality_param = quality_param;
  return p;
}

void PolicyParams::validate() const {
  if (length_logits.empty()) throw std::invalid_argument("PolicyParams: empty length logits");
  if (!all_finite(length_logits) || !std::isfinite(quality_param)) {
    throw std::invalid_argument("PolicyParams: non-finite parameter");
  }
}

void ChainSample::validate() const {
  if (t < 1 || t > t_max) throw std::invalid_argument("ChainSample: step count out of range");
  if (step_features.size() != static_cast<std::size_t>(t)) {
    throw std::invalid_argument("ChainSample: feature row count does not match step count");
  }
  if (log_prob > 0.0) throw std::invalid_argument("ChainSample: positive log-probability");
}

void OracleConfig::validate() const {
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("OracleConfig: noise_scale must be >= 0");
  if (!(difficulty_per_step >= 0.0 && difficulty_per_step <= 1.0)) {
    throw std::invalid_argument("OracleConfig: difficulty_per_step must be in [0,1]");
  }
}

ChainSample make_chain(const PolicyParams& policy, int length, std::uint64_t seed) {
  policy.validate();
  if (length < 1 || length > policy.t_max()) {
    throw std::invalid_argument("make_chain: length out of [1, t_max]");
  }
  ChainSample chain;
  chain.t = length;
  chain.t_max = policy.t_max();
  chain.quality = policy.quality();
  chain.log_prob = log_softmax(policy.length_logits)[static_cast<std::size_t>(length - 1)];

  Rng rng(mix_seed(seed, 0xfea7));
  chain.step_features.reserve(static_cast<std::size_t>(length));
  for (int j = 1; j <= length; ++j) {
    const double jitter = rng.uniform(-kFeatureJitter, kFeatureJitter);
    chain.step_features.push_back(
        {chain.quality + jitter, static_cast<double>(j - 1) / chain.t_max, 1.0});
  }
  return chain;
}

ChainSample sample_chain(const PolicyParams& policy, std::uint64_t seed) {
  policy.validate();
  Rng rng(mix_seed(seed, 0x1e46));
  const auto probs = softmax(policy.length_logits);
  const int length = static_cast<int>(rng.categorical(probs)) + 1;
  // Feature jitter comes from a child stream so that a forced-length chain
  // with the same seed matches the sampled one.
  return make_chain(policy, length, seed);
}

/// FNV-1a over the chain's defining bits; ties the oracle noise stream to the
/// specific chain without the module holding any global state.
static std::uint64_t chain_fingerprint(const ChainSample& chain) {
  std::uint64_t h = 1469598103934665603ULL;
  auto absorb = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  absorb(static_cast<std::uint64_t>(chain.t));
  absorb(static_cast<std::uint64_t>(chain.t_max));
  absorb(std::bit_cast<std::uint64_t>(chain.quality));
  for (const auto& row : chain.step_features) {
    for (double f : row) absorb(std::bit_cast<std::uint64_t>(f));
  }
  return h;
}

std::vector<StepScore> oracle_step_scores(const ChainSample& chain, const OracleConfig& oracle) {
  chain.validate();
  oracle.validate();
  Rng rng(mix_seed(oracle.seed, chain_fingerprint(chain)));
  std::vector<StepScore> scores;
  scores.reserve(static_cast<std::size_t>(chain.t));
  for (int j = 1; j <= chain.t; ++j) {
    const double noise = rng.uniform(-oracle.noise_scale, oracle.noise_scale);
    const double raw =
        chain.quality - oracle.difficulty_per_step * (j - 1) / chain.t_max + noise;
    scores.emplace_back(std::clamp(raw, 0.0, 1.0));
  }
  return scores;
}

std::vector<double> noiseless_step_scores(double quality, int length, int t_max,
                                          double difficulty_per_step) {
  if (length < 1 || length > t_max) {
    throw std::invalid_argument("noiseless_step_scores: length out of [1, t_max]");
  }
  std::vector<double> scores(static_cast<std::size_t>(length));
  for (int j = 1; j <= length; ++j) {
    scores[static_cast<std::size_t>(j - 1)] =
        std::clamp(quality - difficulty_per_step * (j - 1) / t_max, 0.0, 1.0);
  }
  return scores;
}

}  // namespace stepreward
