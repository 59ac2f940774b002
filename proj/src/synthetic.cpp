#include "stepreward/synthetic.hpp"

#include <stdexcept>

#include "stepreward/rng.hpp"

namespace stepreward {

static const int kLabelCycle[3] = {-1, 0, 1};

std::vector<double> cluster_mean(const ClusterDatasetSpec& spec, int label) {
  const std::size_t axis = class_index(label) % spec.dim;
  std::vector<double> mean(spec.dim, 0.0);
  mean[axis] = spec.separation;
  return mean;
}

std::vector<LabeledStep> make_cluster_dataset(const ClusterDatasetSpec& spec) {
  if (spec.n_points == 0) throw std::invalid_argument("make_cluster_dataset: n_points must be > 0");
  if (spec.dim == 0) throw std::invalid_argument("make_cluster_dataset: dim must be > 0");
  if (!(spec.sigma > 0.0) || !(spec.separation > 0.0)) {
    throw std::invalid_argument("make_cluster_dataset: sigma and separation must be > 0");
  }
  Rng rng(mix_seed(spec.seed, 0xc1a5));
  std::vector<LabeledStep> dataset;
  dataset.reserve(spec.n_points);
  for (std::size_t i = 0; i < spec.n_points; ++i) {
    LabeledStep step;
    step.label = kLabelCycle[i % 3];
    step.features = cluster_mean(spec, step.label);
    for (double& f : step.features) f += spec.sigma * rng.normal();
    dataset.push_back(std::move(step));
  }
  return dataset;
}

}  // namespace stepreward
