#pragma once

#include <cstdint>
#include <vector>

#include "stepreward/prm.hpp"

namespace stepreward {

/// Bundled labeled-step generator: three Gaussian clusters, one per class,
/// with means on separate axes. Linearly separable for separation well above
/// sigma. Points cycle through the classes so counts stay balanced.
struct ClusterDatasetSpec {
  std::size_t n_points = 300;
  std::size_t dim = 3;
  double separation = 2.0;
  double sigma = 0.5;
  std::uint64_t seed = 2024;
};

std::vector<LabeledStep> make_cluster_dataset(const ClusterDatasetSpec& spec);

/// Mean of the cluster a label is drawn around; the nearest-mean rule built
/// from these is the reference classifier for the generated data.
std::vector<double> cluster_mean(const ClusterDatasetSpec& spec, int label);

}  // namespace stepreward
