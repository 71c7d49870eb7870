#pragma once

#include <string>

#include "pointing/learning/trainer.hpp"

namespace pointing::learning {

inline constexpr const char* kCheckpointFormat = "pointing-policy/1";
inline constexpr const char* kClusterCheckpointFormat = "pointing-cluster-policies/1";

/// JSON checkpoint: an architecture header (skeleton id, layer sizes,
/// activations, discriminator variant) followed by parameter vectors and
/// normalizer statistics. Files are written to a temporary name and renamed.
void save_checkpoint(const std::string& path, const TrainedPolicy& model);
TrainedPolicy load_checkpoint(const std::string& path);

std::string serialize_checkpoint(const TrainedPolicy& model);
TrainedPolicy parse_checkpoint(const std::string& text);

void save_cluster_checkpoint(const std::string& path, const ClusterPolicySet& set);
ClusterPolicySet load_cluster_checkpoint(const std::string& path);

}  // namespace pointing::learning
