#pragma once

#include <array>
#include <string>
#include <vector>

#include "pointing/learning/mlp.hpp"
#include "pointing/learning/normalizer.hpp"

namespace pointing::learning {

enum class DiscriminatorVariant { plain, phase_functioned };

std::string to_string(DiscriminatorVariant variant);
DiscriminatorVariant discriminator_variant_from_string(const std::string& s);

/// Least-squares motion discriminator over transition features (s_t, s_t+1).
///
/// The phase-functioned variant keeps four control parameter sets at phases
/// 0, 1/3, 2/3 and 1 and evaluates the network with their Catmull-Rom blend at
/// the sample's phase. All control sets are stored back to back in params.
/// Features are standardized with statistics fixed from reference data.
class Discriminator {
 public:
  static constexpr int kControlPoints = 4;

  Discriminator() = default;
  Discriminator(DiscriminatorVariant variant, int feature_size, const std::vector<int>& hidden, Rng& rng);

  DiscriminatorVariant variant() const { return variant_; }
  int feature_size() const { return shape_.input_size(); }
  const MlpShape& shape() const { return shape_; }
  int control_count() const { return variant_ == DiscriminatorVariant::plain ? 1 : kControlPoints; }

  Eigen::VectorXd params;
  RunningNormalizer feature_norm;

  /// Weight of each control set at a phase in [0, 1]; non-negative where the
  /// spline is, and always summing to one.
  static std::array<double, kControlPoints> blend_weights(double phase);

  Eigen::Map<const Eigen::VectorXd> control(int k) const;
  /// Effective network parameters at a phase (the single set for plain).
  Eigen::VectorXd parameters_at(double phase) const;

  /// D(feature) per column; phases are ignored by the plain variant.
  Eigen::VectorXd score(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& phases) const;

  /// Sets the fixed feature statistics.
  void fit_normalizer(const Eigen::MatrixXd& reference_features);

 private:
  DiscriminatorVariant variant_ = DiscriminatorVariant::plain;
  MlpShape shape_;
};

/// r = max(0, 1 - 0.25 (d - 1)^2), within [0, 1].
double imitation_reward_from_score(double d);
Eigen::VectorXd imitation_reward(const Discriminator& disc, const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& phases);

struct DiscriminatorLoss {
  double real_loss = 0.0;         // mean (D - 1)^2 on reference samples
  double fake_loss = 0.0;         // mean (D + 1)^2 on policy samples
  double gradient_penalty = 0.0;  // mean |dD/dx|^2 on reference samples
  double real_score = 0.0;
  double fake_score = 0.0;
};

/// One Adam step on real + fake + gp_weight/2 * penalty.
DiscriminatorLoss update_discriminator(Discriminator& disc, Adam& optimizer, const Eigen::MatrixXd& policy_features,
                                       const Eigen::VectorXd& policy_phases, const Eigen::MatrixXd& reference_features,
                                       const Eigen::VectorXd& reference_phases, double gp_weight = 10.0);

}  // namespace pointing::learning
