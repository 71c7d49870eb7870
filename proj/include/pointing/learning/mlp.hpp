#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pointing/common/random.hpp"

namespace pointing::learning {

enum class Activation { tanh, relu };

/// Layout of a fully connected network whose parameters live in one flat
/// vector: per layer, the (out x in) column-major weight block, then the bias.
/// Hidden layers use the activation; the output layer is linear. Samples are
/// columns of the input matrix.
class MlpShape {
 public:
  MlpShape() = default;
  MlpShape(std::vector<int> sizes, Activation hidden);

  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }
  Eigen::Index param_count() const { return param_count_; }

  Eigen::Map<const Eigen::MatrixXd> weight(const Eigen::VectorXd& params, int layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(Eigen::VectorXd& params, int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(const Eigen::VectorXd& params, int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(Eigen::VectorXd& params, int layer) const;

  /// Uniform fan-in scaled weights, zero biases; the output layer is scaled by output_gain.
  Eigen::VectorXd initialize(Rng& rng, double output_gain = 1.0) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Activation activation_ = Activation::tanh;
  Eigen::Index param_count_ = 0;
};

/// Post-activation values of every layer input (index 0 is the network input).
struct MlpTape {
  std::vector<Eigen::MatrixXd> inputs;
};

Eigen::MatrixXd mlp_forward(const MlpShape& shape, const Eigen::VectorXd& params, const Eigen::MatrixXd& input,
                            MlpTape* tape = nullptr);

/// Accumulates dL/dparams into grad_params for a given dL/doutput; optionally
/// returns dL/dinput.
void mlp_backward(const MlpShape& shape, const Eigen::VectorXd& params, const MlpTape& tape,
                  const Eigen::MatrixXd& grad_output, Eigen::VectorXd& grad_params,
                  Eigen::MatrixXd* grad_input = nullptr);

/// d output / d input for a scalar-output network, one column per sample.
Eigen::MatrixXd mlp_input_gradient(const MlpShape& shape, const Eigen::VectorXd& params, const MlpTape& tape);

/// Squared input-gradient norm P_s = |dD/dx_s|^2 of a scalar ReLU network per
/// sample. When grad_params is given, accumulates d(sum_s w_s P_s)/dparams;
/// ReLU masks are piecewise constant so only the weights receive gradient.
Eigen::VectorXd input_gradient_penalty(const MlpShape& shape, const Eigen::VectorXd& params, const MlpTape& tape,
                                       const Eigen::VectorXd& sample_weights, Eigen::VectorXd* grad_params);

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double max_grad_norm = 0.0;  // 0 disables clipping
};

class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, AdamConfig config);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  const AdamConfig& config() const { return config_; }
  AdamConfig& config() { return config_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace pointing::learning
