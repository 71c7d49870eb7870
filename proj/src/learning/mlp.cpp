#include "pointing/learning/mlp.hpp"

#include <cmath>

#include "pointing/common/error.hpp"

namespace pointing::learning {

MlpShape::MlpShape(std::vector<int> sizes, Activation hidden) : sizes_(std::move(sizes)), activation_(hidden) {
  if (sizes_.size() < 2) throw Error(ErrorCode::invalid_argument, "network needs at least input and output sizes");
  for (int s : sizes_)
    if (s <= 0) throw Error(ErrorCode::invalid_argument, "layer sizes must be positive");
  Eigen::Index off = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offsets_.push_back(off);
    off += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  param_count_ = off;
}

Eigen::Map<const Eigen::MatrixXd> MlpShape::weight(const Eigen::VectorXd& params, int layer) const {
  return {params.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<Eigen::MatrixXd> MlpShape::weight(Eigen::VectorXd& params, int layer) const {
  return {params.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::VectorXd> MlpShape::bias(const Eigen::VectorXd& params, int layer) const {
  return {params.data() + offsets_[layer] + static_cast<Eigen::Index>(sizes_[layer + 1]) * sizes_[layer],
          sizes_[layer + 1]};
}

Eigen::Map<Eigen::VectorXd> MlpShape::bias(Eigen::VectorXd& params, int layer) const {
  return {params.data() + offsets_[layer] + static_cast<Eigen::Index>(sizes_[layer + 1]) * sizes_[layer],
          sizes_[layer + 1]};
}

Eigen::VectorXd MlpShape::initialize(Rng& rng, double output_gain) const {
  Eigen::VectorXd params = Eigen::VectorXd::Zero(param_count_);
  for (int l = 0; l < layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1])) * (l + 1 == layer_count() ? output_gain : 1.0);
    auto w = weight(params, l);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
  }
  return params;
}

namespace {

void check_params(const MlpShape& shape, const Eigen::VectorXd& params) {
  if (params.size() != shape.param_count()) {
    throw Error(ErrorCode::dimension_mismatch, "parameter vector has " + std::to_string(params.size()) +
                                                   " entries, network expects " +
                                                   std::to_string(shape.param_count()));
  }
}

Eigen::MatrixXd activation_derivative(Activation act, const Eigen::MatrixXd& out) {
  if (act == Activation::tanh) return (1.0 - out.array().square()).matrix();
  return (out.array() > 0.0).cast<double>().matrix();
}

}  // namespace

Eigen::MatrixXd mlp_forward(const MlpShape& shape, const Eigen::VectorXd& params, const Eigen::MatrixXd& input,
                            MlpTape* tape) {
  check_params(shape, params);
  if (input.rows() != shape.input_size()) {
    throw Error(ErrorCode::dimension_mismatch, "network input has " + std::to_string(input.rows()) +
                                                   " rows, expected " + std::to_string(shape.input_size()));
  }
  if (tape) tape->inputs.assign(1, input);
  Eigen::MatrixXd a = input;
  for (int l = 0; l < shape.layer_count(); ++l) {
    Eigen::MatrixXd z = shape.weight(params, l) * a;
    z.colwise() += shape.bias(params, l);
    if (l + 1 == shape.layer_count()) return z;
    if (shape.activation() == Activation::tanh) {
      a = z.array().tanh().matrix();
    } else {
      a = z.cwiseMax(0.0);
    }
    if (tape) tape->inputs.push_back(a);
  }
  return a;
}

void mlp_backward(const MlpShape& shape, const Eigen::VectorXd& params, const MlpTape& tape,
                  const Eigen::MatrixXd& grad_output, Eigen::VectorXd& grad_params, Eigen::MatrixXd* grad_input) {
  check_params(shape, params);
  if (grad_params.size() != shape.param_count()) grad_params = Eigen::VectorXd::Zero(shape.param_count());
  if (static_cast<int>(tape.inputs.size()) != shape.layer_count()) {
    throw Error(ErrorCode::invalid_argument, "tape does not belong to this network");
  }
  Eigen::MatrixXd g = grad_output;
  for (int l = shape.layer_count() - 1; l >= 0; --l) {
    const auto& in = tape.inputs[static_cast<std::size_t>(l)];
    shape.weight(grad_params, l).noalias() += g * in.transpose();
    shape.bias(grad_params, l) += g.rowwise().sum();
    if (l == 0 && !grad_input) break;
    Eigen::MatrixXd prev = shape.weight(params, l).transpose() * g;
    if (l > 0) prev.array() *= activation_derivative(shape.activation(), in).array();
    g = std::move(prev);
  }
  if (grad_input) *grad_input = std::move(g);
}

namespace {

/// u[l] = d output / d (input of layer l), l = 0..L; u[L] is all ones.
std::vector<Eigen::MatrixXd> backward_chain(const MlpShape& shape, const Eigen::VectorXd& params,
                                            const MlpTape& tape) {
  const int layers = shape.layer_count();
  const Eigen::Index n = tape.inputs.front().cols();
  std::vector<Eigen::MatrixXd> u(static_cast<std::size_t>(layers + 1));
  u[static_cast<std::size_t>(layers)] = Eigen::MatrixXd::Ones(1, n);
  for (int l = layers - 1; l >= 0; --l) {
    Eigen::MatrixXd prev = shape.weight(params, l).transpose() * u[static_cast<std::size_t>(l + 1)];
    if (l > 0) prev.array() *= activation_derivative(shape.activation(), tape.inputs[static_cast<std::size_t>(l)]).array();
    u[static_cast<std::size_t>(l)] = std::move(prev);
  }
  return u;
}

}  // namespace

Eigen::MatrixXd mlp_input_gradient(const MlpShape& shape, const Eigen::VectorXd& params, const MlpTape& tape) {
  check_params(shape, params);
  if (shape.output_size() != 1) throw Error(ErrorCode::invalid_argument, "input gradient needs a scalar output");
  return backward_chain(shape, params, tape).front();
}

Eigen::VectorXd input_gradient_penalty(const MlpShape& shape, const Eigen::VectorXd& params, const MlpTape& tape,
                                       const Eigen::VectorXd& sample_weights, Eigen::VectorXd* grad_params) {
  check_params(shape, params);
  if (shape.output_size() != 1) throw Error(ErrorCode::invalid_argument, "gradient penalty needs a scalar output");
  if (shape.activation() != Activation::relu) {
    throw Error(ErrorCode::invalid_argument, "analytic gradient penalty is only defined for ReLU networks");
  }
  const auto u = backward_chain(shape, params, tape);
  const Eigen::MatrixXd& g = u.front();
  Eigen::VectorXd penalty = g.colwise().squaredNorm().transpose();
  if (!grad_params) return penalty;
  if (sample_weights.size() != g.cols()) throw Error(ErrorCode::dimension_mismatch, "sample weight count");
  if (grad_params->size() != shape.param_count()) *grad_params = Eigen::VectorXd::Zero(shape.param_count());

  // P = |W0^T u1|^2 where u_l = m_l * (W_l^T u_{l+1}); differentiate the
  // chain forward with v_l = dP/d(input-side vector of layer l).
  Eigen::MatrixXd v = 2.0 * g * sample_weights.asDiagonal();
  for (int l = 0; l < shape.layer_count(); ++l) {
    const auto& next_u = u[static_cast<std::size_t>(l + 1)];
    shape.weight(*grad_params, l).noalias() += next_u * v.transpose();
    if (l + 1 == shape.layer_count()) break;
    Eigen::MatrixXd nv = shape.weight(params, l) * v;
    nv.array() *= activation_derivative(shape.activation(), tape.inputs[static_cast<std::size_t>(l + 1)]).array();
    v = std::move(nv);
  }
  return penalty;
}

Adam::Adam(Eigen::Index size, AdamConfig config)
    : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {
  if (!(config.learning_rate >= 0.0)) throw Error(ErrorCode::invalid_argument, "learning rate must be >= 0");
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "optimizer size does not match parameters");
  }
  if (!grad.allFinite()) throw Error(ErrorCode::non_finite, "non-finite gradient");
  Eigen::VectorXd g = grad;
  if (config_.max_grad_norm > 0.0) {
    const double norm = g.norm();
    if (norm > config_.max_grad_norm) g *= config_.max_grad_norm / norm;
  }
  ++t_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * g;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  params.array() -= config_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.epsilon);
}

}  // namespace pointing::learning
