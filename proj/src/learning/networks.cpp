#include "pointing/learning/networks.hpp"

#include <cmath>
#include <numbers>

#include "pointing/common/error.hpp"

namespace pointing::learning {

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

PolicyNetwork::PolicyNetwork(const motion::SkeletonModel& skeleton, const std::vector<int>& hidden, double log_std_init,
                             Rng& rng)
    : shape(layer_sizes(policy_input_size(skeleton), hidden, skeleton.dof_count()), Activation::tanh),
      input_norm(policy_input_size(skeleton)) {
  params = shape.initialize(rng, 0.01);
  log_std = Eigen::VectorXd::Constant(skeleton.dof_count(), log_std_init);
  action_center.resize(skeleton.dof_count());
  action_half_range.resize(skeleton.dof_count());
  for (int d = 0; d < skeleton.dof_count(); ++d) {
    const auto& dof = skeleton.dof(d);
    action_center[d] = 0.5 * (dof.lower + dof.upper);
    action_half_range[d] = 0.5 * (dof.upper - dof.lower);
  }
}

Eigen::MatrixXd PolicyNetwork::mean(const Eigen::MatrixXd& normalized, MlpTape* tape) const {
  return mlp_forward(shape, params, normalized, tape);
}

Eigen::VectorXd PolicyNetwork::deterministic_action(const Eigen::VectorXd& raw_input) const {
  return mean(normalize(raw_input)).col(0);
}

Eigen::VectorXd PolicyNetwork::sample_action(const Eigen::VectorXd& raw_input, Rng& rng, double& lp) const {
  const Eigen::VectorXd mu = deterministic_action(raw_input);
  Eigen::VectorXd a(mu.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = mu[i] + std::exp(log_std[i]) * rng.normal();
  lp = log_prob(mu, a)[0];
  return a;
}

Eigen::VectorXd PolicyNetwork::log_prob(const Eigen::MatrixXd& means, const Eigen::MatrixXd& actions) const {
  if (means.rows() != log_std.size() || actions.rows() != log_std.size() || means.cols() != actions.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "log_prob action dimensions");
  }
  const Eigen::ArrayXd inv_var = (-2.0 * log_std.array()).exp();
  const double constant = log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * std::log(2.0 * std::numbers::pi);
  Eigen::VectorXd out(means.cols());
  for (Eigen::Index c = 0; c < means.cols(); ++c) {
    out[c] = -0.5 * ((actions.col(c) - means.col(c)).array().square() * inv_var).sum() - constant;
  }
  return out;
}

Eigen::VectorXd PolicyNetwork::to_pd_targets(const Eigen::VectorXd& action) const {
  if (action.size() != action_center.size()) throw Error(ErrorCode::dimension_mismatch, "action size");
  return action_center + action_half_range.cwiseProduct(action);
}

ValueNetwork::ValueNetwork(int input_size, const std::vector<int>& hidden, Rng& rng)
    : shape(layer_sizes(input_size, hidden, 1), Activation::tanh) {
  params = shape.initialize(rng, 1.0);
}

Eigen::VectorXd ValueNetwork::value(const Eigen::MatrixXd& normalized, MlpTape* tape) const {
  return mlp_forward(shape, params, normalized, tape).row(0).transpose();
}

}  // namespace pointing::learning
