#include "pointing/learning/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pointing/common/error.hpp"

namespace pointing::learning {

void TransitionBuffer::validate() const {
  const std::size_t n = states.size();
  const bool ragged = actions.size() != n || features.size() != n || log_probs.size() != n ||
                      task_rewards.size() != n || imitation_rewards.size() != n || rewards.size() != n ||
                      values.size() != n || phases.size() != n || targets.size() != n || dones.size() != n ||
                      (!advantages.empty() && advantages.size() != n) || (!returns.empty() && returns.size() != n);
  if (ragged) throw Error(ErrorCode::dimension_mismatch, "transition buffer columns differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(task_rewards[i]) || !std::isfinite(imitation_rewards[i]) || !std::isfinite(rewards[i])) {
      throw Error(ErrorCode::non_finite, "non-finite reward at transition " + std::to_string(i));
    }
  }
}

void PpoConfig::validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw Error(ErrorCode::invalid_argument, "clip epsilon must be in (0,1)");
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorCode::invalid_argument, "discount must be in (0,1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw Error(ErrorCode::invalid_argument, "GAE lambda must be in [0,1]");
  if (epochs < 1 || minibatch_size < 1) throw Error(ErrorCode::invalid_argument, "epochs and minibatch size must be >= 1");
  if (!(policy_learning_rate >= 0.0) || !(value_learning_rate >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "learning rates must be >= 0");
  }
}

void assign_rewards(TransitionBuffer& buffer, const deixis::RewardWeights& weights) {
  weights.validate();
  buffer.rewards.resize(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer.rewards[i] = deixis::combined_reward(buffer.imitation_rewards[i], buffer.task_rewards[i], weights);
  }
}

void compute_advantages(TransitionBuffer& buffer, double discount, double lambda) {
  buffer.validate();
  const std::size_t n = buffer.size();
  buffer.advantages.assign(n, 0.0);
  buffer.returns.assign(n, 0.0);
  double gae = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const bool terminal = buffer.dones[k] || k + 1 == n;
    const double next_value = terminal ? 0.0 : buffer.values[k + 1];
    const double delta = buffer.rewards[k] + discount * next_value - buffer.values[k];
    gae = delta + (terminal ? 0.0 : discount * lambda * gae);
    buffer.advantages[k] = gae;
    buffer.returns[k] = gae + buffer.values[k];
  }
  if (n == 0) return;
  const double mean = std::accumulate(buffer.advantages.begin(), buffer.advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : buffer.advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : buffer.advantages) a = (a - mean) / (sd + 1e-8);
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon) * advantage);
}

double clipped_surrogate_ratio_gradient(double ratio, double advantage, double epsilon) {
  if (advantage > 0.0 && ratio > 1.0 + epsilon) return 0.0;
  if (advantage < 0.0 && ratio < 1.0 - epsilon) return 0.0;
  return advantage;
}

PpoMetrics ppo_update(PolicyNetwork& policy, ValueNetwork& value, const TransitionBuffer& buffer, Adam& policy_opt,
                      Adam& value_opt, const PpoConfig& config, Rng& rng) {
  config.validate();
  buffer.validate();
  const std::size_t n = buffer.size();
  if (n == 0) throw Error(ErrorCode::empty_input, "empty transition buffer");
  if (buffer.advantages.size() != n || buffer.returns.size() != n) {
    throw Error(ErrorCode::invalid_argument, "buffer has no advantages; run compute_advantages first");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(buffer.advantages[i]) || !std::isfinite(buffer.returns[i])) {
      throw Error(ErrorCode::non_finite, "non-finite advantage at transition " + std::to_string(i));
    }
  }

  const Eigen::Index in = policy.input_size();
  const Eigen::Index act = policy.action_size();
  Eigen::MatrixXd raw(in, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd actions(act, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    raw.col(static_cast<Eigen::Index>(i)) = buffer.states[i];
    actions.col(static_cast<Eigen::Index>(i)) = buffer.actions[i];
  }
  const Eigen::MatrixXd obs = policy.normalize(raw);
  const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std.array()).exp();

  PpoMetrics metrics;
  long batches = 0;
  long samples = 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.minibatch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.minibatch_size));
      const auto b = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd x(in, b), a(act, b);
      Eigen::VectorXd old_lp(b), adv(b), ret(b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const std::size_t i = order[start + static_cast<std::size_t>(j)];
        x.col(j) = obs.col(static_cast<Eigen::Index>(i));
        a.col(j) = actions.col(static_cast<Eigen::Index>(i));
        old_lp[j] = buffer.log_probs[i];
        adv[j] = buffer.advantages[i];
        ret[j] = buffer.returns[i];
      }

      MlpTape ptape;
      const Eigen::MatrixXd mu = policy.mean(x, &ptape);
      const Eigen::VectorXd lp = policy.log_prob(mu, a);
      Eigen::MatrixXd grad_mu(act, b);
      double surrogate = 0.0;
      for (Eigen::Index j = 0; j < b; ++j) {
        const double ratio = std::exp(lp[j] - old_lp[j]);
        surrogate += clipped_surrogate(ratio, adv[j], config.clip_epsilon);
        metrics.mean_ratio += ratio;
        if (std::abs(ratio - 1.0) > config.clip_epsilon) metrics.clip_fraction += 1.0;
        // d(-surrogate/b)/dmu = -(dS/dr) r (a - mu) / sigma^2 / b
        const double coeff = -clipped_surrogate_ratio_gradient(ratio, adv[j], config.clip_epsilon) * ratio / b;
        grad_mu.col(j) = coeff * ((a.col(j) - mu.col(j)).array() * inv_var).matrix();
      }
      Eigen::VectorXd pgrad = Eigen::VectorXd::Zero(policy.params.size());
      mlp_backward(policy.shape, policy.params, ptape, grad_mu, pgrad);
      policy_opt.step(policy.params, pgrad);

      MlpTape vtape;
      const Eigen::VectorXd v = value.value(x, &vtape);
      const Eigen::VectorXd err = v - ret;
      Eigen::VectorXd vgrad = Eigen::VectorXd::Zero(value.params.size());
      mlp_backward(value.shape, value.params, vtape, (err / static_cast<double>(b)).transpose(), vgrad);
      value_opt.step(value.params, vgrad);

      metrics.policy_loss += -surrogate / b;
      metrics.value_loss += 0.5 * err.squaredNorm() / b;
      ++batches;
      samples += b;
    }
  }
  metrics.mean_ratio /= static_cast<double>(samples);
  metrics.clip_fraction /= static_cast<double>(samples);
  metrics.policy_loss /= static_cast<double>(batches);
  metrics.value_loss /= static_cast<double>(batches);
  if (!std::isfinite(metrics.policy_loss) || !std::isfinite(metrics.value_loss)) {
    throw Error(ErrorCode::non_finite, "non-finite PPO loss");
  }
  return metrics;
}

}  // namespace pointing::learning
