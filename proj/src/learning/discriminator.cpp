#include "pointing/learning/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pointing/common/error.hpp"

namespace pointing::learning {

std::string to_string(DiscriminatorVariant variant) {
  return variant == DiscriminatorVariant::plain ? "plain" : "phase_functioned";
}

DiscriminatorVariant discriminator_variant_from_string(const std::string& s) {
  if (s == "plain") return DiscriminatorVariant::plain;
  if (s == "phase_functioned" || s == "pfnn") return DiscriminatorVariant::phase_functioned;
  throw Error(ErrorCode::invalid_argument, "unknown discriminator variant '" + s + "'");
}

Discriminator::Discriminator(DiscriminatorVariant variant, int feature_size, const std::vector<int>& hidden, Rng& rng)
    : feature_norm(feature_size), variant_(variant) {
  std::vector<int> sizes{feature_size};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  shape_ = MlpShape(sizes, Activation::relu);
  const Eigen::Index n = shape_.param_count();
  params.resize(n * control_count());
  // Control sets start identical so the initial blend is phase independent.
  params.head(n) = shape_.initialize(rng, 1.0);
  for (int k = 1; k < control_count(); ++k) params.segment(k * n, n) = params.head(n);
}

std::array<double, Discriminator::kControlPoints> Discriminator::blend_weights(double phase) {
  if (!std::isfinite(phase)) throw Error(ErrorCode::non_finite, "phase is not finite");
  const double pw = std::clamp(phase, 0.0, 1.0) * (kControlPoints - 1);
  const int k = std::min(static_cast<int>(std::floor(pw)), kControlPoints - 2);
  const double mu = pw - k;
  const double mu2 = mu * mu;
  const double mu3 = mu2 * mu;
  const std::array<double, 4> w{-0.5 * mu3 + mu2 - 0.5 * mu, 1.5 * mu3 - 2.5 * mu2 + 1.0,
                                -1.5 * mu3 + 2.0 * mu2 + 0.5 * mu, 0.5 * mu3 - 0.5 * mu2};
  std::array<double, kControlPoints> out{};
  for (int j = 0; j < 4; ++j) out[static_cast<std::size_t>(std::clamp(k - 1 + j, 0, kControlPoints - 1))] += w[j];
  return out;
}

Eigen::Map<const Eigen::VectorXd> Discriminator::control(int k) const {
  const Eigen::Index n = shape_.param_count();
  return {params.data() + k * n, n};
}

Eigen::VectorXd Discriminator::parameters_at(double phase) const {
  if (variant_ == DiscriminatorVariant::plain) return params;
  const auto w = blend_weights(phase);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(shape_.param_count());
  for (int k = 0; k < kControlPoints; ++k)
    if (w[k] != 0.0) out += w[k] * control(k);
  return out;
}

namespace {

/// Sample indices grouped by exact phase value (one group for plain).
std::map<double, std::vector<Eigen::Index>> phase_groups(const Discriminator& disc, const Eigen::VectorXd& phases) {
  std::map<double, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    const double key = disc.variant() == DiscriminatorVariant::plain ? 0.0 : phases[i];
    groups[key].push_back(i);
  }
  return groups;
}

void check_batch(const Discriminator& disc, const Eigen::MatrixXd& features, const Eigen::VectorXd& phases) {
  if (features.rows() != disc.feature_size()) {
    throw Error(ErrorCode::dimension_mismatch, "discriminator feature has " + std::to_string(features.rows()) +
                                                   " entries, expected " + std::to_string(disc.feature_size()));
  }
  if (phases.size() != features.cols()) throw Error(ErrorCode::dimension_mismatch, "one phase per feature column");
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
  return out;
}

}  // namespace

Eigen::VectorXd Discriminator::score(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& phases) const {
  check_batch(*this, raw_features, phases);
  const Eigen::MatrixXd x = feature_norm.normalize(raw_features);
  Eigen::VectorXd out(x.cols());
  for (const auto& [phase, idx] : phase_groups(*this, phases)) {
    const Eigen::MatrixXd d = mlp_forward(shape_, parameters_at(phase), gather(x, idx));
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = d(0, static_cast<Eigen::Index>(i));
  }
  return out;
}

void Discriminator::fit_normalizer(const Eigen::MatrixXd& reference_features) {
  if (reference_features.cols() == 0) throw Error(ErrorCode::empty_input, "no reference features");
  feature_norm = RunningNormalizer(feature_size());
  feature_norm.update(reference_features);
}

double imitation_reward_from_score(double d) {
  if (!std::isfinite(d)) throw Error(ErrorCode::non_finite, "discriminator output is not finite");
  return std::clamp(1.0 - 0.25 * (d - 1.0) * (d - 1.0), 0.0, 1.0);
}

Eigen::VectorXd imitation_reward(const Discriminator& disc, const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& phases) {
  Eigen::VectorXd d = disc.score(features, phases);
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = imitation_reward_from_score(d[i]);
  return d;
}

DiscriminatorLoss update_discriminator(Discriminator& disc, Adam& optimizer, const Eigen::MatrixXd& policy_features,
                                       const Eigen::VectorXd& policy_phases, const Eigen::MatrixXd& reference_features,
                                       const Eigen::VectorXd& reference_phases, double gp_weight) {
  if (policy_features.cols() == 0 || reference_features.cols() == 0) {
    throw Error(ErrorCode::empty_input, "discriminator update needs non-empty policy and reference batches");
  }
  check_batch(disc, policy_features, policy_phases);
  check_batch(disc, reference_features, reference_phases);

  const MlpShape& shape = disc.shape();
  const Eigen::Index n = shape.param_count();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(disc.params.size());
  DiscriminatorLoss loss;

  auto accumulate = [&](const Eigen::MatrixXd& raw, const Eigen::VectorXd& phases, bool real) {
    const Eigen::MatrixXd x = disc.feature_norm.normalize(raw);
    const double inv_n = 1.0 / static_cast<double>(x.cols());
    const double label = real ? 1.0 : -1.0;
    for (const auto& [phase, idx] : phase_groups(disc, phases)) {
      const Eigen::VectorXd p = disc.parameters_at(phase);
      MlpTape tape;
      const Eigen::MatrixXd d = mlp_forward(shape, p, gather(x, idx), &tape);
      const Eigen::ArrayXXd err = d.array() - label;
      (real ? loss.real_loss : loss.fake_loss) += err.square().sum() * inv_n;
      (real ? loss.real_score : loss.fake_score) += d.sum() * inv_n;
      Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
      mlp_backward(shape, p, tape, (2.0 * inv_n * err).matrix(), g);
      if (real && gp_weight > 0.0) {
        const Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(idx.size()),
                                                            0.5 * gp_weight * inv_n);
        loss.gradient_penalty += input_gradient_penalty(shape, p, tape, w, &g).sum() * inv_n;
      }
      if (disc.variant() == DiscriminatorVariant::plain) {
        grad += g;
      } else {
        const auto bw = Discriminator::blend_weights(phase);
        for (int k = 0; k < Discriminator::kControlPoints; ++k)
          if (bw[k] != 0.0) grad.segment(k * n, n) += bw[k] * g;
      }
    }
  };
  accumulate(reference_features, reference_phases, true);
  accumulate(policy_features, policy_phases, false);

  if (!std::isfinite(loss.real_loss) || !std::isfinite(loss.fake_loss) || !std::isfinite(loss.gradient_penalty)) {
    throw Error(ErrorCode::non_finite, "non-finite discriminator loss");
  }
  optimizer.step(disc.params, grad);
  return loss;
}

}  // namespace pointing::learning
