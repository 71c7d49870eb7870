#include "pointing/learning/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pointing/common/error.hpp"
#include "pointing/common/text.hpp"

namespace pointing::learning {

void TrainConfig::validate() const {
  weights.validate();
  ppo.validate();
  sim.validate();
  if (iterations < 0) throw Error(ErrorCode::invalid_argument, "iteration budget must be >= 0");
  if (episodes_per_iteration < 1) throw Error(ErrorCode::invalid_argument, "episodes per iteration must be >= 1");
  if (discriminator_minibatch < 1) throw Error(ErrorCode::invalid_argument, "discriminator minibatch must be >= 1");
  if (!(discriminator_learning_rate >= 0.0) || !(gradient_penalty >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "discriminator learning rate and penalty must be >= 0");
  }
}

TrainedPolicy initialize_policy(const SkeletonModel& skeleton, std::span<const MotionClip> clips,
                                const TrainConfig& config) {
  config.validate();
  if (clips.empty()) throw Error(ErrorCode::empty_input, "no demonstration clips");
  Rng rng(mix_seed(config.seed, 1));
  TrainedPolicy out;
  out.skeleton_id = skeleton.id();
  out.policy = PolicyNetwork(skeleton, config.networks.policy_hidden, config.networks.log_std, rng);
  out.value = ValueNetwork(out.policy.input_size(), config.networks.value_hidden, rng);
  out.discriminator = Discriminator(config.variant, 2 * skeleton.link_count() * 13, config.networks.discriminator_hidden, rng);
  out.phase_input = config.phase_input;
  out.sim = config.sim;
  out.initial_state = clips.front().frames.front();
  out.side = clips.front().handedness;
  return out;
}

TrainedPolicy train_policy(const SkeletonModel& skeleton, std::span<const MotionClip> clips, const TrainConfig& config,
                           const ProgressCallback& progress) {
  TrainedPolicy out = initialize_policy(skeleton, clips, config);
  if (config.iterations == 0) return out;

  PointingEnv env(skeleton, clips, config.sim, config.phase_input);
  const ReferenceTransitions reference = reference_transitions(skeleton, env.clips(), 1.0 / config.sim.control_dt);
  out.discriminator.fit_normalizer(reference.features);

  AdamConfig pol_cfg{config.ppo.policy_learning_rate, 0.9, 0.999, 1e-8, config.ppo.max_grad_norm};
  AdamConfig val_cfg{config.ppo.value_learning_rate, 0.9, 0.999, 1e-8, config.ppo.max_grad_norm};
  AdamConfig disc_cfg{config.discriminator_learning_rate, 0.9, 0.999, 1e-8, 0.0};
  Adam policy_opt(out.policy.params.size(), pol_cfg);
  Adam value_opt(out.value.params.size(), val_cfg);
  Adam disc_opt(out.discriminator.params.size(), disc_cfg);

  Rng episode_rng(mix_seed(config.sim.seed, config.seed));
  Rng action_rng(mix_seed(config.seed, 2));
  Rng batch_rng(mix_seed(config.seed, 3));
  const bool train_disc = config.weights.imitation > 0.0;

  for (int it = 0; it < config.iterations; ++it) {
    TransitionBuffer buf;
    for (int e = 0; e < config.episodes_per_iteration; ++e) {
      env.reset(episode_rng);
      Eigen::VectorXd s_char = env.character_observation();
      while (!env.done()) {
        const Eigen::VectorXd input = env.policy_input();
        double lp = 0.0;
        const Eigen::VectorXd action = out.policy.sample_action(input, action_rng, lp);
        const double phase = env.phase();
        const double r_task = env.step(out.policy.to_pd_targets(action));
        const Eigen::VectorXd next_char = env.character_observation();
        Eigen::VectorXd feature(2 * s_char.size());
        feature << s_char, next_char;
        buf.states.push_back(input);
        buf.actions.push_back(action);
        buf.features.push_back(std::move(feature));
        buf.log_probs.push_back(lp);
        buf.task_rewards.push_back(r_task);
        buf.phases.push_back(phase);
        buf.targets.push_back(env.target());
        buf.dones.push_back(env.done());
        s_char = next_char;
      }
    }
    const auto n = static_cast<Eigen::Index>(buf.size());
    Eigen::MatrixXd raw(out.policy.input_size(), n), feats(out.discriminator.feature_size(), n);
    Eigen::VectorXd phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      raw.col(i) = buf.states[static_cast<std::size_t>(i)];
      feats.col(i) = buf.features[static_cast<std::size_t>(i)];
      phases[i] = buf.phases[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd values = out.value.value(out.policy.normalize(raw));
    const Eigen::VectorXd r_imit = imitation_reward(out.discriminator, feats, phases);
    buf.values.assign(values.data(), values.data() + n);
    buf.imitation_rewards.assign(r_imit.data(), r_imit.data() + n);
    assign_rewards(buf, config.weights);

    CurvePoint point;
    point.iteration = it;
    for (Eigen::Index i = 0; i < n; ++i) point.mean_task_reward += buf.task_rewards[static_cast<std::size_t>(i)] / n;
    point.mean_imitation_reward = r_imit.mean();

    if (train_disc) {
      const auto mb = std::min<Eigen::Index>(config.discriminator_minibatch, n);
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
      std::shuffle(perm.begin(), perm.end(), batch_rng.engine());
      int steps = 0;
      for (Eigen::Index start = 0; start + mb <= n; start += mb) {
        Eigen::MatrixXd pf(feats.rows(), mb), rf(feats.rows(), mb);
        Eigen::VectorXd pp(mb), rp(mb);
        for (Eigen::Index j = 0; j < mb; ++j) {
          const Eigen::Index i = perm[static_cast<std::size_t>(start + j)];
          pf.col(j) = feats.col(i);
          pp[j] = phases[i];
          const auto r = static_cast<Eigen::Index>(batch_rng.index(static_cast<std::size_t>(reference.phases.size())));
          rf.col(j) = reference.features.col(r);
          rp[j] = reference.phases[r];
        }
        const DiscriminatorLoss dl =
            update_discriminator(out.discriminator, disc_opt, pf, pp, rf, rp, config.gradient_penalty);
        point.disc_real_loss += dl.real_loss;
        point.disc_fake_loss += dl.fake_loss;
        point.disc_fake_score += dl.fake_score;
        ++steps;
      }
      if (steps > 0) {
        point.disc_real_loss /= steps;
        point.disc_fake_loss /= steps;
        point.disc_fake_score /= steps;
      }
    }

    compute_advantages(buf, config.ppo.discount, config.ppo.gae_lambda);
    const PpoMetrics pm = ppo_update(out.policy, out.value, buf, policy_opt, value_opt, config.ppo, batch_rng);
    out.policy.input_norm.update(raw);
    point.policy_loss = pm.policy_loss;
    point.value_loss = pm.value_loss;
    point.mean_ratio = pm.mean_ratio;
    point.clip_fraction = pm.clip_fraction;
    if (!std::isfinite(point.disc_real_loss) || !std::isfinite(point.disc_fake_loss)) {
      throw Error(ErrorCode::non_finite, "iteration " + std::to_string(it) + ": non-finite discriminator loss");
    }
    out.curve.push_back(point);
    if (progress) progress(point);
  }
  return out;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  using text::format_double;
  out << "iteration,mean_rG,mean_rI,disc_real_loss,disc_fake_loss,disc_fake_score,policy_loss,value_loss,mean_ratio,"
         "clip_fraction\n";
  for (const auto& p : curve) {
    out << p.iteration << ',' << format_double(p.mean_task_reward) << ',' << format_double(p.mean_imitation_reward)
        << ',' << format_double(p.disc_real_loss) << ',' << format_double(p.disc_fake_loss) << ','
        << format_double(p.disc_fake_score) << ',' << format_double(p.policy_loss) << ','
        << format_double(p.value_loss) << ',' << format_double(p.mean_ratio) << ','
        << format_double(p.clip_fraction) << '\n';
  }
}

ClusterPolicySet train_cluster_policies(const dataset::ClipLibrary& library, const std::vector<int>& labels,
                                        int cluster_count, const TrainConfig& config,
                                        const ProgressCallback& progress) {
  if (labels.size() != library.clips.size()) {
    throw Error(ErrorCode::dimension_mismatch, "one cluster label per library clip is required");
  }
  if (cluster_count < 1) throw Error(ErrorCode::invalid_argument, "cluster count must be >= 1");
  std::vector<std::vector<MotionClip>> members(static_cast<std::size_t>(cluster_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= cluster_count) {
      throw Error(ErrorCode::invalid_argument, "cluster label out of range for clip '" + library.clips[i].source_id + "'");
    }
    if (!library.clips[i].target) {
      throw Error(ErrorCode::invalid_argument, "clip '" + library.clips[i].source_id + "' has no target");
    }
    members[static_cast<std::size_t>(labels[i])].push_back(library.clips[i]);
  }
  for (int c = 0; c < cluster_count; ++c) {
    if (members[static_cast<std::size_t>(c)].empty()) {
      throw Error(ErrorCode::empty_input, "cluster " + std::to_string(c) + " has no members");
    }
  }
  ClusterPolicySet set;
  for (int c = 0; c < cluster_count; ++c) {
    const auto& clips = members[static_cast<std::size_t>(c)];
    ClusterPolicy entry;
    entry.cluster_id = c;
    for (const auto& clip : clips) entry.members.push_back(*clip.target);
    entry.model = train_policy(library.skeleton, clips, config, progress);
    set.entries.push_back(std::move(entry));
  }
  return set;
}

const ClusterPolicy& select_policy(const ClusterPolicySet& set, const deixis::TargetPoint& test_target) {
  if (set.entries.empty()) throw Error(ErrorCode::empty_input, "empty cluster policy set");
  const ClusterPolicy* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : set.entries) {
    for (const auto& m : e.members) {
      const double d = (m - test_target).squaredNorm();
      if (d < best_d || (d == best_d && best && e.cluster_id < best->cluster_id)) {
        best_d = d;
        best = &e;
      }
    }
  }
  if (!best) throw Error(ErrorCode::empty_input, "cluster policy set has no member targets");
  return *best;
}

}  // namespace pointing::learning
