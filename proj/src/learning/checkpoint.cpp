#include "pointing/learning/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pointing/common/error.hpp"

namespace pointing::learning {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json v3(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
Eigen::Vector3d v3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

std::string activation_name(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }
Activation activation_from(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  throw Error(ErrorCode::schema, "unknown activation '" + s + "'");
}

json shape_json(const MlpShape& s) { return {{"sizes", s.sizes()}, {"activation", activation_name(s.activation())}}; }
MlpShape shape_from(const json& j) {
  return MlpShape(j.at("sizes").get<std::vector<int>>(), activation_from(j.at("activation").get<std::string>()));
}

json normalizer_json(const RunningNormalizer& n) {
  return {{"mean", vec(n.mean())}, {"variance", vec(n.variance())}, {"count", n.count()}, {"clip", n.clip()}};
}
RunningNormalizer normalizer_from(const json& j) {
  const Eigen::VectorXd mean = vec(j.at("mean"));
  RunningNormalizer n(mean.size(), j.at("clip").get<double>());
  n.set_state(mean, vec(j.at("variance")), j.at("count").get<double>());
  return n;
}

void expect_size(const Eigen::VectorXd& v, Eigen::Index n, const std::string& what) {
  if (v.size() != n) {
    throw Error(ErrorCode::schema, what + " has " + std::to_string(v.size()) + " values, architecture needs " +
                                       std::to_string(n));
  }
}

json policy_json(const TrainedPolicy& m) {
  json j;
  j["format"] = kCheckpointFormat;
  j["architecture"] = {{"skeleton", m.skeleton_id},
                       {"policy", shape_json(m.policy.shape)},
                       {"value", shape_json(m.value.shape)},
                       {"discriminator", shape_json(m.discriminator.shape())},
                       {"discriminator_variant", to_string(m.discriminator.variant())},
                       {"phase_input", m.phase_input}};
  j["policy"] = {{"params", vec(m.policy.params)},
                 {"log_std", vec(m.policy.log_std)},
                 {"action_center", vec(m.policy.action_center)},
                 {"action_half_range", vec(m.policy.action_half_range)},
                 {"input_norm", normalizer_json(m.policy.input_norm)}};
  j["value"] = {{"params", vec(m.value.params)}};
  j["discriminator"] = {{"params", vec(m.discriminator.params)},
                        {"feature_norm", normalizer_json(m.discriminator.feature_norm)}};
  j["sim"] = {{"control_dt", m.sim.control_dt},
              {"substeps", m.sim.substeps},
              {"gravity", v3(m.sim.gravity)},
              {"joint_damping", m.sim.joint_damping},
              {"seed", m.sim.seed}};
  const auto& s = m.initial_state;
  j["initial_state"] = {{"q", vec(s.q)},
                        {"qdot", vec(s.qdot)},
                        {"root_position", v3(s.root_position)},
                        {"root_orientation",
                         {s.root_orientation.w(), s.root_orientation.x(), s.root_orientation.y(),
                          s.root_orientation.z()}}};
  j["side"] = motion::to_string(m.side);
  json curve = json::array();
  for (const auto& p : m.curve) {
    curve.push_back({p.iteration, p.mean_task_reward, p.mean_imitation_reward, p.disc_real_loss, p.disc_fake_loss,
                     p.disc_fake_score, p.policy_loss, p.value_loss, p.mean_ratio, p.clip_fraction});
  }
  j["curve"] = curve;
  return j;
}

TrainedPolicy policy_from(const json& j) {
  if (j.at("format").get<std::string>() != kCheckpointFormat) throw Error(ErrorCode::schema, "not a policy checkpoint");
  const json& arch = j.at("architecture");
  TrainedPolicy m;
  m.skeleton_id = arch.at("skeleton").get<std::string>();
  m.phase_input = arch.at("phase_input").get<bool>();

  m.policy.shape = shape_from(arch.at("policy"));
  const json& p = j.at("policy");
  m.policy.params = vec(p.at("params"));
  expect_size(m.policy.params, m.policy.shape.param_count(), "policy params");
  m.policy.log_std = vec(p.at("log_std"));
  m.policy.action_center = vec(p.at("action_center"));
  m.policy.action_half_range = vec(p.at("action_half_range"));
  m.policy.input_norm = normalizer_from(p.at("input_norm"));
  const Eigen::Index na = m.policy.shape.output_size();
  expect_size(m.policy.log_std, na, "log_std");
  expect_size(m.policy.action_center, na, "action_center");
  expect_size(m.policy.action_half_range, na, "action_half_range");
  expect_size(m.policy.input_norm.mean(), m.policy.shape.input_size(), "policy input normalizer");

  m.value.shape = shape_from(arch.at("value"));
  m.value.params = vec(j.at("value").at("params"));
  expect_size(m.value.params, m.value.shape.param_count(), "value params");

  const MlpShape dshape = shape_from(arch.at("discriminator"));
  const auto variant = discriminator_variant_from_string(arch.at("discriminator_variant").get<std::string>());
  std::vector<int> hidden(dshape.sizes().begin() + 1, dshape.sizes().end() - 1);
  Rng unused(0);
  m.discriminator = Discriminator(variant, dshape.input_size(), hidden, unused);
  m.discriminator.params = vec(j.at("discriminator").at("params"));
  expect_size(m.discriminator.params, dshape.param_count() * m.discriminator.control_count(), "discriminator params");
  m.discriminator.feature_norm = normalizer_from(j.at("discriminator").at("feature_norm"));

  const json& sim = j.at("sim");
  m.sim.control_dt = sim.at("control_dt").get<double>();
  m.sim.substeps = sim.at("substeps").get<int>();
  m.sim.gravity = v3(sim.at("gravity"));
  m.sim.joint_damping = sim.at("joint_damping").get<double>();
  m.sim.seed = sim.at("seed").get<std::uint64_t>();
  m.sim.validate();

  const json& s = j.at("initial_state");
  m.initial_state.q = vec(s.at("q"));
  m.initial_state.qdot = vec(s.at("qdot"));
  m.initial_state.root_position = v3(s.at("root_position"));
  const json& q = s.at("root_orientation");
  m.initial_state.root_orientation =
      motion::Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), q.at(3).get<double>());
  m.side = motion::handedness_from_string(j.at("side").get<std::string>());
  for (const auto& row : j.at("curve")) {
    CurvePoint c;
    c.iteration = row.at(0).get<int>();
    c.mean_task_reward = row.at(1).get<double>();
    c.mean_imitation_reward = row.at(2).get<double>();
    c.disc_real_loss = row.at(3).get<double>();
    c.disc_fake_loss = row.at(4).get<double>();
    c.disc_fake_score = row.at(5).get<double>();
    c.policy_loss = row.at(6).get<double>();
    c.value_loss = row.at(7).get<double>();
    c.mean_ratio = row.at(8).get<double>();
    c.clip_fraction = row.at(9).get<double>();
    m.curve.push_back(c);
  }
  return m;
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
    out << text;
    if (!out) throw Error(ErrorCode::io, "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorCode::io, "cannot move " + tmp + " to " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, path + ": " + e.what());
  }
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("checkpoint: ") + e.what());
  }
}

}  // namespace

std::string serialize_checkpoint(const TrainedPolicy& model) { return policy_json(model).dump(); }

TrainedPolicy parse_checkpoint(const std::string& text) {
  return guarded([&] { return policy_from(json::parse(text)); });
}

void save_checkpoint(const std::string& path, const TrainedPolicy& model) {
  write_atomic(path, serialize_checkpoint(model));
}

TrainedPolicy load_checkpoint(const std::string& path) {
  const json j = read_json(path);
  return guarded([&] { return policy_from(j); });
}

void save_cluster_checkpoint(const std::string& path, const ClusterPolicySet& set) {
  json j;
  j["format"] = kClusterCheckpointFormat;
  json entries = json::array();
  for (const auto& e : set.entries) {
    json members = json::array();
    for (const auto& m : e.members) members.push_back(v3(m));
    entries.push_back({{"cluster_id", e.cluster_id}, {"members", members}, {"model", policy_json(e.model)}});
  }
  j["entries"] = entries;
  write_atomic(path, j.dump());
}

ClusterPolicySet load_cluster_checkpoint(const std::string& path) {
  const json j = read_json(path);
  return guarded([&] {
    if (j.at("format").get<std::string>() != kClusterCheckpointFormat) {
      throw Error(ErrorCode::schema, "not a cluster policy checkpoint");
    }
    ClusterPolicySet set;
    for (const auto& e : j.at("entries")) {
      ClusterPolicy c;
      c.cluster_id = e.at("cluster_id").get<int>();
      for (const auto& m : e.at("members")) c.members.push_back(v3(m));
      c.model = policy_from(e.at("model"));
      set.entries.push_back(std::move(c));
    }
    return set;
  });
}

}  // namespace pointing::learning
