#include <doctest.h>

#include <cmath>

#include "pointing/common/error.hpp"
#include "pointing/motion/dynamics.hpp"
#include "pointing/motion/observation.hpp"
#include "support.hpp"

using namespace pointing;
using namespace pointing::motion;

namespace {

SkeletonModel single_hinge(double length) {
  std::vector<LinkSpec> links(3);
  links[0] = {"root", -1, Vec3::Zero(), 1.0, 0.1, {}};
  // Near-zero mass and inertia everywhere except the unit point mass at the tip.
  links[1] = {"joint", 0, Vec3::Zero(), 1e-12, 1e-12, {}};
  links[1].dofs = {{"hinge", Vec3::UnitZ(), -M_PI, M_PI, 1.0, 1.0, 50.0, 0.0}};
  links[2] = {"tip", 1, Vec3(length, 0.0, 0.0), 1.0, 1e-12, {}};
  return SkeletonModel("hinge", std::move(links), 1, 2);
}

/// Mass matrix from link Jacobians: sum m Jv^T Jv + I Jw^T Jw + diag(armature).
Eigen::MatrixXd jacobian_mass_matrix(const SkeletonModel& skel, const JointState& s) {
  const int n = skel.dof_count();
  const auto frames = compute_frames(skel, s);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> dof_link(static_cast<std::size_t>(n));
  for (int l = 0; l < skel.link_count(); ++l)
    for (std::size_t k = 0; k < skel.link(l).dofs.size(); ++k)
      dof_link[static_cast<std::size_t>(skel.dof_offset(l) + static_cast<int>(k))] = l;
  for (int i = 1; i < skel.link_count(); ++i) {
    Eigen::MatrixXd jv = Eigen::MatrixXd::Zero(3, n), jw = Eigen::MatrixXd::Zero(3, n);
    for (int d = 0; d < n; ++d) {
      const int owner = dof_link[static_cast<std::size_t>(d)];
      if (owner != i && !skel.is_descendant(i, owner)) continue;
      const Vec3 axis = frames.dof_axis[static_cast<std::size_t>(d)];
      jw.col(d) = axis;
      jv.col(d) = axis.cross(frames.position[static_cast<std::size_t>(i)] -
                             frames.position[static_cast<std::size_t>(owner)]);
    }
    m += skel.link(i).mass * jv.transpose() * jv + skel.link(i).inertia * jw.transpose() * jw;
  }
  for (int d = 0; d < n; ++d) m(d, d) += skel.dof(d).armature;
  return m;
}

}  // namespace

TEST_CASE("skeleton built-ins validate and expose pointing links") {
  const auto arm = toy_arm();
  CHECK(arm.dof_count() == 2);
  CHECK(arm.link_count() == 4);
  CHECK(arm.pointing_links().elbow == 2);
  CHECK(arm.pointing_links().hand == 3);
  CHECK_THROWS_AS(arm.pointing_links(Handedness::left), Error);

  const auto hum = desk_humanoid();
  CHECK(hum.dof_count() == 8);
  CHECK(hum.pointing_links(Handedness::left).elbow == 6);
  CHECK(hum.pointing_links(Handedness::left).hand == 7);
  CHECK(hum.mirror_of(2) == 5);
  CHECK(hum.mirror_of(1) == 1);
}

TEST_CASE("skeleton file round trip") {
  const auto hum = desk_humanoid();
  const auto back = parse_skeleton(serialize_skeleton(hum));
  CHECK(back.id() == hum.id());
  CHECK(back.dof_names() == hum.dof_names());
  CHECK(serialize_skeleton(back) == serialize_skeleton(hum));
  CHECK_THROWS_AS(parse_skeleton("{not json"), Error);
  CHECK_THROWS_AS(parse_skeleton(R"({"schema":"pointing-skeleton/1","id":"x","links":[]})"), Error);
}

TEST_CASE("forward kinematics at rest chains offsets") {
  const auto arm = toy_arm();
  const JointState rest = JointState::rest(arm, Vec3(0.0, 1.4, 0.0));
  const auto poses = forward_kinematics(arm, rest);
  CHECK((poses[1].position - Vec3(0.18, 1.4, 0.0)).norm() < 1e-12);
  CHECK((poses[2].position - Vec3(0.18, 1.1, 0.0)).norm() < 1e-12);
  CHECK((poses[3].position - Vec3(0.18, 0.82, 0.0)).norm() < 1e-12);
}

TEST_CASE("single hinge at pi/2 rotates the child offset onto +y") {
  const auto h = single_hinge(0.7);
  JointState s = JointState::rest(h);
  s.q[0] = M_PI / 2;
  const auto poses = forward_kinematics(h, s);
  CHECK((poses[2].position - Vec3(0.0, 0.7, 0.0)).norm() < 1e-12);
}

TEST_CASE("link distances are rigid for any configuration") {
  const auto hum = desk_humanoid();
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = test::random_state(hum, rng);
    const auto poses = forward_kinematics(hum, s);
    for (int i = 1; i < hum.link_count(); ++i) {
      const auto p = static_cast<std::size_t>(hum.link(i).parent);
      CHECK((poses[static_cast<std::size_t>(i)].position - poses[p].position).norm() ==
            doctest::Approx(hum.link(i).offset.norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("mass matrix matches the Jacobian oracle") {
  const auto hum = desk_humanoid();
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = test::random_state(hum, rng);
    const Eigen::MatrixXd m = mass_matrix(hum, s);
    const Eigen::MatrixXd oracle = jacobian_mass_matrix(hum, s);
    CHECK((m - oracle).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.llt().info() == Eigen::Success);
  }
}

TEST_CASE("link velocities match finite differences of positions") {
  const auto hum = desk_humanoid();
  Rng rng(8);
  const auto s = test::random_state(hum, rng, 2.0);
  const auto vel = link_velocities(hum, s);
  const double h = 1e-6;
  JointState a = s, b = s;
  a.q -= h * s.qdot;
  b.q += h * s.qdot;
  const auto pa = forward_kinematics(hum, a), pb = forward_kinematics(hum, b);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const Vec3 fd = (pb[i].position - pa[i].position) / (2 * h);
    CHECK((fd - vel[i].linear).norm() < 1e-6);
  }
}

TEST_CASE("zero gravity with targets at the current pose is an equilibrium") {
  const auto arm = toy_arm();
  JointState s = JointState::rest(arm, Vec3(0.0, 1.4, 0.0));
  s.q << 0.3, 1.1;
  SimConfig cfg;
  cfg.gravity.setZero();
  const auto next = step(arm, s, {s.q}, cfg);
  CHECK((next.q - s.q).norm() == 0.0);
  CHECK(next.qdot.norm() == 0.0);
  CHECK(kinetic_energy(arm, next) == 0.0);
}

TEST_CASE("free pendulum velocity change follows the gravity torque") {
  const auto h = single_hinge(1.0);
  JointState s = JointState::rest(h);
  SimConfig cfg;
  cfg.control_dt = 1e-3;
  cfg.substeps = 1;
  // Horizontal unit point mass: torque m g L about z, inertia m L^2.
  const auto next = step(h, s, {s.q}, cfg);
  CHECK(next.qdot[0] == doctest::Approx(-9.81 * 1e-3).epsilon(1e-9));
}

TEST_CASE("passive chain conserves energy within integrator tolerance") {
  auto links = desk_humanoid().links();
  for (auto& l : links)
    for (auto& d : l.dofs) {
      // Validation needs positive gains; these are too weak to matter.
      d.kp = 1e-9;
      d.kd = 1e-9;
      d.lower = -10.0;
      d.upper = 10.0;
    }
  const SkeletonModel passive("passive", links, 3, 4, {{2, 5}, {3, 6}, {4, 7}});
  Rng rng(11);
  JointState s = test::random_state(passive, rng, 0.5);
  for (int d = 0; d < s.q.size(); ++d) s.q[d] = rng.uniform(-0.5, 0.5);
  SimConfig cfg;
  cfg.substeps = 40;
  const double e0 = kinetic_energy(passive, s) + potential_energy(passive, s, cfg.gravity);
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    s = step(passive, s, {s.q}, cfg);
    const double e = kinetic_energy(passive, s) + potential_energy(passive, s, cfg.gravity);
    worst = std::max(worst, std::abs(e - e0));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("step is deterministic and respects torque limits") {
  const auto hum = desk_humanoid();
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = test::random_state(hum, rng, 3.0);
    Eigen::VectorXd targets(hum.dof_count());
    for (int d = 0; d < targets.size(); ++d) targets[d] = rng.uniform(-10.0, 10.0);
    const auto tau = pd_torque(hum, s, clamp_to_limits(hum, targets));
    for (int d = 0; d < tau.size(); ++d) CHECK(std::abs(tau[d]) <= hum.dof(d).torque_limit);
    const auto a = step(hum, s, {targets}, {});
    const auto b = step(hum, s, {targets}, {});
    CHECK(a.q == b.q);
    CHECK(a.qdot == b.qdot);
  }
}

TEST_CASE("bounded random actions never blow up over 10 s") {
  const auto arm = toy_arm();
  Rng rng(17);
  JointState s = JointState::rest(arm, Vec3(0.0, 1.4, 0.0));
  double top = 0.0;
  for (int k = 0; k < 300; ++k) {
    Eigen::VectorXd targets(2);
    for (int d = 0; d < 2; ++d) targets[d] = rng.uniform(arm.dof(d).lower, arm.dof(d).upper);
    s = step(arm, s, {targets}, {});
    top = std::max(top, s.qdot.cwiseAbs().maxCoeff());
  }
  CHECK(top < 50.0);
}

TEST_CASE("step rejects bad input") {
  const auto arm = toy_arm();
  const JointState s = JointState::rest(arm);
  CHECK_THROWS_AS(step(arm, s, {Eigen::VectorXd::Zero(3)}, {}), Error);
  CHECK_THROWS_AS(step(arm, s, {Eigen::VectorXd::Constant(2, NAN)}, {}), Error);
  SimConfig bad;
  bad.substeps = 0;
  CHECK_THROWS_AS(step(arm, s, {s.q}, bad), Error);
}

TEST_CASE("observation is invariant to root translation and yaw") {
  const auto hum = desk_humanoid();
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = test::random_state(hum, rng, 2.0);
    JointState moved = s;
    moved.root_position += Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    moved.root_orientation = Quat(Eigen::AngleAxisd(rng.uniform(-M_PI, M_PI), Vec3::UnitY())) * s.root_orientation;
    const Eigen::VectorXd a = observe(hum, s).flatten();
    const Eigen::VectorXd b = observe(hum, moved).flatten();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("rest observation holds cumulative offsets") {
  const auto hum = desk_humanoid();
  const auto cs = observe(hum, JointState::rest(hum, Vec3(1.0, 2.0, 3.0)));
  CHECK(cs.flatten().size() == observation_size(hum));
  CHECK((cs.position[4] - Vec3(0.18, 0.45 - 0.58, 0.0)).norm() < 1e-12);
  for (const auto& q : cs.orientation) CHECK(q.w() == doctest::Approx(1.0));
}

TEST_CASE("phase is normalized running time") {
  CHECK(phase_of(0.0, 3.0) == 0.0);
  CHECK(phase_of(3.0, 3.0) == 1.0);
  CHECK(phase_of(1.5, 3.0) == 0.5);
  CHECK_THROWS_AS(phase_of(4.0, 3.0), Error);
  CHECK_THROWS_AS(phase_of(1.0, 0.0), Error);
}
