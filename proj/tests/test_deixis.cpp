#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pointing/common/error.hpp"
#include "pointing/deixis/samplers.hpp"
#include "support.hpp"

using namespace pointing;
using namespace pointing::deixis;

namespace {

/// Always returns the same uniform draw.
struct ConstantSource {
  double value = 0.5;
  double uniform() const { return value; }
};

}  // namespace

TEST_CASE("alignment anchors") {
  const double e = std::exp(1.0);
  auto m = alignment_measure({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  CHECK(m.angle == doctest::Approx(0.0));
  CHECK(m.theta_hat == doctest::Approx(1.0));
  CHECK(std::abs(m.reward - (e - 1) / e) < 1e-12);
  CHECK(std::abs(m.reward - 0.632121) < 1e-6);

  m = alignment_measure({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
  CHECK(std::abs(m.angle - M_PI / 2) < 1e-12);
  CHECK(std::abs(m.reward - (std::exp(0.5) - 1) / e) < 1e-12);
  CHECK(std::abs(m.reward - 0.238651) < 1e-6);

  m = alignment_measure({{0, 0, 0}, {1, 0, 0}, {0, 0, 0}});
  CHECK(std::abs(m.angle - M_PI) < 1e-12);
  CHECK(std::abs(m.reward) < 1e-12);

  CHECK_THROWS_AS(alignment_measure({{0, 0, 0}, {0, 0, 0}, {1, 0, 0}}), Error);
  CHECK_THROWS_AS(alignment_measure({{0, 0, 0}, {1, 0, 0}, {1, 0, 0}}), Error);
}

TEST_CASE("combined reward") {
  CHECK(combined_reward(1.0, 0.0) == doctest::Approx(0.5));
  CHECK(std::abs(combined_reward(0.4, 0.632121) - 0.5160605) < 1e-12);
  for (double x : {0.0, 0.1, 0.37, 1.0}) CHECK(combined_reward(x, x) == doctest::Approx(x));
  CHECK(combined_reward(0.2, 0.9) == combined_reward(0.9, 0.2));
  RewardWeights bad{-0.1, 1.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("reward is monotone in angle and scale invariant") {
  Rng rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    const Eigen::Vector3d e = Eigen::Vector3d::Random();
    const Eigen::Vector3d dir = test::random_unit(rng);
    const Eigen::Vector3d h = e + rng.uniform(0.05, 1.0) * dir;
    const Eigen::Vector3d t = h + rng.uniform(0.05, 3.0) * test::random_unit(rng);
    const auto m = alignment_measure({e, h, t});
    CHECK(m.reward >= 0.0);
    CHECK(m.reward <= kMaxPointingReward + 1e-15);

    const double s1 = rng.uniform(0.1, 10.0), s2 = rng.uniform(0.1, 10.0);
    const Eigen::Vector3d h2 = e + s1 * (h - e);
    const auto scaled = alignment_measure({e, h2, h2 + s2 * (t - h)});
    CHECK(std::abs(scaled.angle - m.angle) < 1e-9);
    CHECK(std::abs(scaled.reward - m.reward) < 1e-9);

    const double a1 = rng.uniform(0.0, M_PI), a2 = rng.uniform(0.0, M_PI);
    if (std::abs(a1 - a2) > 1e-12) {
      CHECK((a1 < a2) == (pointing_reward_from_angle(a1) > pointing_reward_from_angle(a2)));
    }
  }
}

TEST_CASE("perturbation stays in the box and centres on the target") {
  const TargetPoint gt(0.3, 1.2, 0.8);
  Rng rng(2);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto p = perturb_target(gt, rng);
    REQUIRE((p - gt).cwiseAbs().maxCoeff() <= kPerturbHalfWidth);
    sum += p;
  }
  CHECK((sum / n - gt).cwiseAbs().maxCoeff() < 0.002);
  ConstantSource mid;
  CHECK((perturb_target(gt, mid) - gt).norm() < 1e-15);
  Rng a(9), b(9);
  CHECK(perturb_target(gt, a) == perturb_target(gt, b));
}

TEST_CASE("half-cylinder fit") {
  const Eigen::Vector3d anchor(0.0, 0.0, 0.0);
  std::vector<TargetPoint> pts;
  for (double h : {0.5, 1.5})
    for (double a : {-M_PI / 4, M_PI / 4}) pts.push_back(from_cylinder({h, a, 1.0}, anchor));
  const auto r = fit_half_cylinder(pts, anchor);
  CHECK(r.height_min == doctest::Approx(0.5));
  CHECK(r.height_max == doctest::Approx(1.5));
  CHECK(r.arc_min == doctest::Approx(-M_PI / 4));
  CHECK(r.arc_max == doctest::Approx(M_PI / 4));
  CHECK(r.radius_min == doctest::Approx(1.0));
  CHECK(r.radius_max == doctest::Approx(1.0));
  for (const auto& p : pts) CHECK(r.contains(p));
  const std::vector<TargetPoint> same{{1, 1, 1}, {1, 1, 1}};
  CHECK_THROWS_AS(fit_half_cylinder(same, anchor), Error);
}

TEST_CASE("test targets stay in range, are deterministic and uniform") {
  const auto targets = test::fixture_targets();
  const auto range = fit_half_cylinder(targets, dataset::default_root_position());
  const auto a = sample_test_targets(range, 100, 4);
  CHECK(a == sample_test_targets(range, 100, 4));
  for (const auto& p : a) CHECK(range.contains(p));

  const auto many = sample_test_targets(range, 100000, 5);
  // Ten-bin chi-square on each cylindrical parameter; 27.88 is the 0.999 quantile at 9 dof.
  for (int param = 0; param < 3; ++param) {
    std::array<int, 10> bins{};
    for (const auto& p : many) {
      REQUIRE(range.contains(p, 1e-9));
      const auto c = to_cylinder(p, range.anchor);
      const double v = param == 0 ? c.height : param == 1 ? c.arc : c.radius;
      const double lo = param == 0 ? range.height_min : param == 1 ? range.arc_min : range.radius_min;
      const double hi = param == 0 ? range.height_max : param == 1 ? range.arc_max : range.radius_max;
      const int b = std::min(9, static_cast<int>((v - lo) / (hi - lo) * 10));
      ++bins[static_cast<std::size_t>(b)];
    }
    double chi2 = 0.0;
    for (int c : bins) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
    CHECK(chi2 < 27.88);
  }
}

TEST_CASE("distractors respect the distance band") {
  const auto targets = test::fixture_targets();
  const auto range = fit_half_cylinder(targets, dataset::default_root_position());
  Rng rng(6);
  const auto centres = sample_test_targets(range, 50, 7);
  for (int i = 0; i < 2000; ++i) {
    const auto& t = centres[static_cast<std::size_t>(i % 50)];
    const auto pair = sample_distractors(t, range, rng);
    for (const auto& d : pair) {
      const double dist = (d - t).norm();
      CHECK(dist >= kDistractorMin);
      CHECK(dist <= kDistractorMax);
      CHECK(range.contains(d));
    }
  }
  HalfCylinderRange tiny;
  tiny.height_min = 0.0;
  tiny.height_max = 0.01;
  tiny.arc_min = 0.0;
  tiny.arc_max = 0.01;
  tiny.radius_min = 1.0;
  tiny.radius_max = 1.01;
  Rng r2(1);
  CHECK_THROWS_AS(sample_distractors(TargetPoint(0, 0, 1), tiny, r2), Error);
}

TEST_CASE("accepted distractor distances follow the truncated rejection law") {
  // The accepted law is the proposal law conditioned on the band, so the
  // share of accepted distances below 0.30 m must equal the proposal's
  // share below 0.30 m among proposals inside the band.
  const auto targets = test::fixture_targets();
  const auto range = fit_half_cylinder(targets, dataset::default_root_position());
  const TargetPoint t = from_cylinder({0.1, 0.3, 0.85}, range.anchor);
  Rng proposal(21), accept(22);
  int in_band = 0, low = 0;
  for (int i = 0; i < 200000; ++i) {
    const double d = (sample_in_range(range, proposal) - t).norm();
    if (d >= kDistractorMin && d <= kDistractorMax) {
      ++in_band;
      if (d < 0.30) ++low;
    }
  }
  const double expected = static_cast<double>(low) / in_band;
  int total = 0, accepted_low = 0;
  for (int i = 0; i < 50000; ++i) {
    for (const auto& d : sample_distractors(t, range, accept)) {
      ++total;
      if ((d - t).norm() < 0.30) ++accepted_low;
    }
  }
  CHECK(std::abs(static_cast<double>(accepted_low) / total - expected) < 0.01);
}

TEST_CASE("spherical grid") {
  const auto targets = test::fixture_targets();
  const Box box = bounding_box(targets);
  const auto grid = spherical_grid(box, 1000);
  CHECK(grid.size() == 1000);
  CHECK(grid == spherical_grid(box, 1000));
  for (const auto& p : grid) CHECK(box.contains(p));
  CHECK(spherical_grid(box, 27).size() == 27);
  try {
    spherical_grid(box, 1001);
    FAIL("non-cube grid accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
}

TEST_CASE("target csv round trip") {
  const std::vector<LabeledTarget> rows{{0, {0.1, 0.2, 0.3}, "target"}, {1, {1.0 / 3, -2, 1e-9}, "distractor"}};
  std::stringstream ss;
  write_targets_csv(ss, rows);
  const auto back = read_targets_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].position == rows[1].position);
  CHECK(back[1].role == "distractor");
}
