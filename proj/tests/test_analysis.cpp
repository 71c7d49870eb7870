#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pointing/analysis/mean_shift.hpp"
#include "pointing/analysis/objective_eval.hpp"
#include "pointing/analysis/observer.hpp"
#include "pointing/analysis/perceptual.hpp"
#include "pointing/common/error.hpp"
#include "pointing/dataset/accuracy.hpp"
#include "support.hpp"

using namespace pointing;
using namespace pointing::analysis;

namespace {

std::vector<TargetPoint> blobs(Rng& rng, int per, double spread) {
  const std::array<TargetPoint, 3> centres{TargetPoint(0, 0, 0), TargetPoint(3, 0, 0), TargetPoint(0, 3, 1)};
  std::vector<TargetPoint> pts;
  for (const auto& c : centres)
    for (int i = 0; i < per; ++i) pts.push_back(c + spread * TargetPoint(rng.normal(), rng.normal(), rng.normal()));
  return pts;
}

/// Two-sided exact signed-rank p by enumerating every sign assignment.
double brute_wilcoxon_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  std::vector<double> mags(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mags[i] = std::abs(d[i]);
  std::vector<double> ranks(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double below = 0, equal = 0;
    for (double m : mags) {
      below += m < mags[i];
      equal += m == mags[i];
    }
    ranks[i] = below + (equal + 1) / 2.0;
  }
  double w_plus = 0.0, total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += ranks[i];
    if (d[i] > 0) w_plus += ranks[i];
  }
  const double w_min = std::min(w_plus, total - w_plus);
  const std::size_t n = d.size();
  long count = 0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) s += ranks[i];
    if (s <= w_min + 1e-9) ++count;
  }
  return std::min(1.0, 2.0 * static_cast<double>(count) / static_cast<double>(1ul << n));
}

/// Model that always fails, standing in for a diverging rollout.
class FailingModel final : public learning::PointingModel {
 public:
  std::string name() const override { return "failing"; }
  dataset::MotionClip generate(const TargetPoint&, double) const override {
    throw Error(ErrorCode::simulation_divergence, "diverged");
  }
};

/// Model that always returns the same clip regardless of target.
class ConstantModel final : public learning::PointingModel {
 public:
  explicit ConstantModel(dataset::MotionClip clip) : clip_(std::move(clip)) {}
  std::string name() const override { return "constant"; }
  dataset::MotionClip generate(const TargetPoint&, double) const override { return clip_; }

 private:
  dataset::MotionClip clip_;
};

/// Yaw sweep that keeps the hand moving faster than the hold threshold.
dataset::MotionClip sweeping_clip(const motion::SkeletonModel& arm, int frames) {
  auto c = test::still_clip(arm, motion::JointState::rest(arm, dataset::default_root_position()), frames);
  for (std::size_t k = 0; k < c.frames.size(); ++k) {
    c.frames[k].q[0] = -1.4 + 2.8 * static_cast<double>(k) / static_cast<double>(frames - 1);
    c.frames[k].q[1] = 1.5;
  }
  dataset::fill_velocities(c);
  return c;
}

std::vector<ExportRecord> study_fixture(int participants, double gap) {
  std::vector<ExportRecord> out;
  for (int p = 0; p < participants; ++p) {
    const std::string id = "p" + std::to_string(p);
    int trial = 0;
    for (const std::string model : {"A", "B"}) {
      const double base = model == "A" ? 3.0 + gap + 0.05 * p : 3.0;
      for (int k = 0; k < 2; ++k) out.push_back({id, "s" + id, model, 1, kConditionNone, trial++, base, true});
      for (const char* cond : {kConditionAcross, kConditionSideBySide}) {
        const double v = model == "A" ? 1.0 : (p + trial) % 2;
        out.push_back({id, "s" + id, model, 2, cond, trial++, v, true});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scott bandwidth") {
  Eigen::MatrixXd x(100, 1);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) x(i, 0) = rng.normal();
  x.array() -= x.mean();
  x /= std::sqrt(x.squaredNorm() / 99.0);
  CHECK(std::abs(scott_bandwidth(x)[0] - 0.398107) < 1e-6);

  std::vector<TargetPoint> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({rng.normal(), 2 * rng.normal(), 0.5 * rng.normal()});
  const auto h = scott_bandwidth(pts);
  std::vector<TargetPoint> scaled;
  for (const auto& p : pts) scaled.push_back(3.0 * p + TargetPoint(1, 2, 3));
  CHECK((scott_bandwidth(scaled) - 3.0 * h).norm() < 1e-12);
  CHECK(scott_bandwidth_pooled(scaled) == doctest::Approx(3.0 * scott_bandwidth_pooled(pts)));

  Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(10, 2);
  flat.col(0) = Eigen::VectorXd::LinSpaced(10, 0, 1);
  CHECK_THROWS_AS(scott_bandwidth(flat), Error);
  CHECK_THROWS_AS(scott_bandwidth(Eigen::MatrixXd::Ones(1, 3)), Error);
}

TEST_CASE("kde is a normalized density") {
  const auto samples = test::fixture_targets();
  const auto model = fit_kde(samples);
  for (const auto& s : samples) {
    CHECK(kde_evaluate(model, s) > kde_evaluate(model, TargetPoint(s + 3.0 * model.bandwidth)));
  }
  Rng rng(2);
  // Monte Carlo mass over a box reaching 6 bandwidths past the samples.
  TargetPoint lo = samples[0], hi = samples[0];
  for (const auto& s : samples) {
    lo = lo.cwiseMin(s);
    hi = hi.cwiseMax(s);
  }
  lo -= 6.0 * model.bandwidth;
  hi += 6.0 * model.bandwidth;
  const double volume = (hi - lo).prod();
  double mass = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const TargetPoint q(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z()));
    const double v = kde_evaluate(model, q);
    CHECK(v >= 0.0);
    mass += v;
  }
  CHECK(std::abs(mass * volume / n - 1.0) < 0.03);

  const TargetPoint shift(0.3, -1.0, 2.0);
  auto moved = model;
  for (auto& s : moved.samples) s += shift;
  for (int i = 0; i < 100; ++i) {
    const TargetPoint q(rng.uniform(0, 1), rng.uniform(1, 2), rng.uniform(0, 1));
    CHECK(kde_evaluate(moved, TargetPoint(q + shift)) == doctest::Approx(kde_evaluate(model, q)).epsilon(1e-12));
  }
  const auto batch = kde_evaluate(model, std::span(samples));
  CHECK(batch[1] == kde_evaluate(model, samples[1]));
}

TEST_CASE("mean shift recovers separated blobs") {
  Rng rng(3);
  const auto pts = blobs(rng, 20, 0.2);
  const auto model = mean_shift_cluster(pts, 0.6);
  CHECK(model.cluster_count() == 3);
  CHECK(model.unconverged.empty());
  for (int b = 0; b < 3; ++b)
    for (int i = 1; i < 20; ++i) CHECK(model.assignment[static_cast<std::size_t>(b * 20 + i)] == model.assignment[static_cast<std::size_t>(b * 20)]);
  CHECK(model.assignment[0] != model.assignment[20]);
  CHECK(model.assignment[20] != model.assignment[40]);

  const std::vector<TargetPoint> single{{1, 2, 3}};
  const auto one = mean_shift_cluster(single, 0.1);
  CHECK(one.cluster_count() == 1);
  CHECK((one.modes[0] - single[0]).norm() < 1e-12);
  CHECK(mean_shift_cluster(pts, 100.0).cluster_count() == 1);
  CHECK_THROWS_AS(mean_shift_cluster(pts, 0.0), Error);
  CHECK_THROWS_AS(mean_shift_cluster(std::vector<TargetPoint>{}, 1.0), Error);

  int prev = static_cast<int>(pts.size()) + 1;
  for (double h : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4}) {
    const int c = mean_shift_cluster(pts, h).cluster_count();
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{3, 1, 2, 4, 5};
  const auto r = spearman(x, y);
  CHECK(r.statistic == doctest::Approx(0.7));
  // Exact p by enumerating all 120 orderings with the sum-of-squared-rank-differences form.
  std::vector<int> perm{1, 2, 3, 4, 5};
  int extreme = 0, total = 0;
  do {
    int d2 = 0;
    for (int i = 0; i < 5; ++i) d2 += (perm[static_cast<std::size_t>(i)] - (i + 1)) * (perm[static_cast<std::size_t>(i)] - (i + 1));
    const double rho = 1.0 - 6.0 * d2 / 120.0;
    extreme += std::abs(rho) >= 0.7 - 1e-12;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(r.p_value == doctest::Approx(static_cast<double>(extreme) / total));
  CHECK(r.distribution == "permutation");

  std::vector<double> up(30), down(30), warped(30);
  Rng rng(4);
  std::vector<double> noisy(30);
  for (int i = 0; i < 30; ++i) {
    up[static_cast<std::size_t>(i)] = i;
    down[static_cast<std::size_t>(i)] = -3.0 * i;
    noisy[static_cast<std::size_t>(i)] = i + 10 * rng.normal();
    warped[static_cast<std::size_t>(i)] = std::exp(noisy[static_cast<std::size_t>(i)] / 10.0);
  }
  CHECK(spearman(up, up).statistic == doctest::Approx(1.0));
  CHECK(spearman(up, down).statistic == doctest::Approx(-1.0));
  CHECK(spearman(up, noisy).statistic == spearman(up, warped).statistic);
  CHECK(spearman(up, noisy).distribution == "t");
  CHECK_THROWS_AS(spearman(up, std::vector<double>(30, 2.0)), Error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("average ranks") {
  const std::vector<double> v{10, 20, 20, 5};
  CHECK(average_ranks(v) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("wilcoxon matches brute force enumeration") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 5 + static_cast<int>(rng.index(8));
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      // Coarse values produce ties and the occasional zero difference.
      a[static_cast<std::size_t>(i)] = std::round(rng.uniform(0, 6)) / 2.0;
      b[static_cast<std::size_t>(i)] = std::round(rng.uniform(0, 6)) / 2.0 - (trial % 3 == 0 ? 0.5 : 0.0);
    }
    int nonzero = 0;
    for (int i = 0; i < n; ++i) nonzero += a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)];
    if (nonzero < kWilcoxonMinPairs) {
      CHECK_THROWS_AS(wilcoxon_signed_rank(a, b), Error);
      continue;
    }
    const auto res = wilcoxon_signed_rank(a, b);
    CHECK(res.n == nonzero);
    CHECK(res.p_value == doctest::Approx(brute_wilcoxon_p(a, b)).epsilon(1e-12));
    CHECK(wilcoxon_signed_rank(b, a).p_value == res.p_value);
  }
  const std::vector<double> same{1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(wilcoxon_signed_rank(same, same), Error);

  std::vector<double> big_a(40), big_b(40);
  for (int i = 0; i < 40; ++i) {
    big_a[static_cast<std::size_t>(i)] = i + 0.5;
    big_b[static_cast<std::size_t>(i)] = i + (i % 4 == 0 ? 1.0 : 0.0);
  }
  const auto normal = wilcoxon_signed_rank(big_a, big_b);
  CHECK(normal.distribution == "normal");
  CHECK(normal.p_value < 0.01);
}

TEST_CASE("holm and bonferroni") {
  const std::vector<double> p{0.001, 0.009, 0.04};
  CHECK(holm_bonferroni(p, 0.01) == std::vector<bool>{true, false, false});
  CHECK(holm_bonferroni(std::vector<double>{0.004, 0.001, 0.009}, 0.01) == std::vector<bool>{true, true, true});
  CHECK(bonferroni(std::vector<double>{0.004, 0.001, 0.009}, 0.01) == std::vector<bool>{false, true, false});
  Rng rng(6);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> ps(1 + rng.index(8));
    for (auto& v : ps) v = std::pow(rng.uniform(), 3.0) * 0.1;
    const auto h = holm_bonferroni(ps, 0.01);
    const auto b = bonferroni(ps, 0.01);
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK((!b[i] || h[i]));
  }
  CHECK_THROWS_AS(holm_bonferroni(std::vector<double>{1.5}, 0.01), Error);
}

TEST_CASE("simulated observer picks the aimed-at candidate") {
  const auto lib = test::toy_library();
  const auto& clip = lib.clips[0];
  const TargetPoint t = *clip.target;
  const std::array<TargetPoint, 3> cands{t, t + TargetPoint(0.5, 0, 0), t + TargetPoint(0, -0.5, 0)};
  const auto choice = simulated_observer(clip, lib.skeleton, cands);
  CHECK(choice.chosen == 0);
  CHECK(choice.frames_used > 0);
  CHECK(choice.frames_used == static_cast<int>(observer_frames(clip, lib.skeleton).size()));

  std::array<int, 3> perm{0, 1, 2};
  do {
    std::array<TargetPoint, 3> relabeled;
    for (int i = 0; i < 3; ++i) relabeled[static_cast<std::size_t>(i)] = cands[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    const auto c = simulated_observer(clip, lib.skeleton, relabeled);
    CHECK(perm[static_cast<std::size_t>(c.chosen)] == 0);
  } while (std::next_permutation(perm.begin(), perm.end()));

  const std::array<TargetPoint, 3> tie{t, t, t + TargetPoint(0, 1, 0)};
  CHECK(simulated_observer(clip, lib.skeleton, tie).chosen == 0);

  // Brute force: mean elbow-hand/hand-candidate angle over the observed frames.
  const auto frames = observer_frames(clip, lib.skeleton);
  const auto hand = dataset::hand_trajectory(clip, lib.skeleton);
  const auto elbow = dataset::elbow_trajectory(clip, lib.skeleton);
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<TargetPoint, 3> rnd;
    for (auto& c : rnd) c = TargetPoint(rng.uniform(-1, 1), rng.uniform(0.8, 2.2), rng.uniform(0.2, 1.2));
    std::array<double, 3> mean{};
    for (std::size_t c = 0; c < 3; ++c) {
      for (int f : frames) {
        const auto i = static_cast<std::size_t>(f);
        const Eigen::Vector3d u = (hand[i] - elbow[i]).normalized(), v = (rnd[c] - hand[i]).normalized();
        mean[c] += std::atan2(u.cross(v).norm(), u.dot(v)) / static_cast<double>(frames.size());
      }
    }
    const auto best = static_cast<int>(std::min_element(mean.begin(), mean.end()) - mean.begin());
    const auto got = simulated_observer(clip, lib.skeleton, rnd);
    CHECK(got.chosen == best);
    for (std::size_t c = 0; c < 3; ++c) CHECK(got.mean_angle[c] == doctest::Approx(mean[c]).epsilon(1e-9));
  }

  const auto moving = sweeping_clip(lib.skeleton, 60);
  try {
    simulated_observer(moving, lib.skeleton, cands);
    FAIL("moving clip accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_hold_detected);
  }
}

TEST_CASE("objective evaluation") {
  const auto lib = test::toy_library();
  const auto targets = lib.targets();
  const auto kde = fit_kde(targets);
  learning::GtnnModel gtnn(lib);
  FailingModel failing;
  const std::vector<const learning::PointingModel*> models{&gtnn, &failing};
  const auto report = objective_eval(models, lib.skeleton, targets, kde);
  REQUIRE(report.results.size() == 2);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto expected = dataset::clip_accuracy(lib.clips[i], lib.skeleton);
    CHECK(report.results[0][i].generated);
    CHECK(report.results[0][i].normalized == expected.normalized);
    CHECK_FALSE(report.results[1][i].generated);
    CHECK(report.results[1][i].error.find("diverged") != std::string::npos);
  }
  CHECK(report.summaries[1].failed == 3);
  CHECK(report.density.size() == 3);

  // A model that never holds leaves nothing to correlate.
  ConstantModel constant(sweeping_clip(lib.skeleton, 60));
  const std::vector<const learning::PointingModel*> one{&constant};
  const auto flat = objective_eval(one, lib.skeleton, targets, kde);
  REQUIRE(flat.correlations.size() == 1);
  CHECK(flat.summaries[0].no_hold == 3);
  CHECK(flat.correlations[0].excluded == 3);
  CHECK_FALSE(flat.correlations[0].result.has_value());
  CHECK_FALSE(flat.correlations[0].error.empty());

  EvalConfig threaded;
  threaded.threads = 3;
  const auto again = objective_eval(models, lib.skeleton, targets, kde, threaded);
  std::stringstream a, b;
  write_eval_csv(a, report);
  write_eval_csv(b, again);
  CHECK(a.str() == b.str());
  std::stringstream s;
  write_eval_summary(s, report);
  CHECK(s.str().find("gtnn") != std::string::npos);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
}

TEST_CASE("perceptual statistics") {
  const auto records = study_fixture(8, 0.5);
  const auto rep = perceptual_stats(records, 0.01);
  CHECK(rep.participants.size() == 8);
  REQUIRE(rep.models == std::vector<std::string>{"A", "B"});
  CHECK(rep.models_stats[0].mos.n == 8);
  CHECK(rep.models_stats[0].mos.mean == doctest::Approx(3.5 + 0.05 * 3.5));
  CHECK(rep.models_stats[1].mos.sd == 0.0);
  CHECK(rep.models_stats[0].accuracy.mean == 1.0);
  const auto mos = std::find_if(rep.tests.begin(), rep.tests.end(), [](const PairwiseTest& t) { return t.measure == "mos"; });
  REQUIRE(mos != rep.tests.end());
  REQUIRE(mos->result.has_value());
  CHECK(mos->result->p_value == doctest::Approx(2.0 / 256.0));
  CHECK(mos->significant);

  const auto single = perceptual_stats(study_fixture(1, 0.5), 0.01);
  CHECK(single.models_stats[0].mos.n == 1);
  CHECK(single.models_stats[0].mos.sd == 0.0);
  for (const auto& t : single.tests) {
    CHECK_FALSE(t.result.has_value());
    CHECK_FALSE(t.refused.empty());
    CHECK_FALSE(t.significant);
  }

  std::stringstream csv;
  write_export_csv(csv, records);
  const auto back = read_export_csv(csv);
  REQUIRE(back.size() == records.size());
  CHECK(back[5].model == records[5].model);
  CHECK(back[5].condition == records[5].condition);
  CHECK(back[5].value == records[5].value);
  std::stringstream bad(std::string(kExportHeader) + "\np0,s,A,1,none,x,3,1\n");
  try {
    read_export_csv(bad);
    FAIL("malformed row accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }

  auto missing = records;
  missing.erase(std::remove_if(missing.begin(), missing.end(),
                               [](const ExportRecord& r) { return r.participant == "p0" && r.model == "B" && r.stage == 2; }),
                missing.end());
  CHECK_THROWS_AS(perceptual_stats(missing), Error);
  std::stringstream report;
  write_perceptual_report(report, rep);
  CHECK(report.str().find("measure,model_a,model_b") != std::string::npos);
}
