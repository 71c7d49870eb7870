#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointing/analysis/kde.hpp"
#include "pointing/analysis/stats.hpp"
#include "pointing/dataset/accuracy.hpp"
#include "pointing/learning/models.hpp"

namespace pointing::analysis {

struct GridResult {
  bool generated = false;     // false when the rollout failed; see error
  bool hold_detected = false;
  double raw = 0.0;
  double normalized = 0.0;    // 0 when no hold is detected
  std::string error;
};

struct ModelSummary {
  std::string model;
  int points = 0;
  int no_hold = 0;
  int failed = 0;
  // Distribution of normalized accuracy over generated points.
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::vector<int> outliers;  // grid indices beyond 1.5 IQR from the quartiles
};

struct CorrelationRow {
  std::string model;
  std::optional<StatTestResult> result;
  int used = 0;
  int excluded = 0;   // failed or no-hold points
  std::string error;  // e.g. constant input
};

struct EvalReport {
  std::vector<TargetPoint> grid;
  std::vector<double> density;
  std::vector<std::string> models;
  std::vector<std::vector<GridResult>> results;  // [model][grid point]
  std::vector<ModelSummary> summaries;
  std::vector<CorrelationRow> correlations;
};

struct EvalConfig {
  double duration = 3.5;  // s of generated motion per point
  int threads = 1;
  dataset::HoldRule hold;
};

/// Generates every model's motion at every grid point, scores it with
/// clip_accuracy and correlates accuracy with the KDE density (Spearman).
/// Grid points run in parallel; results are stored by index, so output does
/// not depend on the thread count.
EvalReport objective_eval(std::span<const learning::PointingModel* const> models,
                          const motion::SkeletonModel& skeleton, std::span<const TargetPoint> grid,
                          const KDEModel& kde, const EvalConfig& config = {});

/// Linear-interpolation quantile of sorted values.
double quantile(const std::vector<double>& sorted, double q);

/// model,grid_index,x,y,z,density,generated,hold,raw,normalized
void write_eval_csv(std::ostream& out, const EvalReport& report);
/// Per-model distribution rows followed by correlation rows.
void write_eval_summary(std::ostream& out, const EvalReport& report);

}  // namespace pointing::analysis
