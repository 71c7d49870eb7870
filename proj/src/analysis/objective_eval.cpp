#include "pointing/analysis/objective_eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "pointing/common/error.hpp"
#include "pointing/common/text.hpp"

namespace pointing::analysis {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::empty_input, "quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

GridResult evaluate_point(const learning::PointingModel& model, const motion::SkeletonModel& skeleton,
                          const TargetPoint& target, const EvalConfig& config) {
  GridResult r;
  try {
    dataset::MotionClip clip = learning::generate_motion(model, target, config.duration);
    // Scored against the query point, whatever the clip was annotated with.
    clip.target = target;
    const auto acc = dataset::clip_accuracy(clip, skeleton, config.hold);
    r.generated = true;
    r.hold_detected = acc.hold_detected;
    r.raw = acc.raw;
    r.normalized = acc.normalized;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

ModelSummary summarize(const std::string& name, const std::vector<GridResult>& results) {
  ModelSummary s;
  s.model = name;
  s.points = static_cast<int>(results.size());
  std::vector<double> values;
  for (const auto& r : results) {
    if (!r.generated) {
      ++s.failed;
      continue;
    }
    if (!r.hold_detected) ++s.no_hold;
    values.push_back(r.normalized);
  }
  if (values.empty()) return s;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  const double iqr = s.q3 - s.q1;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.generated && (r.normalized < s.q1 - 1.5 * iqr || r.normalized > s.q3 + 1.5 * iqr)) {
      s.outliers.push_back(static_cast<int>(i));
    }
  }
  return s;
}

}  // namespace

EvalReport objective_eval(std::span<const learning::PointingModel* const> models,
                          const motion::SkeletonModel& skeleton, std::span<const TargetPoint> grid,
                          const KDEModel& kde, const EvalConfig& config) {
  if (models.empty()) throw Error(ErrorCode::empty_input, "no models to evaluate");
  if (grid.empty()) throw Error(ErrorCode::empty_input, "empty evaluation grid");
  if (config.threads < 1) throw Error(ErrorCode::invalid_argument, "thread count must be >= 1");
  EvalReport report;
  report.grid.assign(grid.begin(), grid.end());
  report.density = kde_evaluate(kde, grid);
  for (const auto* m : models) {
    if (!m) throw Error(ErrorCode::invalid_argument, "null model");
    report.models.push_back(m->name());
  }
  report.results.assign(models.size(), std::vector<GridResult>(grid.size()));

  const std::size_t jobs = models.size() * grid.size();
  auto worker = [&](std::size_t first) {
    for (std::size_t j = first; j < jobs; j += static_cast<std::size_t>(config.threads)) {
      const std::size_t m = j / grid.size();
      const std::size_t g = j % grid.size();
      report.results[m][g] = evaluate_point(*models[m], skeleton, grid[g], config);
    }
  };
  if (config.threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker, static_cast<std::size_t>(t));
    for (auto& t : pool) t.join();
  }

  for (std::size_t m = 0; m < models.size(); ++m) {
    report.summaries.push_back(summarize(report.models[m], report.results[m]));
    CorrelationRow row;
    row.model = report.models[m];
    std::vector<double> acc, dens;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto& r = report.results[m][g];
      if (r.generated && r.hold_detected) {
        acc.push_back(r.normalized);
        dens.push_back(report.density[g]);
      } else {
        ++row.excluded;
      }
    }
    row.used = static_cast<int>(acc.size());
    try {
      row.result = spearman(acc, dens);
    } catch (const Error& e) {
      row.error = e.what();
    }
    report.correlations.push_back(std::move(row));
  }
  return report;
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  using text::format_double;
  out << "model,grid_index,x,y,z,density,generated,hold,raw,normalized\n";
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    for (std::size_t g = 0; g < report.grid.size(); ++g) {
      const auto& r = report.results[m][g];
      const auto& p = report.grid[g];
      out << report.models[m] << ',' << g << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
          << format_double(p.z()) << ',' << format_double(report.density[g]) << ',' << (r.generated ? 1 : 0) << ','
          << (r.hold_detected ? 1 : 0) << ',' << format_double(r.raw) << ',' << format_double(r.normalized) << '\n';
    }
  }
}

void write_eval_summary(std::ostream& out, const EvalReport& report) {
  using text::format_double;
  out << "# accuracy distribution (normalized)\n";
  out << "model,points,failed,no_hold,mean,min,q1,median,q3,max,outliers\n";
  for (const auto& s : report.summaries) {
    out << s.model << ',' << s.points << ',' << s.failed << ',' << s.no_hold << ',' << format_double(s.mean) << ','
        << format_double(s.min) << ',' << format_double(s.q1) << ',' << format_double(s.median) << ','
        << format_double(s.q3) << ',' << format_double(s.max) << ',' << s.outliers.size() << '\n';
  }
  out << "# accuracy vs density (Spearman)\n";
  out << "model,r,p,n,excluded,note\n";
  for (const auto& c : report.correlations) {
    out << c.model << ',';
    if (c.result) {
      out << format_double(c.result->statistic) << ',' << format_double(c.result->p_value) << ',' << c.result->n;
    } else {
      out << ",," << c.used;
    }
    std::string note = c.error;
    std::replace(note.begin(), note.end(), ',', ';');
    out << ',' << c.excluded << ',' << note << '\n';
  }
}

}  // namespace pointing::analysis
