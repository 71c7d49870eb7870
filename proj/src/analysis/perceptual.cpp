#include "pointing/analysis/perceptual.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "pointing/common/error.hpp"
#include "pointing/common/text.hpp"

namespace pointing::analysis {

void write_export_csv(std::ostream& out, std::span<const ExportRecord> records) {
  out << kExportHeader << '\n';
  for (const auto& r : records) {
    out << r.participant << ',' << r.session << ',' << r.model << ',' << r.stage << ',' << r.condition << ','
        << r.trial << ',' << text::format_double(r.value) << ',' << (r.complete ? 1 : 0) << '\n';
  }
}

std::vector<ExportRecord> read_export_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::schema, "export is empty (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kExportHeader) throw Error(ErrorCode::schema, "unexpected export header '" + line + "'");
  std::vector<ExportRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != 8) throw Error(ErrorCode::schema, "export line " + std::to_string(line_no) + ": expected 8 fields");
    try {
      ExportRecord r;
      r.participant = f[0];
      r.session = f[1];
      r.model = f[2];
      r.stage = static_cast<int>(text::parse_int(f[3]));
      r.condition = f[4];
      r.trial = static_cast<int>(text::parse_int(f[5]));
      r.value = text::parse_double(f[6]);
      r.complete = text::parse_int(f[7]) != 0;
      if (r.stage != 1 && r.stage != 2) throw Error(ErrorCode::schema, "stage must be 1 or 2");
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(ErrorCode::schema, "export line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace {

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

struct Accumulator {
  double sum = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  std::optional<double> mean() const { return n ? std::optional<double>(sum / n) : std::nullopt; }
};

}  // namespace

PerceptualReport perceptual_stats(std::span<const ExportRecord> records, double alpha) {
  if (records.empty()) throw Error(ErrorCode::empty_input, "no study records");
  PerceptualReport rep;
  rep.alpha = alpha;
  std::set<std::string> participants, models;
  // [participant][model] -> stage-1, stage-2, across, side-by-side
  std::map<std::string, std::map<std::string, std::array<Accumulator, 4>>> acc;
  for (const auto& r : records) {
    participants.insert(r.participant);
    models.insert(r.model);
    auto& a = acc[r.participant][r.model];
    if (r.stage == 1) {
      a[0].add(r.value);
    } else {
      a[1].add(r.value);
      if (r.condition == kConditionAcross) a[2].add(r.value);
      if (r.condition == kConditionSideBySide) a[3].add(r.value);
    }
  }
  rep.participants.assign(participants.begin(), participants.end());
  rep.models.assign(models.begin(), models.end());

  for (const auto& p : rep.participants) {
    for (const auto& m : rep.models) {
      const auto it = acc[p].find(m);
      if (it == acc[p].end() || !it->second[0].n || !it->second[1].n) {
        throw Error(ErrorCode::invalid_argument, "participant '" + p + "' is missing " +
                                                     (it == acc[p].end() || !it->second[0].n ? "stage-1" : "stage-2") +
                                                     " trials for model '" + m + "'");
      }
      const auto& a = it->second;
      rep.participant_means.push_back({p, m, *a[0].mean(), *a[1].mean(), a[2].mean(), a[3].mean()});
    }
  }

  std::map<std::string, std::vector<double>> mos, accuracy;
  for (const auto& m : rep.models) {
    std::vector<double> across, side;
    for (const auto& pm : rep.participant_means) {
      if (pm.model != m) continue;
      mos[m].push_back(pm.mos);
      accuracy[m].push_back(pm.accuracy);
      if (pm.accuracy_across) across.push_back(*pm.accuracy_across);
      if (pm.accuracy_side_by_side) side.push_back(*pm.accuracy_side_by_side);
    }
    rep.models_stats.push_back({m, mean_sd(mos[m]), mean_sd(accuracy[m]), mean_sd(across), mean_sd(side)});
  }

  for (const std::string measure : {"mos", "accuracy"}) {
    const auto& data = measure == "mos" ? mos : accuracy;
    std::vector<std::size_t> run;
    for (std::size_t i = 0; i < rep.models.size(); ++i) {
      for (std::size_t j = i + 1; j < rep.models.size(); ++j) {
        PairwiseTest t;
        t.model_a = rep.models[i];
        t.model_b = rep.models[j];
        t.measure = measure;
        try {
          t.result = wilcoxon_signed_rank(data.at(t.model_a), data.at(t.model_b));
          run.push_back(rep.tests.size());
        } catch (const Error& e) {
          t.refused = e.what();
        }
        rep.tests.push_back(std::move(t));
      }
    }
    std::vector<double> p;
    for (std::size_t k : run) p.push_back(rep.tests[k].result->p_value);
    const auto reject = holm_bonferroni(p, alpha);
    for (std::size_t k = 0; k < run.size(); ++k) {
      auto& t = rep.tests[run[k]];
      t.result->corrected = true;
      t.result->alpha = alpha;
      t.result->rejected = reject[k];
      t.significant = reject[k];
    }
  }
  return rep;
}

void write_perceptual_report(std::ostream& out, const PerceptualReport& report) {
  using text::format_double;
  out << "# per-model means over " << report.participants.size() << " participants\n";
  out << "model,n,mos_mean,mos_sd,accuracy_mean,accuracy_sd,across_mean,across_sd,side_by_side_mean,side_by_side_sd\n";
  for (const auto& s : report.models_stats) {
    out << s.model << ',' << s.mos.n << ',' << format_double(s.mos.mean) << ',' << format_double(s.mos.sd) << ','
        << format_double(s.accuracy.mean) << ',' << format_double(s.accuracy.sd) << ','
        << format_double(s.accuracy_across.mean) << ',' << format_double(s.accuracy_across.sd) << ','
        << format_double(s.accuracy_side_by_side.mean) << ',' << format_double(s.accuracy_side_by_side.sd) << '\n';
  }
  out << "# pairwise Wilcoxon signed-rank, Holm at alpha=" << format_double(report.alpha) << "\n";
  out << "measure,model_a,model_b,statistic,p,n,significant,note\n";
  for (const auto& t : report.tests) {
    out << t.measure << ',' << t.model_a << ',' << t.model_b << ',';
    if (t.result) {
      out << format_double(t.result->statistic) << ',' << format_double(t.result->p_value) << ',' << t.result->n
          << ',' << (t.significant ? 1 : 0) << ",\n";
    } else {
      std::string note = t.refused;
      std::replace(note.begin(), note.end(), ',', ';');
      out << ",,,0," << note << '\n';
    }
  }
}

}  // namespace pointing::analysis
