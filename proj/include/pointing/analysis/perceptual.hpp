#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointing/analysis/stats.hpp"

namespace pointing::analysis {

inline constexpr const char* kConditionNone = "none";
inline constexpr const char* kConditionAcross = "across";
inline constexpr const char* kConditionSideBySide = "side-by-side";

/// One answered trial. value is the 1..5 rating for stage 1 and 1/0 for a
/// correct/incorrect stage-2 choice. complete flags whether the participant's
/// session was finished.
struct ExportRecord {
  std::string participant;
  std::string session;
  std::string model;
  int stage = 1;
  std::string condition = kConditionNone;
  int trial = 0;
  double value = 0.0;
  bool complete = true;
};

inline constexpr const char* kExportHeader = "participant,session,model,stage,condition,trial,value,complete";

void write_export_csv(std::ostream& out, std::span<const ExportRecord> records);
/// Throws Error(schema) with the line number on malformed rows.
std::vector<ExportRecord> read_export_csv(std::istream& in);

struct ParticipantModelMeans {
  std::string participant;
  std::string model;
  double mos = 0.0;
  double accuracy = 0.0;
  std::optional<double> accuracy_across;
  std::optional<double> accuracy_side_by_side;
};

/// Mean and sample standard deviation (n - 1) over participants.
struct MeanSd {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct ModelPerceptualStats {
  std::string model;
  MeanSd mos;
  MeanSd accuracy;
  MeanSd accuracy_across;
  MeanSd accuracy_side_by_side;
};

struct PairwiseTest {
  std::string model_a;
  std::string model_b;
  std::string measure;  // "mos" | "accuracy"
  std::optional<StatTestResult> result;
  std::string refused;  // reason when no test was run
  bool significant = false;
};

struct PerceptualReport {
  std::vector<std::string> participants;
  std::vector<std::string> models;
  std::vector<ParticipantModelMeans> participant_means;
  std::vector<ModelPerceptualStats> models_stats;
  std::vector<PairwiseTest> tests;
  double alpha = 0.01;
};

/// Averages each participant's trials per model first, then summarizes over
/// participants. Pairwise Wilcoxon tests run per measure on the participant
/// means, corrected with Holm within each measure. Tests are refused when
/// fewer than 5 participants differ. Throws Error(invalid_argument) when a
/// participant has no trials of some stage for a model.
PerceptualReport perceptual_stats(std::span<const ExportRecord> records, double alpha = 0.01);

void write_perceptual_report(std::ostream& out, const PerceptualReport& report);

}  // namespace pointing::analysis
