#pragma once

#include <span>
#include <vector>

#include "pointing/dataset/clip.hpp"

namespace pointing::dataset {

struct SegmentConfig {
  double min_prominence_fraction = 0.20;  // of the take's displacement range
  double min_peak_displacement = 0.10;    // m, absolute floor on a gesture's peak
  double min_separation = 1.0;            // s between kept peaks
  double rest_fraction = 0.10;            // span ends where displacement drops below this fraction of the peak
  double min_duration = 0.5;              // s, shortest accepted gesture
};

/// Hand displacement from its first-frame position, projected on the root's
/// sagittal (y-z) plane, for one arm.
std::vector<double> sagittal_displacement(const MotionClip& take, const SkeletonModel& skeleton, Handedness side);

/// Indices of local maxima (plateaus resolved to their middle sample) whose
/// topographic prominence is at least min_prominence, thinned so kept peaks
/// are at least min_distance samples apart (highest first).
std::vector<int> find_peaks(const std::vector<double>& signal, double min_prominence, int min_distance);

/// Topographic prominence of the sample at index peak.
double peak_prominence(const std::vector<double>& signal, int peak);

/// Splits a continuous take into single-gesture spans, one per displacement
/// peak of either arm. Spans carry no target and inherit the arm as handedness.
/// timestamps, when given, must be strictly increasing and match the frames.
std::vector<MotionClip> segment_pointing_clips(const MotionClip& take, const SkeletonModel& skeleton,
                                               const SegmentConfig& config = {},
                                               std::span<const double> timestamps = {});

}  // namespace pointing::dataset
