// include/scatloc/eval.hpp

// Copyright 2026 The scatloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCATLOC_EVAL_HPP
#define SCATLOC_EVAL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace scatloc {

/// One trial after permutation matching: estimates_deg[j] is the estimate
/// matched to truth_deg[j].
struct TrialOutcome {
  std::vector<double> truth_deg;
  std::vector<double> estimates_deg;
  std::vector<double> per_source_error_deg;  // circular, in [0, 180]
  double matched_error_deg = 0.0;            // mean of per-source errors
  bool hit = false;                          // all sources within bin_width/2
  std::vector<bool> per_source_hits;
};

struct ConfusionMatrix {
  Eigen::MatrixXi counts;          // true bin x estimated bin
  std::vector<double> bin_labels;  // azimuth of each bin center
};

struct AccuracySummary {
  double accuracy = 0.0;             // all sources of a trial within the bin
  double mean_error_of_hits = 0.0;   // matched error averaged over hit trials
  double per_source_accuracy = 0.0;  // individual matched sources within the bin
};

/// Absolute circular difference in degrees, in [0, 180].
double circular_error_deg(double a_deg, double b_deg);

/// Mean absolute circular error minimized over assignment permutations
/// (exhaustive; J <= 8). Throws on cardinality mismatch.
double matched_circular_error(const std::vector<double>& truth_deg,
                              const std::vector<double>& estimates_deg);

/// Full matched outcome for one trial; hits are judged at bin_width_deg.
TrialOutcome evaluate_trial(const std::vector<double>& truth_deg,
                            const std::vector<double>& estimates_deg,
                            double bin_width_deg = 10.0);

/// Aggregate accuracy at the given bin width (hits recomputed from the stored
/// per-source errors, so one outcome set can be summarized at several widths).
AccuracySummary bin_accuracy(const std::vector<TrialOutcome>& outcomes,
                             double bin_width_deg = 10.0);

/// (true bin, estimated bin) counts over matched pairs, bins being the D
/// evenly spaced model directions.
ConfusionMatrix accumulate_confusion(const std::vector<TrialOutcome>& outcomes, int directions);

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path);

/// Standalone SVG heatmap with one cell rect per matrix entry.
void write_confusion_svg(const ConfusionMatrix& cm, const std::string& path);

}  // namespace scatloc

#endif  // SCATLOC_EVAL_HPP
