// src/eval.cpp

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

#include "scatloc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace scatloc {

double circular_error_deg(double a_deg, double b_deg) {
  double d = std::fmod(a_deg - b_deg + 180.0, 360.0);
  if (d < 0.0) d += 360.0;
  return std::abs(d - 180.0);
}

double matched_circular_error(const std::vector<double>& truth_deg,
                              const std::vector<double>& estimates_deg) {
  return evaluate_trial(truth_deg, estimates_deg).matched_error_deg;
}

TrialOutcome evaluate_trial(const std::vector<double>& truth_deg,
                            const std::vector<double>& estimates_deg, double bin_width_deg) {
  if (truth_deg.size() != estimates_deg.size())
    throw std::invalid_argument("evaluate_trial: truth/estimate cardinality mismatch");
  if (truth_deg.empty()) throw std::invalid_argument("evaluate_trial: empty trial");
  if (truth_deg.size() > 8)
    throw std::invalid_argument("evaluate_trial: exhaustive matching is limited to J <= 8");

  const std::size_t j = truth_deg.size();
  std::vector<std::size_t> perm(j), best_perm(j);
  std::iota(perm.begin(), perm.end(), 0);
  best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i)
      acc += circular_error_deg(estimates_deg[perm[i]], truth_deg[i]);
    acc /= static_cast<double>(j);
    if (acc < best) {
      best = acc;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  TrialOutcome out;
  out.truth_deg = truth_deg;
  out.matched_error_deg = best;
  out.estimates_deg.resize(j);
  out.per_source_error_deg.resize(j);
  out.per_source_hits.resize(j);
  out.hit = true;
  for (std::size_t i = 0; i < j; ++i) {
    out.estimates_deg[i] = estimates_deg[best_perm[i]];
    out.per_source_error_deg[i] = circular_error_deg(out.estimates_deg[i], truth_deg[i]);
    out.per_source_hits[i] = out.per_source_error_deg[i] <= bin_width_deg / 2.0;
    if (!out.per_source_hits[i]) out.hit = false;
  }
  return out;
}

AccuracySummary bin_accuracy(const std::vector<TrialOutcome>& outcomes, double bin_width_deg) {
  if (outcomes.empty()) throw std::invalid_argument("bin_accuracy: no outcomes");
  const double half = bin_width_deg / 2.0;
  std::size_t hit_trials = 0, hit_sources = 0, total_sources = 0;
  double hit_error_sum = 0.0;
  for (const auto& o : outcomes) {
    bool all = true;
    for (double e : o.per_source_error_deg) {
      ++total_sources;
      if (e <= half)
        ++hit_sources;
      else
        all = false;
    }
    if (all) {
      ++hit_trials;
      hit_error_sum += o.matched_error_deg;
    }
  }
  AccuracySummary s;
  s.accuracy = static_cast<double>(hit_trials) / static_cast<double>(outcomes.size());
  s.mean_error_of_hits = hit_trials > 0 ? hit_error_sum / static_cast<double>(hit_trials) : 0.0;
  s.per_source_accuracy =
      static_cast<double>(hit_sources) / static_cast<double>(total_sources);
  return s;
}

ConfusionMatrix accumulate_confusion(const std::vector<TrialOutcome>& outcomes, int directions) {
  if (directions < 1) throw std::invalid_argument("accumulate_confusion: need directions >= 1");
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(directions, directions);
  cm.bin_labels.resize(static_cast<std::size_t>(directions));
  const double step = 360.0 / directions;
  for (int d = 0; d < directions; ++d)
    cm.bin_labels[static_cast<std::size_t>(d)] = step * d;

  auto nearest_bin = [&](double az) {
    int b = static_cast<int>(std::llround(az / step)) % directions;
    if (b < 0) b += directions;
    return b;
  };
  for (const auto& o : outcomes)
    for (std::size_t i = 0; i < o.truth_deg.size(); ++i)
      cm.counts(nearest_bin(o.truth_deg[i]), nearest_bin(o.estimates_deg[i])) += 1;
  return cm;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_confusion_csv: cannot open " + path);
  f << "true_deg";
  for (double b : cm.bin_labels) f << ',' << b;
  f << '\n';
  for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
    f << cm.bin_labels[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) f << ',' << cm.counts(r, c);
    f << '\n';
  }
}

void write_confusion_svg(const ConfusionMatrix& cm, const std::string& path) {
  const int d = static_cast<int>(cm.counts.rows());
  const int cell = 12, margin = 40;
  const int size = margin + d * cell + 10;
  const int peak = std::max(1, cm.counts.maxCoeff());

  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_confusion_svg: cannot open " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
    << "\" style=\"background:#ffffff\">\n";
  f << "<text x=\"" << margin + d * cell / 2 << "\" y=\"14\" text-anchor=\"middle\" "
    << "font-size=\"11\">estimated direction</text>\n";
  f << "<text x=\"12\" y=\"" << margin + d * cell / 2
    << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 12 "
    << margin + d * cell / 2 << ")\">true direction</text>\n";
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      // Dark cells for high counts, white for zero.
      const double v = static_cast<double>(cm.counts(r, c)) / peak;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      f << "<rect x=\"" << margin + c * cell << "\" y=\"" << margin + r * cell << "\" width=\""
        << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ',' << shade << ','
        << 255 << ")\"/>\n";
    }
  }
  f << "</svg>\n";
}

}  // namespace scatloc
