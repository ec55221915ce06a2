// Copyright 2026 The densetrack Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "densetrack/ensemble.hpp"
#include "densetrack/geometry.hpp"

namespace densetrack {

struct GtInstance {
  int class_id = 1;
  BBox box;

  friend bool operator==(const GtInstance&, const GtInstance&) = default;
};

/// Detections / ground truth keyed by image id. For clip frames the image
/// id is "<clip_id>:<frame_index>" (see dataset_io).
using DetectionMap = std::map<std::string, std::vector<Detection>>;
using GroundTruthMap = std::map<std::string, std::vector<GtInstance>>;

struct EvalCounts {
  std::size_t images = 0;
  std::size_t ground_truths = 0;
  std::size_t detections = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct ClassApRow {
  int class_id = 0;
  std::vector<double> ap;  // aligned with EvalReport::thresholds

  friend bool operator==(const ClassApRow&, const ClassApRow&) = default;
};

struct EvalReport {
  std::vector<double> thresholds;
  std::vector<ClassApRow> per_class;  // classes with >= 1 gt, ascending id
  std::vector<double> mean_ap;        // per threshold
  EvalCounts counts;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Average precision for one class at one IoU threshold. Detections are
/// ranked by score globally (ties: image id, then per-image input order)
/// and matched greedily to the unmatched ground truth with highest IoU on
/// the same image; the match counts only when IoU > iou_thresh (strict).
/// AP is the area under the all-point interpolated precision-recall curve.
/// Returns nullopt when the class has no ground truth at all.
inline std::optional<double> average_precision(const DetectionMap& dets,
                                               const GroundTruthMap& gts,
                                               int class_id, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0)) {
    throw std::invalid_argument("average_precision: threshold must be in (0,1]");
  }

  std::map<std::string, std::vector<const BBox*>> gt_by_image;
  std::size_t total_gt = 0;
  for (const auto& [image_id, instances] : gts) {
    for (const GtInstance& gt : instances) {
      if (gt.class_id != class_id) continue;
      gt_by_image[image_id].push_back(&gt.box);
      ++total_gt;
    }
  }
  if (total_gt == 0) return std::nullopt;

  struct Candidate {
    double score;
    const std::string* image_id;
    std::size_t order;
    const BBox* box;
  };
  std::vector<Candidate> candidates;
  for (const auto& [image_id, detections] : dets) {
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (detections[i].class_id != class_id) continue;
      candidates.push_back(Candidate{detections[i].score, &image_id, i,
                                     &detections[i].box});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (*a.image_id != *b.image_id) return *a.image_id < *b.image_id;
              return a.order < b.order;
            });

  std::map<std::string, std::vector<bool>> matched;
  for (const auto& [image_id, boxes] : gt_by_image) {
    matched[image_id].assign(boxes.size(), false);
  }

  std::vector<bool> is_tp(candidates.size(), false);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto git = gt_by_image.find(*candidates[c].image_id);
    if (git == gt_by_image.end()) continue;
    std::vector<bool>& used = matched[*candidates[c].image_id];
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < git->second.size(); ++g) {
      if (used[g]) continue;
      const double overlap = iou(*candidates[c].box, *git->second[g]);
      if (overlap > best_iou) {
        best_iou = overlap;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou > iou_thresh) {
      used[static_cast<std::size_t>(best)] = true;
      is_tp[c] = true;
    }
  }

  // Precision envelope from the right, then sum precision at each recall
  // step (every TP adds 1/total_gt of recall).
  std::vector<double> precision(candidates.size());
  std::size_t tp = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (is_tp[c]) ++tp;
    precision[c] = static_cast<double>(tp) / static_cast<double>(c + 1);
  }
  for (std::size_t c = precision.size(); c-- > 1;) {
    precision[c - 1] = std::max(precision[c - 1], precision[c]);
  }
  double ap = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (is_tp[c]) ap += precision[c] / static_cast<double>(total_gt);
  }
  return ap;
}

/// Per-class AP and mean AP at each threshold. Classes absent from the
/// ground truth are excluded (not counted as zero); with no classes at all
/// the mean AP is reported as 0.
inline EvalReport evaluate(const DetectionMap& dets, const GroundTruthMap& gts,
                           std::vector<double> thresholds = {0.05, 0.5, 0.75}) {
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("evaluate: thresholds must be in (0,1]");
    }
  }
  EvalReport report;
  report.thresholds = std::move(thresholds);

  std::set<int> classes;
  std::set<std::string> images;
  for (const auto& [image_id, instances] : gts) {
    images.insert(image_id);
    for (const GtInstance& gt : instances) {
      classes.insert(gt.class_id);
      ++report.counts.ground_truths;
    }
  }
  for (const auto& [image_id, detections] : dets) {
    images.insert(image_id);
    report.counts.detections += detections.size();
  }
  report.counts.images = images.size();

  report.mean_ap.assign(report.thresholds.size(), 0.0);
  for (int class_id : classes) {
    ClassApRow row;
    row.class_id = class_id;
    for (double t : report.thresholds) {
      const auto ap = average_precision(dets, gts, class_id, t);
      row.ap.push_back(ap.value());  // class has >= 1 gt by construction
    }
    report.per_class.push_back(std::move(row));
  }
  if (!report.per_class.empty()) {
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
      double sum = 0.0;
      for (const ClassApRow& row : report.per_class) sum += row.ap[t];
      report.mean_ap[t] = sum / static_cast<double>(report.per_class.size());
    }
  }
  return report;
}

}  // namespace densetrack
