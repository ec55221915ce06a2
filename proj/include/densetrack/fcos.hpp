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

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "densetrack/geometry.hpp"

namespace densetrack {

/// A feature-map location projected to image space.
struct GridPosition {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const GridPosition&, const GridPosition&) = default;
};

/// Distances from a position to the four sides of a box (left, top, right,
/// bottom). All nonnegative for a position inside the box.
struct LtrbTarget {
  double l = 0.0;
  double t = 0.0;
  double r = 0.0;
  double b = 0.0;

  friend bool operator==(const LtrbTarget&, const LtrbTarget&) = default;
};

/// Per-position training target: class label (0 = background) plus the
/// box regression target, which is meaningful only when class_label > 0.
struct FcosTarget {
  int class_label = 0;
  LtrbTarget ltrb;

  friend bool operator==(const FcosTarget&, const FcosTarget&) = default;
};

/// Per-class probabilities in [0,1], one entry per object class (class ids
/// 1..size map to indices 0..size-1).
using ClassScores = std::vector<double>;

struct GtBox {
  BBox box;
  int class_id = 1;  // >= 1

  friend bool operator==(const GtBox&, const GtBox&) = default;
};

/// Positions exactly on a box edge do not count as inside; they are
/// background, which keeps the predicate unambiguous.
inline bool strictly_inside(const GridPosition& pos, const BBox& box) {
  return pos.u > box.x0 && pos.u < box.x1 && pos.v > box.y0 && pos.v < box.y1;
}

/// l = u - x0, t = v - y0, r = x1 - u, b = y1 - v. The position must be
/// strictly inside the box; otherwise it has no regression target and the
/// caller must assign background instead.
inline LtrbTarget encode_target(const GridPosition& pos, const BBox& gt) {
  if (!strictly_inside(pos, gt)) {
    throw std::invalid_argument(
        "encode_target: position is not strictly inside the box");
  }
  return LtrbTarget{pos.u - gt.x0, pos.v - gt.y0, gt.x1 - pos.u,
                    gt.y1 - pos.v};
}

/// Inverse of encode_target: (u-l, v-t, u+r, v+b).
inline BBox decode_box(const GridPosition& pos, const LtrbTarget& m) {
  if (m.l < 0.0 || m.t < 0.0 || m.r < 0.0 || m.b < 0.0) {
    throw std::invalid_argument("decode_box: negative ltrb component");
  }
  return BBox{pos.u - m.l, pos.v - m.t, pos.u + m.r, pos.v + m.b};
}

/// Assigns every position the smallest-area ground-truth box strictly
/// containing it (ties: first box in input order); positions inside no box
/// become background.
inline std::vector<FcosTarget> assign_targets(
    const std::vector<GridPosition>& positions, const std::vector<GtBox>& gts) {
  for (const GtBox& gt : gts) {
    if (gt.class_id < 1) {
      throw std::invalid_argument("assign_targets: class ids must be >= 1");
    }
    if (!gt.box.valid()) {
      throw std::invalid_argument("assign_targets: invalid ground-truth box");
    }
  }
  std::vector<FcosTarget> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const GtBox* best = nullptr;
    double best_area = 0.0;
    for (const GtBox& gt : gts) {
      if (!strictly_inside(positions[i], gt.box)) continue;
      const double a = area(gt.box);
      if (best == nullptr || a < best_area) {
        best = &gt;
        best_area = a;
      }
    }
    if (best != nullptr) {
      out[i] = FcosTarget{best->class_id, encode_target(positions[i], best->box)};
    }
  }
  return out;
}

struct LossParams {
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;
  double iou_floor = 1e-6;    // keeps -log(IoU) finite for disjoint boxes
  double prob_floor = 1e-12;  // keeps the focal log finite at p = 0
};

namespace detail {

// Sigmoid-style focal loss against the one-hot encoding of class_label,
// summed over classes. Exactly zero when the score vector is that one-hot.
inline double focal_term(const ClassScores& scores, int class_label,
                         const LossParams& p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const bool is_true = static_cast<int>(j) + 1 == class_label;
    const double pt = is_true ? scores[j] : 1.0 - scores[j];
    if (pt >= 1.0) continue;
    const double at = is_true ? p.focal_alpha : 1.0 - p.focal_alpha;
    sum += -at * std::pow(1.0 - pt, p.focal_gamma) *
           std::log(std::max(pt, p.prob_floor));
  }
  return sum;
}

}  // namespace detail

/// (1/N) sum L_cls + (1/N) sum [c_p>0] L_reg over aligned positions, where
/// L_cls is focal loss (gamma=2, alpha=0.25), L_reg is -log IoU of the
/// decoded boxes, and N is the positive count floored at 1. The IoU inside
/// the log is floored so disjoint predictions stay finite.
inline double detection_loss(const std::vector<ClassScores>& scores,
                             const std::vector<LtrbTarget>& regressions,
                             const std::vector<FcosTarget>& targets,
                             const LossParams& params = {}) {
  if (scores.size() != regressions.size() || scores.size() != targets.size()) {
    throw std::invalid_argument("detection_loss: misaligned input lists");
  }
  const std::size_t num_classes = scores.empty() ? 0 : scores.front().size();
  for (const ClassScores& s : scores) {
    if (s.size() != num_classes) {
      throw std::invalid_argument("detection_loss: ragged score vectors");
    }
    for (double v : s) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("detection_loss: score outside [0,1]");
      }
    }
  }
  std::size_t positives = 0;
  for (const FcosTarget& t : targets) {
    if (t.class_label < 0 || t.class_label > static_cast<int>(num_classes)) {
      throw std::invalid_argument("detection_loss: class label out of range");
    }
    if (t.class_label > 0) ++positives;
  }
  const double n = static_cast<double>(positives > 0 ? positives : 1);

  double cls_sum = 0.0;
  double reg_sum = 0.0;
  const GridPosition origin{0.0, 0.0};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    cls_sum += detail::focal_term(scores[i], targets[i].class_label, params);
    if (targets[i].class_label > 0) {
      // IoU is translation invariant, so decoding at the origin loses nothing.
      const BBox predicted = decode_box(origin, regressions[i]);
      const BBox expected = decode_box(origin, targets[i].ltrb);
      const double overlap = std::max(iou(predicted, expected), params.iou_floor);
      reg_sum += -std::log(overlap);
    }
  }
  return cls_sum / n + reg_sum / n;
}

}  // namespace densetrack
