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
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "densetrack/geometry.hpp"

namespace densetrack {

/// One detector output box. `model_id` identifies which detector produced
/// it and breaks score ties deterministically during fusion.
struct Detection {
  BBox box;
  int class_id = 1;    // >= 1
  double score = 0.0;  // in [0,1]
  int model_id = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct EnsembleParams {
  double nms_iou = 0.5;      // suppression threshold (IoU strictly greater)
  int top_k = 300;           // per-model cap before pooling
  double score_floor = 0.0;  // per-model minimum score

  void validate() const {
    if (!(nms_iou >= 0.0 && nms_iou <= 1.0)) {
      throw std::invalid_argument("EnsembleParams: nms_iou must be in [0,1]");
    }
    if (!(score_floor >= 0.0 && score_floor <= 1.0)) {
      throw std::invalid_argument("EnsembleParams: score_floor must be in [0,1]");
    }
    if (top_k < 1) {
      throw std::invalid_argument("EnsembleParams: top_k must be >= 1");
    }
  }

  friend bool operator==(const EnsembleParams&, const EnsembleParams&) = default;
};

/// Greedy per-class NMS. Detections are visited in descending score order
/// (ties: lower model id, then input order); a detection is suppressed when
/// its IoU with an already-kept detection of the same class exceeds
/// iou_thresh. Output keeps that order, so scores are non-increasing and
/// boxes/scores pass through unmodified.
inline std::vector<Detection> nms(const std::vector<Detection>& dets,
                                  double iou_thresh) {
  if (!(iou_thresh >= 0.0 && iou_thresh <= 1.0)) {
    throw std::invalid_argument("nms: iou_thresh must be in [0,1]");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(-dets[a].score, dets[a].model_id, a) <
           std::make_tuple(-dets[b].score, dets[b].model_id, b);
  });
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (std::size_t idx : order) {
    const Detection& cand = dets[idx];
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (k.class_id == cand.class_id && iou(k.box, cand.box) > iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

/// Joint-NMS model ensemble: per model, drop detections below score_floor
/// and keep the top_k by score, then pool everything and run plain greedy
/// NMS over the pooled set. Each detection's model_id is rewritten to its
/// list index so tie-breaking is consistent with the pooling order.
inline std::vector<Detection> joint_nms(
    const std::vector<std::vector<Detection>>& per_model,
    const EnsembleParams& params) {
  params.validate();
  if (per_model.empty()) {
    throw std::invalid_argument("joint_nms: need at least one model list");
  }
  std::vector<Detection> pooled;
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    std::vector<Detection> kept;
    kept.reserve(per_model[m].size());
    for (const Detection& d : per_model[m]) {
      if (d.score >= params.score_floor) kept.push_back(d);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const Detection& a, const Detection& b) {
                       return a.score > b.score;
                     });
    if (static_cast<int>(kept.size()) > params.top_k) {
      kept.resize(static_cast<std::size_t>(params.top_k));
    }
    for (Detection& d : kept) {
      d.model_id = static_cast<int>(m);
      pooled.push_back(d);
    }
  }
  return nms(pooled, params.nms_iou);
}

}  // namespace densetrack
