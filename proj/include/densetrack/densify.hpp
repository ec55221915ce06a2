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
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "densetrack/frame.hpp"
#include "densetrack/geometry.hpp"
#include "densetrack/parallel.hpp"
#include "densetrack/tracker.hpp"

namespace densetrack {

enum class TrackDirection { forward, backward };
enum class LabelOrigin { original, forward, backward };

inline const char* to_string(LabelOrigin o) {
  switch (o) {
    case LabelOrigin::original: return "original";
    case LabelOrigin::forward: return "forward";
    default: return "backward";
  }
}

/// One human-annotated box on one frame.
struct SeedAnnotation {
  int frame_index = 0;
  int class_id = 1;
  BBox box;

  friend bool operator==(const SeedAnnotation&, const SeedAnnotation&) = default;
};

/// A frame sequence with its sparse annotations. Seed ids are positions in
/// the `seeds` list.
struct ActionClip {
  std::string clip_id;
  std::vector<Frame> frames;
  std::vector<SeedAnnotation> seeds;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

struct Provenance {
  int seed_id = -1;
  LabelOrigin origin = LabelOrigin::original;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// A densified annotation: either an original seed copied through verbatim
/// (score 1.0) or a tracked box with the tracker's confidence.
struct PseudoLabel {
  int frame_index = 0;
  int class_id = 1;
  BBox box;
  double score = 1.0;
  Provenance provenance;

  friend bool operator==(const PseudoLabel&, const PseudoLabel&) = default;
};

struct DensifyParams {
  double rho1 = 0.8;     // minimum tracking score to keep going
  double rho2 = 0.4;     // minimum IoU between consecutive tracked boxes
  double tau_dup = 0.5;  // same-class duplicate suppression IoU

  void validate() const {
    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(rho1) || !in_unit(rho2) || !in_unit(tau_dup)) {
      throw std::invalid_argument("DensifyParams: thresholds must be in [0,1]");
    }
  }

  friend bool operator==(const DensifyParams&, const DensifyParams&) = default;
};

namespace detail {

// Priority used both for duplicate suppression and for output ordering:
// originals first, then higher score, then lower seed id. The remaining
// keys only break exact ties deterministically.
inline bool label_priority_less(const PseudoLabel& a, const PseudoLabel& b) {
  const auto origin_rank = [](LabelOrigin o) {
    return o == LabelOrigin::original ? 0 : (o == LabelOrigin::forward ? 1 : 2);
  };
  const bool a_orig = a.provenance.origin == LabelOrigin::original;
  const bool b_orig = b.provenance.origin == LabelOrigin::original;
  return std::make_tuple(a.frame_index, a.class_id, !a_orig, -a.score,
                         a.provenance.seed_id, origin_rank(a.provenance.origin),
                         a.box.x0, a.box.y0, a.box.x1, a.box.y1) <
         std::make_tuple(b.frame_index, b.class_id, !b_orig, -b.score,
                         b.provenance.seed_id, origin_rank(b.provenance.origin),
                         b.box.x0, b.box.y0, b.box.x1, b.box.y1);
}

inline std::vector<PseudoLabel> track_one_direction(
    const ActionClip& clip, const TrackerFactory& make_tracker,
    const SeedAnnotation& seed, const DensifyParams& params,
    TrackDirection direction, int seed_id) {
  params.validate();
  const int n = clip.frame_count();
  if (n < 1) throw std::invalid_argument("track: clip has no frames");
  if (seed.frame_index < 0 || seed.frame_index >= n) {
    throw std::invalid_argument("track: seed frame index out of range");
  }
  if (!seed.box.valid() || area(seed.box) <= 0.0) {
    throw std::invalid_argument("track: seed box must have positive area");
  }

  std::vector<PseudoLabel> out;
  const int step = direction == TrackDirection::forward ? 1 : -1;
  const int first = seed.frame_index + step;
  if (first < 0 || first >= n) return out;

  auto tracker = make_tracker();
  tracker->init(clip.frames[seed.frame_index], seed.frame_index, seed.box);
  const FrameSize frame_size = clip.frames.front().size();
  const LabelOrigin origin = direction == TrackDirection::forward
                                 ? LabelOrigin::forward
                                 : LabelOrigin::backward;
  BBox prev = seed.box;
  for (int k = first; k >= 0 && k < n; k += step) {
    const TrackResult result = tracker->update(clip.frames[k], k);
    if (result.score < params.rho1) break;
    if (iou(prev, result.bbox) < params.rho2) break;
    const BBox emitted = densetrack::clip(result.bbox, frame_size);
    out.push_back(PseudoLabel{k, seed.class_id, emitted, result.score,
                              Provenance{seed_id, origin}});
    prev = emitted;
  }
  return out;
}

}  // namespace detail

/// Tracks the seeded object forward from its seed frame, emitting one
/// pseudo label per frame until the tracker's score drops below rho1 or the
/// IoU between consecutive boxes drops below rho2. Emitted frame indices
/// are contiguous from seed.frame_index + 1.
inline std::vector<PseudoLabel> forward_track(const ActionClip& clip,
                                              const TrackerFactory& make_tracker,
                                              const SeedAnnotation& seed,
                                              const DensifyParams& params,
                                              int seed_id = 0) {
  return detail::track_one_direction(clip, make_tracker, seed, params,
                                     TrackDirection::forward, seed_id);
}

/// Mirror of forward_track toward frame 0; emitted indices are strictly
/// decreasing from seed.frame_index - 1.
inline std::vector<PseudoLabel> backward_track(const ActionClip& clip,
                                               const TrackerFactory& make_tracker,
                                               const SeedAnnotation& seed,
                                               const DensifyParams& params,
                                               int seed_id = 0) {
  return detail::track_one_direction(clip, make_tracker, seed, params,
                                     TrackDirection::backward, seed_id);
}

/// Per (frame, class): greedily keeps labels in priority order (original,
/// then higher score, then lower seed id), suppressing any label whose IoU
/// with an already-kept label of the same frame and class reaches tau_dup.
/// Output is sorted by that same priority order.
inline std::vector<PseudoLabel> merge_pseudo_labels(std::vector<PseudoLabel> labels,
                                                    double tau_dup) {
  if (!(tau_dup >= 0.0 && tau_dup <= 1.0)) {
    throw std::invalid_argument("merge_pseudo_labels: tau_dup must be in [0,1]");
  }
  std::sort(labels.begin(), labels.end(), detail::label_priority_less);
  std::vector<PseudoLabel> kept;
  kept.reserve(labels.size());
  std::size_t group_begin = 0;  // first kept label of the current (frame, class)
  for (const PseudoLabel& label : labels) {
    while (group_begin < kept.size() &&
           (kept[group_begin].frame_index != label.frame_index ||
            kept[group_begin].class_id != label.class_id)) {
      ++group_begin;
    }
    bool suppressed = false;
    for (std::size_t i = group_begin; i < kept.size(); ++i) {
      if (iou(kept[i].box, label.box) >= tau_dup) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(label);
  }
  return kept;
}

/// Densified clip: labels grouped per frame in deterministic order, plus
/// warnings for seeds that had to be skipped.
struct DenseClip {
  std::string clip_id;
  int frame_count = 0;
  std::vector<std::vector<PseudoLabel>> frames;
  std::vector<std::string> warnings;

  std::vector<PseudoLabel> all_labels() const {
    std::vector<PseudoLabel> out;
    for (const auto& f : frames) out.insert(out.end(), f.begin(), f.end());
    return out;
  }
};

/// Runs the full bidirectional densification: for every seed, the original
/// label is copied through and a fresh tracker is run forward and backward;
/// everything is merged with tau_dup duplicate suppression and grouped per
/// frame. A failing seed is skipped with a recorded warning rather than
/// aborting the clip. Results are deterministic for any parallelism degree.
inline DenseClip densify_clip(const ActionClip& clip,
                              const TrackerFactory& make_tracker,
                              const DensifyParams& params, int parallelism = 1) {
  params.validate();
  if (clip.frames.empty()) {
    throw std::invalid_argument("densify_clip: clip has no frames");
  }
  DenseClip out;
  out.clip_id = clip.clip_id;
  out.frame_count = clip.frame_count();
  out.frames.resize(clip.frames.size());

  const int n = clip.frame_count();
  std::vector<int> runnable;  // seed ids that passed validation
  for (int s = 0; s < static_cast<int>(clip.seeds.size()); ++s) {
    const SeedAnnotation& seed = clip.seeds[s];
    std::ostringstream reason;
    if (seed.frame_index < 0 || seed.frame_index >= n) {
      reason << "frame index " << seed.frame_index << " outside [0," << n << ")";
    } else if (!seed.box.valid() || area(seed.box) <= 0.0) {
      reason << "seed box has no positive area";
    } else {
      runnable.push_back(s);
      continue;
    }
    std::ostringstream w;
    w << "seed " << s << " (frame " << seed.frame_index << ", class "
      << seed.class_id << ") skipped: " << reason.str();
    out.warnings.push_back(w.str());
  }

  // One task per (seed, direction); each owns a private tracker instance.
  struct TaskResult {
    std::vector<PseudoLabel> labels;
    std::string error;
    bool failed = false;
  };
  const std::size_t task_count = runnable.size() * 2;
  std::vector<TaskResult> results(task_count);
  parallel_for(task_count, parallelism, [&](std::size_t t) {
    const int seed_id = runnable[t / 2];
    const TrackDirection dir =
        t % 2 == 0 ? TrackDirection::forward : TrackDirection::backward;
    try {
      results[t].labels = detail::track_one_direction(
          clip, make_tracker, clip.seeds[seed_id], params, dir, seed_id);
    } catch (const std::exception& e) {
      results[t].failed = true;
      results[t].error = e.what();
    }
  });

  std::vector<PseudoLabel> pool;
  for (std::size_t i = 0; i < runnable.size(); ++i) {
    const int seed_id = runnable[i];
    const TaskResult& fwd = results[2 * i];
    const TaskResult& bwd = results[2 * i + 1];
    if (fwd.failed || bwd.failed) {
      const SeedAnnotation& seed = clip.seeds[seed_id];
      std::ostringstream w;
      w << "seed " << seed_id << " (frame " << seed.frame_index << ", class "
        << seed.class_id << ") skipped: " << (fwd.failed ? fwd.error : bwd.error);
      out.warnings.push_back(w.str());
      continue;
    }
    const SeedAnnotation& seed = clip.seeds[seed_id];
    pool.push_back(PseudoLabel{seed.frame_index, seed.class_id, seed.box, 1.0,
                               Provenance{seed_id, LabelOrigin::original}});
    pool.insert(pool.end(), fwd.labels.begin(), fwd.labels.end());
    pool.insert(pool.end(), bwd.labels.begin(), bwd.labels.end());
  }

  for (PseudoLabel& label : merge_pseudo_labels(std::move(pool), params.tau_dup)) {
    out.frames[static_cast<std::size_t>(label.frame_index)].push_back(
        std::move(label));
  }
  // merge_pseudo_labels already emits priority order within each frame.
  return out;
}

}  // namespace densetrack
