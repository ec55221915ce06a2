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

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "densetrack/frame.hpp"
#include "densetrack/geometry.hpp"

namespace densetrack {

struct TrackResult {
  BBox bbox;           // may extend past the frame edges; callers clip
  double score = 0.0;  // confidence in [0,1]
};

/// Single-object tracker. An instance tracks one object and holds mutable
/// state, so it is not thread-safe; distinct instances are independent and
/// may run in parallel.
class Tracker {
 public:
  virtual ~Tracker() = default;

  /// Locks onto the object covered by `seed` in `frame`. The seed is clipped
  /// to the frame first; a clipped seed with zero area is an error.
  virtual void init(const Frame& frame, int frame_index, const BBox& seed) = 0;

  /// Scores the tracked object's location in the given frame and advances
  /// the internal state. Calling update before init is an error.
  virtual TrackResult update(const Frame& frame, int frame_index) = 0;
};

using TrackerFactory = std::function<std::unique_ptr<Tracker>()>;

struct NccParams {
  /// Half-width of the exhaustive search window, in pixels around the
  /// previous box center. 0 means max(template width, template height).
  int search_radius = 0;
  /// Candidate sizes per update, relative to the previous box. The chosen
  /// scale compounds across frames, which gives slow size adaptation
  /// without a full pyramid.
  std::array<double, 3> scales{0.95, 1.0, 1.05};
};

/// Normalized-cross-correlation template tracker. The template is fixed at
/// init (no online update); each update exhaustively correlates it against
/// a search window around the previous box over a small scale set and
/// returns the argmax box with score (peak NCC + 1) / 2.
class NccTracker final : public Tracker {
 public:
  explicit NccTracker(NccParams params = {}) : params_(params) {}

  void init(const Frame& frame, int /*frame_index*/, const BBox& seed) override {
    if (!seed.valid() || area(seed) <= 0.0) {
      throw std::invalid_argument("NccTracker: seed box must have positive area");
    }
    const BBox roi = clip(seed, frame.size());
    if (area(roi) <= 0.0) {
      throw std::invalid_argument("NccTracker: seed box lies outside the frame");
    }
    // The template grid snaps to whole pixels; the tracked box itself stays
    // real-valued.
    const int ix0 = std::clamp(static_cast<int>(std::lround(roi.x0)), 0,
                               frame.width() - 1);
    const int iy0 = std::clamp(static_cast<int>(std::lround(roi.y0)), 0,
                               frame.height() - 1);
    const int ix1 = std::clamp(static_cast<int>(std::lround(roi.x1)), ix0 + 1,
                               frame.width());
    const int iy1 = std::clamp(static_cast<int>(std::lround(roi.y1)), iy0 + 1,
                               frame.height());
    tw_ = ix1 - ix0;
    th_ = iy1 - iy0;
    centered_template_.assign(static_cast<std::size_t>(tw_) * th_, 0.0);
    double sum = 0.0;
    for (int y = iy0; y < iy1; ++y) {
      for (int x = ix0; x < ix1; ++x) sum += frame.at(x, y);
    }
    const double mean = sum / static_cast<double>(tw_ * th_);
    template_ss_ = 0.0;
    std::size_t k = 0;
    for (int y = iy0; y < iy1; ++y) {
      for (int x = ix0; x < ix1; ++x, ++k) {
        const double c = frame.at(x, y) - mean;
        centered_template_[k] = c;
        template_ss_ += c * c;
      }
    }
    prev_box_ = roi;
    initialized_ = true;
  }

  TrackResult update(const Frame& frame, int /*frame_index*/) override {
    if (!initialized_) {
      throw std::logic_error("NccTracker: update called before init");
    }
    const int radius =
        params_.search_radius > 0 ? params_.search_radius : std::max(tw_, th_);
    const double pcx = prev_box_.cx();
    const double pcy = prev_box_.cy();
    const double pw = prev_box_.width();
    const double ph = prev_box_.height();
    // The stay-put hypothesis is scored first and every other candidate must
    // strictly beat it, so ties resolve deterministically and a static scene
    // reproduces the previous box exactly.
    BBox best_box = prev_box_;
    double best = score_window(frame, prev_box_.x0, prev_box_.y0, pw, ph);
    for (double s : params_.scales) {
      const double w = pw * s;
      const double h = ph * s;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (s == 1.0 && dx == 0 && dy == 0) continue;
          const double x0 = pcx + dx - 0.5 * w;
          const double y0 = pcy + dy - 0.5 * h;
          const double ncc = score_window(frame, x0, y0, w, h);
          if (ncc > best) {
            best = ncc;
            best_box = BBox{x0, y0, x0 + w, y0 + h};
          }
        }
      }
    }
    prev_box_ = best_box;
    return TrackResult{best_box, std::clamp(0.5 * (best + 1.0), 0.0, 1.0)};
  }

 private:
  // NCC between the stored template and the window (x0,y0,w,h) resampled to
  // template resolution. Returns 0 when either side has no variance.
  double score_window(const Frame& frame, double x0, double y0, double w,
                      double h) const {
    const int n = tw_ * th_;
    const double sx = w / tw_;
    const double sy = h / th_;
    double sum_w = 0.0;
    double sum_ww = 0.0;
    double sum_tw = 0.0;
    std::size_t k = 0;
    for (int j = 0; j < th_; ++j) {
      const double fy = y0 + (j + 0.5) * sy - 0.5;
      for (int i = 0; i < tw_; ++i, ++k) {
        const double fx = x0 + (i + 0.5) * sx - 0.5;
        const double v = sample_bilinear(frame, fx, fy);
        sum_w += v;
        sum_ww += v * v;
        sum_tw += centered_template_[k] * v;
      }
    }
    const double var_w = sum_ww - sum_w * sum_w / n;
    if (template_ss_ <= 1e-12 || var_w <= 1e-12) return 0.0;
    return sum_tw / std::sqrt(template_ss_ * var_w);
  }

  NccParams params_;
  bool initialized_ = false;
  int tw_ = 0;
  int th_ = 0;
  std::vector<double> centered_template_;
  double template_ss_ = 0.0;
  BBox prev_box_;
};

/// Dense per-frame ground truth for one object. Frames where the object is
/// absent simply have no entry.
struct GtTrack {
  int class_id = 1;
  std::map<int, BBox> boxes;  // frame index -> box

  friend bool operator==(const GtTrack&, const GtTrack&) = default;
};

/// Ground-truth playback tracker for exercising the densification engine in
/// isolation. init() latches onto the track whose box at the init frame
/// overlaps the seed most; update() replays that track's boxes with score
/// 1.0 (or a scripted per-frame score). Frames where the track has no box
/// repeat the last box with score 0.
class OracleTracker final : public Tracker {
 public:
  struct Options {
    double default_score = 1.0;
    std::map<int, double> score_overrides;  // frame index -> reported score
  };

  explicit OracleTracker(std::vector<GtTrack> tracks)
      : OracleTracker(std::move(tracks), Options{}) {}

  OracleTracker(std::vector<GtTrack> tracks, Options options)
      : tracks_(std::move(tracks)), options_(std::move(options)) {}

  void init(const Frame& frame, int frame_index, const BBox& seed) override {
    if (!seed.valid() || area(seed) <= 0.0) {
      throw std::invalid_argument("OracleTracker: seed box must have positive area");
    }
    if (area(clip(seed, frame.size())) <= 0.0) {
      throw std::invalid_argument("OracleTracker: seed box lies outside the frame");
    }
    active_ = -1;
    double best = 0.0;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      const auto it = tracks_[i].boxes.find(frame_index);
      if (it == tracks_[i].boxes.end()) continue;
      const double overlap = iou(seed, it->second);
      if (overlap > best) {
        best = overlap;
        active_ = static_cast<int>(i);
      }
    }
    if (active_ < 0) {
      throw std::invalid_argument(
          "OracleTracker: no ground-truth track overlaps the seed");
    }
    last_box_ = tracks_[active_].boxes.at(frame_index);
    initialized_ = true;
  }

  TrackResult update(const Frame& /*frame*/, int frame_index) override {
    if (!initialized_) {
      throw std::logic_error("OracleTracker: update called before init");
    }
    double score = 0.0;
    const auto it = tracks_[active_].boxes.find(frame_index);
    if (it != tracks_[active_].boxes.end()) {
      last_box_ = it->second;
      score = options_.default_score;
    }
    const auto ov = options_.score_overrides.find(frame_index);
    if (ov != options_.score_overrides.end()) score = ov->second;
    return TrackResult{last_box_, score};
  }

 private:
  std::vector<GtTrack> tracks_;
  Options options_;
  int active_ = -1;
  bool initialized_ = false;
  BBox last_box_;
};

}  // namespace densetrack
