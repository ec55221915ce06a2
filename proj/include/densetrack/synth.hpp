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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "densetrack/densify.hpp"
#include "densetrack/frame.hpp"
#include "densetrack/geometry.hpp"
#include "densetrack/rng.hpp"
#include "densetrack/tracker.hpp"

namespace densetrack {

struct LinearMotion {
  double vx = 0.0;  // px/frame
  double vy = 0.0;
};

/// Elliptical oscillation around the initial center:
///   dx(t) = amp_x * (sin(2*pi*t/period + phase) - sin(phase))
///   dy(t) = amp_y * (cos(2*pi*t/period + phase) - cos(phase))
/// The subtraction keeps the box at its initial position at t = 0.
struct SinusoidalMotion {
  double amp_x = 0.0;   // px
  double amp_y = 0.0;   // px
  double period = 16.0;  // frames
  double phase = 0.0;   // radians
};

using MotionModel = std::variant<LinearMotion, SinusoidalMotion>;

struct ObjectSpec {
  int class_id = 1;
  std::uint64_t appearance_seed = 1;  // texture pattern stream
  BBox initial_box;
  MotionModel motion = LinearMotion{};
  double scale_drift = 1.0;  // per-frame multiplicative size change
};

inline bool box_inside_frame(const BBox& b, const FrameSize& f) {
  return b.valid() && area(b) > 0.0 && b.x0 >= 0.0 && b.y0 >= 0.0 &&
         b.x1 <= f.width && b.y1 <= f.height;
}

struct SynthConfig {
  std::string clip_id = "clip";
  FrameSize frame_size{128, 128};
  int frame_count = 1;  // N
  std::vector<ObjectSpec> objects;
  double keep_fraction = 1.0;  // sparse sampling rate p in (0,1]
  std::uint64_t seed = 1;

  void validate() const {
    if (!frame_size.valid()) {
      throw std::invalid_argument("SynthConfig: invalid frame size");
    }
    if (frame_count < 1) {
      throw std::invalid_argument("SynthConfig: frame_count must be >= 1");
    }
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
      throw std::invalid_argument("SynthConfig: keep_fraction must be in (0,1]");
    }
    for (const ObjectSpec& obj : objects) {
      if (obj.class_id < 1) {
        throw std::invalid_argument("SynthConfig: class ids must be >= 1");
      }
      if (!box_inside_frame(obj.initial_box, frame_size)) {
        throw std::invalid_argument(
            "SynthConfig: initial boxes must lie inside the frame");
      }
      if (!(obj.scale_drift > 0.0)) {
        throw std::invalid_argument("SynthConfig: scale_drift must be positive");
      }
    }
  }
};

/// Everything generate_clip produces: the clip (frames + sparse seeds), the
/// dense per-object ground truth, and the raw config echo.
struct SynthClip {
  ActionClip clip;
  std::vector<GtTrack> gt_tracks;  // index-aligned with config objects
};

namespace synth_detail {

constexpr std::uint64_t kBackgroundSalt = 0x4247;  // background noise stream
constexpr std::uint64_t kSparseSalt = 0x5350;      // sparse subsample stream
constexpr std::uint64_t kBenchmarkSalt = 0x424D;   // benchmark config stream

inline BBox raw_box_at(const ObjectSpec& obj, int t) {
  double dx = 0.0;
  double dy = 0.0;
  if (const auto* lin = std::get_if<LinearMotion>(&obj.motion)) {
    dx = lin->vx * t;
    dy = lin->vy * t;
  } else {
    const auto& sin_m = std::get<SinusoidalMotion>(obj.motion);
    const double w = 2.0 * std::numbers::pi / sin_m.period;
    dx = sin_m.amp_x * (std::sin(w * t + sin_m.phase) - std::sin(sin_m.phase));
    dy = sin_m.amp_y * (std::cos(w * t + sin_m.phase) - std::cos(sin_m.phase));
  }
  const double scale = std::pow(obj.scale_drift, t);
  const double w2 = 0.5 * obj.initial_box.width() * scale;
  const double h2 = 0.5 * obj.initial_box.height() * scale;
  const double cx = obj.initial_box.cx() + dx;
  const double cy = obj.initial_box.cy() + dy;
  return BBox{cx - w2, cy - h2, cx + w2, cy + h2};
}

}  // namespace synth_detail

/// Ground-truth track of one configured object: the analytic motion boxes
/// clipped to the frame; frames where the object left entirely are absent.
inline GtTrack object_track(const SynthConfig& config, std::size_t object_index) {
  if (object_index >= config.objects.size()) {
    throw std::invalid_argument("object_track: no such object");
  }
  const ObjectSpec& obj = config.objects[object_index];
  GtTrack track;
  track.class_id = obj.class_id;
  for (int t = 0; t < config.frame_count; ++t) {
    const BBox clipped =
        clip(synth_detail::raw_box_at(obj, t), config.frame_size);
    if (area(clipped) > 0.0) track.boxes[t] = clipped;
  }
  return track;
}

/// IoU between the object's ground-truth boxes at frames k and k+1, for all
/// k. 0 when the object is absent on either side. Used to predict exactly
/// where a given rho2 terminates tracking.
inline std::vector<double> true_consecutive_iou(const SynthConfig& config,
                                                std::size_t object_index) {
  config.validate();
  const GtTrack track = object_track(config, object_index);
  std::vector<double> out;
  out.reserve(config.frame_count > 0 ? config.frame_count - 1 : 0);
  for (int k = 0; k + 1 < config.frame_count; ++k) {
    const auto a = track.boxes.find(k);
    const auto b = track.boxes.find(k + 1);
    if (a == track.boxes.end() || b == track.boxes.end()) {
      out.push_back(0.0);
    } else {
      out.push_back(iou(a->second, b->second));
    }
  }
  return out;
}

/// Renders the configured clip: textured rectangles moving over a
/// low-amplitude noise background, dense ground truth per object, and a
/// sparse per-object subsample of seed annotations (at least one per
/// object). Bit-identical output for identical config.
inline SynthClip generate_clip(const SynthConfig& config) {
  config.validate();
  SynthClip out;
  out.clip.clip_id = config.clip_id;

  for (std::size_t m = 0; m < config.objects.size(); ++m) {
    out.gt_tracks.push_back(object_track(config, m));
  }

  // Per-object texture patterns at the initial box resolution.
  struct Texture {
    int w = 0;
    int h = 0;
    std::vector<float> values;
  };
  std::vector<Texture> textures;
  for (const ObjectSpec& obj : config.objects) {
    Texture tex;
    tex.w = std::max(1, static_cast<int>(std::lround(obj.initial_box.width())));
    tex.h = std::max(1, static_cast<int>(std::lround(obj.initial_box.height())));
    tex.values.resize(static_cast<std::size_t>(tex.w) * tex.h);
    SplitMix64 rng(obj.appearance_seed);
    for (float& v : tex.values) v = static_cast<float>(rng.next_double());
    textures.push_back(std::move(tex));
  }

  const int width = config.frame_size.width;
  const int height = config.frame_size.height;
  for (int t = 0; t < config.frame_count; ++t) {
    std::vector<float> pixels(static_cast<std::size_t>(width) * height);
    SplitMix64 bg(mix_seed(mix_seed(config.seed, synth_detail::kBackgroundSalt),
                           static_cast<std::uint64_t>(t)));
    for (float& v : pixels) {
      v = static_cast<float>(0.5 + 0.05 * (2.0 * bg.next_double() - 1.0));
    }
    for (std::size_t m = 0; m < config.objects.size(); ++m) {
      const auto it = out.gt_tracks[m].boxes.find(t);
      if (it == out.gt_tracks[m].boxes.end()) continue;
      const BBox raw = synth_detail::raw_box_at(config.objects[m], t);
      const BBox& visible = it->second;
      const Texture& tex = textures[m];
      // A pixel belongs to the box when its center does.
      const int y_begin = std::max(0, static_cast<int>(std::ceil(visible.y0 - 0.5)));
      const int y_end = std::min(height, static_cast<int>(std::ceil(visible.y1 - 0.5)));
      const int x_begin = std::max(0, static_cast<int>(std::ceil(visible.x0 - 0.5)));
      const int x_end = std::min(width, static_cast<int>(std::ceil(visible.x1 - 0.5)));
      for (int py = y_begin; py < y_end; ++py) {
        const int tv = std::clamp(
            static_cast<int>((py + 0.5 - raw.y0) / raw.height() * tex.h), 0,
            tex.h - 1);
        for (int px = x_begin; px < x_end; ++px) {
          const int tu = std::clamp(
              static_cast<int>((px + 0.5 - raw.x0) / raw.width() * tex.w), 0,
              tex.w - 1);
          pixels[static_cast<std::size_t>(py) * width + px] =
              tex.values[static_cast<std::size_t>(tv) * tex.w + tu];
        }
      }
    }
    out.clip.frames.emplace_back(width, height, std::move(pixels));
  }

  // Sparse subsample: keep each present frame with probability p, with a
  // guaranteed minimum of one seed per object.
  SplitMix64 sparse_rng(mix_seed(config.seed, synth_detail::kSparseSalt));
  for (std::size_t m = 0; m < config.objects.size(); ++m) {
    const GtTrack& track = out.gt_tracks[m];
    std::vector<int> present;
    present.reserve(track.boxes.size());
    for (const auto& [frame, box] : track.boxes) present.push_back(frame);
    if (present.empty()) continue;
    std::vector<int> kept;
    for (int frame : present) {
      if (sparse_rng.next_double() < config.keep_fraction) kept.push_back(frame);
    }
    if (kept.empty()) {
      kept.push_back(present[sparse_rng.next_below(present.size())]);
    }
    for (int frame : kept) {
      out.clip.seeds.push_back(
          SeedAnnotation{frame, track.class_id, track.boxes.at(frame)});
    }
  }
  return out;
}

enum class BenchmarkMotion { linear, sinusoidal, mixed };

/// Deterministic benchmark configuration: objects on non-overlapping
/// horizontal bands with in-frame trajectories for the whole clip, textured
/// appearance, one class per object. Velocities are multiples of 0.5 px,
/// capped at 3 px/frame and shrunk further when the clip is long enough
/// that a faster object would reach the frame edge.
inline SynthConfig make_benchmark_config(std::uint64_t seed, FrameSize frame_size,
                                         int frame_count, int object_count,
                                         double keep_fraction,
                                         BenchmarkMotion motion = BenchmarkMotion::mixed,
                                         std::string clip_id = "clip") {
  if (object_count < 0) {
    throw std::invalid_argument("make_benchmark_config: negative object count");
  }
  SynthConfig cfg;
  cfg.clip_id = std::move(clip_id);
  cfg.frame_size = frame_size;
  cfg.frame_count = frame_count;
  cfg.keep_fraction = keep_fraction;
  cfg.seed = seed;

  SplitMix64 rng(mix_seed(seed, synth_detail::kBenchmarkSalt));
  const double margin = 2.0;
  const int steps = std::max(1, frame_count - 1);
  for (int m = 0; m < object_count; ++m) {
    ObjectSpec obj;
    obj.class_id = m + 1;
    obj.appearance_seed = mix_seed(seed, 0x100 + static_cast<std::uint64_t>(m));

    const double band_y0 = frame_size.height * static_cast<double>(m) / object_count;
    const double band_y1 =
        frame_size.height * static_cast<double>(m + 1) / object_count;
    const double band_h = band_y1 - band_y0;

    const double w = 14.0 + static_cast<double>(rng.next_below(13));
    const double max_h = std::min(26.0, band_h - 2.0 * margin - 1.0);
    if (max_h < 3.0) {
      throw std::invalid_argument(
          "make_benchmark_config: too many objects for the frame height");
    }
    const double h = std::min(14.0 + static_cast<double>(rng.next_below(13)), max_h);

    // Feasible speed per axis so the whole trajectory stays in the band.
    const double span_x = frame_size.width - w - 2.0 * margin;
    const double span_y = band_h - h - 2.0 * margin;
    const auto pick_velocity = [&](double span) {
      const double vmax = std::min(3.0, span / steps);
      const int half_steps = static_cast<int>(std::floor(vmax / 0.5));
      if (half_steps <= 0) return 0.0;
      const int k = static_cast<int>(rng.next_below(
                        static_cast<std::uint64_t>(2 * half_steps + 1))) -
                    half_steps;
      return 0.5 * k;
    };

    const bool sinusoidal =
        motion == BenchmarkMotion::sinusoidal ||
        (motion == BenchmarkMotion::mixed && rng.next_below(2) == 1);
    double x_travel_lo = 0.0;
    double x_travel_hi = 0.0;
    double y_travel_lo = 0.0;
    double y_travel_hi = 0.0;
    if (sinusoidal) {
      SinusoidalMotion sm;
      const double amp_x_cap = std::max(0.0, span_x / 4.0 - 1.0);
      const double amp_y_cap = std::max(0.0, span_y / 4.0 - 1.0);
      sm.amp_x = std::min(4.0 + static_cast<double>(rng.next_below(21)), amp_x_cap);
      sm.amp_y = std::min(3.0, amp_y_cap);
      sm.period = 16.0 + static_cast<double>(rng.next_below(17));
      sm.phase = 0.25 * std::numbers::pi * static_cast<double>(rng.next_below(8));
      obj.motion = sm;
      // Displacement stays within amp * 2 of the start in each direction.
      x_travel_lo = -2.0 * sm.amp_x;
      x_travel_hi = 2.0 * sm.amp_x;
      y_travel_lo = -2.0 * sm.amp_y;
      y_travel_hi = 2.0 * sm.amp_y;
    } else {
      LinearMotion lm{pick_velocity(span_x), pick_velocity(span_y)};
      obj.motion = lm;
      x_travel_lo = std::min(0.0, lm.vx * steps);
      x_travel_hi = std::max(0.0, lm.vx * steps);
      y_travel_lo = std::min(0.0, lm.vy * steps);
      y_travel_hi = std::max(0.0, lm.vy * steps);
    }

    const double x_lo = margin - x_travel_lo;
    const double x_hi = frame_size.width - margin - w - x_travel_hi;
    const double y_lo = band_y0 + margin - y_travel_lo;
    const double y_hi = band_y1 - margin - h - y_travel_hi;
    const double x0 = x_lo + (x_hi > x_lo ? (x_hi - x_lo) * rng.next_double() : 0.0);
    const double y0 = y_lo + (y_hi > y_lo ? (y_hi - y_lo) * rng.next_double() : 0.0);
    // Integer-aligned start so integer velocities produce pixel-exact motion.
    obj.initial_box = BBox{std::floor(x0), std::floor(y0), std::floor(x0) + w,
                           std::floor(y0) + h};
    cfg.objects.push_back(obj);
  }
  return cfg;
}

}  // namespace densetrack
