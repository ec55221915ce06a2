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
#include <stdexcept>
#include <utility>
#include <vector>

#include "densetrack/geometry.hpp"

namespace densetrack {

/// Grayscale image. Intensities in [0,1], row-major, immutable after
/// construction.
class Frame {
 public:
  Frame() = default;

  Frame(int width, int height, std::vector<float> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ < 1 || height_ < 1) {
      throw std::invalid_argument("Frame: dimensions must be positive");
    }
    if (pixels_.size() !=
        static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw std::invalid_argument("Frame: pixel buffer size mismatch");
    }
    for (float v : pixels_) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw std::invalid_argument("Frame: intensity outside [0,1]");
      }
    }
  }

  static Frame filled(int width, int height, float value) {
    return Frame(width, height,
                 std::vector<float>(
                     static_cast<std::size_t>(width) * height, value));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  FrameSize size() const { return FrameSize{width_, height_}; }

  /// Unchecked pixel access; (x, y) must be inside the frame.
  float at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

  const std::vector<float>& pixels() const { return pixels_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
};

/// Bilinear sample with clamped borders. Coordinates are pixel-centered:
/// sampling at integer (x, y) returns pixel (x, y) exactly.
inline double sample_bilinear(const Frame& f, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(f.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(f.height() - 1));
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, f.width() - 1);
  const int y1 = std::min(y0 + 1, f.height() - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = (1.0 - fx) * f.at(x0, y0) + fx * f.at(x1, y0);
  const double bottom = (1.0 - fx) * f.at(x0, y1) + fx * f.at(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

}  // namespace densetrack
