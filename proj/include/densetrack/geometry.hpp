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

namespace densetrack {

/// Axis-aligned box in pixel coordinates, top-left origin. x1/y1 are
/// exclusive edges: width = x1 - x0, no +1 anywhere. Zero-area boxes are
/// legal, inverted ones are not.
struct BBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double cx() const { return 0.5 * (x0 + x1); }
  double cy() const { return 0.5 * (y0 + y1); }

  bool valid() const {
    return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
           std::isfinite(y1) && x0 <= x1 && y0 <= y1;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct FrameSize {
  int width = 0;
  int height = 0;

  bool valid() const { return width >= 1 && height >= 1; }

  friend bool operator==(const FrameSize&, const FrameSize&) = default;
};

inline double area(const BBox& b) { return (b.x1 - b.x0) * (b.y1 - b.y0); }

inline double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

/// Intersection over union. Defined as 0 when the union has zero area (two
/// degenerate boxes), so comparisons stay total.
inline double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

/// Intersects the box with [0,width] x [0,height]. A box fully outside the
/// frame collapses to a zero-area box on the nearest edge.
inline BBox clip(const BBox& b, const FrameSize& frame) {
  const double w = static_cast<double>(frame.width);
  const double h = static_cast<double>(frame.height);
  return BBox{std::clamp(b.x0, 0.0, w), std::clamp(b.y0, 0.0, h),
              std::clamp(b.x1, 0.0, w), std::clamp(b.y1, 0.0, h)};
}

}  // namespace densetrack
