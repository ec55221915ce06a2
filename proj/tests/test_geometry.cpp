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

#include <doctest.h>

#include "densetrack/geometry.hpp"
#include "densetrack/rng.hpp"
#include "oracles.hpp"

using densetrack::BBox;
using densetrack::FrameSize;
using densetrack::SplitMix64;

namespace {

BBox random_int_box(SplitMix64& rng, int extent) {
  const int x0 = static_cast<int>(rng.next_below(extent));
  const int y0 = static_cast<int>(rng.next_below(extent));
  const int w = static_cast<int>(rng.next_below(extent / 2));
  const int h = static_cast<int>(rng.next_below(extent / 2));
  return BBox{static_cast<double>(x0), static_cast<double>(y0),
              static_cast<double>(x0 + w), static_cast<double>(y0 + h)};
}

BBox random_real_box(SplitMix64& rng, double extent) {
  const double x0 = rng.next_double(0.0, extent);
  const double y0 = rng.next_double(0.0, extent);
  return BBox{x0, y0, x0 + rng.next_double(0.0, extent / 2),
              y0 + rng.next_double(0.0, extent / 2)};
}

}  // namespace

TEST_CASE("iou basics") {
  CHECK(densetrack::iou(BBox{0, 0, 10, 10}, BBox{0, 0, 10, 10}) == doctest::Approx(1.0));
  CHECK(densetrack::iou(BBox{0, 0, 10, 10}, BBox{20, 20, 30, 30}) == 0.0);
  CHECK(densetrack::iou(BBox{0, 0, 10, 10}, BBox{5, 0, 15, 10}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Two degenerate boxes: defined as 0, not NaN.
  CHECK(densetrack::iou(BBox{3, 3, 3, 3}, BBox{3, 3, 3, 3}) == 0.0);
}

TEST_CASE("area basics") {
  CHECK(densetrack::area(BBox{0, 0, 10, 10}) == 100.0);
  CHECK(densetrack::area(BBox{3, 3, 3, 9}) == 0.0);
  CHECK(densetrack::area(BBox{1.5, 2, 4.5, 5}) == doctest::Approx(9.0));
}

TEST_CASE("clip basics") {
  const FrameSize frame{100, 100};
  CHECK(densetrack::clip(BBox{-5, -5, 10, 10}, frame) == BBox{0, 0, 10, 10});
  CHECK(densetrack::clip(BBox{50, 50, 60, 60}, frame) == BBox{50, 50, 60, 60});
  const BBox outside = densetrack::clip(BBox{150, 150, 160, 160}, frame);
  CHECK(densetrack::area(outside) == 0.0);
  CHECK(outside == BBox{100, 100, 100, 100});
}

TEST_CASE("iou matches the pixel-count oracle on integer boxes") {
  SplitMix64 rng(20260808);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_int_box(rng, 40);
    const BBox b = random_int_box(rng, 40);
    CHECK(densetrack::iou(a, b) ==
          doctest::Approx(oracles::pixel_count_iou(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("iou symmetry and range") {
  SplitMix64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    const BBox a = random_real_box(rng, 60);
    const BBox b = random_real_box(rng, 60);
    const double ab = densetrack::iou(a, b);
    CHECK(ab == densetrack::iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    if (densetrack::area(a) > 0.0) CHECK(densetrack::iou(a, a) == 1.0);
  }
}

TEST_CASE("clip never grows a box") {
  SplitMix64 rng(11);
  const FrameSize frame{64, 48};
  for (int i = 0; i < 5000; ++i) {
    BBox b = random_real_box(rng, 90);
    b.x0 -= 20;
    b.y0 -= 20;
    b.x1 -= 20;
    b.y1 -= 20;
    const BBox c = densetrack::clip(b, frame);
    CHECK(c.valid());
    CHECK(densetrack::area(c) <= densetrack::area(b) + 1e-12);
    CHECK(c.x0 >= 0.0);
    CHECK(c.y0 >= 0.0);
    CHECK(c.x1 <= frame.width);
    CHECK(c.y1 <= frame.height);
  }
}
