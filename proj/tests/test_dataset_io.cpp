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

#include <unistd.h>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "densetrack/dataset_io.hpp"
#include "densetrack/synth.hpp"

namespace fs = std::filesystem;
using densetrack::BBox;
using densetrack::Detection;
using densetrack::Frame;
using densetrack::LabelOrigin;
using densetrack::PseudoLabel;
using densetrack::SeedAnnotation;
namespace io = densetrack::io;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("densetrack-io-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  os << content;
}

}  // namespace

TEST_CASE("sparse CSV round trip and grouping") {
  TempDir tmp;
  const fs::path path = tmp.path / "sparse.csv";
  io::write_sparse(path,
                   {{"clipB", {SeedAnnotation{4, 2, BBox{1, 2, 3, 4}}}},
                    {"clipA",
                     {SeedAnnotation{9, 1, BBox{0.5, 0.25, 10.125, 20}},
                      SeedAnnotation{2, 1, BBox{5, 5, 8, 8}}}}},
                   "unit test");
  const auto clips = io::read_sparse(path);
  REQUIRE(clips.size() == 2);
  CHECK(clips[0].clip_id == "clipA");
  REQUIRE(clips[0].seeds.size() == 2);
  CHECK(clips[0].seeds[0].frame_index == 2);  // frame-sorted
  CHECK(clips[0].seeds[1].box == BBox{0.5, 0.25, 10.125, 20});
  CHECK(clips[1].clip_id == "clipB");
}

TEST_CASE("sparse CSV error reporting") {
  TempDir tmp;
  const fs::path path = tmp.path / "bad.csv";
  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::read_sparse(tmp.path / "nope.csv"), io::DataError);
  }
  SUBCASE("header only is an empty success") {
    spit(path, std::string(io::kSparseCsvHeader) + "\n");
    CHECK(io::read_sparse(path).empty());
  }
  SUBCASE("empty file is a header error") {
    spit(path, "");
    CHECK_THROWS_AS(io::read_sparse(path), io::DataError);
  }
  SUBCASE("inverted box names the line") {
    spit(path, std::string(io::kSparseCsvHeader) +
                   "\nclip,0,1,10.0,0.0,4.0,5.0\n");
    CHECK_THROWS_WITH_AS(io::read_sparse(path),
                         doctest::Contains(":2: invalid box: x1 < x0"),
                         io::DataError);
  }
  SUBCASE("field count is checked") {
    spit(path, std::string(io::kSparseCsvHeader) + "\nclip,0,1,1.0\n");
    CHECK_THROWS_WITH_AS(io::read_sparse(path), doctest::Contains(":2:"),
                         io::DataError);
  }
}

TEST_CASE("PGM round trip preserves quantized frames") {
  TempDir tmp;
  const auto cfg = densetrack::make_benchmark_config(9, {48, 32}, 1, 1, 1.0);
  const auto synth = densetrack::generate_clip(cfg);
  const fs::path path = tmp.path / "frame.pgm";
  io::write_pgm(path, synth.clip.frames[0]);
  const Frame loaded = io::read_pgm(path);
  REQUIRE(loaded.size() == synth.clip.frames[0].size());
  for (int y = 0; y < loaded.height(); ++y) {
    for (int x = 0; x < loaded.width(); ++x) {
      CHECK(std::abs(loaded.at(x, y) - synth.clip.frames[0].at(x, y)) <=
            0.5f / 255.0f + 1e-6f);
    }
  }
  // A second write-read is bit-identical (quantization is idempotent).
  const fs::path again = tmp.path / "frame2.pgm";
  io::write_pgm(again, loaded);
  CHECK(io::read_pgm(again) == loaded);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("PGM header comments and malformed files") {
  TempDir tmp;
  const fs::path path = tmp.path / "c.pgm";
  SUBCASE("comments between header tokens are skipped") {
    std::string content = "P5\n# made elsewhere\n4 2\n# another\n255\n";
    for (int i = 0; i < 8; ++i) content.push_back(static_cast<char>(17 * i));
    spit(path, content);
    const Frame frame = io::read_pgm(path);
    CHECK(frame.width() == 4);
    CHECK(frame.height() == 2);
    CHECK(frame.at(1, 0) == doctest::Approx(17.0f / 255.0f));
  }
  SUBCASE("wrong magic") {
    spit(path, "P2\n4 2\n255\n");
    CHECK_THROWS_AS(io::read_pgm(path), io::DataError);
  }
  SUBCASE("truncated pixel data") {
    spit(path, "P5\n4 2\n255\nabc");
    CHECK_THROWS_WITH_AS(io::read_pgm(path), doctest::Contains("truncated"),
                         io::DataError);
  }
  SUBCASE("unsupported maxval") {
    spit(path, "P5\n4 2\n65535\n");
    CHECK_THROWS_AS(io::read_pgm(path), io::DataError);
  }
}

TEST_CASE("load_frames orders numerically and validates") {
  TempDir tmp;
  SUBCASE("numeric order, not lexicographic") {
    // Intensities on the 1/255 grid survive PGM quantization exactly.
    const Frame a = Frame::filled(8, 8, 26.0f / 255.0f);
    const Frame b = Frame::filled(8, 8, 128.0f / 255.0f);
    const Frame c = Frame::filled(8, 8, 230.0f / 255.0f);
    io::write_pgm(tmp.path / "2.pgm", a);
    io::write_pgm(tmp.path / "10.pgm", b);
    io::write_pgm(tmp.path / "000001.pgm", c);
    const auto frames = io::load_frames(tmp.path);
    REQUIRE(frames.size() == 3);
    CHECK(frames[0] == c);
    CHECK(frames[1] == a);
    CHECK(frames[2] == b);
  }
  SUBCASE("empty directory is an error") {
    CHECK_THROWS_AS(io::load_frames(tmp.path), io::DataError);
  }
  SUBCASE("missing directory is an error") {
    CHECK_THROWS_AS(io::load_frames(tmp.path / "absent"), io::DataError);
  }
  SUBCASE("mixed dimensions are an error") {
    io::write_pgm(tmp.path / "0.pgm", Frame::filled(8, 8, 0.5f));
    io::write_pgm(tmp.path / "1.pgm", Frame::filled(9, 8, 0.5f));
    CHECK_THROWS_WITH_AS(io::load_frames(tmp.path),
                         doctest::Contains("size mismatch"), io::DataError);
  }
  SUBCASE("non-numeric names are an error") {
    io::write_pgm(tmp.path / "frame.pgm", Frame::filled(8, 8, 0.5f));
    CHECK_THROWS_AS(io::load_frames(tmp.path), io::DataError);
  }
}

TEST_CASE("dense dataset round trip and determinism") {
  TempDir tmp;
  io::DenseDataset dataset;
  dataset.params = densetrack::DensifyParams{0.8, 0.4, 0.5};
  dataset.tracker_desc = "ncc search_radius=8";
  io::DenseClipRecord clip;
  clip.clip_id = "clip000";
  clip.frame_count = 4;
  clip.labels = {
      PseudoLabel{0, 1, BBox{1.25, 2.5, 10.75, 20}, 1.0, {0, LabelOrigin::original}},
      PseudoLabel{1, 1, BBox{2.25, 2.5, 11.75, 20}, 0.975, {0, LabelOrigin::forward}},
      PseudoLabel{1, 2, BBox{30, 30, 40, 40}, 0.5, {1, LabelOrigin::backward}},
  };
  dataset.clips.push_back(clip);
  io::DenseClipRecord empty_clip;
  empty_clip.clip_id = "clip001";
  empty_clip.frame_count = 2;
  dataset.clips.push_back(empty_clip);

  const fs::path path = tmp.path / "dense.json";
  io::write_dense(path, dataset);
  const auto loaded = io::read_dense(path);
  CHECK(loaded == dataset);

  const fs::path path2 = tmp.path / "dense2.json";
  io::write_dense(path2, dataset);
  CHECK(slurp(path) == slurp(path2));  // byte-identical

  SUBCASE("future versions are rejected explicitly") {
    std::string text = slurp(path);
    const auto pos = text.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"format_version\": 1").size(),
                 "\"format_version\": 2");
    spit(path, text);
    CHECK_THROWS_WITH_AS(io::read_dense(path), doctest::Contains("version 2"),
                         io::DataError);
  }
  SUBCASE("dense files read back as detections") {
    const auto dets = io::read_detections(path);
    CHECK(dets.size() == 2);  // two labeled frames on clip000
    CHECK(dets.at("clip000:000001").size() == 2);
  }
}

TEST_CASE("detections and ground truth round trip") {
  TempDir tmp;
  densetrack::DetectionMap dets;
  dets["clip0:000000"] = {Detection{BBox{1, 2, 3, 4}, 1, 0.75, 0},
                          Detection{BBox{5, 5, 9, 9}, 2, 0.9, 1}};
  dets["clip0:000001"] = {Detection{BBox{2, 2, 4, 4}, 1, 0.25, 0}};
  const fs::path dpath = tmp.path / "dets.json";
  io::write_detections(dpath, dets, "nms_iou=0.5 top_k=300");
  const auto dloaded = io::read_detections(dpath);
  REQUIRE(dloaded.size() == 2);
  CHECK(dloaded.at("clip0:000000").size() == 2);
  CHECK(dloaded.at("clip0:000000")[0].score == 0.9);  // writer sorts by score

  densetrack::GroundTruthMap gts;
  gts["clip0:000000"] = {densetrack::GtInstance{1, BBox{1, 2, 3, 4}}};
  const fs::path gpath = tmp.path / "gt.json";
  io::write_ground_truth(gpath, gts, "synth seed=1");
  CHECK(io::read_ground_truth(gpath) == gts);

  SUBCASE("wrong kind is rejected") {
    CHECK_THROWS_WITH_AS(io::read_ground_truth(dpath),
                         doctest::Contains("expected kind"), io::DataError);
    CHECK_THROWS_AS(io::read_detections(gpath), io::DataError);
  }
  SUBCASE("invalid boxes are rejected with context") {
    spit(dpath,
         "{\"format_version\": 1, \"kind\": \"detections\", \"detections\": "
         "[{\"image_id\": \"a\", \"class_id\": 1, \"bbox\": [5, 0, 1, 2], "
         "\"score\": 0.5, \"model_id\": 0}]}");
    CHECK_THROWS_WITH_AS(io::read_detections(dpath),
                         doctest::Contains("detection 0"), io::DataError);
  }
}

TEST_CASE("eval report serialization") {
  densetrack::EvalReport report;
  report.thresholds = {0.05, 0.5, 0.75};
  report.per_class = {densetrack::ClassApRow{1, {1.0, 0.5, 0.25}},
                      densetrack::ClassApRow{3, {0.5, 0.5, 0.0}}};
  report.mean_ap = {0.75, 0.5, 0.125};
  report.counts = {4, 10, 12};

  const std::string json = io::eval_report_json(report);
  CHECK(json.find("\"thresholds\": [0.05, 0.5, 0.75]") != std::string::npos);
  CHECK(json.find("\"mean_ap\": [0.750000, 0.500000, 0.125000]") !=
        std::string::npos);

  std::ostringstream table;
  io::print_eval_table(table, report);
  CHECK(table.str().find("AP>0.05") != std::string::npos);
  CHECK(table.str().find("AP>0.5") != std::string::npos);
  CHECK(table.str().find("AP>0.75") != std::string::npos);
  CHECK(table.str().find("mAP") != std::string::npos);
  CHECK(table.str().find("images: 4") != std::string::npos);
}

TEST_CASE("frame image ids are zero padded") {
  CHECK(io::frame_image_id("clip7", 3) == "clip7:000003");
  CHECK(io::frame_image_id("c", 123456) == "c:123456");
}
