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

// File formats (the stable on-disk contract; format details in README):
//   - sparse annotations: CSV with header
//       clip_id,frame_index,class_id,x0,y0,x1,y1
//   - dense datasets, detections, ground truth, eval reports: JSON with a
//     format_version and kind field
//   - frames: binary PGM (P5, maxval 255), numeric filenames
// All writers are byte-deterministic (sorted entries, fixed 4-decimal
// coordinate formatting, no timestamps) and write-temp-then-rename.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "densetrack/densify.hpp"
#include "densetrack/ensemble.hpp"
#include "densetrack/eval.hpp"
#include "densetrack/frame.hpp"
#include "densetrack/geometry.hpp"

namespace densetrack::io {

constexpr int kFormatVersion = 1;

/// Error in external data: missing or malformed files, bad boxes, version
/// mismatches. Messages carry the path and, where possible, the line or
/// entry that failed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Image id of one clip frame, used by detections and ground-truth files:
/// "<clip_id>:<frame_index as 6 digits>".
inline std::string frame_image_id(const std::string& clip_id, int frame_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", frame_index);
  return clip_id + ":" + buf;
}

/// Fixed 4-decimal float formatting used for every coordinate and score on
/// disk; guarantees byte-stable files.
inline std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return std::string(buf);
}

/// Writes the whole file via a temp file plus rename, creating parent
/// directories as needed.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open for writing: " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw DataError("rename failed: " + path.string() + ": " + ec.message());
  }
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": JSON parse error: " + e.what());
  }
}

namespace io_detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string bbox_json(const BBox& b) {
  return "[" + fmt4(b.x0) + ", " + fmt4(b.y0) + ", " + fmt4(b.x1) + ", " +
         fmt4(b.y1) + "]";
}

inline void check_header(const nlohmann::json& j,
                         const std::filesystem::path& path,
                         const std::string& expected_kind) {
  if (!j.is_object() || !j.contains("format_version") ||
      !j["format_version"].is_number_integer()) {
    throw DataError(path.string() + ": missing format_version");
  }
  const int version = j["format_version"].get<int>();
  if (version != kFormatVersion) {
    throw DataError(path.string() + ": format version " +
                    std::to_string(version) + " unsupported (expected " +
                    std::to_string(kFormatVersion) + ")");
  }
  if (!expected_kind.empty()) {
    const std::string kind = j.value("kind", std::string());
    if (kind != expected_kind) {
      throw DataError(path.string() + ": expected kind '" + expected_kind +
                      "', found '" + kind + "'");
    }
  }
}

inline BBox parse_bbox(const nlohmann::json& arr,
                       const std::filesystem::path& path,
                       const std::string& where) {
  if (!arr.is_array() || arr.size() != 4) {
    throw DataError(path.string() + ": " + where + ": bbox must be [x0,y0,x1,y1]");
  }
  BBox b;
  try {
    b = BBox{arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
             arr[3].get<double>()};
  } catch (const nlohmann::json::exception&) {
    throw DataError(path.string() + ": " + where + ": non-numeric bbox");
  }
  if (!b.valid()) {
    throw DataError(path.string() + ": " + where + ": invalid box (x1 < x0, "
                    "y1 < y0, or non-finite)");
  }
  return b;
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// PGM frames (binary P5, maxval 255)
// ---------------------------------------------------------------------------

inline void write_pgm(const std::filesystem::path& path, const Frame& frame) {
  std::string content = "P5\n" + std::to_string(frame.width()) + " " +
                        std::to_string(frame.height()) + "\n255\n";
  content.reserve(content.size() + frame.pixels().size());
  for (float v : frame.pixels()) {
    const long q = std::lround(static_cast<double>(v) * 255.0);
    content.push_back(static_cast<char>(std::clamp(q, 0L, 255L)));
  }
  write_file_atomic(path, content);
}

inline Frame read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path.string());
  const auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ": " + what);
  };
  std::string magic;
  is >> magic;
  if (magic != "P5") fail("not a binary PGM (P5)");
  const auto next_int = [&]() {
    // Skip whitespace and '#' comments between header tokens.
    for (;;) {
      const int c = is.peek();
      if (c == '#') {
        std::string comment;
        std::getline(is, comment);
      } else if (std::isspace(c)) {
        is.get();
      } else {
        break;
      }
    }
    long v = -1;
    is >> v;
    if (!is || v < 0) fail("malformed header");
    return v;
  };
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (width < 1 || height < 1) fail("bad dimensions");
  if (maxval != 255) fail("unsupported maxval (expected 255)");
  is.get();  // single whitespace byte after maxval
  std::vector<char> raw(static_cast<std::size_t>(width) * height);
  is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (is.gcount() != static_cast<std::streamsize>(raw.size())) {
    fail("truncated pixel data");
  }
  std::vector<float> pixels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pixels[i] = static_cast<float>(static_cast<unsigned char>(raw[i])) / 255.0f;
  }
  return Frame(static_cast<int>(width), static_cast<int>(height),
               std::move(pixels));
}

/// Loads every .pgm in the directory, ordered by the numeric value of the
/// filename stem. All frames must share one size; a clip needs at least one
/// frame.
inline std::vector<Frame> load_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw DataError("not a directory: " + dir.string());
  }
  std::vector<std::pair<long, std::filesystem::path>> entries;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".pgm") continue;
    const std::string stem = entry.path().stem().string();
    long value = -1;
    const auto [ptr, err] =
        std::from_chars(stem.data(), stem.data() + stem.size(), value);
    if (err != std::errc() || ptr != stem.data() + stem.size() || value < 0) {
      throw DataError("non-numeric frame filename: " + entry.path().string());
    }
    entries.emplace_back(value, entry.path());
  }
  if (entries.empty()) {
    throw DataError("no .pgm frames in: " + dir.string());
  }
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first) {
      throw DataError("duplicate frame index " +
                      std::to_string(entries[i].first) + " in " + dir.string());
    }
  }
  std::vector<Frame> frames;
  frames.reserve(entries.size());
  for (const auto& [value, path] : entries) {
    Frame frame = read_pgm(path);
    if (!frames.empty() && frame.size() != frames.front().size()) {
      throw DataError("frame size mismatch: " + path.string());
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Sparse annotation CSV
// ---------------------------------------------------------------------------

struct SparseClip {
  std::string clip_id;
  std::vector<SeedAnnotation> seeds;

  friend bool operator==(const SparseClip&, const SparseClip&) = default;
};

inline constexpr const char* kSparseCsvHeader =
    "clip_id,frame_index,class_id,x0,y0,x1,y1";

/// Reads sparse annotations grouped by clip id (clips sorted by id, seeds
/// sorted by frame index). Malformed rows fail with their line number.
inline std::vector<SparseClip> read_sparse(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open: " + path.string());
  const auto fail = [&](int line, const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
  };

  std::map<std::string, std::vector<SeedAnnotation>> by_clip;
  std::string line;
  int line_number = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kSparseCsvHeader) {
        fail(line_number, std::string("expected header '") + kSparseCsvHeader + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) fail(line_number, "expected 7 fields");
    const auto parse_int = [&](const std::string& s, const char* name) {
      int v = 0;
      const auto [ptr, err] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (err != std::errc() || ptr != s.data() + s.size()) {
        fail(line_number, std::string("bad ") + name + ": '" + s + "'");
      }
      return v;
    };
    const auto parse_double = [&](const std::string& s, const char* name) {
      double v = 0.0;
      const auto [ptr, err] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (err != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        fail(line_number, std::string("bad ") + name + ": '" + s + "'");
      }
      return v;
    };
    SeedAnnotation seed;
    const std::string clip_id = fields[0];
    if (clip_id.empty()) fail(line_number, "empty clip_id");
    seed.frame_index = parse_int(fields[1], "frame_index");
    seed.class_id = parse_int(fields[2], "class_id");
    seed.box = BBox{parse_double(fields[3], "x0"), parse_double(fields[4], "y0"),
                    parse_double(fields[5], "x1"), parse_double(fields[6], "y1")};
    if (seed.frame_index < 0) fail(line_number, "frame_index must be >= 0");
    if (seed.class_id < 1) fail(line_number, "class_id must be >= 1");
    if (seed.box.x1 < seed.box.x0) fail(line_number, "invalid box: x1 < x0");
    if (seed.box.y1 < seed.box.y0) fail(line_number, "invalid box: y1 < y0");
    by_clip[clip_id].push_back(seed);
  }
  if (!header_seen) {
    throw DataError(path.string() + ": missing header line '" +
                    std::string(kSparseCsvHeader) + "'");
  }
  std::vector<SparseClip> clips;
  for (auto& [clip_id, seeds] : by_clip) {
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const SeedAnnotation& a, const SeedAnnotation& b) {
                       return a.frame_index < b.frame_index;
                     });
    clips.push_back(SparseClip{clip_id, std::move(seeds)});
  }
  return clips;
}

inline void write_sparse(const std::filesystem::path& path,
                         std::vector<SparseClip> clips,
                         const std::string& comment = "") {
  std::sort(clips.begin(), clips.end(),
            [](const SparseClip& a, const SparseClip& b) {
              return a.clip_id < b.clip_id;
            });
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += kSparseCsvHeader;
  out += "\n";
  for (SparseClip& clip : clips) {
    std::stable_sort(clip.seeds.begin(), clip.seeds.end(),
                     [](const SeedAnnotation& a, const SeedAnnotation& b) {
                       return std::make_tuple(a.frame_index, a.class_id) <
                              std::make_tuple(b.frame_index, b.class_id);
                     });
    for (const SeedAnnotation& seed : clip.seeds) {
      out += clip.clip_id + "," + std::to_string(seed.frame_index) + "," +
             std::to_string(seed.class_id) + "," + fmt4(seed.box.x0) +
             "," + fmt4(seed.box.y0) + "," +
             fmt4(seed.box.x1) + "," + fmt4(seed.box.y1) +
             "\n";
    }
  }
  write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------
// Dense dataset JSON
// ---------------------------------------------------------------------------

struct DenseClipRecord {
  std::string clip_id;
  int frame_count = 0;
  std::vector<PseudoLabel> labels;

  friend bool operator==(const DenseClipRecord&, const DenseClipRecord&) = default;
};

struct DenseDataset {
  DensifyParams params;
  std::string tracker_desc;  // reproducibility echo, e.g. "ncc search_radius=8"
  std::vector<DenseClipRecord> clips;

  friend bool operator==(const DenseDataset&, const DenseDataset&) = default;
};

inline void write_dense(const std::filesystem::path& path, DenseDataset dataset) {
  std::sort(dataset.clips.begin(), dataset.clips.end(),
            [](const DenseClipRecord& a, const DenseClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"dense_dataset\",\n";
  out += "  \"params\": {\n";
  out += "    \"rho1\": " + fmt4(dataset.params.rho1) + ",\n";
  out += "    \"rho2\": " + fmt4(dataset.params.rho2) + ",\n";
  out += "    \"tau_dup\": " + fmt4(dataset.params.tau_dup) + ",\n";
  out += "    \"tracker\": \"" + io_detail::json_escape(dataset.tracker_desc) +
         "\"\n";
  out += "  },\n";
  out += "  \"clips\": [";
  for (std::size_t c = 0; c < dataset.clips.size(); ++c) {
    DenseClipRecord& clip = dataset.clips[c];
    std::sort(clip.labels.begin(), clip.labels.end(),
              detail::label_priority_less);
    out += c == 0 ? "\n" : ",\n";
    out += "    {\n";
    out += "      \"clip_id\": \"" + io_detail::json_escape(clip.clip_id) +
           "\",\n";
    out += "      \"frame_count\": " + std::to_string(clip.frame_count) + ",\n";
    out += "      \"labels\": [";
    for (std::size_t i = 0; i < clip.labels.size(); ++i) {
      const PseudoLabel& label = clip.labels[i];
      out += i == 0 ? "\n" : ",\n";
      out += "        {\"frame_index\": " + std::to_string(label.frame_index) +
             ", \"class_id\": " + std::to_string(label.class_id) +
             ", \"bbox\": " + io_detail::bbox_json(label.box) +
             ", \"score\": " + fmt4(label.score) +
             ", \"seed_id\": " + std::to_string(label.provenance.seed_id) +
             ", \"origin\": \"" + to_string(label.provenance.origin) + "\"}";
    }
    out += clip.labels.empty() ? "]\n" : "\n      ]\n";
    out += "    }";
  }
  out += dataset.clips.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  write_file_atomic(path, out);
}

inline DenseDataset read_dense(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);
  io_detail::check_header(j, path, "dense_dataset");
  DenseDataset dataset;
  try {
    const auto& params = j.at("params");
    dataset.params.rho1 = params.at("rho1").get<double>();
    dataset.params.rho2 = params.at("rho2").get<double>();
    dataset.params.tau_dup = params.at("tau_dup").get<double>();
    dataset.tracker_desc = params.value("tracker", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": bad params block: " + e.what());
  }
  if (!j.contains("clips") || !j["clips"].is_array()) {
    throw DataError(path.string() + ": missing clips array");
  }
  for (const auto& jc : j["clips"]) {
    DenseClipRecord clip;
    try {
      clip.clip_id = jc.at("clip_id").get<std::string>();
      clip.frame_count = jc.at("frame_count").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": bad clip entry: " + e.what());
    }
    if (!jc.contains("labels") || !jc["labels"].is_array()) {
      throw DataError(path.string() + ": clip '" + clip.clip_id +
                      "': missing labels array");
    }
    std::size_t index = 0;
    for (const auto& jl : jc["labels"]) {
      const std::string where =
          "clip '" + clip.clip_id + "' label " + std::to_string(index++);
      PseudoLabel label;
      try {
        label.frame_index = jl.at("frame_index").get<int>();
        label.class_id = jl.at("class_id").get<int>();
        label.score = jl.at("score").get<double>();
        label.provenance.seed_id = jl.at("seed_id").get<int>();
        const std::string origin = jl.at("origin").get<std::string>();
        if (origin == "original") {
          label.provenance.origin = LabelOrigin::original;
        } else if (origin == "forward") {
          label.provenance.origin = LabelOrigin::forward;
        } else if (origin == "backward") {
          label.provenance.origin = LabelOrigin::backward;
        } else {
          throw DataError(path.string() + ": " + where + ": unknown origin '" +
                          origin + "'");
        }
      } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + where + ": " + e.what());
      }
      label.box = io_detail::parse_bbox(jl.at("bbox"), path, where);
      if (label.frame_index < 0 || label.frame_index >= clip.frame_count) {
        throw DataError(path.string() + ": " + where +
                        ": frame_index out of range");
      }
      clip.labels.push_back(label);
    }
    dataset.clips.push_back(std::move(clip));
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Detections JSON
// ---------------------------------------------------------------------------

inline void write_detections(const std::filesystem::path& path,
                             const DetectionMap& detections,
                             const std::string& params_desc = "") {
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"detections\",\n";
  if (!params_desc.empty()) {
    out += "  \"params\": \"" + io_detail::json_escape(params_desc) + "\",\n";
  }
  out += "  \"detections\": [";
  bool first = true;
  for (const auto& [image_id, dets] : detections) {
    std::vector<Detection> sorted = dets;
    std::sort(sorted.begin(), sorted.end(),
              [](const Detection& a, const Detection& b) {
                return std::make_tuple(-a.score, a.class_id, a.model_id, a.box.x0,
                                       a.box.y0, a.box.x1, a.box.y1) <
                       std::make_tuple(-b.score, b.class_id, b.model_id, b.box.x0,
                                       b.box.y0, b.box.x1, b.box.y1);
              });
    for (const Detection& d : sorted) {
      out += first ? "\n" : ",\n";
      first = false;
      out += "    {\"image_id\": \"" + io_detail::json_escape(image_id) +
             "\", \"class_id\": " + std::to_string(d.class_id) +
             ", \"bbox\": " + io_detail::bbox_json(d.box) +
             ", \"score\": " + fmt4(d.score) +
             ", \"model_id\": " + std::to_string(d.model_id) + "}";
    }
  }
  out += first ? "]\n" : "\n  ]\n";
  out += "}\n";
  write_file_atomic(path, out);
}

/// Flattens a dense dataset into per-image detections (image ids built with
/// frame_image_id), so densified pseudo labels evaluate like any detector
/// output.
inline DetectionMap detections_from_dense(const DenseDataset& dataset) {
  DetectionMap out;
  for (const DenseClipRecord& clip : dataset.clips) {
    for (const PseudoLabel& label : clip.labels) {
      out[frame_image_id(clip.clip_id, label.frame_index)].push_back(
          Detection{label.box, label.class_id, label.score, 0});
    }
  }
  return out;
}

/// Reads a detections file. A dense_dataset file is accepted too and is
/// flattened via detections_from_dense.
inline DetectionMap read_detections(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);
  io_detail::check_header(j, path, "");
  const std::string kind = j.value("kind", std::string());
  if (kind == "dense_dataset") return detections_from_dense(read_dense(path));
  if (kind != "detections") {
    throw DataError(path.string() + ": expected kind 'detections' or "
                    "'dense_dataset', found '" + kind + "'");
  }
  if (!j.contains("detections") || !j["detections"].is_array()) {
    throw DataError(path.string() + ": missing detections array");
  }
  DetectionMap out;
  std::size_t index = 0;
  for (const auto& jd : j["detections"]) {
    const std::string where = "detection " + std::to_string(index++);
    Detection d;
    std::string image_id;
    try {
      image_id = jd.at("image_id").get<std::string>();
      d.class_id = jd.at("class_id").get<int>();
      d.score = jd.at("score").get<double>();
      d.model_id = jd.value("model_id", 0);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + where + ": " + e.what());
    }
    d.box = io_detail::parse_bbox(jd.at("bbox"), path, where);
    if (d.class_id < 1) {
      throw DataError(path.string() + ": " + where + ": class_id must be >= 1");
    }
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw DataError(path.string() + ": " + where + ": score outside [0,1]");
    }
    out[image_id].push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground truth JSON
// ---------------------------------------------------------------------------

inline void write_ground_truth(const std::filesystem::path& path,
                               const GroundTruthMap& gts,
                               const std::string& generator_desc = "") {
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"ground_truth\",\n";
  if (!generator_desc.empty()) {
    out += "  \"generator\": \"" + io_detail::json_escape(generator_desc) +
           "\",\n";
  }
  out += "  \"ground_truth\": [";
  bool first = true;
  for (const auto& [image_id, instances] : gts) {
    std::vector<GtInstance> sorted = instances;
    std::sort(sorted.begin(), sorted.end(),
              [](const GtInstance& a, const GtInstance& b) {
                return std::make_tuple(a.class_id, a.box.x0, a.box.y0, a.box.x1,
                                       a.box.y1) <
                       std::make_tuple(b.class_id, b.box.x0, b.box.y0, b.box.x1,
                                       b.box.y1);
              });
    for (const GtInstance& gt : sorted) {
      out += first ? "\n" : ",\n";
      first = false;
      out += "    {\"image_id\": \"" + io_detail::json_escape(image_id) +
             "\", \"class_id\": " + std::to_string(gt.class_id) +
             ", \"bbox\": " + io_detail::bbox_json(gt.box) + "}";
    }
  }
  out += first ? "]\n" : "\n  ]\n";
  out += "}\n";
  write_file_atomic(path, out);
}

inline GroundTruthMap read_ground_truth(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);
  io_detail::check_header(j, path, "ground_truth");
  if (!j.contains("ground_truth") || !j["ground_truth"].is_array()) {
    throw DataError(path.string() + ": missing ground_truth array");
  }
  GroundTruthMap out;
  std::size_t index = 0;
  for (const auto& jg : j["ground_truth"]) {
    const std::string where = "ground truth " + std::to_string(index++);
    GtInstance gt;
    std::string image_id;
    try {
      image_id = jg.at("image_id").get<std::string>();
      gt.class_id = jg.at("class_id").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + where + ": " + e.what());
    }
    gt.box = io_detail::parse_bbox(jg.at("bbox"), path, where);
    if (gt.class_id < 1) {
      throw DataError(path.string() + ": " + where + ": class_id must be >= 1");
    }
    out[image_id].push_back(gt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation report
// ---------------------------------------------------------------------------

inline std::string eval_report_json(const EvalReport& report) {
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"eval_report\",\n";
  out += "  \"thresholds\": [";
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt_short(report.thresholds[i]);
  }
  out += "],\n";
  out += "  \"counts\": {\"images\": " + std::to_string(report.counts.images) +
         ", \"ground_truths\": " + std::to_string(report.counts.ground_truths) +
         ", \"detections\": " + std::to_string(report.counts.detections) +
         "},\n";
  out += "  \"per_class\": [";
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    out += c == 0 ? "\n" : ",\n";
    out += "    {\"class_id\": " + std::to_string(report.per_class[c].class_id) +
           ", \"ap\": [";
    for (std::size_t i = 0; i < report.per_class[c].ap.size(); ++i) {
      if (i > 0) out += ", ";
      out += fmt6(report.per_class[c].ap[i]);
    }
    out += "]}";
  }
  out += report.per_class.empty() ? "],\n" : "\n  ],\n";
  out += "  \"mean_ap\": [";
  for (std::size_t i = 0; i < report.mean_ap.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt6(report.mean_ap[i]);
  }
  out += "]\n}\n";
  return out;
}

inline void write_eval_report(const std::filesystem::path& path,
                              const EvalReport& report) {
  write_file_atomic(path, eval_report_json(report));
}

/// Human-readable table, one AP column per threshold plus the mAP row.
inline void print_eval_table(std::ostream& os, const EvalReport& report) {
  os << "class";
  for (double t : report.thresholds) {
    std::string header = "AP>" + fmt_short(t);
    os << "  " << std::string(10 > header.size() ? 10 - header.size() : 0, ' ')
       << header;
  }
  os << "\n";
  const auto row = [&](const std::string& name, const std::vector<double>& values) {
    os << std::string(5 > name.size() ? 5 - name.size() : 0, ' ') << name;
    for (double v : values) {
      const std::string cell = fmt6(v);
      os << "  " << std::string(10 > cell.size() ? 10 - cell.size() : 0, ' ')
         << cell;
    }
    os << "\n";
  };
  for (const ClassApRow& cls : report.per_class) {
    row(std::to_string(cls.class_id), cls.ap);
  }
  row("mAP", report.mean_ap);
  os << "images: " << report.counts.images
     << "  ground truths: " << report.counts.ground_truths
     << "  detections: " << report.counts.detections << "\n";
}

}  // namespace densetrack::io
