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

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "densetrack/dataset_io.hpp"
#include "densetrack/densify.hpp"
#include "densetrack/ensemble.hpp"
#include "densetrack/eval.hpp"
#include "densetrack/fcos.hpp"
#include "densetrack/synth.hpp"
#include "densetrack/tracker.hpp"

namespace densetrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Verbosity comes from DENSETRACK_LOG (error|warn|info|debug); default info.
inline LogLevel log_level_from_env() {
  const char* value = std::getenv("DENSETRACK_LOG");
  if (value == nullptr) return LogLevel::info;
  const std::string v(value);
  if (v == "error") return LogLevel::error;
  if (v == "warn") return LogLevel::warn;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

struct Logger {
  LogLevel level = LogLevel::info;
  std::ostream* sink = nullptr;

  void log(LogLevel at, const char* tag, const std::string& message) const {
    if (sink != nullptr && at <= level) *sink << "[" << tag << "] " << message << "\n";
  }
  void error(const std::string& m) const { log(LogLevel::error, "error", m); }
  void warn(const std::string& m) const { log(LogLevel::warn, "warn", m); }
  void info(const std::string& m) const { log(LogLevel::info, "info", m); }
  void debug(const std::string& m) const { log(LogLevel::debug, "debug", m); }
};

namespace cli_detail {

inline void print_usage(std::ostream& os) {
  os << "densetrack - sparse-to-dense video annotation toolkit\n"
        "\n"
        "usage: densetrack <subcommand> [options]\n"
        "\n"
        "subcommands:\n"
        "  synth         generate a synthetic benchmark (frames, gt, sparse seeds)\n"
        "  densify       densify sparse annotations by bidirectional tracking\n"
        "  ensemble      fuse detection files with joint NMS\n"
        "  eval          score detections against ground truth (AP ladder)\n"
        "  fcos-targets  emit anchor-free box targets and loss for a problem file\n"
        "\n"
        "Run 'densetrack <subcommand> --help' for options. Every option can also\n"
        "come from a key=value file passed as --config; explicit flags win.\n"
        "DENSETRACK_LOG selects log verbosity (error|warn|info|debug).\n";
}

/// Parses the subcommand arguments. Returns an exit code when parsing ends
/// the run (help or usage error), nullopt when execution should proceed.
inline std::optional<int> parse_command_line(CLI::App& app,
                                             const std::vector<std::string>& args,
                                             std::ostream& out,
                                             std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back(app.get_name().c_str());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n"
        << "run '" << app.get_name() << " --help' for usage\n";
    return kExitUsage;
  }
  return std::nullopt;
}

template <typename Fn>
int execute_guarded(const Logger& log, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const io::DataError& e) {
    log.error(e.what());
    return kExitData;
  } catch (const std::exception& e) {
    log.error(std::string("internal error: ") + e.what());
    return kExitInternal;
  }
}

/// One ground-truth playback track per class of one clip. The oracle
/// tracker is a test fixture: it supports at most one object per class per
/// clip, and duplicate class/frame pairs are a data error.
inline std::vector<GtTrack> tracks_from_ground_truth(const GroundTruthMap& gts,
                                                     const std::string& clip_id) {
  std::map<int, GtTrack> by_class;
  const std::string prefix = clip_id + ":";
  for (const auto& [image_id, instances] : gts) {
    if (image_id.rfind(prefix, 0) != 0) continue;
    const std::string digits = image_id.substr(prefix.size());
    int frame = -1;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), frame);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || frame < 0) {
      throw io::DataError("bad frame index in image id '" + image_id + "'");
    }
    for (const GtInstance& gt : instances) {
      GtTrack& track = by_class[gt.class_id];
      track.class_id = gt.class_id;
      if (!track.boxes.emplace(frame, gt.box).second) {
        throw io::DataError("oracle tracker supports one object per class per "
                            "clip; class " + std::to_string(gt.class_id) +
                            " appears twice on " + image_id);
      }
    }
  }
  std::vector<GtTrack> tracks;
  tracks.reserve(by_class.size());
  for (auto& [class_id, track] : by_class) tracks.push_back(std::move(track));
  return tracks;
}

inline std::string clip_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "clip%03d", index);
  return std::string(buf);
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline int run_synth(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err, const Logger& log) {
  CLI::App app{"Generate a synthetic sparse/dense benchmark", "densetrack synth"};
  std::string out_dir;
  int clips = 1;
  int frames = 60;
  int objects = 3;
  double keep_fraction = 0.1;
  int width = 128;
  int height = 128;
  std::uint64_t seed = 1;
  std::string motion = "mixed";
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--clips", clips, "number of clips")->check(CLI::Range(1, 10000));
  app.add_option("--frames", frames, "frames per clip (N)")
      ->check(CLI::Range(1, 100000));
  app.add_option("--objects", objects, "objects per clip (M)")
      ->check(CLI::Range(0, 64));
  app.add_option("--keep-fraction", keep_fraction,
                 "sparse sampling rate p in (0,1]")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--width", width, "frame width")->check(CLI::Range(8, 4096));
  app.add_option("--height", height, "frame height")->check(CLI::Range(8, 4096));
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--motion", motion, "object motion kind")
      ->check(CLI::IsMember({"linear", "sinusoidal", "mixed"}));
  app.set_config("--config", "", "key=value config file; flags override");
  if (const auto code = cli_detail::parse_command_line(app, args, out, err)) {
    return *code;
  }
  if (keep_fraction <= 0.0) {
    err << "densetrack synth: --keep-fraction must be > 0\n";
    return kExitUsage;
  }
  return cli_detail::execute_guarded(log, [&] {
    std::ostringstream desc;
    desc << "densetrack synth seed=" << seed << " clips=" << clips
         << " frames=" << frames << " objects=" << objects
         << " keep_fraction=" << keep_fraction << " motion=" << motion
         << " size=" << width << "x" << height;
    log.info("config: " + desc.str().substr(std::string("densetrack ").size()));

    const BenchmarkMotion kind = motion == "linear" ? BenchmarkMotion::linear
                                 : motion == "sinusoidal"
                                     ? BenchmarkMotion::sinusoidal
                                     : BenchmarkMotion::mixed;
    const std::filesystem::path root(out_dir);
    GroundTruthMap gt;
    std::vector<io::SparseClip> sparse;
    for (int c = 0; c < clips; ++c) {
      const std::string clip_id = cli_detail::clip_name(c);
      const SynthConfig cfg = make_benchmark_config(
          mix_seed(seed, static_cast<std::uint64_t>(c)),
          FrameSize{width, height}, frames, objects, keep_fraction, kind,
          clip_id);
      const SynthClip synth = generate_clip(cfg);
      for (int t = 0; t < cfg.frame_count; ++t) {
        char name[16];
        std::snprintf(name, sizeof name, "%06d.pgm", t);
        io::write_pgm(root / "clips" / clip_id / name, synth.clip.frames[t]);
      }
      for (const GtTrack& track : synth.gt_tracks) {
        for (const auto& [frame, box] : track.boxes) {
          gt[io::frame_image_id(clip_id, frame)].push_back(
              GtInstance{track.class_id, box});
        }
      }
      sparse.push_back(io::SparseClip{clip_id, synth.clip.seeds});
      log.debug("generated " + clip_id);
    }
    io::write_ground_truth(root / "gt.json", gt, desc.str());
    io::write_sparse(root / "sparse.csv", sparse, desc.str());
    log.info("wrote " + (root / "gt.json").string() + ", " +
             (root / "sparse.csv").string() + ", " +
             std::to_string(clips) + " clip(s) under " +
             (root / "clips").string());
  });
}

// ---------------------------------------------------------------------------
// densify
// ---------------------------------------------------------------------------

inline int run_densify(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err, const Logger& log) {
  CLI::App app{"Densify sparse annotations by bidirectional tracking",
               "densetrack densify"};
  std::string in_csv;
  std::string frames_root;
  std::string out_path;
  std::string gt_path;
  std::string tracker = "ncc";
  DensifyParams params;
  int search_radius = 0;
  int parallel = static_cast<int>(
      std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--in", in_csv, "sparse annotation CSV")->required();
  app.add_option("--frames", frames_root,
                 "directory holding one frame subdirectory per clip id")
      ->required();
  app.add_option("--out", out_path, "output dense dataset JSON")->required();
  app.add_option("--rho1", params.rho1, "minimum tracking score to continue")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--rho2", params.rho2,
                 "minimum IoU between consecutive tracked boxes")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--tau-dup", params.tau_dup,
                 "same-class duplicate suppression IoU")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--tracker", tracker, "tracker backend")
      ->check(CLI::IsMember({"ncc", "oracle"}))
      ->capture_default_str();
  app.add_option("--search-radius", search_radius,
                 "NCC search radius in px (0 = template size)")
      ->check(CLI::Range(0, 512));
  app.add_option("--gt", gt_path, "ground truth JSON (oracle tracker only)");
  app.add_option("--parallel", parallel, "worker threads per clip")
      ->check(CLI::Range(1, 256));
  app.set_config("--config", "", "key=value config file; flags override");
  if (const auto code = cli_detail::parse_command_line(app, args, out, err)) {
    return *code;
  }
  if (tracker == "oracle" && gt_path.empty()) {
    err << "densetrack densify: --tracker oracle requires --gt\n";
    return kExitUsage;
  }
  return cli_detail::execute_guarded(log, [&] {
    std::ostringstream desc;
    desc << tracker;
    if (tracker == "ncc") desc << " search_radius=" << search_radius;
    std::ostringstream cfg;
    cfg << "in=" << in_csv << " frames=" << frames_root << " out=" << out_path
        << " rho1=" << params.rho1 << " rho2=" << params.rho2
        << " tau_dup=" << params.tau_dup << " tracker=" << desc.str()
        << " parallel=" << parallel;
    log.info("config: " + cfg.str());

    const auto sparse_clips = io::read_sparse(in_csv);
    GroundTruthMap oracle_gt;
    if (tracker == "oracle") oracle_gt = io::read_ground_truth(gt_path);

    io::DenseDataset dataset;
    dataset.params = params;
    dataset.tracker_desc = desc.str();
    for (const io::SparseClip& sparse : sparse_clips) {
      const std::filesystem::path clip_dir =
          std::filesystem::path(frames_root) / sparse.clip_id;
      ActionClip clip;
      clip.clip_id = sparse.clip_id;
      clip.frames = io::load_frames(clip_dir);
      clip.seeds = sparse.seeds;

      TrackerFactory factory;
      if (tracker == "ncc") {
        NccParams ncc;
        ncc.search_radius = search_radius;
        factory = [ncc] { return std::make_unique<NccTracker>(ncc); };
      } else {
        auto tracks = cli_detail::tracks_from_ground_truth(oracle_gt,
                                                           sparse.clip_id);
        factory = [tracks] { return std::make_unique<OracleTracker>(tracks); };
      }

      const DenseClip dense = densify_clip(clip, factory, params, parallel);
      for (const std::string& warning : dense.warnings) {
        log.warn(sparse.clip_id + ": " + warning);
      }
      dataset.clips.push_back(io::DenseClipRecord{
          sparse.clip_id, dense.frame_count, dense.all_labels()});
      log.debug("densified " + sparse.clip_id);
    }
    io::write_dense(out_path, dataset);
    std::size_t total = 0;
    for (const auto& clip : dataset.clips) total += clip.labels.size();
    log.info("wrote " + out_path + " (" + std::to_string(total) + " labels, " +
             std::to_string(dataset.clips.size()) + " clip(s))");
  });
}

// ---------------------------------------------------------------------------
// ensemble
// ---------------------------------------------------------------------------

inline int run_ensemble(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err, const Logger& log) {
  CLI::App app{"Fuse detection files with joint NMS", "densetrack ensemble"};
  std::vector<std::string> inputs;
  std::string out_path;
  EnsembleParams params;
  app.add_option("--in", inputs, "detection JSON files, one per model")
      ->required()
      ->expected(-1);
  app.add_option("--out", out_path, "output fused detections JSON")->required();
  app.add_option("--nms-iou", params.nms_iou, "suppression IoU threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--top-k", params.top_k, "per-model detection cap")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  app.add_option("--score-floor", params.score_floor,
                 "per-model minimum score")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.set_config("--config", "", "key=value config file; flags override");
  if (const auto code = cli_detail::parse_command_line(app, args, out, err)) {
    return *code;
  }
  return cli_detail::execute_guarded(log, [&] {
    std::ostringstream cfg;
    cfg << "models=" << inputs.size() << " nms_iou=" << params.nms_iou
        << " top_k=" << params.top_k << " score_floor=" << params.score_floor
        << " out=" << out_path;
    log.info("config: " + cfg.str());

    std::vector<DetectionMap> models;
    models.reserve(inputs.size());
    for (const std::string& path : inputs) {
      models.push_back(io::read_detections(path));
    }
    std::set<std::string> image_ids;
    for (const DetectionMap& m : models) {
      for (const auto& [image_id, dets] : m) image_ids.insert(image_id);
    }
    DetectionMap fused;
    for (const std::string& image_id : image_ids) {
      std::vector<std::vector<Detection>> per_model;
      per_model.reserve(models.size());
      for (const DetectionMap& m : models) {
        const auto it = m.find(image_id);
        per_model.push_back(it == m.end() ? std::vector<Detection>{}
                                          : it->second);
      }
      auto kept = joint_nms(per_model, params);
      if (!kept.empty()) fused[image_id] = std::move(kept);
    }
    std::ostringstream echo;
    echo << "joint_nms models=" << inputs.size() << " nms_iou=" << params.nms_iou
         << " top_k=" << params.top_k << " score_floor=" << params.score_floor;
    io::write_detections(out_path, fused, echo.str());
    log.info("wrote " + out_path + " (" + std::to_string(fused.size()) +
             " image(s))");
  });
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

inline int run_eval(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err, const Logger& log) {
  CLI::App app{"Score detections against ground truth", "densetrack eval"};
  std::string det_path;
  std::string gt_path;
  std::string out_path;
  std::vector<double> thresholds = {0.05, 0.5, 0.75};
  app.add_option("--det", det_path,
                 "detections JSON (a dense dataset is accepted too)")
      ->required();
  app.add_option("--gt", gt_path, "ground truth JSON")->required();
  app.add_option("--thresholds", thresholds, "IoU thresholds, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--out", out_path, "optional machine-readable report JSON");
  app.set_config("--config", "", "key=value config file; flags override");
  if (const auto code = cli_detail::parse_command_line(app, args, out, err)) {
    return *code;
  }
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      err << "densetrack eval: thresholds must be in (0,1]\n";
      return kExitUsage;
    }
  }
  return cli_detail::execute_guarded(log, [&] {
    std::ostringstream cfg;
    cfg << "det=" << det_path << " gt=" << gt_path << " thresholds=";
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      cfg << (i ? "," : "") << thresholds[i];
    }
    log.info("config: " + cfg.str());

    const DetectionMap dets = io::read_detections(det_path);
    const GroundTruthMap gts = io::read_ground_truth(gt_path);
    const EvalReport report = evaluate(dets, gts, thresholds);
    io::print_eval_table(out, report);
    if (!out_path.empty()) {
      io::write_eval_report(out_path, report);
      log.info("wrote " + out_path);
    }
  });
}

// ---------------------------------------------------------------------------
// fcos-targets
// ---------------------------------------------------------------------------

namespace cli_detail {

struct FcosProblem {
  std::vector<GridPosition> positions;
  std::vector<GtBox> boxes;
  int num_classes = 0;
  bool has_predictions = false;
  std::vector<ClassScores> scores;
  std::vector<LtrbTarget> regressions;
};

inline FcosProblem read_fcos_problem(const std::filesystem::path& path) {
  const nlohmann::json j = io::parse_json_file(path);
  if (!j.is_object()) throw io::DataError(path.string() + ": not an object");
  FcosProblem problem;
  try {
    if (j.contains("grid")) {
      const auto& grid = j.at("grid");
      const int nx = grid.at("nx").get<int>();
      const int ny = grid.at("ny").get<int>();
      const double stride = grid.at("stride").get<double>();
      const double offset = grid.value("offset", stride / 2.0);
      if (nx < 1 || ny < 1 || !(stride > 0.0)) {
        throw io::DataError(path.string() + ": bad grid");
      }
      for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
          problem.positions.push_back(
              GridPosition{offset + gx * stride, offset + gy * stride});
        }
      }
    }
    if (j.contains("positions")) {
      for (const auto& jp : j.at("positions")) {
        if (!jp.is_array() || jp.size() != 2) {
          throw io::DataError(path.string() + ": positions must be [u,v] pairs");
        }
        problem.positions.push_back(
            GridPosition{jp[0].get<double>(), jp[1].get<double>()});
      }
    }
    int max_class = 0;
    for (const auto& jb : j.at("boxes")) {
      GtBox gt;
      gt.class_id = jb.at("class_id").get<int>();
      if (gt.class_id < 1) {
        throw io::DataError(path.string() + ": class ids must be >= 1");
      }
      const auto& arr = jb.at("bbox");
      if (!arr.is_array() || arr.size() != 4) {
        throw io::DataError(path.string() + ": bbox must be [x0,y0,x1,y1]");
      }
      gt.box = BBox{arr[0].get<double>(), arr[1].get<double>(),
                    arr[2].get<double>(), arr[3].get<double>()};
      if (!gt.box.valid()) {
        throw io::DataError(path.string() + ": invalid box");
      }
      max_class = std::max(max_class, gt.class_id);
      problem.boxes.push_back(gt);
    }
    problem.num_classes = j.value("num_classes", max_class);
    if (problem.num_classes < max_class) {
      throw io::DataError(path.string() +
                          ": num_classes smaller than the largest class id");
    }
    if (j.contains("predictions")) {
      const auto& jp = j.at("predictions");
      problem.has_predictions = true;
      for (const auto& js : jp.at("scores")) {
        ClassScores s;
        for (const auto& v : js) s.push_back(v.get<double>());
        if (static_cast<int>(s.size()) != problem.num_classes) {
          throw io::DataError(path.string() +
                              ": each score vector needs num_classes entries");
        }
        problem.scores.push_back(std::move(s));
      }
      for (const auto& jr : jp.at("regressions")) {
        if (!jr.is_array() || jr.size() != 4) {
          throw io::DataError(path.string() +
                              ": regressions must be [l,t,r,b] quadruples");
        }
        problem.regressions.push_back(LtrbTarget{jr[0].get<double>(),
                                                 jr[1].get<double>(),
                                                 jr[2].get<double>(),
                                                 jr[3].get<double>()});
      }
      if (problem.scores.size() != problem.positions.size() ||
          problem.regressions.size() != problem.positions.size()) {
        throw io::DataError(path.string() +
                            ": predictions must align with the positions");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw io::DataError(path.string() + ": " + e.what());
  }
  if (problem.positions.empty()) {
    throw io::DataError(path.string() + ": no positions (need grid and/or "
                        "positions)");
  }
  return problem;
}

inline std::string fcos_targets_json(const FcosProblem& problem,
                                     const std::vector<FcosTarget>& targets,
                                     std::optional<double> loss) {
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(io::kFormatVersion) + ",\n";
  out += "  \"kind\": \"fcos_targets\",\n";
  out += "  \"num_classes\": " + std::to_string(problem.num_classes) + ",\n";
  out += "  \"targets\": [";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"position\": [" + io::fmt4(problem.positions[i].u) + ", " +
           io::fmt4(problem.positions[i].v) +
           "], \"class_id\": " + std::to_string(targets[i].class_label);
    if (targets[i].class_label > 0) {
      out += ", \"ltrb\": [" + io::fmt4(targets[i].ltrb.l) + ", " +
             io::fmt4(targets[i].ltrb.t) + ", " + io::fmt4(targets[i].ltrb.r) +
             ", " + io::fmt4(targets[i].ltrb.b) + "]";
    }
    out += "}";
  }
  out += targets.empty() ? "]" : "\n  ]";
  if (loss.has_value()) {
    out += ",\n  \"loss\": " + io::fmt6(*loss) + "\n";
  } else {
    out += "\n";
  }
  out += "}\n";
  return out;
}

}  // namespace cli_detail

inline int run_fcos_targets(const std::vector<std::string>& args,
                            std::ostream& out, std::ostream& err,
                            const Logger& log) {
  CLI::App app{"Emit anchor-free box targets (and loss, when predictions are "
               "given) for a JSON problem description",
               "densetrack fcos-targets"};
  std::string in_path;
  std::string out_path;
  app.add_option("--in", in_path, "problem JSON")->required();
  app.add_option("--out", out_path, "output JSON (default: stdout)");
  app.set_config("--config", "", "key=value config file; flags override");
  if (const auto code = cli_detail::parse_command_line(app, args, out, err)) {
    return *code;
  }
  return cli_detail::execute_guarded(log, [&] {
    log.info("config: in=" + in_path +
             (out_path.empty() ? "" : " out=" + out_path));
    const cli_detail::FcosProblem problem = cli_detail::read_fcos_problem(in_path);
    const std::vector<FcosTarget> targets =
        assign_targets(problem.positions, problem.boxes);
    std::optional<double> loss;
    if (problem.has_predictions) {
      try {
        loss = detection_loss(problem.scores, problem.regressions, targets);
      } catch (const std::invalid_argument& e) {
        throw io::DataError(in_path + ": " + e.what());
      }
    }
    const std::string text = cli_detail::fcos_targets_json(problem, targets, loss);
    if (out_path.empty()) {
      out << text;
    } else {
      io::write_file_atomic(out_path, text);
      log.info("wrote " + out_path);
    }
  });
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  const Logger log{log_level_from_env(), &err};
  if (args.empty()) {
    cli_detail::print_usage(err);
    return kExitUsage;
  }
  const std::string command = args[0];
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (command == "help" || command == "--help" || command == "-h") {
    cli_detail::print_usage(out);
    return kExitOk;
  }
  if (command == "synth") return run_synth(rest, out, err, log);
  if (command == "densify") return run_densify(rest, out, err, log);
  if (command == "ensemble") return run_ensemble(rest, out, err, log);
  if (command == "eval") return run_eval(rest, out, err, log);
  if (command == "fcos-targets") return run_fcos_targets(rest, out, err, log);
  err << "densetrack: unknown subcommand '" << command << "'\n";
  cli_detail::print_usage(err);
  return kExitUsage;
}

}  // namespace densetrack::cli
