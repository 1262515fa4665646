// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark and conformance harness over PGM image sequences. Talks to the
// library exclusively through the public C API.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastlk/fastlk.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConformance = 2;

struct CliError {
  std::string message;
};

[[noreturn]] void die(const std::string& message) { throw CliError{message}; }

void check(flk_status status, const std::string& context) {
  if (status != FLK_OK) {
    die(context + ": " + flk_status_name(status) + " (" + flk_last_error() + ")");
  }
}

struct ConfigHandle {
  flk_config* ptr = nullptr;
  ~ConfigHandle() { flk_config_destroy(ptr); }
};

struct ImageHandle {
  flk_image* ptr = nullptr;
  ~ImageHandle() { flk_image_destroy(ptr); }
};

std::vector<fs::path> list_frames(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    die(dir + ": not a directory");
  }
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  if (frames.empty()) {
    die(dir + ": no .pgm frames found");
  }
  return frames;
}

struct Percentiles {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

Percentiles percentiles(std::vector<double> values) {
  Percentiles p;
  if (values.empty()) return p;
  double sum = 0.0;
  for (const double v : values) sum += v;
  p.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  p.median = values[(n - 1) / 2];
  p.p95 = values[static_cast<std::size_t>(
      std::llround(0.95 * static_cast<double>(n - 1)))];
  return p;
}

std::string fmt(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct Options {
  std::string sequence_dir;
  std::string config_path;
  std::string out_csv;
  std::string report_path;
  bool oracle = false;
  bool strict = false;
  int threads = 0;
  int levels = 0;  // 0 keeps the config value
  std::vector<int> sweep;
};

struct StageSeries {
  std::vector<double> pyramid, crf, nms, track;
};

// Streams the report to both stdout and the report file.
class ReportSink {
 public:
  explicit ReportSink(const std::string& path) : file_(path) {
    if (!file_) die(path + ": cannot open report file for writing");
    path_ = path;
  }
  template <typename T>
  ReportSink& operator<<(const T& value) {
    std::cout << value;
    file_ << value;
    return *this;
  }
  const std::string& path() const { return path_; }

 private:
  std::ofstream file_;
  std::string path_;
};

void report_stages(ReportSink& out, const StageSeries& series) {
  const auto row = [&out](const char* name, const Percentiles& p) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %-8s %10.1f %10.1f %10.1f\n", name,
                  p.mean, p.median, p.p95);
    out << line;
  };
  out << "stage timings (us per frame)\n";
  out << "  stage          mean     median        p95\n";
  row("pyramid", percentiles(series.pyramid));
  row("crf", percentiles(series.crf));
  row("nms", percentiles(series.nms));
  row("track", percentiles(series.track));
}

ConfigHandle make_config(const Options& opt, int target_override) {
  ConfigHandle config;
  check(flk_config_create(&config.ptr), "config");
  if (!opt.config_path.empty()) {
    check(flk_config_load_file(config.ptr, opt.config_path.c_str()),
          opt.config_path);
  }
  if (opt.threads > 0) {
    check(flk_config_set(config.ptr, "threads", std::to_string(opt.threads).c_str()),
          "threads");
  }
  if (opt.levels > 0) {
    check(flk_config_set(config.ptr, "l", std::to_string(opt.levels).c_str()),
          "levels");
  }
  if (target_override > 0) {
    check(flk_config_set(config.ptr, "target_count",
                         std::to_string(target_override).c_str()),
          "target_count");
  }
  return config;
}

ImageHandle load_frame(const fs::path& path) {
  ImageHandle image;
  check(flk_image_load_pgm(path.string().c_str(), &image.ptr), path.string());
  return image;
}

std::string default_report_path(const std::string& out_csv) {
  return out_csv + ".report.txt";
}

int run_detect(const Options& opt) {
  const std::vector<fs::path> frames = list_frames(opt.sequence_dir);
  ConfigHandle config = make_config(opt, 0);

  flk_detector* detector = nullptr;
  check(flk_detector_create(config.ptr, &detector), "detector");
  std::unique_ptr<flk_detector, decltype(&flk_detector_destroy)> detector_guard(
      detector, flk_detector_destroy);

  std::ofstream csv(opt.out_csv);
  if (!csv) die(opt.out_csv + ": cannot open CSV file for writing");
  csv << "frame,x,y,score,level,cell_x,cell_y\n";

  StageSeries series;
  std::vector<double> feature_counts;
  std::uint64_t comparisons = 0;
  std::uint64_t candidates = 0;
  flk_conformance total_conf{};

  for (std::size_t f = 0; f < frames.size(); ++f) {
    ImageHandle image = load_frame(frames[f]);
    flk_features* features = nullptr;
    flk_frame_stats stats{};
    flk_conformance conf{};
    check(flk_detector_run(detector, image.ptr, &features, &stats,
                           opt.oracle ? &conf : nullptr),
          frames[f].string());
    std::unique_ptr<flk_features, decltype(&flk_features_destroy)> features_guard(
        features, flk_features_destroy);

    for (int i = 0; i < flk_features_count(features); ++i) {
      flk_feature feat{};
      check(flk_features_get(features, i, &feat), "feature");
      char line[160];
      std::snprintf(line, sizeof(line), "%zu,%d,%d,%.2f,%d,%d,%d\n", f, feat.x,
                    feat.y, static_cast<double>(feat.score), feat.level,
                    feat.cell_x, feat.cell_y);
      csv << line;
    }

    series.pyramid.push_back(stats.pyramid_us);
    series.crf.push_back(stats.crf_us);
    series.nms.push_back(stats.nms_us);
    series.track.push_back(stats.track_us);
    feature_counts.push_back(stats.feature_count);
    comparisons += stats.nms_comparisons;
    candidates += stats.nms_candidates;
    if (opt.oracle) {
      total_conf.matched += conf.matched;
      total_conf.subset_only += conf.subset_only;
      total_conf.false_positives += conf.false_positives;
    }
  }
  csv.close();
  if (!csv) die(opt.out_csv + ": write failed");

  ReportSink report(opt.report_path);
  report << "fastlk detect report\n";
  report << "frames: " << frames.size() << "\n";
  report << "sequence: " << opt.sequence_dir << "\n";
  const Percentiles feat = percentiles(feature_counts);
  report << "features per frame: mean=" << fmt(feat.mean) << " median="
         << fmt(feat.median, 0) << "\n\n";
  report_stages(report, series);
  const double mean_cmp =
      candidates == 0 ? 0.0
                      : static_cast<double>(comparisons) /
                            static_cast<double>(candidates);
  report << "\nnms suppression: candidates=" << candidates
         << " mean_comparisons_per_candidate=" << fmt(mean_cmp, 2) << "\n";
  if (opt.oracle) {
    report << "\nconformance vs naive reference\n";
    report << "  matched:         " << total_conf.matched << "\n";
    report << "  subset_only:     " << total_conf.subset_only << "\n";
    report << "  false_positives: " << total_conf.false_positives << "\n";
  }
  std::cout << "\nCSV written to " << opt.out_csv << "\nreport written to "
            << report.path() << "\n";

  if (opt.oracle && opt.strict && total_conf.false_positives > 0) {
    return kExitConformance;
  }
  return kExitOk;
}

struct TrackRunSummary {
  int target = 0;
  double track_us_mean = 0.0;
  double mean_iterations = 0.0;   // per advanced track per frame
  double mean_live = 0.0;
  int redetections = 0;
  int spawned = 0;
  flk_conformance conf{};
};

TrackRunSummary run_track_session(const Options& opt,
                                  const std::vector<fs::path>& frames,
                                  int target_override, std::ostream* csv,
                                  StageSeries* series) {
  ConfigHandle config = make_config(opt, target_override);
  flk_session* session = nullptr;
  check(flk_session_create(config.ptr, &session), "session");
  std::unique_ptr<flk_session, decltype(&flk_session_destroy)> session_guard(
      session, flk_session_destroy);

  TrackRunSummary summary;
  summary.target = target_override;
  double track_us_sum = 0.0;
  long live_sum = 0;
  long iteration_sum = 0;
  long advanced_sum = 0;

  for (std::size_t f = 0; f < frames.size(); ++f) {
    ImageHandle image = load_frame(frames[f]);
    flk_tracks* tracks = nullptr;
    flk_frame_stats stats{};
    flk_conformance conf{};
    check(flk_session_process(session, image.ptr, &tracks, &stats,
                              opt.oracle ? &conf : nullptr),
          frames[f].string());
    std::unique_ptr<flk_tracks, decltype(&flk_tracks_destroy)> tracks_guard(
        tracks, flk_tracks_destroy);

    if (csv != nullptr) {
      for (int i = 0; i < flk_tracks_count(tracks); ++i) {
        flk_track_info info{};
        check(flk_tracks_get(tracks, i, &info), "track");
        char line[200];
        std::snprintf(line, sizeof(line), "%zu,%lld,%.4f,%.4f,%s,%.6f,%.4f\n",
                      f, static_cast<long long>(info.id), info.x, info.y,
                      flk_track_status_name(
                          static_cast<flk_track_status>(info.status)),
                      info.alpha, info.beta);
        *csv << line;
      }
    }

    if (series != nullptr) {
      series->pyramid.push_back(stats.pyramid_us);
      series->crf.push_back(stats.crf_us);
      series->nms.push_back(stats.nms_us);
      series->track.push_back(stats.track_us);
    }
    track_us_sum += stats.track_us;
    live_sum += stats.feature_count;
    iteration_sum += stats.track_iterations;
    advanced_sum += stats.tracks_entering;
    summary.redetections += stats.redetect_fired;
    summary.spawned += stats.tracks_spawned;
    if (opt.oracle) {
      summary.conf.matched += conf.matched;
      summary.conf.subset_only += conf.subset_only;
      summary.conf.false_positives += conf.false_positives;
    }
  }
  const double n = static_cast<double>(frames.size());
  summary.track_us_mean = track_us_sum / n;
  summary.mean_live = static_cast<double>(live_sum) / n;
  summary.mean_iterations =
      advanced_sum == 0 ? 0.0
                        : static_cast<double>(iteration_sum) /
                              static_cast<double>(advanced_sum);
  return summary;
}

int run_track(const Options& opt) {
  const std::vector<fs::path> frames = list_frames(opt.sequence_dir);
  ReportSink report(opt.report_path);
  report << "fastlk track report\n";
  report << "frames: " << frames.size() << "\n";
  report << "sequence: " << opt.sequence_dir << "\n";

  int worst_false_positives = 0;

  if (opt.sweep.empty()) {
    std::ofstream csv(opt.out_csv);
    if (!csv) die(opt.out_csv + ": cannot open CSV file for writing");
    csv << "frame,track_id,x,y,status,alpha,beta\n";
    StageSeries series;
    const TrackRunSummary summary =
        run_track_session(opt, frames, 0, &csv, &series);
    csv.close();
    if (!csv) die(opt.out_csv + ": write failed");

    report << "mean live tracks: " << fmt(summary.mean_live) << "\n";
    report << "tracks spawned: " << summary.spawned << "\n";
    report << "re-detections: " << summary.redetections << "\n";
    report << "mean iterations per track: " << fmt(summary.mean_iterations, 2)
           << "\n\n";
    report_stages(report, series);
    if (opt.oracle) {
      report << "\nconformance vs naive reference (re-detection frames)\n";
      report << "  matched:         " << summary.conf.matched << "\n";
      report << "  subset_only:     " << summary.conf.subset_only << "\n";
      report << "  false_positives: " << summary.conf.false_positives << "\n";
      worst_false_positives = summary.conf.false_positives;
    }
    std::cout << "\nCSV written to " << opt.out_csv << "\nreport written to "
              << report.path() << "\n";
  } else {
    report << "\nsweep (per target count)\n";
    report << "  target   track_us_mean   iterations_mean   live_mean"
              "   redetections\n";
    std::vector<std::string> csv_paths;
    for (const int target : opt.sweep) {
      const fs::path csv_path =
          fs::path(opt.out_csv).parent_path() /
          (fs::path(opt.out_csv).stem().string() + ".target" +
           std::to_string(target) + fs::path(opt.out_csv).extension().string());
      std::ofstream csv(csv_path);
      if (!csv) die(csv_path.string() + ": cannot open CSV file for writing");
      csv << "frame,track_id,x,y,status,alpha,beta\n";
      const TrackRunSummary summary =
          run_track_session(opt, frames, target, &csv, nullptr);
      char line[200];
      std::snprintf(line, sizeof(line), "  %-8d %15.1f %17.2f %11.1f %14d\n",
                    target, summary.track_us_mean, summary.mean_iterations,
                    summary.mean_live, summary.redetections);
      report << line;
      worst_false_positives =
          std::max(worst_false_positives, summary.conf.false_positives);
      csv_paths.push_back(csv_path.string());
    }
    std::cout << "\n";
    for (const std::string& path : csv_paths) {
      std::cout << "CSV written to " << path << "\n";
    }
    std::cout << "report written to " << report.path() << "\n";
  }

  if (opt.oracle && opt.strict && worst_false_positives > 0) {
    return kExitConformance;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastlk benchmark and conformance harness"};
  app.require_subcommand(1);

  Options opt;
  std::string sweep_text;

  const auto add_common = [&](CLI::App* cmd, const char* default_csv) {
    cmd->add_option("sequence", opt.sequence_dir,
                    "Directory of lexicographically ordered .pgm frames")
        ->required();
    cmd->add_option("--config", opt.config_path, "key = value config file");
    cmd->add_option("--out", opt.out_csv, "Output CSV path")
        ->default_val(default_csv);
    cmd->add_option("--report", opt.report_path,
                    "Report path (default: <out>.report.txt)");
    cmd->add_flag("--oracle", opt.oracle,
                  "Also run the naive reference detector and report conformance");
    cmd->add_flag("--strict", opt.strict,
                  "With --oracle: exit 2 on any false positive");
    cmd->add_option("--threads", opt.threads,
                    "Worker thread cap (0 = hardware default)");
    cmd->add_option("--levels", opt.levels, "Pyramid level override");
  };

  CLI::App* detect = app.add_subcommand("detect", "Per-frame feature detection");
  add_common(detect, "fastlk_detect.csv");

  CLI::App* track = app.add_subcommand("track", "Full detect-track session");
  add_common(track, "fastlk_track.csv");
  track->add_option("--sweep", sweep_text,
                    "Comma-separated target counts, one session each");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (!sweep_text.empty()) {
      std::stringstream ss(sweep_text);
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          opt.sweep.push_back(std::stoi(part));
        } catch (const std::exception&) {
          die("invalid --sweep entry '" + part + "'");
        }
      }
    }
    if (opt.report_path.empty()) {
      opt.report_path = default_report_path(opt.out_csv);
    }
    if (app.got_subcommand(detect)) {
      return run_detect(opt);
    }
    return run_track(opt);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
