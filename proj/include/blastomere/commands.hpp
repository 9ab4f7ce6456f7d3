#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "blastomere/config.hpp"
#include "blastomere/detector.hpp"
#include "blastomere/evaluation.hpp"

namespace blastomere {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNoZona = 2,
  kIo = 3,
  kUnmatched = 4,
};

struct DetectOptions {
  std::filesystem::path image;
  int cells = 0;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = ".";
  bool debug_dumps = false;
  std::optional<double> border_margin;
  std::optional<std::filesystem::path> ground_truth;  // drawn in white on the overlay
};

struct EvalCommandOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  double oq_threshold = 0.7;
  bool union_dice = false;
  std::filesystem::path out = "eval_report";  // writes <out>.json and <out>.txt
};

struct SynthOptions {
  int n = 1;
  int count = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  double overlap_max = 0.2;
  double fragmentation = 0.1;
  double noise = 0.02;
  int width = 260;
  int height = 260;
  double zp_radius = 100.0;
};

struct BatchOptions {
  std::filesystem::path image_dir;
  std::filesystem::path gt_dir;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = ".";
  double oq_threshold = 0.7;
};

int cmd_detect(const DetectOptions& opts, std::ostream& log);
int cmd_eval(const EvalCommandOptions& opts, std::ostream& log);
int cmd_synth(const SynthOptions& opts, std::ostream& log);
// Detects every image of image_dir using the cell count of its ground truth, then evaluates.
int cmd_batch(const BatchOptions& opts, std::ostream& log);

// Writes bytes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

DetectionFile to_detection_file(const DetectionResult& result, const std::string& image_name);

// Input image with detections drawn in commit-order colours and ground truth in white.
RgbImage render_overlay(const GrayImage& img, const std::vector<EllipseModel>& detections,
                        const std::vector<std::vector<Vec2>>& truth = {});

}  // namespace blastomere
