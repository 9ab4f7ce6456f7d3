#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "blastomere/geometry.hpp"
#include "blastomere/image.hpp"

namespace blastomere {

using RegionMask = Grid<std::uint8_t>;

// 2|A n B| / (|A| + |B|); 1 for two empty masks.
double dice(const RegionMask& a, const RegionMask& b);
// 2|A n B| / |A u B|, the variant with the union in the denominator.
double dice_union(const RegionMask& a, const RegionMask& b);

struct RegionMetrics {
  double precision = 0.0;
  double sensitivity = 0.0;
  double oq = 0.0;
};

RegionMetrics region_metrics(const RegionMask& pred, const RegionMask& gt);

// One-to-one assignment maximizing the summed score; only pairs with a
// positive score are ever matched. pred_to_gt[i] = -1 when unmatched.
struct Assignment {
  std::vector<int> pred_to_gt;
  double total = 0.0;
};

Assignment match_scores(const std::vector<std::vector<double>>& score);
Assignment match_detections(const std::vector<RegionMask>& preds, const std::vector<RegionMask>& gts);

// Direct least-squares ellipse fit to the polygon outline densified to 0.5 px.
EllipseModel best_fit_ellipse(const std::vector<Vec2>& polygon);

struct GroundTruth {
  std::string image;
  int n_cells = 0;
  bool artifact = false;
  std::vector<std::vector<Vec2>> blastomeres;
  int width = 0;  // optional, 0 when unknown
  int height = 0;
};

GroundTruth read_ground_truth(const std::filesystem::path& path);
std::string ground_truth_json(const GroundTruth& gt);

struct DetectionRecord {
  EllipseModel ellipse;
  double correlation = 0.0;
  double compliance = 0.0;
};

struct DetectionFile {
  std::string image;
  int n_requested = 0;
  std::vector<DetectionRecord> detections;
};

DetectionFile read_detections(const std::filesystem::path& path);
std::string detections_json(const DetectionFile& file);

struct CellResult {
  int pred = -1;  // detection index, -1 for a missed cell
  int gt = -1;    // ground-truth index, -1 for a spurious detection
  double precision = 0.0;
  double sensitivity = 0.0;
  double oq = 0.0;
  double dsc = 0.0;
};

struct EvalReport {
  std::string image;
  int n_cells = 0;
  bool artifact = false;
  std::vector<CellResult> per_cell;
  double precision = 0.0;    // mean over detections
  double sensitivity = 0.0;  // mean over ground-truth cells
  double oq = 0.0;           // mean over all entries of per_cell
  int detected_count = 0;    // matched pairs with oq >= threshold
};

struct EvalOptions {
  double oq_threshold = 0.7;
  bool union_dice = false;
};

EvalReport embryo_report(const std::vector<EllipseModel>& detections, const GroundTruth& gt,
                         const EvalOptions& opts = {});

struct AggregateRow {
  int n_cells = 0;
  bool artifact = false;
  int images = 0;
  double precision = 0.0;
  double sensitivity = 0.0;
  double oq = 0.0;
  int gt_cells = 0;
  int detected = 0;
};

// Rows grouped by (cell count, artifact flag), sorted.
std::vector<AggregateRow> aggregate(const std::vector<EvalReport>& reports);

std::string report_json(const std::vector<EvalReport>& reports, const EvalOptions& opts);
std::string report_table(const std::vector<EvalReport>& reports);

}  // namespace blastomere
