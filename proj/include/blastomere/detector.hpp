#pragma once

#include <vector>

#include "blastomere/clustering.hpp"
#include "blastomere/config.hpp"
#include "blastomere/hypothesis.hpp"
#include "blastomere/normals.hpp"
#include "blastomere/zona.hpp"

namespace blastomere {

struct ComplianceParams {
  double search_slack = 5.0;
  double angle_gate = std::numbers::pi / 16.0;
};

// Fraction of 1-px arc-length contour samples that find an edge pixel within
// the search slack along the model normal whose image normal agrees with the
// model normal.
double compliance_score(const EllipseModel& e, const EdgeMap& edges, const NormalField& normals,
                        const ComplianceParams& params = {});

// Intermediate products kept for debug output.
struct PipelineStages {
  EdgeMap raw_edges;
  std::vector<EdgeCluster> clusters;   // after co-association
  std::vector<EdgeCluster> interior;   // after zona cluster removal
  EdgeMap working_edges;               // edge map handed to the hypothesis loop
};

struct DetectionResult {
  std::vector<Hypothesis> detections;  // commit order
  EdgeMap residual_edges;
  int n_requested = 0;
  ZpModel zp;
  PipelineStages stages;
};

// Edge detection, clustering, co-association and zona estimation/removal.
// Throws NoZonaFound when no zona is found and the fallback is disabled.
PipelineStages prepare_edges(const GrayImage& img, const Config& cfg, ZpModel& zp);

DetectionResult detect_blastomeres(const GrayImage& img, int n, const Config& cfg = {});

}  // namespace blastomere
