#pragma once

#include <filesystem>
#include <numbers>
#include <string>

#include "blastomere/clustering.hpp"
#include "blastomere/zona.hpp"

namespace blastomere {

// All tunables of the pipeline. Text form: one `section.key = value` per line,
// `#` starts a comment.
struct Config {
  // edges
  double sigma_min = 1.0;
  double sigma_max = 5.0625;
  int n_scales = 5;
  double vesselness_alpha = 0.5;
  double vesselness_beta = 0.0;  // <= 0: automatic
  double hysteresis_low = 0.05;
  double hysteresis_high = 0.15;
  int min_segment_len = 10;
  // clusters
  double epsilon = 2.0;
  CoAssociationParams coassoc;
  // zona
  ZonaParams zona;
  bool zp_fallback = true;
  double border_margin = 0.0;
  // hypotheses
  double axis_spacing = 2.0;
  int axis_steps = 0;  // > 0 overrides axis_spacing
  // detector
  int top_k = 40;
  double compliance_floor = 0.15;
  double search_slack = 5.0;
  double angle_gate = std::numbers::pi / 16.0;
  double removal_tol = 3.0;
  double normal_floor = 1e-6;
  bool lazy_search = true;  // skip sizes whose previous score bounds them out of the shortlist
  // evaluation
  double oq_threshold = 0.7;
};

// Applies the assignments in `text` on top of `base`. Throws InvalidArgument on
// unknown keys or malformed values.
Config parse_config(const std::string& text, Config base = {});
Config load_config(const std::filesystem::path& path);
std::string format_config(const Config& cfg);

}  // namespace blastomere
