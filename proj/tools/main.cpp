#include <CLI11.hpp>

#include <iostream>

#include "blastomere/commands.hpp"

using namespace blastomere;

int main(int argc, char** argv) {
  CLI::App app{"Blastomere boundary detection in embryo micrographs"};
  app.require_subcommand(1);

  DetectOptions det;
  std::string det_config, det_gt;
  double margin = 0.0;
  auto* detect = app.add_subcommand("detect", "Detect blastomeres in one image");
  detect->add_option("image", det.image, "Input PNG or PGM")->required();
  detect->add_option("--cells", det.cells, "Number of cells (1-8)")->required();
  detect->add_option("--config", det_config, "Configuration file");
  detect->add_option("--out", det.out, "Output directory");
  detect->add_flag("--debug-dumps", det.debug_dumps, "Write intermediate edge maps and clusters");
  auto* margin_opt = detect->add_option("--border-margin", margin, "Ignore edges this close to the frame (px)");
  detect->add_option("--gt", det_gt, "Ground truth JSON drawn on the overlay");

  EvalCommandOptions ev;
  auto* eval = app.add_subcommand("eval", "Compare detections with ground truth");
  eval->add_option("pred_dir", ev.pred_dir, "Directory of detection JSON files")->required();
  eval->add_option("gt_dir", ev.gt_dir, "Directory of ground-truth JSON files")->required();
  eval->add_option("--oq-threshold", ev.oq_threshold, "OQ needed to count a cell as detected");
  eval->add_flag("--paper-dice", ev.union_dice, "Use the union denominator for DSC");
  eval->add_option("--out", ev.out, "Report path prefix (.json and .txt are appended)");

  SynthOptions sy;
  auto* synth = app.add_subcommand("synth", "Generate synthetic embryos with ground truth");
  synth->add_option("--n", sy.n, "Cells per embryo (1-8)")->required();
  synth->add_option("--count", sy.count, "Number of embryos")->required();
  synth->add_option("--seed", sy.seed, "Seed of the first embryo")->required();
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--overlap-max", sy.overlap_max, "Largest pairwise overlap fraction");
  synth->add_option("--fragmentation", sy.fragmentation, "Fragment density");
  synth->add_option("--noise", sy.noise, "Gaussian noise sigma");
  synth->add_option("--width", sy.width, "Image width");
  synth->add_option("--height", sy.height, "Image height");
  synth->add_option("--zp-radius", sy.zp_radius, "Inner zona radius (px)");

  BatchOptions ba;
  std::string ba_config;
  auto* batch = app.add_subcommand("batch", "Detect a directory of images and evaluate");
  batch->add_option("image_dir", ba.image_dir, "Directory of images")->required();
  batch->add_option("gt_dir", ba.gt_dir, "Directory of ground-truth JSON files")->required();
  batch->add_option("--config", ba_config, "Configuration file");
  batch->add_option("--out", ba.out, "Output directory")->required();
  batch->add_option("--oq-threshold", ba.oq_threshold, "OQ needed to count a cell as detected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*detect) {
    if (!det_config.empty()) det.config = det_config;
    if (!det_gt.empty()) det.ground_truth = det_gt;
    if (margin_opt->count() > 0) det.border_margin = margin;
    return cmd_detect(det, std::cerr);
  }
  if (*eval) return cmd_eval(ev, std::cerr);
  if (*synth) return cmd_synth(sy, std::cerr);
  if (!ba_config.empty()) ba.config = ba_config;
  return cmd_batch(ba, std::cerr);
}
