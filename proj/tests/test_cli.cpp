#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blastomere/commands.hpp"
#include "temp_dir.hpp"

using namespace blastomere;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Detection file whose ellipses are the best fits of the ground-truth polygons.
std::string detections_from_truth(const fs::path& gt_path) {
  const GroundTruth gt = read_ground_truth(gt_path);
  DetectionFile f;
  f.image = gt.image;
  f.n_requested = gt.n_cells;
  for (const auto& poly : gt.blastomeres) f.detections.push_back({best_fit_ellipse(poly), 1.0, 1.0});
  return detections_json(f);
}

}  // namespace

TEST_CASE("synth writes identical files for identical seeds") {
  TempDir a("synth_a"), b("synth_b");
  std::ostringstream log;
  SynthOptions opts;
  opts.n = 3;
  opts.count = 2;
  opts.seed = 55;
  opts.out = a.path();
  REQUIRE(cmd_synth(opts, log) == kOk);
  opts.out = b.path();
  REQUIRE(cmd_synth(opts, log) == kOk);
  for (const char* name : {"embryo_0000.png", "embryo_0000.json", "embryo_0001.png", "embryo_0001.json"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(read_ground_truth(a / "embryo_0001.json").image == "embryo_0001.png");
  opts.n = 9;
  CHECK(cmd_synth(opts, log) == kUsage);
}

TEST_CASE("detect exit codes and outputs") {
  TempDir dir("detect");
  std::ostringstream log;
  SynthOptions sy;
  sy.n = 2;
  sy.seed = 4242;
  sy.out = dir.path();
  REQUIRE(cmd_synth(sy, log) == kOk);

  DetectOptions d;
  d.image = dir / "embryo_0000.png";
  d.out = dir / "out";
  d.cells = 9;
  CHECK(cmd_detect(d, log) == kUsage);
  d.cells = 2;
  d.image = dir / "missing.png";
  CHECK(cmd_detect(d, log) == kIo);
  d.image = dir / "embryo_0000.png";
  d.config = dir / "missing.cfg";
  CHECK(cmd_detect(d, log) == kIo);
  std::ofstream(dir / "bad.cfg") << "detector.nonsense = 1\n";
  d.config = dir / "bad.cfg";
  CHECK(cmd_detect(d, log) == kUsage);
  d.config.reset();

  d.debug_dumps = true;
  d.ground_truth = dir / "embryo_0000.json";
  REQUIRE(cmd_detect(d, log) == kOk);
  for (const char* name : {"embryo_0000.json", "embryo_0000_overlay.png", "embryo_0000_edges.png",
                           "embryo_0000_interior_edges.png", "embryo_0000_residual_edges.png",
                           "embryo_0000_clusters.txt", "embryo_0000_zp.png"})
    CHECK(fs::exists(d.out / name));
  const DetectionFile f = read_detections(d.out / "embryo_0000.json");
  CHECK(f.n_requested == 2);
  CHECK(f.detections.size() == 2);
  // no temporaries are left behind
  for (const auto& entry : fs::directory_iterator(d.out)) CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("eval of ground truth against itself and unmatched files") {
  TempDir dir("eval_cmd");
  std::ostringstream log;
  SynthOptions sy;
  sy.n = 3;
  sy.count = 3;
  sy.seed = 31;
  sy.out = dir / "gt";
  REQUIRE(cmd_synth(sy, log) == kOk);
  fs::create_directories(dir / "pred");
  for (const auto& entry : fs::directory_iterator(dir / "gt"))
    if (entry.path().extension() == ".json") {
      std::ofstream(dir / "pred" / entry.path().filename()) << detections_from_truth(entry.path());
    }

  EvalCommandOptions ev;
  ev.pred_dir = dir / "pred";
  ev.gt_dir = dir / "gt";
  ev.out = dir / "report";
  REQUIRE(cmd_eval(ev, log) == kOk);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["overall"]["detected"] == 9);
  CHECK(report["overall"]["gt_cells"] == 9);
  CHECK(report["overall"]["oq"].get<double>() > 0.97);
  CHECK(fs::exists(dir / "report.txt"));
  // overall means are the arithmetic means of the per-image values
  double sum = 0.0;
  for (const auto& img : report["images"]) {
    sum += img["oq"].get<double>();
    CHECK(img["detected_count"] == 3);
  }
  CHECK(std::abs(report["overall"]["oq"].get<double>() - sum / 3) < 1e-12);

  fs::create_directories(dir / "empty");
  ev.pred_dir = dir / "empty";
  CHECK(cmd_eval(ev, log) == kUnmatched);
  ev.pred_dir = dir / "pred";
  fs::remove(dir / "pred" / "embryo_0002.json");
  CHECK(cmd_eval(ev, log) == kUnmatched);
  ev.pred_dir = dir / "nowhere";
  CHECK(cmd_eval(ev, log) == kIo);
}

TEST_CASE("overlay draws detections in colour over a grey image") {
  GrayImage img(40, 40, 0.5);
  const RgbImage out = render_overlay(img, {{{20, 20}, 10, 8, 0}}, {{{2, 2}, {10, 2}, {10, 10}}});
  CHECK(out(0, 0) == Rgb{128, 128, 128});
  CHECK(out(30, 20) == Rgb{230, 25, 75});
  CHECK(out(5, 2) == Rgb{255, 255, 255});
}
