#include "blastomere/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "blastomere/error.hpp"
#include "blastomere/synth.hpp"

namespace blastomere {

namespace fs = std::filesystem;

namespace {

fs::path temp_sibling(const fs::path& path) { return path.parent_path() / ("." + path.filename().string() + ".tmp"); }

void save_png_atomic(const RgbImage& img, const fs::path& path) {
  const fs::path tmp = temp_sibling(path);
  save_png(img, tmp);
  fs::rename(tmp, path);
}

void save_png_atomic(const GrayImage& img, const fs::path& path) {
  const fs::path tmp = temp_sibling(path);
  save_png(img, tmp);
  fs::rename(tmp, path);
}

GrayImage mask_image(const Grid<std::uint8_t>& m) {
  GrayImage g(m.width(), m.height(), 0.0);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) g(x, y) = m(x, y) ? 1.0 : 0.0;
  return g;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

const Rgb kPalette[8] = {{230, 25, 75}, {60, 180, 75}, {0, 130, 200}, {245, 130, 48},
                         {145, 30, 180}, {70, 240, 240}, {240, 50, 230}, {210, 245, 60}};

void draw_points(RgbImage& img, const std::vector<Pixel>& px, Rgb colour) {
  for (Pixel p : px)
    if (img.contains(p)) img[p] = colour;
}

std::vector<Pixel> polygon_pixels(const std::vector<Vec2>& poly) {
  std::vector<Pixel> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    const auto seg = raster_line({static_cast<int>(std::lround(a.x)), static_cast<int>(std::lround(a.y))},
                                 {static_cast<int>(std::lround(b.x)), static_cast<int>(std::lround(b.y))});
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

std::map<std::string, fs::path> json_by_stem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") out[entry.path().stem().string()] = entry.path();
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << bytes;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename to " + path.string());
}

DetectionFile to_detection_file(const DetectionResult& result, const std::string& image_name) {
  DetectionFile f;
  f.image = image_name;
  f.n_requested = result.n_requested;
  for (const Hypothesis& h : result.detections) f.detections.push_back({h.ellipse, h.correlation_score, h.compliance_score});
  return f;
}

RgbImage render_overlay(const GrayImage& img, const std::vector<EllipseModel>& detections,
                        const std::vector<std::vector<Vec2>>& truth) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const auto v = static_cast<std::uint8_t>(std::lround(std::clamp(img(x, y), 0.0, 1.0) * 255.0));
      out(x, y) = {v, v, v};
    }
  for (const auto& poly : truth) draw_points(out, polygon_pixels(poly), {255, 255, 255});
  for (std::size_t i = 0; i < detections.size(); ++i)
    draw_points(out, contour_pixels(detections[i]), kPalette[i % 8]);
  return out;
}

int cmd_detect(const DetectOptions& opts, std::ostream& log) {
  if (opts.cells < 1 || opts.cells > 8) {
    log << "error: --cells must be between 1 and 8\n";
    return kUsage;
  }
  try {
    Config cfg = opts.config ? load_config(*opts.config) : Config{};
    if (opts.border_margin) cfg.border_margin = *opts.border_margin;
    const GrayImage img = load_grayscale(opts.image);
    std::vector<std::vector<Vec2>> truth;
    if (opts.ground_truth) truth = read_ground_truth(*opts.ground_truth).blastomeres;

    const DetectionResult result = detect_blastomeres(img, opts.cells, cfg);
    ensure_dir(opts.out);
    const std::string stem = opts.image.stem().string();
    write_file_atomic(opts.out / (stem + ".json"),
                      detections_json(to_detection_file(result, opts.image.filename().string())));
    std::vector<EllipseModel> ells;
    for (const Hypothesis& h : result.detections) ells.push_back(h.ellipse);
    save_png_atomic(render_overlay(img, ells, truth), opts.out / (stem + "_overlay.png"));

    if (opts.debug_dumps) {
      save_png_atomic(mask_image(result.stages.raw_edges), opts.out / (stem + "_edges.png"));
      save_png_atomic(mask_image(result.stages.working_edges), opts.out / (stem + "_interior_edges.png"));
      save_png_atomic(mask_image(result.residual_edges), opts.out / (stem + "_residual_edges.png"));
      std::ostringstream dump;
      write_cluster_dump(dump, result.stages.clusters);
      write_file_atomic(opts.out / (stem + "_clusters.txt"), dump.str());
      RgbImage zp = render_overlay(img, {});
      draw_points(zp, contour_pixels(result.zp.ellipse), {255, 255, 0});
      save_png_atomic(zp, opts.out / (stem + "_zp.png"));
    }
    log << stem << ": " << result.detections.size() << " of " << opts.cells << " cells detected\n";
    return kOk;
  } catch (const NoZonaFound& e) {
    log << "error: " << e.what() << '\n';
    return kNoZona;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int cmd_eval(const EvalCommandOptions& opts, std::ostream& log) {
  try {
    const auto preds = json_by_stem(opts.pred_dir);
    const auto gts = json_by_stem(opts.gt_dir);
    std::vector<std::string> unmatched;
    for (const auto& [stem, path] : gts)
      if (!preds.count(stem)) unmatched.push_back(path.string());
    for (const auto& [stem, path] : preds)
      if (!gts.count(stem)) unmatched.push_back(path.string());

    const EvalOptions eo{opts.oq_threshold, opts.union_dice};
    std::vector<EvalReport> reports;
    for (const auto& [stem, gpath] : gts) {
      auto it = preds.find(stem);
      if (it == preds.end()) continue;
      const GroundTruth gt = read_ground_truth(gpath);
      const DetectionFile det = read_detections(it->second);
      std::vector<EllipseModel> ells;
      for (const DetectionRecord& r : det.detections) ells.push_back(r.ellipse);
      reports.push_back(embryo_report(ells, gt, eo));
    }
    if (!reports.empty() || unmatched.empty()) {
      if (opts.out.has_parent_path()) ensure_dir(opts.out.parent_path());
      write_file_atomic(fs::path(opts.out.string() + ".json"), report_json(reports, eo));
      const std::string table = report_table(reports);
      write_file_atomic(fs::path(opts.out.string() + ".txt"), table);
      log << table;
    }
    if (!unmatched.empty() || preds.empty()) {
      log << "unmatched files:\n";
      for (const auto& u : unmatched) log << "  " << u << '\n';
      return kUnmatched;
    }
    return kOk;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  }
}

int cmd_synth(const SynthOptions& opts, std::ostream& log) {
  if (opts.n < 1 || opts.n > 8 || opts.count < 0) {
    log << "error: --n must be between 1 and 8 and --count non-negative\n";
    return kUsage;
  }
  try {
    ensure_dir(opts.out);
    for (int i = 0; i < opts.count; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "embryo_%04d", i);
      SynthSpec spec;
      spec.n_cells = opts.n;
      spec.seed = opts.seed + static_cast<std::uint64_t>(i);
      spec.overlap_max = opts.overlap_max;
      spec.fragmentation = opts.fragmentation;
      spec.noise_sigma = opts.noise;
      spec.width = opts.width;
      spec.height = opts.height;
      spec.zp_radius = opts.zp_radius;
      try {
        SynthEmbryo emb = generate_embryo(spec);
        emb.truth.image = std::string(name) + ".png";
        save_png_atomic(emb.image, opts.out / (std::string(name) + ".png"));
        write_file_atomic(opts.out / (std::string(name) + ".json"), ground_truth_json(emb.truth));
      } catch (const PlacementFailure& e) {
        log << name << ": " << e.what() << '\n';
      }
    }
    return kOk;
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  }
}

int cmd_batch(const BatchOptions& opts, std::ostream& log) {
  try {
    const auto gts = json_by_stem(opts.gt_dir);
    ensure_dir(opts.out);
    int worst = kOk;
    for (const auto& [stem, gpath] : gts) {
      const GroundTruth gt = read_ground_truth(gpath);
      fs::path image = opts.image_dir / gt.image;
      if (gt.image.empty() || !fs::exists(image)) image = opts.image_dir / (stem + ".png");
      DetectOptions d;
      d.image = image;
      d.cells = gt.n_cells;
      d.config = opts.config;
      d.out = opts.out;
      const int rc = cmd_detect(d, log);
      if (rc != kOk) worst = rc;
    }
    // overlays and reports live next to the detections; evaluate only the JSON
    EvalCommandOptions e;
    e.pred_dir = opts.out;
    e.gt_dir = opts.gt_dir;
    e.oq_threshold = opts.oq_threshold;
    e.out = fs::path(opts.out.string() + "_report");
    const int rc = cmd_eval(e, log);
    return worst != kOk ? worst : rc;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace blastomere
