#include "blastomere/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "blastomere/ellipse_fit.hpp"
#include "blastomere/error.hpp"

namespace blastomere {

using json = nlohmann::json;

namespace {

struct Counts {
  long long inter = 0, a = 0, b = 0;
};

Counts count(const RegionMask& a, const RegionMask& b) {
  if (!a.same_shape(b)) throw InvalidArgument("mask dimensions differ");
  Counts c;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const bool x = av[i] != 0, y = bv[i] != 0;
    c.a += x;
    c.b += y;
    c.inter += x && y;
  }
  return c;
}

double ratio(long long num, long long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

}  // namespace

double dice(const RegionMask& a, const RegionMask& b) {
  const Counts c = count(a, b);
  if (c.a + c.b == 0) return 1.0;
  return ratio(2 * c.inter, c.a + c.b);
}

double dice_union(const RegionMask& a, const RegionMask& b) {
  const Counts c = count(a, b);
  const long long uni = c.a + c.b - c.inter;
  if (uni == 0) return 1.0;
  return ratio(2 * c.inter, uni);
}

RegionMetrics region_metrics(const RegionMask& pred, const RegionMask& gt) {
  const Counts c = count(pred, gt);
  if (c.a == 0 && c.b == 0) return {1.0, 1.0, 1.0};
  const long long tp = c.inter;
  const long long fp = c.a - tp;
  const long long fn = c.b - tp;
  return {ratio(tp, tp + fp), ratio(tp, tp + fn), ratio(tp, tp + fp + fn)};
}

Assignment match_scores(const std::vector<std::vector<double>>& score) {
  const int np = static_cast<int>(score.size());
  const int ng = np == 0 ? 0 : static_cast<int>(score.front().size());
  if (ng > 20) throw InvalidArgument("too many ground-truth regions for exact matching");
  const int full = 1 << ng;
  // best[i][mask]: best total using predictions i.. with gts in mask already taken
  std::vector<std::vector<double>> best(static_cast<std::size_t>(np + 1), std::vector<double>(full, 0.0));
  for (int i = np - 1; i >= 0; --i)
    for (int mask = 0; mask < full; ++mask) {
      double v = best[i + 1][mask];
      for (int j = 0; j < ng; ++j)
        if (!(mask & (1 << j)) && score[i][j] > 0.0) v = std::max(v, score[i][j] + best[i + 1][mask | (1 << j)]);
      best[i][mask] = v;
    }
  Assignment out;
  out.pred_to_gt.assign(static_cast<std::size_t>(np), -1);
  out.total = np == 0 ? 0.0 : best[0][0];
  int mask = 0;
  for (int i = 0; i < np; ++i) {
    const double target = best[i][mask];
    if (best[i + 1][mask] == target) continue;
    for (int j = 0; j < ng; ++j)
      if (!(mask & (1 << j)) && score[i][j] > 0.0 && score[i][j] + best[i + 1][mask | (1 << j)] == target) {
        out.pred_to_gt[i] = j;
        mask |= 1 << j;
        break;
      }
  }
  return out;
}

Assignment match_detections(const std::vector<RegionMask>& preds, const std::vector<RegionMask>& gts) {
  std::vector<std::vector<double>> s(preds.size(), std::vector<double>(gts.size(), 0.0));
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t j = 0; j < gts.size(); ++j) s[i][j] = region_metrics(preds[i], gts[j]).oq;
  return match_scores(s);
}

EllipseModel best_fit_ellipse(const std::vector<Vec2>& polygon) {
  if (polygon.size() < 5) throw DegenerateGeometry("polygon needs at least 5 vertices");
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 p = polygon[i];
    const Vec2 q = polygon[(i + 1) % polygon.size()];
    const int steps = std::max(1, static_cast<int>(std::ceil(norm(q - p) / 0.5)));
    for (int k = 0; k < steps; ++k) pts.push_back(p + (q - p) * (static_cast<double>(k) / steps));
  }
  return fit_ellipse(pts);
}

// ---- file formats ----

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::filesystem::path& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  const json j = parse_json(path);
  try {
    GroundTruth gt;
    gt.image = j.at("image").get<std::string>();
    gt.n_cells = j.at("n_cells").get<int>();
    gt.artifact = j.value("artifact", false);
    for (const auto& poly : j.at("blastomeres")) {
      std::vector<Vec2> p;
      for (const auto& v : poly) p.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      gt.blastomeres.push_back(std::move(p));
    }
    gt.width = j.value("width", 0);
    gt.height = j.value("height", 0);
    return gt;
  } catch (const json::exception& e) {
    throw IoError("invalid ground truth " + path.string() + ": " + e.what());
  }
}

std::string ground_truth_json(const GroundTruth& gt) {
  json j;
  j["image"] = gt.image;
  j["n_cells"] = gt.n_cells;
  j["artifact"] = gt.artifact;
  json polys = json::array();
  for (const auto& poly : gt.blastomeres) {
    json p = json::array();
    for (Vec2 v : poly) p.push_back({v.x, v.y});
    polys.push_back(std::move(p));
  }
  j["blastomeres"] = std::move(polys);
  if (gt.width > 0) j["width"] = gt.width;
  if (gt.height > 0) j["height"] = gt.height;
  return j.dump(1) + "\n";
}

DetectionFile read_detections(const std::filesystem::path& path) {
  const json j = parse_json(path);
  try {
    DetectionFile f;
    f.image = j.at("image").get<std::string>();
    f.n_requested = j.at("n_requested").get<int>();
    for (const auto& d : j.at("detections")) {
      DetectionRecord r;
      r.ellipse.center = {d.at("cx").get<double>(), d.at("cy").get<double>()};
      r.ellipse.a = d.at("a").get<double>();
      r.ellipse.b = d.at("b").get<double>();
      r.ellipse.phi = d.at("phi").get<double>();
      r.correlation = d.value("correlation", 0.0);
      r.compliance = d.value("compliance", 0.0);
      f.detections.push_back(r);
    }
    return f;
  } catch (const json::exception& e) {
    throw IoError("invalid detections " + path.string() + ": " + e.what());
  }
}

std::string detections_json(const DetectionFile& f) {
  json j;
  j["image"] = f.image;
  j["n_requested"] = f.n_requested;
  json dets = json::array();
  for (const DetectionRecord& r : f.detections)
    dets.push_back({{"cx", r.ellipse.center.x},
                    {"cy", r.ellipse.center.y},
                    {"a", r.ellipse.a},
                    {"b", r.ellipse.b},
                    {"phi", r.ellipse.phi},
                    {"correlation", r.correlation},
                    {"compliance", r.compliance}});
  j["detections"] = std::move(dets);
  return j.dump(2) + "\n";
}

// ---- reports ----

EvalReport embryo_report(const std::vector<EllipseModel>& detections, const GroundTruth& gt, const EvalOptions& opts) {
  EvalReport rep;
  rep.image = gt.image;
  rep.n_cells = gt.n_cells;
  rep.artifact = gt.artifact;

  // Common canvas covering every region, so no clipping occurs.
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto extend = [&](double x0, double y0, double x1, double y1) {
    lo_x = std::min(lo_x, x0);
    lo_y = std::min(lo_y, y0);
    hi_x = std::max(hi_x, x1);
    hi_y = std::max(hi_y, y1);
  };
  for (const EllipseModel& e : detections) extend(e.center.x - e.a, e.center.y - e.a, e.center.x + e.a, e.center.y + e.a);
  for (const auto& poly : gt.blastomeres)
    for (Vec2 v : poly) extend(v.x, v.y, v.x, v.y);

  std::vector<RegionMask> pm, gm;
  if (std::isfinite(lo_x)) {
    const int ox = static_cast<int>(std::floor(lo_x)) - 1;
    const int oy = static_cast<int>(std::floor(lo_y)) - 1;
    const int w = static_cast<int>(std::ceil(hi_x)) - ox + 2;
    const int h = static_cast<int>(std::ceil(hi_y)) - oy + 2;
    const Vec2 off{static_cast<double>(ox), static_cast<double>(oy)};
    for (EllipseModel e : detections) {
      e.center = e.center - off;
      pm.push_back(fill_ellipse(e, w, h));
    }
    for (const auto& poly : gt.blastomeres) {
      std::vector<Vec2> shifted;
      for (Vec2 v : poly) shifted.push_back(v - off);
      gm.push_back(fill_polygon(shifted, w, h));
    }
  }

  const Assignment asg = match_detections(pm, gm);
  std::vector<bool> gt_used(gm.size(), false);
  double psum = 0.0, ssum = 0.0, osum = 0.0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    CellResult c;
    c.pred = static_cast<int>(i);
    c.gt = asg.pred_to_gt[i];
    if (c.gt >= 0) {
      gt_used[static_cast<std::size_t>(c.gt)] = true;
      const RegionMetrics m = region_metrics(pm[i], gm[static_cast<std::size_t>(c.gt)]);
      c.precision = m.precision;
      c.sensitivity = m.sensitivity;
      c.oq = m.oq;
      c.dsc = opts.union_dice ? dice_union(pm[i], gm[static_cast<std::size_t>(c.gt)])
                              : dice(pm[i], gm[static_cast<std::size_t>(c.gt)]);
      if (c.oq >= opts.oq_threshold) ++rep.detected_count;
      ssum += c.sensitivity;
    }
    psum += c.precision;
    osum += c.oq;
    rep.per_cell.push_back(c);
  }
  for (std::size_t j = 0; j < gm.size(); ++j)
    if (!gt_used[j]) {
      CellResult c;
      c.gt = static_cast<int>(j);
      rep.per_cell.push_back(c);
    }
  rep.precision = pm.empty() ? 0.0 : psum / static_cast<double>(pm.size());
  rep.sensitivity = gm.empty() ? 0.0 : ssum / static_cast<double>(gm.size());
  rep.oq = rep.per_cell.empty() ? 0.0 : osum / static_cast<double>(rep.per_cell.size());
  return rep;
}

std::vector<AggregateRow> aggregate(const std::vector<EvalReport>& reports) {
  std::map<std::pair<int, bool>, AggregateRow> rows;
  for (const EvalReport& r : reports) {
    AggregateRow& row = rows[{r.n_cells, r.artifact}];
    row.n_cells = r.n_cells;
    row.artifact = r.artifact;
    ++row.images;
    row.precision += r.precision;
    row.sensitivity += r.sensitivity;
    row.oq += r.oq;
    row.gt_cells += r.n_cells;
    row.detected += r.detected_count;
  }
  std::vector<AggregateRow> out;
  for (auto& [key, row] : rows) {
    row.precision /= row.images;
    row.sensitivity /= row.images;
    row.oq /= row.images;
    out.push_back(row);
  }
  return out;
}

std::string report_json(const std::vector<EvalReport>& reports, const EvalOptions& opts) {
  json j;
  j["oq_threshold"] = opts.oq_threshold;
  json images = json::array();
  double p = 0, s = 0, o = 0;
  int gt_cells = 0, detected = 0;
  for (const EvalReport& r : reports) {
    json cells = json::array();
    for (const CellResult& c : r.per_cell)
      cells.push_back({{"pred", c.pred < 0 ? json(nullptr) : json(c.pred)},
                       {"gt", c.gt < 0 ? json(nullptr) : json(c.gt)},
                       {"precision", c.precision},
                       {"sensitivity", c.sensitivity},
                       {"oq", c.oq},
                       {"dsc", c.dsc}});
    images.push_back({{"image", r.image},
                      {"n_cells", r.n_cells},
                      {"artifact", r.artifact},
                      {"precision", r.precision},
                      {"sensitivity", r.sensitivity},
                      {"oq", r.oq},
                      {"detected_count", r.detected_count},
                      {"cells", std::move(cells)}});
    p += r.precision;
    s += r.sensitivity;
    o += r.oq;
    gt_cells += r.n_cells;
    detected += r.detected_count;
  }
  j["images"] = std::move(images);
  const double n = reports.empty() ? 1.0 : static_cast<double>(reports.size());
  json groups = json::array();
  for (const AggregateRow& row : aggregate(reports))
    groups.push_back({{"n_cells", row.n_cells},
                      {"artifact", row.artifact},
                      {"images", row.images},
                      {"precision", row.precision},
                      {"sensitivity", row.sensitivity},
                      {"oq", row.oq},
                      {"gt_cells", row.gt_cells},
                      {"detected", row.detected}});
  j["groups"] = std::move(groups);
  j["overall"] = {{"images", reports.size()},
                  {"precision", p / n},
                  {"sensitivity", s / n},
                  {"oq", o / n},
                  {"gt_cells", gt_cells},
                  {"detected", detected}};
  return j.dump(2) + "\n";
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-9s %7s %7s %7s %7s\n", "cells", "artifact", "images", "Pre.", "Sen.", "OQ");
  out << line;
  const std::vector<AggregateRow> rows = aggregate(reports);
  for (const AggregateRow& r : rows) {
    std::snprintf(line, sizeof line, "%-6d %-9s %7d %7.3f %7.3f %7.3f\n", r.n_cells, r.artifact ? "yes" : "no",
                  r.images, r.precision, r.sensitivity, r.oq);
    out << line;
  }
  out << "\n";
  std::snprintf(line, sizeof line, "%-6s %9s %9s %9s\n", "cells", "gt", "detected", "percent");
  out << line;
  std::map<int, std::pair<int, int>> hist;
  for (const AggregateRow& r : rows) {
    hist[r.n_cells].first += r.gt_cells;
    hist[r.n_cells].second += r.detected;
  }
  for (const auto& [n, c] : hist) {
    std::snprintf(line, sizeof line, "%-6d %9d %9d %8.1f%%\n", n, c.first, c.second,
                  c.first == 0 ? 0.0 : 100.0 * c.second / c.first);
    out << line;
  }
  return out.str();
}

}  // namespace blastomere
