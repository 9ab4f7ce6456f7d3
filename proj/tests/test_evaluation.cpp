#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "blastomere/error.hpp"
#include "blastomere/evaluation.hpp"
#include "blastomere/synth.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace blastomere;
using std::numbers::pi;

namespace {

RegionMask rect(int w, int h, int x0, int y0, int x1, int y1) {
  RegionMask m(w, h, 0);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) m(x, y) = 1;
  return m;
}

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("dice of two half-overlapping squares") {
  // |A| = |B| = 100, |A n B| = 50
  const RegionMask a = rect(30, 30, 0, 0, 10, 10), b = rect(30, 30, 5, 0, 15, 10);
  CHECK(dice(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dice_union(a, b) == doctest::Approx(100.0 / 150.0).epsilon(1e-12));
  const RegionMetrics m = region_metrics(a, b);
  CHECK(m.precision == 0.5);
  CHECK(m.sensitivity == 0.5);
  CHECK(m.oq == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(dice(RegionMask(5, 5, 0), RegionMask(5, 5, 0)) == 1.0);
  CHECK_THROWS_AS(dice(a, RegionMask(10, 10, 0)), InvalidArgument);
}

TEST_CASE("region metric identities on random mask pairs") {
  Rng rng(41);
  for (int t = 0; t < 300; ++t) {
    const RegionMask a = oracle::random_mask(rng, 24, 20, rng.uniform(0.05, 0.9));
    const RegionMask b = oracle::random_mask(rng, 24, 20, rng.uniform(0.05, 0.9));
    const RegionMetrics m = region_metrics(a, b);
    if (m.precision > 0 && m.sensitivity > 0)
      CHECK(std::abs(m.oq - 1.0 / (1.0 / m.precision + 1.0 / m.sensitivity - 1.0)) < 1e-12);
    CHECK(dice(a, b) == dice(b, a));
    CHECK(dice(a, b) >= m.oq - 1e-12);
    const RegionMetrics r = region_metrics(b, a);
    CHECK(r.precision == m.sensitivity);
    CHECK(r.oq == m.oq);
  }
}

TEST_CASE("matching reaches the exhaustive optimum") {
  Rng rng(42);
  for (int t = 0; t < 60; ++t) {
    const int rows = 1 + static_cast<int>(rng.uniform() * 6), cols = 1 + static_cast<int>(rng.uniform() * 6);
    std::vector<std::vector<double>> s(rows, std::vector<double>(cols));
    for (auto& row : s)
      for (double& v : row) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    const Assignment a = match_scores(s);
    CHECK(std::abs(a.total - oracle::exhaustive_assignment(s)) < 1e-12);
    // the reported assignment is consistent and injective
    double sum = 0.0;
    std::vector<int> used(cols, 0);
    for (int i = 0; i < rows; ++i) {
      const int j = a.pred_to_gt[i];
      if (j < 0) continue;
      CHECK(s[i][j] > 0.0);
      CHECK(++used[j] == 1);
      sum += s[i][j];
    }
    CHECK(std::abs(sum - a.total) < 1e-12);
  }
  CHECK(match_scores({}).pred_to_gt.empty());
}

TEST_CASE("best-fit ellipse of an exact polygon") {
  const EllipseModel e{{80, 70}, 40, 25, 0.6};
  const EllipseModel f = best_fit_ellipse(sample_contour(e, 360));
  CHECK(norm(f.center - e.center) < 0.05);
  CHECK(f.a == doctest::Approx(40).epsilon(0.005));
  CHECK(f.b == doctest::Approx(25).epsilon(0.005));
  CHECK(undirected_angle_diff(f.phi, 0.6) < 0.01);
  CHECK_THROWS_AS(best_fit_ellipse({{0, 0}, {1, 0}, {1, 1}}), DegenerateGeometry);
}

TEST_CASE("ground truth and detection files round trip") {
  TempDir dir("eval_io");
  GroundTruth gt;
  gt.image = "a.png";
  gt.n_cells = 2;
  gt.artifact = true;
  gt.blastomeres = {sample_contour({{50, 50}, 20, 10, 0}, 12), sample_contour({{90, 50}, 15, 12, 1}, 9)};
  gt.width = 150;
  write_text(dir / "gt.json", ground_truth_json(gt));
  const GroundTruth back = read_ground_truth(dir / "gt.json");
  CHECK(back.image == gt.image);
  CHECK(back.n_cells == 2);
  CHECK(back.artifact);
  CHECK(back.width == 150);
  CHECK(back.height == 0);
  REQUIRE(back.blastomeres.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(back.blastomeres[i] == gt.blastomeres[i]);

  DetectionFile df;
  df.image = "a.png";
  df.n_requested = 3;
  df.detections = {{{{1.25, 2.5}, 30, 20, 0.125}, 0.9, 0.6}};
  write_text(dir / "det.json", detections_json(df));
  const DetectionFile dback = read_detections(dir / "det.json");
  CHECK(dback.n_requested == 3);
  REQUIRE(dback.detections.size() == 1);
  CHECK(dback.detections[0].ellipse == df.detections[0].ellipse);
  CHECK(dback.detections[0].correlation == 0.9);

  write_text(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(read_ground_truth(dir / "bad.json"), IoError);
  write_text(dir / "incomplete.json", R"({"image": "x.png"})");
  CHECK_THROWS_AS(read_detections(dir / "incomplete.json"), IoError);
  CHECK_THROWS_AS(read_ground_truth(dir / "missing.json"), IoError);
}

TEST_CASE("embryo report matches, counts misses and spurious detections") {
  GroundTruth gt;
  gt.image = "x.png";
  gt.n_cells = 2;
  const EllipseModel c0{{60, 60}, 30, 20, 0.2}, c1{{130, 70}, 25, 22, 1.0};
  gt.blastomeres = {sample_contour(c0, 360), sample_contour(c1, 360)};

  SUBCASE("perfect detections in reverse order") {
    const EvalReport r = embryo_report({c1, c0}, gt);
    CHECK(r.detected_count == 2);
    REQUIRE(r.per_cell.size() == 2);
    CHECK(r.per_cell[0].gt == 1);
    CHECK(r.per_cell[1].gt == 0);
    CHECK(r.oq > 0.97);
    CHECK(r.precision > 0.98);
  }
  SUBCASE("one miss and one spurious detection") {
    const EvalReport r = embryo_report({c0, {{300, 300}, 10, 10, 0}}, gt);
    CHECK(r.detected_count == 1);
    REQUIRE(r.per_cell.size() == 3);
    CHECK(r.per_cell[1].gt == -1);
    CHECK(r.per_cell[2].pred == -1);
    CHECK(r.per_cell[2].gt == 1);
    CHECK(r.precision == doctest::Approx(r.per_cell[0].precision / 2));
    CHECK(r.sensitivity == doctest::Approx(r.per_cell[0].sensitivity / 2));
    CHECK(r.oq == doctest::Approx(r.per_cell[0].oq / 3));
  }
  SUBCASE("no detections") {
    const EvalReport r = embryo_report({}, gt);
    CHECK(r.detected_count == 0);
    CHECK(r.per_cell.size() == 2);
    CHECK(r.precision == 0.0);
    CHECK(r.oq == 0.0);
  }
  SUBCASE("union dice option") {
    EllipseModel near = c0;
    near.center.x += 4;
    const double plain = embryo_report({near}, gt).per_cell[0].dsc;
    const double uni = embryo_report({near}, gt, {0.7, true}).per_cell[0].dsc;
    CHECK(uni > plain);
  }
}

TEST_CASE("aggregation groups by cell count and artifact flag") {
  std::vector<EvalReport> reps(3);
  reps[0].n_cells = 2, reps[0].oq = 0.8, reps[0].precision = 1.0, reps[0].detected_count = 2;
  reps[1].n_cells = 2, reps[1].oq = 0.6, reps[1].precision = 0.5, reps[1].detected_count = 1;
  reps[2].n_cells = 1, reps[2].artifact = true, reps[2].oq = 0.9;
  const auto rows = aggregate(reps);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n_cells == 1);
  CHECK(rows[0].artifact);
  CHECK(rows[1].images == 2);
  CHECK(rows[1].oq == doctest::Approx(0.7));
  CHECK(rows[1].precision == doctest::Approx(0.75));
  CHECK(rows[1].gt_cells == 4);
  CHECK(rows[1].detected == 3);
  const std::string table = report_table(reps);
  CHECK(table.find("75.0%") != std::string::npos);
  const std::string js = report_json(reps, {});
  CHECK(js.find("\"overall\"") != std::string::npos);
}
