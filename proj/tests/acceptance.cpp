// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--per-count N]  (N defaults to 20 embryos per cell count)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "blastomere/commands.hpp"
#include "blastomere/correlation.hpp"
#include "blastomere/detector.hpp"
#include "blastomere/error.hpp"
#include "blastomere/hypothesis.hpp"
#include "oracles.hpp"

using namespace blastomere;
using std::numbers::pi;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void correlation_oracle() {
  Rng rng(1001);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto img = oracle::random_mask(rng, 64, 64, rng.uniform(0.02, 0.5));
    const double a = rng.uniform(6, 20), b = rng.uniform(4, a);
    const Template tpl = make_template(a, b, rng.uniform(0, pi));
    const auto fft = correlate_fft(img, tpl.stroke);
    const auto direct = correlate_direct(img, tpl.stroke);
    double scale = 1.0, err = 0.0;
    for (double v : direct.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < fft.size(); ++i) err = std::max(err, std::abs(fft.values()[i] - direct.values()[i]));
    worst = std::max(worst, err / scale);
  }
  const double secs = seconds_since(t0);
  report(worst < 1e-6 && secs < 5.0, "fft-correlation-oracle",
         fmt("max relative error %.3g (< 1e-6), %.2f s (< 5 s), 50 masks 64x64", worst, secs));
}

void geometry_suite() {
  // polyline epsilon bound
  Rng rng(1002);
  double worst = 0.0;
  int chains = 0;
  for (int t = 0; t < 200; ++t) {
    const double r = rng.uniform(10, 120);
    const EdgeMap m =
        thin_edges(oracle::render_arc({150, 150}, r, rng.uniform(0, 2 * pi), rng.uniform(0.3, 2 * pi - 0.3), 300, 300));
    for (const PixelChain& c : trace_curves(m)) {
      if (c.points.size() < 2) continue;
      ++chains;
      worst = std::max(worst, oracle::polyline_deviation(c, piecewise_linear_approx(c, 2.0)));
    }
  }
  report(worst <= 2.0 + 1e-9, "polyline-epsilon-bound",
         fmt("max deviation %.3f px (<= 2) over %d chains from 200 arcs", worst, chains));

  // centroid of noisy arcs
  double worst_c = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng g(seed);
    const Vec2 c{g.uniform(80, 120), g.uniform(80, 120)};
    const double r = g.uniform(30, 80);
    const double span = g.uniform(pi, 1.9 * pi);
    auto v = oracle::arc_vertices(c, r, g.uniform(0, 2 * pi), span, 12);
    for (Vec2& p : v) p = p + Vec2{0.5 * g.normal(), 0.5 * g.normal()};
    worst_c = std::max(worst_c, norm(arch_centroid(v).point - c));
  }
  report(worst_c <= 2.0, "arch-centroid-noise",
         fmt("max centre error %.3f px (<= 2) over 100 seeds, noise 0.5 px", worst_c));

  // concavity sign of parabolas
  Rng pr(1003);
  int correct = 0;
  for (int t = 0; t < 1000; ++t) {
    double k = pr.uniform(-0.05, 0.05);
    if (std::abs(k) < 1e-4) k = k < 0 ? -1e-4 : 1e-4;
    const double c1 = pr.uniform(-2, 2), c0 = pr.uniform(-50, 50);
    double x[3] = {pr.uniform(-60, 60), pr.uniform(-60, 60), pr.uniform(-60, 60)};
    std::sort(x, x + 3);
    if (x[1] - x[0] < 1.0) x[1] = x[0] + 1.0;
    if (x[2] - x[1] < 1.0) x[2] = x[1] + 1.0;
    auto f = [&](double u) { return Vec2{u, k * u * u + c1 * u + c0}; };
    const auto s = concavity_sign(f(x[0]), f(x[1]), f(x[2]));
    correct += s && *s == (k > 0 ? 1 : -1);
  }
  report(correct == 1000, "concavity-sign", fmt("%d of 1000 parabolas match the second-derivative sign", correct));
}

void metric_identities() {
  Rng rng(1004);
  double worst_oq = 0.0, worst_sym = 0.0, worst_order = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int w = 8 + static_cast<int>(rng.uniform() * 40), h = 8 + static_cast<int>(rng.uniform() * 40);
    const auto a = oracle::random_mask(rng, w, h, rng.uniform(0.05, 0.95));
    const auto b = oracle::random_mask(rng, w, h, rng.uniform(0.05, 0.95));
    const RegionMetrics m = region_metrics(a, b);
    if (m.precision > 0 && m.sensitivity > 0)
      worst_oq = std::max(worst_oq, std::abs(m.oq - 1.0 / (1.0 / m.precision + 1.0 / m.sensitivity - 1.0)));
    worst_sym = std::max(worst_sym, std::abs(dice(a, b) - dice(b, a)));
    worst_order = std::max(worst_order, m.oq - dice(a, b));
  }
  report(worst_oq <= 1e-12 && worst_sym <= 1e-12 && worst_order <= 1e-12, "metric-identities",
         fmt("oq identity %.2g, dice symmetry %.2g, max(oq - dice) %.2g (all <= 1e-12), 1000 pairs", worst_oq,
             worst_sym, worst_order));

  double worst_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int rows = 1 + t % 8, cols = 1 + (t / 8) % 8;
    std::vector<std::vector<double>> s(rows, std::vector<double>(cols));
    for (auto& row : s)
      for (double& v : row) v = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
    worst_gap = std::max(worst_gap, std::abs(match_scores(s).total - oracle::exhaustive_assignment(s)));
  }
  report(worst_gap <= 1e-12, "matching-optimality",
         fmt("max gap to exhaustive optimum %.2g (<= 1e-12), 200 matrices up to 8x8", worst_gap));
}

void fidelity() {
  Rng rng(1005);
  double sum = 0.0;
  for (int t = 0; t < 100; ++t) {
    const EllipseModel e{{100, 100}, rng.uniform(30, 70), 0, rng.uniform(0, pi)};
    EllipseModel base = e;
    base.b = base.a / rng.uniform(1.0, 1.6);
    // radius scaled by 1 + a bounded sum of low-order harmonics, at most 5%
    double amp[3], ph[3];
    for (int k = 0; k < 3; ++k) amp[k] = rng.uniform(0, 1), ph[k] = rng.uniform(0, 2 * pi);
    const double norm_amp = amp[0] + amp[1] + amp[2];
    std::vector<Vec2> poly;
    for (int i = 0; i < 360; ++i) {
      const double th = 2 * pi * i / 360;
      double wave = 0.0;
      for (int k = 0; k < 3; ++k) wave += amp[k] * std::sin((k + 3) * th + ph[k]);
      const Vec2 p = ellipse_point(base, th);
      poly.push_back(base.center + (p - base.center) * (1.0 + 0.05 * wave / norm_amp));
    }
    const EllipseModel fit = best_fit_ellipse(poly);
    sum += dice(fill_ellipse(fit, 200, 200), fill_polygon(poly, 200, 200));
  }
  const double mean = sum / 100;
  report(mean >= 0.95, "best-fit-fidelity", fmt("mean dice %.4f (>= 0.95) over 100 wavy ellipses", mean));
}

struct BenchResult {
  std::string json;  // concatenated detection files
  int gt[9] = {}, hit[9] = {};
  double precision_sum = 0.0;
  int images = 0;
};

BenchResult run_benchmark(int per_count) {
  BenchResult out;
  for (int n = 1; n <= 8; ++n) {
    std::uint64_t seed = 1000u * n;
    for (int k = 0; k < per_count; ++seed) {
      SynthSpec spec;
      spec.n_cells = n;
      spec.seed = seed;
      spec.overlap_max = 0.2;
      spec.fragmentation = 0.1;
      SynthEmbryo emb;
      try {
        emb = generate_embryo(spec);
      } catch (const PlacementFailure&) {
        std::fprintf(stderr, "seed %llu: placement failed, skipped\n", static_cast<unsigned long long>(seed));
        continue;
      }
      ++k;
      const DetectionResult r = detect_blastomeres(emb.image, n);
      const std::string name = fmt("n%d_seed%llu.png", n, static_cast<unsigned long long>(seed));
      out.json += detections_json(to_detection_file(r, name));
      std::vector<EllipseModel> ells;
      for (const Hypothesis& h : r.detections) ells.push_back(h.ellipse);
      const EvalReport rep = embryo_report(ells, emb.truth);
      out.gt[n] += n;
      out.hit[n] += rep.detected_count;
      out.precision_sum += rep.precision;
      ++out.images;
    }
    std::fprintf(stderr, "n=%d: %d/%d cells at OQ >= 0.7\n", n, out.hit[n], out.gt[n]);
  }
  return out;
}

void benchmark(int per_count) {
  const auto t0 = Clock::now();
  const BenchResult a = run_benchmark(per_count);
  std::fprintf(stderr, "benchmark run took %.1f s\n", seconds_since(t0));
  auto rate = [&](int lo, int hi) {
    int g = 0, h = 0;
    for (int n = lo; n <= hi; ++n) g += a.gt[n], h += a.hit[n];
    return g == 0 ? 0.0 : static_cast<double>(h) / g;
  };
  std::string hist;
  for (int n = 1; n <= 8; ++n) hist += fmt(" n%d %d/%d", n, a.hit[n], a.gt[n]);
  const double r12 = rate(1, 2), r4 = rate(4, 4), r8 = rate(8, 8);
  const double prec = a.precision_sum / a.images;
  report(r12 >= 0.90, "benchmark-1-2-cells", fmt("%.1f%% detected at OQ >= 0.7 (>= 90%%)", 100 * r12));
  report(r4 >= 0.70, "benchmark-4-cells", fmt("%.1f%% detected at OQ >= 0.7 (>= 70%%)", 100 * r4));
  report(r8 >= 0.55, "benchmark-8-cells", fmt("%.1f%% detected at OQ >= 0.7 (>= 55%%)", 100 * r8));
  report(prec >= 0.85, "benchmark-precision",
         fmt("mean precision %.3f (>= 0.85) over %d images;%s", prec, a.images, hist.c_str()));

  const BenchResult b = run_benchmark(per_count);
  report(a.json == b.json, "determinism",
         fmt("two benchmark runs %s (%zu bytes of detection JSON)", a.json == b.json ? "byte-identical" : "differ",
             a.json.size()));
}

void performance() {
  SynthSpec spec;
  spec.n_cells = 4;
  spec.seed = 7204;
  spec.width = 720;
  spec.height = 479;
  spec.zp_radius = 200;
  const SynthEmbryo emb = generate_embryo(spec);
  const auto t0 = Clock::now();
  const DetectionResult r = detect_blastomeres(emb.image, 4);
  const double secs = seconds_since(t0);
  report(secs < 60.0, "performance-720x479",
         fmt("%.1f s (< 60 s) for n = 4, %zu detections", secs, r.detections.size()));
}

}  // namespace

int main(int argc, char** argv) {
  int per_count = 20;
  for (int i = 1; i < argc; ++i)
    if (!std::strcmp(argv[i], "--per-count") && i + 1 < argc) per_count = std::atoi(argv[++i]);
  correlation_oracle();
  geometry_suite();
  metric_identities();
  fidelity();
  performance();
  benchmark(per_count);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
