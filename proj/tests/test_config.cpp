#include <doctest.h>

#include <fstream>
#include <numbers>

#include "blastomere/config.hpp"
#include "blastomere/error.hpp"
#include "temp_dir.hpp"

using namespace blastomere;

TEST_CASE("config defaults") {
  const Config c;
  CHECK(c.top_k == 40);
  CHECK(c.compliance_floor == 0.15);
  CHECK(c.epsilon == 2.0);
  CHECK(c.oq_threshold == 0.7);
  CHECK(c.zp_fallback);
  CHECK(c.coassoc.slope_gate == std::numbers::pi / 8);
  CHECK(c.coassoc.centroid_gate == 0.25);
  CHECK(c.zona.vertex_tol == 0.02);
  CHECK(c.zona.centroid_tol == 0.10);
  CHECK(c.search_slack == 5.0);
  CHECK(c.angle_gate == std::numbers::pi / 16);
  CHECK(parse_config("").top_k == 40);
}

TEST_CASE("config text round trip") {
  Config c;
  c.top_k = 12;
  c.sigma_max = 4.25;
  c.zp_fallback = false;
  c.lazy_search = false;
  c.zona.center = Vec2{101.5, 88};
  c.coassoc.max_gap = 33;
  const Config back = parse_config(format_config(c));
  CHECK(format_config(back) == format_config(c));
  CHECK(back.top_k == 12);
  CHECK(back.sigma_max == 4.25);
  CHECK_FALSE(back.zp_fallback);
  CHECK_FALSE(back.lazy_search);
  REQUIRE(back.zona.center.has_value());
  CHECK(back.zona.center->x == 101.5);
  CHECK(back.coassoc.max_gap == 33);
  // doubles survive exactly
  c.angle_gate = 0.1 + 0.2;
  CHECK(parse_config(format_config(c)).angle_gate == c.angle_gate);
}

TEST_CASE("config parsing") {
  const Config c = parse_config("# comment\n  detector.top_k = 7   # trailing\n\nedges.low=0.01\n");
  CHECK(c.top_k == 7);
  CHECK(c.hysteresis_low == 0.01);
  CHECK_THROWS_AS(parse_config("detector.bogus = 1"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("detector.top_k = seven"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("detector.top_k = 7.5"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("zp.fallback = maybe"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("just words"), InvalidArgument);
}

TEST_CASE("config files") {
  TempDir dir("config");
  std::ofstream(dir / "c.cfg") << "detector.top_k = 5\n";
  CHECK(load_config(dir / "c.cfg").top_k == 5);
  CHECK_THROWS_AS(load_config(dir / "none.cfg"), IoError);
}
