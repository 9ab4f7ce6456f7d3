#include "blastomere/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "blastomere/error.hpp"

namespace blastomere {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw InvalidArgument("bad value for " + key + ": " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidArgument("bad value for " + key + ": " + v);
}

template <typename T>
std::string to_text(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Field {
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

#define REAL(name, member)                                                                             \
  {                                                                                                    \
    name, {                                                                                            \
      [](Config& c, const std::string& v) { c.member = parse_number<double>(name, v); },               \
          [](const Config& c) { return to_text(c.member); }                                             \
    }                                                                                                  \
  }
#define INT(name, member)                                                                              \
  {                                                                                                    \
    name, {                                                                                            \
      [](Config& c, const std::string& v) { c.member = parse_number<int>(name, v); },                  \
          [](const Config& c) { return to_text(c.member); }                                             \
    }                                                                                                  \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      REAL("edges.sigma_min", sigma_min),
      REAL("edges.sigma_max", sigma_max),
      INT("edges.n_scales", n_scales),
      REAL("edges.alpha", vesselness_alpha),
      REAL("edges.beta", vesselness_beta),
      REAL("edges.low", hysteresis_low),
      REAL("edges.high", hysteresis_high),
      INT("edges.min_segment_len", min_segment_len),
      REAL("clusters.epsilon", epsilon),
      REAL("clusters.slope_gate", coassoc.slope_gate),
      REAL("clusters.centroid_gate", coassoc.centroid_gate),
      REAL("clusters.max_gap", coassoc.max_gap),
      INT("clusters.tangent_span", coassoc.tangent_span),
      INT("zp.beams", zona.beams),
      REAL("zp.reject_factor", zona.reject_factor),
      INT("zp.max_rounds", zona.max_rounds),
      REAL("zp.vertex_tol", zona.vertex_tol),
      REAL("zp.centroid_tol", zona.centroid_tol),
      REAL("zp.border_margin", border_margin),
      {"zp.fallback",
       {[](Config& c, const std::string& v) { c.zp_fallback = parse_bool("zp.fallback", v); },
        [](const Config& c) { return std::string(c.zp_fallback ? "true" : "false"); }}},
      {"zp.center_x",
       {[](Config& c, const std::string& v) {
          Vec2 p = c.zona.center.value_or(Vec2{0.0, 0.0});
          p.x = parse_number<double>("zp.center_x", v);
          c.zona.center = p;
        },
        [](const Config& c) { return c.zona.center ? to_text(c.zona.center->x) : std::string(); }}},
      {"zp.center_y",
       {[](Config& c, const std::string& v) {
          Vec2 p = c.zona.center.value_or(Vec2{0.0, 0.0});
          p.y = parse_number<double>("zp.center_y", v);
          c.zona.center = p;
        },
        [](const Config& c) { return c.zona.center ? to_text(c.zona.center->y) : std::string(); }}},
      REAL("hypotheses.axis_spacing", axis_spacing),
      INT("hypotheses.axis_steps", axis_steps),
      INT("detector.top_k", top_k),
      REAL("detector.compliance_floor", compliance_floor),
      REAL("detector.search_slack", search_slack),
      REAL("detector.angle_gate", angle_gate),
      REAL("detector.removal_tol", removal_tol),
      REAL("detector.normal_floor", normal_floor),
      {"detector.lazy_search",
       {[](Config& c, const std::string& v) { c.lazy_search = parse_bool("detector.lazy_search", v); },
        [](const Config& c) { return std::string(c.lazy_search ? "true" : "false"); }}},
      REAL("eval.oq_threshold", oq_threshold),
  };
  return table;
}

#undef REAL
#undef INT

}  // namespace

Config parse_config(const std::string& text, Config base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end()) throw InvalidArgument("unknown config key: " + key);
    it->second.set(base, value);
  }
  return base;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const Config& cfg) {
  std::string out;
  for (const auto& [key, field] : fields()) {
    const std::string v = field.get(cfg);
    if (v.empty()) continue;
    out += key + " = " + v + "\n";
  }
  return out;
}

}  // namespace blastomere
