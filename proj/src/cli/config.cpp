#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "curvyaqm/cli.hpp"
#include "curvyaqm/steady_state.hpp"
#include "json.hpp"

namespace curvyaqm::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      throw UsageError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

double ms(double v) { return v / 1000.0; }
double percent(double v) { return v / 100.0; }

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  try {
    reject_unknown(doc, "config", {"traffic", "aqm", "link", "grid",
                                   "provision", "solve", "sim", "output"});
    if (doc.contains("traffic")) {
      const auto& t = doc["traffic"];
      reject_unknown(t, "traffic", {"preset", "K", "mss_bytes", "base_rtt_ms"});
      read(t, "preset", cfg.traffic.preset);
      read(t, "K", cfg.traffic.tcp_constant);
      read(t, "mss_bytes", cfg.traffic.mss_bytes);
      read(t, "base_rtt_ms", cfg.traffic.base_rtt_ms);
    }
    if (doc.contains("aqm")) {
      const auto& a = doc["aqm"];
      reject_unknown(a, "aqm", {"u", "design_point", "scale_delay_ms", "clamp",
                                "clamp_target_ms"});
      read(a, "u", cfg.aqm.curviness);
      if (a.contains("design_point")) {
        const auto& dp = a["design_point"];
        reject_unknown(dp, "aqm.design_point", {"dq_ms", "p_percent"});
        read(dp, "dq_ms", cfg.aqm.design_delay_ms);
        read(dp, "p_percent", cfg.aqm.design_drop_percent);
      }
      read(a, "scale_delay_ms", cfg.aqm.scale_delay_ms);
      read(a, "clamp", cfg.aqm.clamp);
      read(a, "clamp_target_ms", cfg.aqm.clamp_target_ms);
    }
    if (doc.contains("link")) {
      const auto& l = doc["link"];
      reject_unknown(l, "link", {"capacity_mbps"});
      read(l, "capacity_mbps", cfg.capacity_mbps);
    }
    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      reject_unknown(g, "grid", {"min", "max", "points", "scale", "extra"});
      read(g, "min", cfg.grid.min);
      read(g, "max", cfg.grid.max);
      read(g, "points", cfg.grid.points);
      read(g, "scale", cfg.grid.scale);
      read(g, "extra", cfg.grid.extra);
    }
    if (doc.contains("provision")) {
      const auto& p = doc["provision"];
      reject_unknown(p, "provision", {"flows", "agg_factors"});
      read(p, "flows", cfg.flows);
      read(p, "agg_factors", cfg.agg_factors);
    }
    if (doc.contains("solve")) {
      const auto& s = doc["solve"];
      reject_unknown(s, "solve", {"load", "csv"});
      read(s, "load", cfg.load);
      read(s, "csv", cfg.csv);
    }
    if (doc.contains("sim")) {
      const auto& s = doc["sim"];
      reject_unknown(s, "sim", {"n_flows", "duration_rounds", "warmup_rounds",
                                "seed", "seeds"});
      read(s, "n_flows", cfg.sim.n_flows);
      read(s, "duration_rounds", cfg.sim.duration_rounds);
      read(s, "warmup_rounds", cfg.sim.warmup_rounds);
      read(s, "seed", cfg.sim.seed);
      read(s, "seeds", cfg.sim.seeds);
    }
    if (doc.contains("output")) {
      const auto& o = doc["output"];
      reject_unknown(o, "output", {"dir", "prefix"});
      read(o, "dir", cfg.output.dir);
      read(o, "prefix", cfg.output.prefix);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_env(RunConfig& cfg) {
  const char* seed = std::getenv("CURVYAQM_SEED");
  if (seed == nullptr || *seed == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(seed, &end, 10);
  if (*end != '\0' || seed[0] == '-') {
    throw UsageError(std::string("CURVYAQM_SEED is not an unsigned integer: ") +
                     seed);
  }
  cfg.sim.seed = v;
}

TrafficModel traffic_model(const RunConfig& cfg) {
  double k;
  if (cfg.traffic.tcp_constant) {
    k = *cfg.traffic.tcp_constant;
  } else if (cfg.traffic.preset == "reno") {
    k = kRenoConstant;
  } else if (cfg.traffic.preset == "cubic-reno") {
    k = kCubicRenoConstant;
  } else {
    throw UsageError("unknown traffic preset '" + cfg.traffic.preset +
                     "' (expected reno or cubic-reno)");
  }
  try {
    return TrafficModel::create(k, cfg.traffic.mss_bytes * 8.0,
                                ms(cfg.traffic.base_rtt_ms));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

DesignPoint design_point(const RunConfig& cfg) {
  try {
    return DesignPoint::create(ms(cfg.aqm.design_delay_ms),
                               percent(cfg.aqm.design_drop_percent));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::vector<AqmCurve> aqm_curves(const RunConfig& cfg) {
  std::vector<AqmCurve> curves;
  try {
    if (cfg.aqm.scale_delay_ms) {
      if (cfg.aqm.curviness.size() != 1) {
        throw UsageError("scale_delay_ms needs exactly one curviness value");
      }
      curves.push_back(AqmCurve::curvy(cfg.aqm.curviness.front(),
                                       ms(*cfg.aqm.scale_delay_ms)));
    } else {
      const DesignPoint dp = design_point(cfg);
      for (double u : cfg.aqm.curviness) {
        curves.push_back(anchored_curve(dp, u));
      }
    }
    if (cfg.aqm.clamp) {
      curves.push_back(AqmCurve::clamp(
          ms(cfg.aqm.clamp_target_ms.value_or(cfg.aqm.design_delay_ms))));
    }
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return curves;
}

std::vector<double> load_grid(const RunConfig& cfg) {
  const auto& g = cfg.grid;
  if (g.points < 2) throw UsageError("grid needs at least 2 points");
  std::vector<double> grid;
  try {
    if (g.scale == "log") {
      grid = log_grid(g.min, g.max, static_cast<std::size_t>(g.points));
    } else if (g.scale == "linear") {
      grid = linear_grid(g.min, g.max, static_cast<std::size_t>(g.points));
    } else {
      throw UsageError("grid scale must be log or linear");
    }
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  for (double x : g.extra) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw UsageError("extra grid loads must be > 0");
    }
  }
  grid.insert(grid.end(), g.extra.begin(), g.extra.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() <= 0.0) throw UsageError("grid loads must be > 0");
  return grid;
}

}  // namespace curvyaqm::cli
