#include "critsoup/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "critsoup/loopsoup.hpp"

namespace critsoup {

DomainGraph GraphSpec::build() const {
  return kind == Kind::kDisk ? build_disk_graph(radius) : build_rect_graph(width, height);
}

std::string GraphSpec::describe() const {
  std::ostringstream out;
  if (kind == Kind::kDisk) {
    out << "disk(r=" << radius << ")";
  } else {
    out << "rect(" << width << "x" << height << ")";
  }
  return out.str();
}

Coord GraphSpec::centre() const {
  if (kind == Kind::kDisk) return {0, 0};
  return {(width - 1) / 2, (height - 1) / 2};
}

double ExperimentConfig::alpha() const { return alpha_from_c(c); }

namespace {

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, std::string("wrong type (") + e.what() + ")");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "top level must be an object");
  ExperimentConfig cfg;
  std::optional<double> alpha;
  bool c_given = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    if (key == "graph") {
      GraphSpec spec;
      const std::string type = v.contains("type") ? get_as<std::string>(v["type"], "graph.type") : "disk";
      if (type == "disk") {
        spec = GraphSpec::disk(v.contains("radius") ? get_as<int>(v["radius"], "graph.radius") : 4);
      } else if (type == "rect") {
        spec = GraphSpec::rect(get_as<int>(v.value("width", nlohmann::json(1)), "graph.width"),
                               get_as<int>(v.value("height", nlohmann::json(1)), "graph.height"));
      } else {
        throw ConfigError("graph.type", "expected \"disk\" or \"rect\"");
      }
      cfg.graph = spec;
    } else if (key == "c") {
      cfg.c = get_as<double>(v, key);
      c_given = true;
    } else if (key == "alpha") {
      alpha = get_as<double>(v, key);
    } else if (key == "l_max") {
      cfg.l_max = get_as<int>(v, key);
    } else if (key == "tail_tolerance") {
      cfg.tail_tolerance = get_as<double>(v, key);
    } else if (key == "beta_candidates") {
      cfg.beta_candidates = get_as<std::vector<double>>(v, key);
    } else if (key == "u_values") {
      cfg.u_values = get_as<std::vector<double>>(v, key);
    } else if (key == "replicas") {
      cfg.replicas = get_as<std::size_t>(v, key);
    } else if (key == "min_effective") {
      cfg.min_effective = get_as<std::size_t>(v, key);
    } else if (key == "large_radius") {
      cfg.large_radius = get_as<int>(v, key);
    } else if (key == "large_min_effective") {
      cfg.large_min_effective = get_as<std::size_t>(v, key);
    } else if (key == "bridge_factor") {
      cfg.bridge_factor = get_as<double>(v, key);
    } else if (key == "seed") {
      cfg.seed = get_as<std::uint64_t>(v, key);
    } else if (key == "threads") {
      cfg.threads = get_as<int>(v, key);
    } else if (key == "out_dir") {
      cfg.out_dir = get_as<std::string>(v, key);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  if (alpha) {
    if (c_given && std::abs(alpha_from_c(cfg.c) - *alpha) > 1e-12) {
      throw ConfigError("alpha", "inconsistent with c (alpha must equal c/2)");
    }
    cfg.c = c_from_alpha(*alpha);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& cfg, bool statistical) {
  if (cfg.graph) {
    if (cfg.graph->kind == GraphSpec::Kind::kDisk && cfg.graph->radius < 1) {
      throw ConfigError("graph.radius", "must be >= 1");
    }
    if (cfg.graph->kind == GraphSpec::Kind::kRect && (cfg.graph->width < 1 || cfg.graph->height < 1)) {
      throw ConfigError("graph.width", "rectangle dimensions must be >= 1");
    }
  }
  if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw ConfigError("c", "must be positive");
  if (cfg.l_max != 0 && cfg.l_max < 2) throw ConfigError("l_max", "must be >= 2 (or 0 for automatic)");
  if (!(cfg.tail_tolerance > 0.0)) throw ConfigError("tail_tolerance", "must be positive");
  if (cfg.beta_candidates.empty()) throw ConfigError("beta_candidates", "must not be empty");
  for (double b : cfg.beta_candidates) {
    if (!(b > 0.0)) throw ConfigError("beta_candidates", "entries must be positive");
  }
  for (double u : cfg.u_values) {
    if (u == 0.0 || !std::isfinite(u)) throw ConfigError("u_values", "entries must be finite and non-zero");
  }
  if (statistical && cfg.replicas && *cfg.replicas < 1000) {
    throw ConfigError("replicas", "statistical gates need at least 1000 replicas");
  }
  if (cfg.large_radius && *cfg.large_radius < 0) throw ConfigError("large_radius", "must be >= 0 (0 disables the radius trend)");
  if (!(cfg.bridge_factor > 0.0)) throw ConfigError("bridge_factor", "must be positive");
  if (cfg.threads < 0) throw ConfigError("threads", "must be >= 0");
}

}  // namespace critsoup
