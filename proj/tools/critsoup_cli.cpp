#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "critsoup/cable.hpp"
#include "critsoup/config.hpp"
#include "critsoup/constants.hpp"
#include "critsoup/experiments.hpp"
#include "critsoup/gff.hpp"
#include "critsoup/loopsoup.hpp"
#include "critsoup/random.hpp"

namespace fs = std::filesystem;
using namespace critsoup;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<std::string> out_dir;
  std::optional<int> radius;
  std::optional<double> c;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--replicas", f.replicas, "replica count (overrides adaptive effective-replica targets)");
  cmd->add_option("--out-dir", f.out_dir, "directory for report files");
  cmd->add_option("--radius", f.radius, "use a disk graph of this radius");
  cmd->add_option("--c", f.c, "central charge (alpha = c/2)");
  cmd->add_option("--threads", f.threads, "worker threads, 0 for all cores");
}

ExperimentConfig resolve(const CommonFlags& f, bool statistical) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.replicas) cfg.replicas = *f.replicas;
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.radius) cfg.graph = GraphSpec::disk(*f.radius);
  if (f.c) cfg.c = *f.c;
  if (f.threads) cfg.threads = *f.threads;
  validate(cfg, statistical);
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void print_report(const StatReport& rep) {
  for (const auto& n : rep.notes()) std::cout << "# " << n << '\n';
  for (const auto& row : rep.rows()) {
    std::cout << (row.gate ? (row.pass ? "  pass  " : "  FAIL  ") : "  info  ") << row.functional
              << "  param=" << row.parameter << " n=" << row.n_effective << " stat=" << row.statistic
              << " p=" << row.p_value << " ratio=" << row.ratio << " se=" << row.std_error << '\n';
  }
  std::cout << rep.experiment() << ": " << (rep.passed() ? "PASS" : "FAIL") << " (" << rep.failures()
            << " failing gates)\n";
}

int cmd_check(const std::string& id, const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve(flags, true);
  const StatReport rep = run_experiment(id, cfg);
  fs::create_directories(cfg.out_dir);
  write_text(fs::path(cfg.out_dir) / (id + ".csv"), rep.to_csv());
  write_text(fs::path(cfg.out_dir) / (id + ".json"), rep.to_json());
  print_report(rep);
  return rep.passed() ? 0 : 1;
}

int cmd_constants(const std::optional<std::string>& out_dir) {
  const StatReport rep = check_constants(ExperimentConfig{});
  std::cout << std::setprecision(12);
  for (const auto& row : compute_constants()) {
    std::cout << std::left << std::setw(44) << row.name << " value=" << row.value << " target=" << row.target
              << (row.exact.empty() ? "" : " exact=" + row.exact) << (row.pass() ? "  pass" : "  FAIL") << '\n';
  }
  if (out_dir) {
    fs::create_directories(*out_dir);
    write_text(fs::path(*out_dir) / "constants.csv", rep.to_csv());
    write_text(fs::path(*out_dir) / "constants.json", rep.to_json());
  }
  return rep.passed() ? 0 : 1;
}

int cmd_kappa(const std::optional<double>& c, const std::optional<double>& kappa) {
  std::cout << std::setprecision(17);
  if (c) {
    const double k = kappa_from_c(*c);
    std::cout << "c=" << *c << " kappa=" << k << " c(kappa)=" << c_from_kappa(k) << '\n';
  }
  if (kappa) {
    const double cc = c_from_kappa(*kappa);
    std::cout << "kappa=" << *kappa << " c=" << cc << '\n';
  }
  if (!c && !kappa) throw CLI::ValidationError("kappa", "give --c or --kappa");
  return 0;
}

int cmd_sample(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve(flags, false);
  const GraphSpec spec = cfg.graph.value_or(GraphSpec::disk(8));
  const DomainGraph g = spec.build();
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  const LoopSoupSampler sampler(g, cfg.l_max, cfg.tail_tolerance);
  RandomStream rs(cfg.seed, 0, Purpose::kSoup);
  LoopSoup soup = sampler.sample(cfg.alpha(), rs);
  RandomStream ro(cfg.seed, 0, Purpose::kOccupation);
  const OccupationField occ = occupation_field(soup, g, ro);
  RandomStream rc(cfg.seed, 0, Purpose::kClusters);
  const ClusterSet clusters = clusters_from_soup(soup, occ, g, rc, cfg.bridge_factor);

  write_text(dir / "graph.json", g.to_json());
  {
    std::ofstream out(dir / "soup.txt");
    write_soup_text(out, soup);
  }
  {
    std::ofstream out(dir / "occupation.csv");
    write_field_csv(out, ScalarField{FieldRole::kOccupation, occ.local_time}, g);
  }
  write_text(dir / "clusters.json", cluster_set_to_json(clusters, g));
  const Coord mid = spec.centre();
  const int v0 = g.find_interior(mid);
  if (const auto k = outermost_cluster_around(clusters, g, v0)) {
    write_text(dir / "boundary.json", boundary_trace_to_json(outer_boundary(clusters.components[*k], g), g));
  }
  if (cfg.alpha() == 0.5) {
    RandomStream rsg(cfg.seed, 0, Purpose::kSigns);
    const ScalarField phi = gff_from_soup(occ, clusters, rsg);
    std::ofstream out(dir / "field.csv");
    write_field_csv(out, phi, g);
  }
  std::cout << spec.describe() << " alpha=" << cfg.alpha() << " L_max=" << sampler.l_max()
            << " loops=" << soup.loops.size() << " clusters=" << clusters.components.size() << " -> "
            << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical loop-soup cluster experiments"};
  app.require_subcommand(1);

  CommonFlags check_flags;
  std::string id;
  auto* check = app.add_subcommand("check", "run one experiment and write <id>.csv and <id>.json");
  check->add_option("id", id, "experiment id")->required();
  add_common(check, check_flags);

  std::optional<std::string> const_out;
  auto* constants = app.add_subcommand("constants", "continuum constants with their targets");
  constants->add_option("--out-dir", const_out, "also write constants.csv and constants.json here");

  std::optional<double> kappa_c, kappa_k;
  auto* kappa = app.add_subcommand("kappa", "convert between central charge and kappa");
  kappa->add_option("--c", kappa_c, "central charge in (0,1]");
  kappa->add_option("--kappa", kappa_k, "kappa in [8/3,4]");

  CommonFlags sample_flags;
  auto* sample = app.add_subcommand("sample", "dump one soup, occupation field, clusters and boundary");
  add_common(sample, sample_flags);

  auto* list = app.add_subcommand("list", "list experiment ids");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(id, check_flags);
    if (*constants) return cmd_constants(const_out);
    if (*kappa) return cmd_kappa(kappa_c, kappa_k);
    if (*sample) return cmd_sample(sample_flags);
    if (*list) {
      for (const auto& e : experiment_catalog()) std::cout << e.id << "  " << e.summary << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error in '" << e.key() << "': " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
