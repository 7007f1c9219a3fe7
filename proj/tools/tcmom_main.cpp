// Command-line front-end: config-driven meshing, characteristic-mode
// sweeps, driven S-parameter runs, and scene-to-scene comparisons with
// reproducible CSV artifacts.
//
//   tcmom mesh    --config run.cfg [--out dir]
//   tcmom modes   --config run.cfg [--out dir] [--freq GHz]
//   tcmom driven  --config run.cfg [--out dir] [--freq GHz]
//   tcmom compare --config base.cfg --config perturbed.cfg [--out dir]
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical
// failure (solver or indefinite-R).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcmom/config.hpp"
#include "tcmom/errors.hpp"
#include "tcmom/mesh_io.hpp"
#include "tcmom/reports.hpp"

namespace fs = std::filesystem;
using namespace tcmom;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  os << text;
  if (!os) fail(ErrorKind::IoError, "short write to '" + path.string() + "'");
}

fs::path out_dir(const RunConfig& cfg, const std::string& out_override) {
  fs::path dir = out_override.empty() ? fs::path(cfg.out_dir)
                                      : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create '" + dir.string() + "'");
  return dir;
}

// Index of the grid sample matching --freq; the dump frequency must be one
// of the swept samples, since fields exist only where a solve happened.
int grid_index(const std::vector<double>& grid, double freq) {
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (std::abs(grid[k] - freq) < 1e-9) return static_cast<int>(k);
  fail(ErrorKind::ConfigError,
       "--freq " + std::to_string(freq) + " is not a grid sample");
}

int cmd_mesh(const RunConfig& cfg, const std::string& out_override) {
  const fs::path dir = out_dir(cfg, out_override);
  const Scene scene = make_scene(config_scene(cfg));
  write_file(dir / "mesh.txt", mesh_to_string(scene.mesh));

  const MeshStats stats = census(scene.mesh);
  std::ostringstream os;
  os << artifact_header(config_hash(cfg));
  os << "scene: " << scene.spec.name << "\n"
     << "vertices: " << stats.vertices << "\n"
     << "triangles: " << stats.triangles << "\n"
     << "edges: " << stats.edges << "\n"
     << "interior_edges: " << stats.interior_edges << "\n"
     << "boundary_edges: " << stats.boundary_edges << "\n"
     << "holes: " << stats.holes << "\n"
     << "basis: " << scene.basis.size() << "\n"
     << "ports: " << scene.ports.size() << "\n";
  write_file(dir / "mesh_stats.txt", os.str());

  std::cout << "mesh: " << (dir / "mesh.txt").string() << "\n"
            << "N = " << scene.basis.size() << " basis functions, "
            << stats.vertices << " vertices, " << stats.triangles
            << " triangles, " << scene.ports.size() << " ports\n";
  return 0;
}

int cmd_modes(const RunConfig& cfg, const std::string& out_override,
              std::optional<double> freq) {
  const fs::path dir = out_dir(cfg, out_override);
  const Scene scene = make_scene(config_scene(cfg));
  const std::vector<double> grid = config_grid(cfg);
  const int dump_at = freq ? grid_index(grid, *freq) : -1;

  const SceneSweep sweep = sweep_scene(scene, grid, cfg.n_modes);
  const std::string header = artifact_header(config_hash(cfg));
  write_file(dir / "modes.csv", modes_csv(sweep.tracked, header));
  std::cout << "modes: " << (dir / "modes.csv").string() << "\n"
            << bands_report(sweep.tracked, cfg.significance_threshold);

  if (dump_at >= 0) {
    const ModeSet& ms = sweep.modes[dump_at];
    for (const TrackedMode& m : sweep.tracked.modes) {
      const int raw = m.raw_index[dump_at];
      if (raw < 0) continue;  // mode absent at this sample
      const SurfaceCurrent cur =
          surface_current(scene.basis, Eigen::VectorXd(ms.J.col(raw)));
      const std::string tag = "mode" + std::to_string(m.id);
      write_file(dir / ("eigencurrent_" + tag + ".txt"),
                 field_file(scene.mesh, cur, header));
      const NullMap map = current_null_map(scene.mesh, cur.mag,
                                           cfg.null_threshold,
                                           cfg.window_area_fraction);
      write_file(dir / ("null_" + tag + ".txt"),
                 null_map_file(scene.mesh, cur, map, header));
    }
    std::cout << "field dumps at " << grid[dump_at] << " GHz: "
              << (dir / "eigencurrent_mode<id>.txt").string() << "\n";
  }
  return 0;
}

int cmd_driven(const RunConfig& cfg, const std::string& out_override,
               std::optional<double> freq) {
  const fs::path dir = out_dir(cfg, out_override);
  const Scene scene = make_scene(config_scene(cfg));
  if (scene.ports.empty())
    fail(ErrorKind::ConfigError, "driven requires ports; scene '" +
                                     scene.spec.name + "' has none");
  const std::vector<double> grid = config_grid(cfg);
  const int dump_at = freq ? grid_index(grid, *freq) : -1;

  const SceneSweep sweep = sweep_scene(scene, grid, cfg.n_modes);
  const std::string header = artifact_header(config_hash(cfg));
  write_file(dir / "sparams.csv", sparams_csv(sweep.s, header));
  std::cout << "sparams: " << (dir / "sparams.csv").string() << "\n";

  if (dump_at >= 0) {
    const ImpedanceMatrix zm = assemble_impedance(scene.basis, grid[dump_at]);
    for (const PortSpec& p : scene.ports) {
      const Eigen::VectorXcd v = excitation_vector(scene.basis, p, 1.0);
      const Eigen::VectorXcd i = driven_solve(zm, v);
      const SurfaceCurrent cur = surface_current(scene.basis, i);
      write_file(dir / ("current_port" + std::to_string(p.port_id) + ".txt"),
                 field_file(scene.mesh, cur, header));
    }
    std::cout << "port current dumps at " << grid[dump_at] << " GHz: "
              << (dir / "current_port<id>.txt").string() << "\n";
  }
  return 0;
}

int cmd_compare(const RunConfig& cfg_a, const RunConfig& cfg_b,
                const std::string& out_override) {
  const std::vector<double> grid = config_grid(cfg_a);
  if (grid != config_grid(cfg_b))
    fail(ErrorKind::ConfigError,
         "compare requires both configs to share the frequency grid");
  const fs::path dir = out_dir(cfg_a, out_override);
  // Thresholds, band and mode count come from the baseline config.
  const FreqBand band = config_band(cfg_a);
  const AnalysisSettings st = config_settings(cfg_a);

  const Scene a = make_scene(config_scene(cfg_a));
  const Scene b = make_scene(config_scene(cfg_b));
  const SceneSweep sa = sweep_scene(a, grid, cfg_a.n_modes);
  const SceneSweep sb = sweep_scene(b, grid, cfg_a.n_modes);

  const ModePairing pairing = pair_modes_by_chassis(
      sa.modes, sa.tracked, a.basis, sb.modes, sb.tracked, b.basis,
      st.min_pairing_corr);
  const PerturbationReport modes = perturbation_report(
      sa.modes, sa.tracked, a.basis, sb.modes, sb.tracked, b.basis, pairing,
      st.significance_threshold);

  const std::string ha = artifact_header(config_hash(cfg_a));
  const std::string hb = artifact_header(config_hash(cfg_b));
  write_file(dir / "perturbation.csv", perturbation_csv(modes, ha));

  const CouplingReport cls_a = classify_coupling_modes(
      sa.modes, sa.tracked, a.basis, band, st.significance_threshold,
      st.null_threshold, st.window_area_fraction);
  const CouplingReport cls_b = classify_coupling_modes(
      sb.modes, sb.tracked, b.basis, band, st.significance_threshold,
      st.null_threshold, st.window_area_fraction);
  write_file(dir / "classification_base.csv", classification_csv(cls_a, ha));
  write_file(dir / "classification_perturbed.csv",
             classification_csv(cls_b, hb));

  // The S-parameter block needs matching port sets on both scenes.
  std::optional<DgsRecord> record;
  auto ids = [](const Scene& s) {
    std::vector<int> v;
    for (const PortSpec& p : s.ports) v.push_back(p.port_id);
    return v;
  };
  if (!a.ports.empty() && ids(a) == ids(b)) {
    record = dgs_compare(sa.s, sb.s, band, &cls_a, &cls_b, &pairing,
                         st.reflection_threshold_db);
    write_file(dir / "dgs.csv", dgs_csv(*record, ha));
  }

  const std::string report =
      compare_report_text(modes, pairing, record ? &*record : nullptr);
  write_file(dir / "report.txt", ha + report);
  std::cout << report << "reports: " << (dir / "report.txt").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic-mode and S-parameter studies on plate scenes"};
  app.require_subcommand(1);

  std::vector<std::string> config_paths;
  std::string out_override;
  double freq = 0.0;
  bool has_freq = false;

  auto add_common = [&](CLI::App* sub, int max_configs) {
    sub->add_option("--config", config_paths, "run configuration file")
        ->required()
        ->expected(1, max_configs);
    sub->add_option("--out", out_override,
                    "output directory (overrides the config)");
    return sub;
  };
  CLI::App* mesh = add_common(app.add_subcommand(
      "mesh", "write the scene mesh and its stats"), 1);
  CLI::App* modes = add_common(app.add_subcommand(
      "modes", "characteristic-mode sweep: modes.csv, radiating bands"), 1);
  CLI::App* driven = add_common(app.add_subcommand(
      "driven", "multiport S-parameter sweep: sparams.csv"), 1);
  CLI::App* compare = add_common(app.add_subcommand(
      "compare", "two-scene perturbation and slot study"), 2);
  for (CLI::App* sub : {modes, driven})
    sub->add_option("--freq", freq, "grid sample (GHz) for field dumps")
        ->each([&](const std::string&) { has_freq = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0; any parse error is usage
  }

  try {
    const std::optional<double> dump_freq =
        has_freq ? std::optional<double>(freq) : std::nullopt;
    if (mesh->parsed()) return cmd_mesh(load_config(config_paths[0]),
                                        out_override);
    if (modes->parsed())
      return cmd_modes(load_config(config_paths[0]), out_override, dump_freq);
    if (driven->parsed())
      return cmd_driven(load_config(config_paths[0]), out_override, dump_freq);
    if (compare->parsed()) {
      if (config_paths.size() != 2)
        fail(ErrorKind::ConfigError,
             "compare needs two --config files (baseline, perturbed)");
      return cmd_compare(load_config(config_paths[0]),
                         load_config(config_paths[1]), out_override);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
