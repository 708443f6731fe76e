// Command-line front end: cell | solve-eps | solve-limit | study.
#include "thinhom/config.hpp"
#include "thinhom/errors.hpp"
#include "thinhom/io.hpp"
#include "thinhom/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kSolverError = 3, kIoError = 4 };

struct CliConfig {
  std::string command;
  std::string config_path;
  std::string out_dir;
  bool verbose = false;
  std::optional<double> eps;
  std::optional<double> p;
  std::optional<int> resolution;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw thinhom::IoError("cannot write '" + path.string() + "'");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw thinhom::IoError("failed writing '" + path.string() + "'");
}

thinhom::StudyConfig load_config(const CliConfig& cli) {
  thinhom::StudyConfig cfg = thinhom::parse_config(cli.config_path);
  if (cli.p) {
    if (!(*cli.p > 1.0)) throw thinhom::ConfigError("p must exceed 1");
    cfg.p = *cli.p;
  }
  if (cli.resolution) {
    const int r = *cli.resolution;
    if (r < 2) throw thinhom::ConfigError("--resolution must be at least 2");
    if (cli.command == "cell") {
      cfg.cell_nx = r;
      cfg.cell_ny = std::max(2, r / 4);
    } else {
      cfg.thin_nx_per_period = r;
      cfg.thin_ny = std::max(2, r / 2);
    }
  }
  if (cli.eps) cfg.eps = {*cli.eps};
  if (const char* env = std::getenv("THINHOM_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw thinhom::ConfigError("THINHOM_THREADS must be a positive integer");
    }
  }
  if (cli.verbose) {
    cfg.solver.log = [](const thinhom::IterationRecord& r) {
      nlohmann::ordered_json j{{"stage", r.stage},       {"delta", r.delta},
                               {"iteration", r.iteration}, {"energy", r.energy},
                               {"residual", r.residual_norm}, {"step", r.step_length}};
      std::cerr << j.dump() << "\n";
    };
  }
  cfg.validate();
  return cfg;
}

std::filesystem::path output_dir(const CliConfig& cli, const thinhom::StudyConfig& cfg) {
  const std::filesystem::path dir(cli.out_dir.empty() ? cfg.output : cli.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw thinhom::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

int run_cell(const CliConfig& cli) {
  const thinhom::StudyConfig cfg = load_config(cli);
  const auto dir = output_dir(cli, cfg);
  const thinhom::Mesh mesh = thinhom::build_cell_mesh(cfg.profile, cfg.cell_nx, cfg.cell_ny);
  const thinhom::CellSolution cell = thinhom::solve_cell(mesh, cfg.p, cfg.solver);
  thinhom::compute_q(cell);
  thinhom::write_cell_summary(std::cout, cell);
  {
    auto os = open_out(dir / "cell_summary.json");
    thinhom::write_cell_summary(os, cell);
    finish(os, dir / "cell_summary.json");
  }
  {
    auto os = open_out(dir / "cell_mesh.txt");
    thinhom::write_mesh(os, mesh);
    finish(os, dir / "cell_mesh.txt");
  }
  {
    auto os = open_out(dir / "phi.csv");
    thinhom::write_field_csv(os, mesh, cell.phi, "phi");
    finish(os, dir / "phi.csv");
  }
  return kOk;
}

int run_solve_eps(const CliConfig& cli) {
  const thinhom::StudyConfig cfg = load_config(cli);
  const auto dir = output_dir(cli, cfg);
  const double eps = cfg.eps.front();
  const thinhom::Mesh mesh = thinhom::build_thin_mesh(cfg.profile, eps, cfg.thin_nx_per_period, cfg.thin_ny);
  const thinhom::ThinSolution sol = thinhom::solve_thin(mesh, cfg.p, cfg.load.to_load(), cfg.solver);
  const thinhom::Samples1D flux = thinhom::flux_profile(mesh, sol.u, cfg.p, eps, cfg.flux_stations);
  {
    auto os = open_out(dir / "thin_mesh.txt");
    thinhom::write_mesh(os, mesh);
    finish(os, dir / "thin_mesh.txt");
  }
  {
    auto os = open_out(dir / "u_eps.csv");
    thinhom::write_field_csv(os, mesh, sol.u, "u_eps");
    finish(os, dir / "u_eps.csv");
  }
  {
    auto os = open_out(dir / "flux_profile.csv");
    thinhom::write_samples_csv(os, flux, "flux");
    finish(os, dir / "flux_profile.csv");
  }
  std::cout << "eps " << eps << ": " << mesh.num_nodes() << " nodes, " << sol.diagnostics.total_iterations
            << " Newton iterations, residual " << sol.diagnostics.final_residual << "\n";
  return kOk;
}

int run_solve_limit(const CliConfig& cli) {
  const thinhom::StudyConfig cfg = load_config(cli);
  const auto dir = output_dir(cli, cfg);
  double q = 0.0;
  if (cfg.limit_q) {
    q = *cfg.limit_q;
  } else {
    const thinhom::Mesh mesh = thinhom::build_cell_mesh(cfg.profile, cfg.cell_nx, cfg.cell_ny);
    q = thinhom::compute_q(thinhom::solve_cell(mesh, cfg.p, cfg.solver));
  }
  const thinhom::Samples1D fhat =
      thinhom::fhat_limit(cfg.load.to_load(), cfg.profile, cfg.limit_elements + 1);
  const thinhom::Samples1D fbar = thinhom::fbar_of(fhat, cfg.profile.cell_measure(), cfg.profile.period());
  const thinhom::Limit1DSolution lim = thinhom::solve_homogenized({q, cfg.p, fbar, cfg.limit_elements}, cfg.solver);
  auto os = open_out(dir / "u0.csv");
  thinhom::write_samples_csv(os, lim.u0, "u0");
  finish(os, dir / "u0.csv");
  std::cout << "q " << q << ": " << lim.u0.size() << " nodes, " << lim.diagnostics.total_iterations
            << " Newton iterations\n";
  return kOk;
}

int run_study_cmd(const CliConfig& cli) {
  const thinhom::StudyConfig cfg = load_config(cli);
  const auto dir = output_dir(cli, cfg);
  const thinhom::StudyReport report = thinhom::run_study(cfg);
  {
    auto os = open_out(dir / "report.csv");
    thinhom::write_report_csv(os, report, cfg.record_timing);
    finish(os, dir / "report.csv");
  }
  {
    auto os = open_out(dir / "report.json");
    thinhom::write_report_json(os, cfg, report);
    finish(os, dir / "report.json");
  }
  thinhom::write_report_csv(std::cout, report, cfg.record_timing);
  for (const auto& row : report.rows) {
    if (row.status != "ok") return kSolverError;
  }
  return kOk;
}

int dispatch(const CliConfig& cli) {
  try {
    if (cli.command == "cell") return run_cell(cli);
    if (cli.command == "solve-eps") return run_solve_eps(cli);
    if (cli.command == "solve-limit") return run_solve_limit(cli);
    if (cli.command == "study") return run_study_cmd(cli);
    std::cerr << "unknown command '" << cli.command << "'\n";
    return kConfigError;
  } catch (const thinhom::ConfigError& e) {
    std::cerr << cli.command << ": config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const thinhom::SolverError& e) {
    std::cerr << cli.command << ": solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const thinhom::IoError& e) {
    std::cerr << cli.command << ": I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << cli.command << ": " << e.what() << "\n";
    return kFailure;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenization of the Neumann p-Laplacian on thin domains with an oscillating boundary"};
  app.require_subcommand(1);
  CliConfig cli;
  const std::pair<const char*, const char*> commands[] = {
      {"cell", "solve the periodic cell problem and print q"},
      {"solve-eps", "solve the thin-domain problem at one eps"},
      {"solve-limit", "solve the homogenized 1-D problem"},
      {"study", "run the eps/nu convergence study"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", cli.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cli.out_dir, "output directory (default: config 'output')");
    sub->add_option("--eps", cli.eps, "override the eps ladder with a single value");
    sub->add_option("--p", cli.p, "override the exponent p");
    sub->add_option("--resolution", cli.resolution, "override mesh columns per period");
    sub->add_flag("--verbose", cli.verbose, "log Newton iterations to stderr as JSON lines");
    sub->callback([&cli, sub] { cli.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  return dispatch(cli);
}
