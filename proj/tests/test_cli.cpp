#include "thinhom/io.hpp"
#include "thinhom/mesh.hpp"
#include "thinhom/study.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace thinhom;
namespace fs = std::filesystem;

namespace {

const std::string kData = std::string(THINHOM_SOURCE_DIR) + "/tests/data/";
const fs::path kScratch = THINHOM_SCRATCH;

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + THINHOM_CLI + " " + args + " > /dev/null 2>> " + (kScratch / "stderr.log").string();
  fs::create_directories(kScratch);
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("cell on a flat profile prints q = 1") {
  const fs::path out = kScratch / "cell_flat";
  REQUIRE(run("cell --config " + kData + "flat.json --out " + out.string()) == 0);
  const nlohmann::json summary = nlohmann::json::parse(slurp(out / "cell_summary.json"));
  CHECK(std::abs(summary.at("q_flux").get<double>() - 1.0) < 1e-10);

  std::ifstream mesh_in(out / "cell_mesh.txt");
  const Mesh mesh = read_mesh(mesh_in);
  std::ifstream phi_in(out / "phi.csv");
  const Field phi = read_field_csv(phi_in);
  CHECK(phi.size() == mesh.num_nodes());
  CHECK(phi.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("solve-limit with unit forcing writes a constant") {
  const fs::path out = kScratch / "limit_constant";
  REQUIRE(run("solve-limit --config " + kData + "constant_load.json --out " + out.string()) == 0);
  std::ifstream in(out / "u0.csv");
  const Samples1D u0 = read_samples_csv(in);
  CHECK(u0.size() == 129);
  CHECK((u0.v.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("solve-eps writes the field, its flux and the mesh") {
  const fs::path out = kScratch / "solve_eps";
  REQUIRE(run("solve-eps --config " + kData + "small_study.json --eps 0.25 --out " + out.string()) == 0);
  std::ifstream mesh_in(out / "thin_mesh.txt");
  const Mesh mesh = read_mesh(mesh_in);
  CHECK(mesh.eps() == 0.25);
  std::ifstream u_in(out / "u_eps.csv");
  CHECK(read_field_csv(u_in).size() == mesh.num_nodes());
  std::ifstream f_in(out / "flux_profile.csv");
  CHECK(read_samples_csv(f_in).size() == 128);
}

TEST_CASE("study on unit forcing reports vanishing errors") {
  const fs::path out = kScratch / "study_constant";
  REQUIRE(run("study --config " + kData + "constant_load.json --out " + out.string()) == 0);
  std::ifstream csv(out / "report.csv");
  const std::vector<StudyRow> rows = read_report_csv(csv);
  CHECK(rows.size() == 6);
  for (const StudyRow& r : rows) {
    CHECK(r.err_u < 1e-8);
    CHECK(r.err_corrector < 1e-8);
    CHECK(r.flux_discrepancy < 1e-8);
  }
  std::ifstream js(out / "report.json");
  CHECK(read_report_json(js).rows.size() == rows.size());
}

TEST_CASE("identical runs give byte-identical reports") {
  const std::string cfg = "study --config " + kData + "small_study.json --out ";
  REQUIRE(run(cfg + (kScratch / "det_a").string()) == 0);
  REQUIRE(run(cfg + (kScratch / "det_b").string()) == 0);
  REQUIRE(run(cfg + (kScratch / "det_c").string(), "THINHOM_THREADS=2") == 0);
  for (const char* file : {"report.csv", "report.json"}) {
    const std::string a = slurp(kScratch / "det_a" / file);
    CHECK(a == slurp(kScratch / "det_b" / file));
    CHECK(a == slurp(kScratch / "det_c" / file));
  }
}

TEST_CASE("overrides and verbose logging") {
  const fs::path out = kScratch / "verbose";
  fs::create_directories(out);
  const std::string cmd = std::string(THINHOM_CLI) + " cell --config " + kData + "small_study.json --p 2 --resolution 16 --verbose --out " +
                          out.string() + " > " + (out / "stdout.txt").string() + " 2> " + (out / "log.jsonl").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::istringstream log(slurp(out / "log.jsonl"));
  std::string line;
  REQUIRE(std::getline(log, line));
  const nlohmann::json first = nlohmann::json::parse(line);
  CHECK(first.contains("residual"));
  CHECK(first.at("iteration").get<int>() == 0);
  const nlohmann::json summary = nlohmann::json::parse(slurp(out / "cell_summary.json"));
  CHECK(summary.at("p").get<double>() == 2.0);
  CHECK(summary.at("nodes").get<int>() == 17 * 5);
}

TEST_CASE("exit codes") {
  CHECK(run("cell --config " + kData + "bad_p.json --out " + (kScratch / "bad").string()) == 2);
  CHECK(run("cell --config " + kData + "missing.json") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("cell --config " + kData + "flat.json --p 0.5") == 2);
  CHECK(run("cell --config " + kData + "flat.json --out /proc/thinhom/denied") == 4);
  CHECK(run("cell --config " + kData + "nonconvergent.json --out " + (kScratch / "nc").string()) == 3);
}
