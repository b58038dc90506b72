// Exercises the command-line surface: exit codes, CSV headers, determinism.
// The binary path comes from the OSKM_CLI environment variable.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* p = std::getenv("OSKM_CLI");
  REQUIRE_MESSAGE(p != nullptr, "OSKM_CLI must point at the oskm binary");
  return p;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "oskm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > " +
                          (work_dir() / "stdout.txt").string() + " 2> " +
                          (work_dir() / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_stderr() { return slurp(work_dir() / "stderr.txt"); }

}  // namespace

TEST_CASE("run writes a trace with a config header") {
  const fs::path out = work_dir() / "run1.csv";
  CHECK(run("run --algo norma --label-noise 0 --snr-db inf --seeds 1 --n-samples 40 --out " +
            out.string()) == 0);
  const std::string content = slurp(out);
  CHECK(content.rfind("# oskm", 0) == 0);
  CHECK(content.find("seed,algo,step,raw_score") != std::string::npos);
  CHECK(content.find("\r") == std::string::npos);  // LF only
}

TEST_CASE("invalid flags exit with code 2") {
  CHECK(run("run --tau-p 0 --seeds 1 --n-samples 10") == 2);
  CHECK(last_stderr().find("tau_p") != std::string::npos);
  CHECK(run("run --no-such-flag 1") == 2);
  CHECK(run("run --label-noise 0.7 --seeds 1 --n-samples 10") == 2);
  CHECK(run("sweep --label-noise 0.1,0.9 --seeds 2 --n-samples 10") == 2);
  CHECK(run("run --tau-e 200 --tau 100 --seeds 1 --n-samples 10") == 2);
  CHECK(run("bound-check --kernel gaussian --seeds 1 --n-samples 10") == 2);
  CHECK(run("bound-check --n-samples 0 --seeds 1") == 2);
  CHECK(run("sweep --seeds 2 --n-samples 10") == 2);  // no axis
}

TEST_CASE("identical invocations produce byte-identical output") {
  const fs::path a = work_dir() / "det_a.csv";
  const fs::path b = work_dir() / "det_b.csv";
  const std::string flags =
      "run --algo both --seed 7 --seeds 2 --label-noise 0.2 --n-samples 60 --dim 16";
  CHECK(run(flags + " --out " + a.string()) == 0);
  CHECK(run(flags + " --out " + b.string()) == 0);
  const std::string ca = slurp(a);
  CHECK(ca == slurp(b));
  CHECK(!ca.empty());
}

TEST_CASE("sweep emits one row per axis value per algorithm") {
  const fs::path out = work_dir() / "sweep1.csv";
  CHECK(run("sweep --label-noise 0,0.2 --seeds 3 --n-samples 50 --dim 8 --out " +
            out.string()) == 0);
  const std::string content = slurp(out);
  int rows = 0;
  std::stringstream ss(content);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#' && line.find("axis_value") == std::string::npos)
      ++rows;
  CHECK(rows == 4);
  CHECK(content.find(",oskm,") != std::string::npos);
  CHECK(content.find(",norma,") != std::string::npos);
}

TEST_CASE("single-value sweep works like an aggregated run") {
  const fs::path out = work_dir() / "sweep2.csv";
  CHECK(run("sweep --label-noise 0.1 --seeds 2 --n-samples 40 --dim 8 --out " +
            out.string()) == 0);
}

TEST_CASE("reduce-check holds on defaults and rejects nonzero rho") {
  CHECK(run("reduce-check --seeds 3 --tau 80 --dim 16") == 0);
  CHECK(run("reduce-check --rho 0.1 --seeds 2") == 2);
  CHECK(last_stderr().find("rho") != std::string::npos);
  CHECK(run("reduce-check --tau-p 5 --seeds 2") == 2);
}

TEST_CASE("bound-check holds on separable clean streams") {
  CHECK(run("bound-check --algo oskm --seeds 3 --n-samples 60 --class-sep 10 --dim 16") == 0);
}

TEST_CASE("divergent configurations exit with code 3") {
  CHECK(run("run --algo oskm --rho 100 --seeds 1 --n-samples 120 --dim 8") == 3);
}
