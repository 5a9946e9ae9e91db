#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// end-to-end checks of the installed binary; EPIJOINT_BIN is set by ctest

namespace {

namespace fs = std::filesystem;

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() /
          ("epijoint_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(next()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
  static int next() {
    static int c = 0;
    return c++;
  }
};

std::string binary() {
  const char* bin = std::getenv("EPIJOINT_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, const Workspace& ws) {
  const std::string out_file = ws.p("cmd_out.txt");
  const std::string cmd =
      binary() + " " + args + " > " + out_file + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  result.out = ss.str();
  return result;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyConfig =
    "seed = 4\n"
    "weeks = 3\n"
    "iterations = 400\n"
    "burnin = 100\n"
    "particles = 25\n"
    "free = [beta]\n"
    "[params]\n"
    "n_pop = 200\n"
    "iota = 0.02\n"
    "theta_h = 0.5\n"
    "theta_ic = 0.9\n"
    "zeta_h = 0.3\n"
    "zeta_ic = 0.9\n"
    "[delay_inf_to_hosp]\n"
    "rate = 1.0\n"
    "[delay_hosp_to_ic]\n"
    "rate = 1.2\n";

}  // namespace

TEST_CASE("--help exits zero and documents the subcommands") {
  Workspace ws;
  const RunResult res = run("--help", ws);
  CHECK(res.exit_code == 0);
  for (const char* sub :
       {"simulate", "estimate-lik", "fit", "simstudy", "summarize"})
    CHECK(res.out.find(sub) != std::string::npos);
}

TEST_CASE("unknown flags are rejected") {
  Workspace ws;
  CHECK(run("simulate --frobnicate", ws).exit_code != 0);
}

TEST_CASE("missing config maps to the validation exit code") {
  Workspace ws;
  const RunResult res = run("simulate --config " + ws.p("absent.cfg"), ws);
  CHECK(res.exit_code == 1);
}

TEST_CASE("config validation failures exit 1 naming the key") {
  Workspace ws;
  write_file(ws.p("bad.cfg"), "weeks = 3\n[params]\ntheta_h = 1.5\n");
  const RunResult res = run("simulate --config " + ws.p("bad.cfg"), ws);
  CHECK(res.exit_code == 1);
  CHECK(res.out.find("theta_h") != std::string::npos);
}

TEST_CASE("simulate writes its artifacts deterministically") {
  Workspace ws;
  write_file(ws.p("run.cfg"), kTinyConfig);
  const RunResult a =
      run("simulate --config " + ws.p("run.cfg") + " --out " + ws.p("a"), ws);
  REQUIRE(a.exit_code == 0);
  for (const char* f :
       {"obs_weekly.csv", "xi.csv", "latent.csv", "manifest.json"})
    CHECK(fs::exists(ws.p("a") + "/" + f));

  const RunResult b =
      run("simulate --config " + ws.p("run.cfg") + " --out " + ws.p("b"), ws);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(ws.p("a") + "/obs_weekly.csv") ==
        slurp(ws.p("b") + "/obs_weekly.csv"));
  CHECK(slurp(ws.p("a") + "/xi.csv") == slurp(ws.p("b") + "/xi.csv"));
  CHECK(slurp(ws.p("a") + "/latent.csv") == slurp(ws.p("b") + "/latent.csv"));

  // a different seed changes the data
  const RunResult c = run("simulate --config " + ws.p("run.cfg") +
                              " --seed 77 --out " + ws.p("c"),
                          ws);
  REQUIRE(c.exit_code == 0);
  CHECK(slurp(ws.p("a") + "/latent.csv") != slurp(ws.p("c") + "/latent.csv"));

  // --emit-xi prints the day,xi0 series
  const RunResult d = run("simulate --config " + ws.p("run.cfg") +
                              " --emit-xi --out " + ws.p("d"),
                          ws);
  CHECK(d.out.find("day,xi0") != std::string::npos);
}

TEST_CASE("estimate-lik emits JSON records for every mode") {
  Workspace ws;
  write_file(ws.p("run.cfg"), kTinyConfig);
  REQUIRE(run("simulate --config " + ws.p("run.cfg") + " --out " + ws.p("sim"),
              ws).exit_code == 0);
  // top-level keys must precede the section headers
  const std::string cfg_with_obs = "obs_weekly = \"" + ws.p("sim") +
                                   "/obs_weekly.csv\"\n" + kTinyConfig;
  write_file(ws.p("fit.cfg"), cfg_with_obs);

  const RunResult brute =
      run("estimate-lik --config " + ws.p("fit.cfg") + " --mode brute", ws);
  CHECK(brute.exit_code == 0);
  CHECK(brute.out.find("\"kind\":\"brute_force\"") != std::string::npos);

  const RunResult joint = run("estimate-lik --config " + ws.p("fit.cfg") +
                                  " --mode joint --particles 10 --seed 3",
                              ws);
  CHECK(joint.exit_code == 0);
  CHECK(joint.out.find("mc_joint_icu_first") != std::string::npos);

  const RunResult indep =
      run("estimate-lik --config " + ws.p("fit.cfg") + " --mode independent",
          ws);
  CHECK(indep.exit_code == 0);
  CHECK(indep.out.find("exact_independent") != std::string::npos);
}

TEST_CASE("brute force on an infeasible instance exits 3") {
  Workspace ws;
  std::string cfg(kTinyConfig);
  cfg.replace(cfg.find("weeks = 3"), 9, "weeks = 9");
  write_file(ws.p("run.cfg"), cfg);
  REQUIRE(run("simulate --config " + ws.p("run.cfg") + " --out " + ws.p("sim"),
              ws).exit_code == 0);
  write_file(ws.p("fit.cfg"),
             "obs_weekly = \"" + ws.p("sim") + "/obs_weekly.csv\"\n" + cfg);
  const RunResult res =
      run("estimate-lik --config " + ws.p("fit.cfg") + " --mode brute", ws);
  CHECK(res.exit_code == 3);
}

TEST_CASE("fit then summarize round trips through the chain file") {
  Workspace ws;
  write_file(ws.p("run.cfg"), kTinyConfig);
  REQUIRE(run("simulate --config " + ws.p("run.cfg") + " --out " + ws.p("sim"),
              ws).exit_code == 0);
  write_file(ws.p("fit.cfg"), "obs_weekly = \"" + ws.p("sim") +
                                  "/obs_weekly.csv\"\n" + kTinyConfig);
  const RunResult fit = run("fit --config " + ws.p("fit.cfg") +
                                " --algorithm gimh --out " + ws.p("chain.jsonl") +
                                " --summary " + ws.p("summary.csv"),
                            ws);
  REQUIRE(fit.exit_code == 0);
  CHECK(fs::exists(ws.p("chain.jsonl")));
  CHECK(fs::exists(ws.p("chain.jsonl") + ".manifest.json"));
  const std::string summary = slurp(ws.p("summary.csv"));
  CHECK(summary.find("r95") != std::string::npos);
  CHECK(summary.find("beta") != std::string::npos);

  const RunResult sum =
      run("summarize --chain " + ws.p("chain.jsonl"), ws);
  CHECK(sum.exit_code == 0);
  CHECK(sum.out.find("beta") != std::string::npos);
}

TEST_CASE("simstudy smoke run emits the study tables") {
  Workspace ws;
  const RunResult res = run(
      "simstudy --scenario small --scale desk --datasets 2 --iterations 200 "
      "--particles 10 --weeks 5 --threads 2 --seed 3 --out " +
          ws.p("study"),
      ws);
  REQUIRE(res.exit_code == 0);
  CHECK(fs::exists(ws.p("study") + "/pwd.csv"));
  CHECK(fs::exists(ws.p("study") + "/proportions.csv"));
  const std::string props = slurp(ws.p("study") + "/proportions.csv");
  CHECK(props.find("small,beta") != std::string::npos);
}
