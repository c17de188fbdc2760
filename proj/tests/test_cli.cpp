#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status = -1;
  std::string output;  ///< stdout and stderr
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(SAMDAMP_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(SAMDAMP_CONFIG_DIR) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("samdamp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string out() const { return (dir_ / "out").string(); }

  fs::path dir_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> summary(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

std::vector<std::vector<double>> numeric_rows(const std::string& csv, std::string& header) {
  std::istringstream in(csv);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, HelpListsEveryFlagAndSubcommand) {
  const CliRun r = run_cli("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* flag : {"--config", "--out", "--seed", "--sigma", "--quiet", "--max-iter", "--tol", "--xi-init"}) {
    EXPECT_NE(r.output.find(flag), std::string::npos) << flag;
  }
  for (const char* sub : {"simulate", "synthesize", "sweep", "spectrum", "grid", "compare"}) {
    EXPECT_NE(r.output.find(sub), std::string::npos) << sub;
  }
}

TEST_F(Cli, NegativeLengthIsConfigError) {
  const std::string cfg = write("bad.json", R"({"params": {"l1": -6.0}})");
  const CliRun r = run_cli("--config " + cfg + " --out " + out() + " simulate");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("error[config]"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("l1"), std::string::npos) << r.output;
}

TEST_F(Cli, UsageErrorsAreConfigErrors) {
  EXPECT_EQ(run_cli("--config " + config("default.json") + " --out " + out()).status, 2);
  EXPECT_EQ(run_cli("--out " + out() + " simulate").status, 2);
  EXPECT_EQ(run_cli("--config " + config("default.json") + " --xi-init zero --out " + out() + " synthesize").status, 2);
  const std::string cfg = write("typo.json", R"({"sim": {"dtt": 0.001}})");
  const CliRun r = run_cli("--config " + cfg + " --out " + out() + " simulate");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("sim.dtt"), std::string::npos) << r.output;
}

TEST_F(Cli, MissingInputOrUnwritableOutputIsIoError) {
  EXPECT_EQ(run_cli("--config " + (dir_ / "absent.json").string() + " --out " + out() + " simulate").status, 4);
  const std::string blocker = write("blocker", "x");
  EXPECT_EQ(run_cli("--config " + config("default.json") + " --out " + blocker + "/sub simulate").status, 4);
}

TEST_F(Cli, SimulateDefaultEnergyDecaysEachSlowPeriod) {
  const CliRun r = run_cli("--config " + config("default.json") + " --out " + out() + " --quiet simulate");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(r.output.empty());
  std::string header;
  const auto rows = numeric_rows(read_file(fs::path(out()) / "trajectory.csv"), header);
  EXPECT_EQ(header, "t,q1,q2,q1dot,q2dot,theta,wb,wb_lp,vb,F,T,energy");
  const auto s = summary(fs::path(out()) / "summary.txt");
  const double end = std::stod(s.at("disturbance_end_s"));
  EXPECT_EQ(s.at("energy_decreasing_over_slow_period"), "true");
  EXPECT_NE(s.at("settling_time_s"), "nan");
  // Slow-mode period of the reference platform, about 5.6 s.
  const double period = 1.0 / 0.1788;
  const double dt = rows[1][0] - rows[0][0];
  const auto lag = static_cast<std::size_t>(std::lround(period / dt));
  int audited = 0;
  for (std::size_t k = 0; k + lag < rows.size(); ++k) {
    if (rows[k][0] < end || rows[k][11] < 1e-12) continue;
    EXPECT_LT(rows[k + lag][11], rows[k][11]) << "t = " << rows[k][0];
    ++audited;
  }
  EXPECT_GT(audited, 100);
  EXPECT_GT(rows.back()[0], 29.9);
}

TEST_F(Cli, SynthesizeReportsGainsAndCertificate) {
  const CliRun r = run_cli("--config " + config("default.json") + " --sigma 5e-6 --out " + out() + " synthesize");
  ASSERT_EQ(r.status, 0) << r.output;
  const auto s = summary(fs::path(out()) / "summary.txt");
  for (const char* key : {"kv", "kw", "trace_P", "hurwitz", "feasible"}) EXPECT_TRUE(s.count(key)) << key;
  EXPECT_EQ(s.at("hurwitz"), "true");
  EXPECT_EQ(s.at("sigma"), "5e-06");
  EXPECT_GT(std::stod(s.at("kv")), 0.0);
  EXPECT_GT(std::stod(s.at("trace_P")), 0.0);
  EXPECT_NE(r.output.find("trace_P"), std::string::npos);
  std::string header;
  const auto rows = numeric_rows(read_file(fs::path(out()) / "gains.csv"), header);
  EXPECT_EQ(header, "sigma,kv,kw,cost,feasible,iterations,max_eig_M");
  ASSERT_EQ(rows.size(), 1u);
}

TEST_F(Cli, SweepWritesOneRowPerSigma) {
  const std::string cfg = write("sweep.json", R"({"controller": {"cutoff_hz": 0.76},
    "sweep": {"sigma_min": 1e-6, "sigma_max": 8e-5, "points": 3}})");
  const CliRun r = run_cli("--config " + cfg + " --out " + out() + " --quiet sweep");
  ASSERT_EQ(r.status, 0) << r.output;
  std::string header;
  const auto rows = numeric_rows(read_file(fs::path(out()) / "sweep.csv"), header);
  EXPECT_EQ(header, "sigma,kv,kw,cost,feasible,iterations,max_eig_M");
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) EXPECT_EQ(row[4], 1.0);
}

TEST_F(Cli, SpectrumHeaderAndPeaks) {
  const CliRun r = run_cli("--config " + config("fig7_spectrum.json") + " --out " + out() + " spectrum");
  ASSERT_EQ(r.status, 0) << r.output;
  std::string header;
  const auto rows = numeric_rows(read_file(fs::path(out()) / "spectrum.csv"), header);
  EXPECT_EQ(header, "freq_hz,power");
  EXPECT_GT(rows.size(), 100u);
  EXPECT_NE(r.output.find("peak"), std::string::npos) << r.output;
}

TEST_F(Cli, GridHeaderAndCells) {
  const std::string cfg = write("grid.json", R"({"model": "spatial",
    "grid": {"l1": [4.0, 10.0], "angles_deg": [2.0, 44.0], "rates": [1.0]}})");
  const CliRun r = run_cli("--config " + cfg + " --out " + out() + " --quiet grid");
  ASSERT_EQ(r.status, 0) << r.output;
  std::string header;
  const auto rows = numeric_rows(read_file(fs::path(out()) / "grid.csv"), header);
  EXPECT_EQ(header, "l1,angle_deg,rate,converged,settling_s,peak_force,peak_torque");
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) EXPECT_EQ(row[3], 1.0);
}

TEST_F(Cli, CompareIsByteIdenticalAcrossRuns) {
  const std::string cfg = write("cmp.json", R"({"initial": {"q1": 4.0},
    "controller": {"noise_enabled": true}, "sim": {"duration": 5.0, "record_stride": 20, "seed": 7},
    "compare": {"controllers": ["proposed", "passive"]}})");
  const std::string a = (dir_ / "a").string(), b = (dir_ / "b").string();
  ASSERT_EQ(run_cli("--config " + cfg + " --out " + a + " --quiet compare").status, 0);
  ASSERT_EQ(run_cli("--config " + cfg + " --out " + b + " --quiet compare").status, 0);
  const std::string csv = read_file(fs::path(a) / "compare.csv");
  EXPECT_EQ(csv, read_file(fs::path(b) / "compare.csv"));
  EXPECT_EQ(csv.rfind("t,proposed_q1,", 0), 0u);
  EXPECT_NE(csv.find(",passive_q1,"), std::string::npos);
  ASSERT_EQ(run_cli("--config " + cfg + " --seed 8 --out " + b + " --quiet compare").status, 0);
  EXPECT_NE(csv, read_file(fs::path(b) / "compare.csv"));
}
