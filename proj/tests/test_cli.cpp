#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sympb/io.hpp"

namespace fs = std::filesystem;
using sympb::io::json;

namespace {

  struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
  };

  std::string slurp(fs::path const& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // One directory per test so that parallel ctest runs never share files.
  fs::path scratch() {
    auto const* info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path dir = fs::path(::testing::TempDir()) / "sympb_cli" / info->name();
    fs::create_directories(dir);
    return dir;
  }

  RunResult run(std::string const& args, std::string const& env = "") {
    fs::path out = scratch() / "stdout.txt";
    fs::path err = scratch() / "stderr.txt";
    std::string cmd = env + " \"" SYMPB_CLI_PATH "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string data(char const* name) { return std::string("\"") + SYMPB_DATA_DIR + "/" + name + "\""; }

  // Parses the CSV body (after the provenance line) into rows of fields.
  std::vector<std::vector<std::string>> csv_rows(std::string const& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty() || line.front() == '#') continue;
      std::vector<std::string> fields;
      std::istringstream f(line);
      std::string cell;
      while (std::getline(f, cell, ',')) fields.push_back(cell);
      rows.push_back(std::move(fields));
    }
    return rows;
  }

  std::size_t column(std::vector<std::string> const& header, std::string const& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    ADD_FAILURE() << "no column " << name;
    return 0;
  }

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("capacity").code, 2);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("--format xml capacity " + data("identity4.csv")).code, 2);
}

TEST(Cli, CapacityOfIdentityAndBall) {
  RunResult id = run("capacity " + data("identity4.csv"));
  ASSERT_EQ(id.code, 0) << id.err;
  auto rows = csv_rows(id.out);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "capacity");
  EXPECT_NEAR(std::stod(rows[1][1]), std::numbers::pi, 1e-14);
  EXPECT_EQ(id.out.rfind("# config: ", 0), 0u);

  RunResult ball = run("capacity " + data("ball_r2.csv"));
  ASSERT_EQ(ball.code, 0) << ball.err;
  EXPECT_NEAR(std::stod(csv_rows(ball.out)[1][1]), 4 * std::numbers::pi, 1e-13);

  RunResult bd = run("capacity --blockdiag " + data("ball_r2.csv"));
  ASSERT_EQ(bd.code, 0) << bd.err;
  EXPECT_NEAR(std::stod(csv_rows(bd.out)[1][1]), 4 * std::numbers::pi, 1e-13);

  RunResult js = run("--format json capacity " + data("skewed4.json"));
  ASSERT_EQ(js.code, 0) << js.err;
  json doc = json::parse(js.out);
  EXPECT_EQ(doc["rows"][0]["quantity"], "capacity");
  EXPECT_GT(doc["rows"][0]["value"].get<double>(), 0.0);
}

TEST(Cli, CapacityErrors) {
  RunResult bad = run("capacity " + data("not_pd.csv"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("positive"), std::string::npos) << bad.err;
  EXPECT_EQ(run("capacity /nonexistent/matrix.csv").code, 2);
}

TEST(Cli, WidthsScan) {
  RunResult one = run("widths --e-min 0.835 --samples 1000");
  ASSERT_EQ(one.code, 0) << one.err;
  auto rows = csv_rows(one.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(std::stod(rows[1][column(rows[0], "j_max_2")]), 1.0, 1e-15);

  RunResult scan = run("widths --builtin 3dof --e-min -0.9 --e-max 1.0 --steps 12 --samples 2000");
  ASSERT_EQ(scan.code, 0) << scan.err;
  rows = csv_rows(scan.out);
  ASSERT_EQ(rows.size(), 13u);
  std::size_t c = column(rows[0], "c_cand");
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_GE(std::stod(rows[i][c]), std::stod(rows[i - 1][c]));

  RunResult file = run("widths --model " + data("eckart_morse_2dof.json") + " --e-min 0.835 --samples 1000");
  ASSERT_EQ(file.code, 0) << file.err;
  EXPECT_EQ(csv_rows(file.out)[1], csv_rows(one.out)[1]);

  EXPECT_EQ(run("widths --e-min -1.5").code, 1);
  EXPECT_EQ(run("widths --e-min -0.9875").code, 1);
  EXPECT_EQ(run("widths --model /nonexistent.json --e-min 0").code, 2);
}

TEST(Cli, Exp1) {
  RunResult r = run("--seed 3 exp1 --tau-points 200");
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double ratio = std::stod(rows[i][1]) / std::stod(rows[i][2]);
    EXPECT_GE(ratio, 1.0 - 1e-6);
  }
  EXPECT_EQ(run("--seed 3 exp1 --tau-points 200").out, r.out);
  EXPECT_EQ(run("--seed 3 --workers 4 exp1 --tau-points 200").out, r.out);
  EXPECT_EQ(run("exp1 --radii").code, 2);
  EXPECT_EQ(run("exp1 --radii 0.1 -0.2").code, 2);

  fs::path curves = scratch() / "curves.csv";
  RunResult c = run("exp1 --unmixed --radii 0.2 --tau-points 30 --curves \"" + curves.string() + "\"");
  ASSERT_EQ(c.code, 0) << c.err;
  auto crow = csv_rows(slurp(curves));
  EXPECT_EQ(crow.size(), 31u);
  auto srow = csv_rows(c.out);
  EXPECT_NEAR(std::stod(srow[1][1]) / std::stod(srow[1][2]), 1.0, 1e-6);
}

TEST(Cli, Exp2) {
  RunResult zero = run("exp2 --xi 1 --delta-e 0 -N 500");
  ASSERT_EQ(zero.code, 0) << zero.err;
  auto rows = csv_rows(zero.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "A");
  EXPECT_EQ(rows[2][0], "B");
  EXPECT_EQ(std::stod(rows[2][column(rows[0], "fraction")]), 0.0);

  RunResult a = run("--seed 5 exp2 -N 800 --xi 0 0.5 1");
  RunResult b = run("exp2 -N 800 --xi 0 0.5 1 --workers 3", "SYMPB_SEED=5");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);

  RunResult defaults = run("--format json exp2 --xi 0.5");
  ASSERT_EQ(defaults.code, 0) << defaults.err;
  json doc = json::parse(defaults.out);
  EXPECT_EQ(doc["config"]["n_traj"], 5000);
  EXPECT_EQ(doc["rows"][0]["n_total"], 5000);

  EXPECT_EQ(run("exp2 --xi 1.5").code, 2);
  EXPECT_EQ(run("exp2 --e-center -2").code, 1);
}

TEST(Cli, ConfigFileAndOverrides) {
  RunResult cfg = run("--config " + data("exp2_config.json") + " exp2 -N 300");
  ASSERT_EQ(cfg.code, 0) << cfg.err;
  auto rows = csv_rows(cfg.out);
  EXPECT_EQ(rows.size(), 1u + 1u + 5u);
  EXPECT_EQ(rows[1][column(rows[0], "n_total")], "300");
  EXPECT_EQ(rows[1][column(rows[0], "seed")], "7");
  EXPECT_EQ(cfg.out, run("--seed 7 exp2 -N 300 --xi 0 0.25 0.5 0.75 1").out);

  fs::path bad = scratch() / "bad.json";
  std::ofstream(bad) << R"({"exp2": {"no-such-option": 1}})";
  EXPECT_EQ(run("--config \"" + bad.string() + "\" exp2").code, 2);
  EXPECT_EQ(run("--config /nonexistent.json exp2").code, 2);
}

TEST(Cli, SampleDump) {
  RunResult r = run("--seed 2 sample --kind B --xi 0.5 -N 50 --builtin 3dof");
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 51u);
  std::size_t q1 = column(rows[0], "q1"), p1 = column(rows[0], "p1");
  column(rows[0], "j_3");
  column(rows[0], "phi_2");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][q1]), 0.0);
    EXPECT_GT(std::stod(rows[i][p1]), 0.0);
  }
  EXPECT_EQ(run("sample --localized-mode 3").code, 2);
}

TEST(Cli, IntegrateStationaryAndDrift) {
  RunResult still = run("--format json integrate --dof 2 --q -80 0 --p 0 0 --t-final 1 --step 0.01 --no-jacobian");
  ASSERT_EQ(still.code, 0) << still.err;
  json doc = json::parse(still.out);
  EXPECT_LE(doc["summary"]["energy_drift"].get<double>(), 1e-15);
  EXPECT_TRUE(doc["summary"]["symplecticity_error"].is_null());

  fs::path s1 = scratch() / "s1.json";
  fs::path s2 = scratch() / "s2.json";
  ASSERT_EQ(run("-o /dev/null integrate --t-final 20 --step 0.002 --no-jacobian --summary \"" + s1.string() + "\"").code, 0);
  ASSERT_EQ(run("-o /dev/null integrate --t-final 20 --step 0.001 --no-jacobian --summary \"" + s2.string() + "\"").code, 0);
  double ratio = json::parse(slurp(s1))["energy_drift"].get<double>() / json::parse(slurp(s2))["energy_drift"].get<double>();
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);

  RunResult csv = run("integrate --t-final 0.01 --step 0.001 --stride 5 --fd-epsilon 1e-5");
  ASSERT_EQ(csv.code, 0) << csv.err;
  auto rows = csv_rows(csv.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "q1", "q2", "q3", "p1", "p2", "p3", "H"}));
  EXPECT_NE(csv.err.find("symplecticity_error"), std::string::npos);
}

TEST(Cli, IntegrateErrors) {
  EXPECT_EQ(run("integrate --params /nonexistent/params.json").code, 2);
  EXPECT_EQ(run("integrate --params " + data("eckart_morse_params.json") + " --t-final 0.01 --no-jacobian").code, 0);
  EXPECT_EQ(run("integrate --dof 2 --q 1 2 3").code, 2);
  EXPECT_EQ(run("integrate --step 0").code, 2);
}
