#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + QUILLEN_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("quillen_cli_" + std::to_string(::getpid()) + "_" + name);
}

double consistent(int m) {
  double fact = 1.0;
  for (int j = 2; j <= m + 1; ++j) fact *= j;
  return 4 * oracle::zeta_prime_m1() - 1.0 / 6.0 - ((m + 1) * std::log(m + 2.0) - 2 * std::log(fact));
}

}  // namespace

TEST(Cli, TorsionCanonicalDirect) {
  const auto r = cli("torsion --bundle canonical:1 --volume canonical --route direct --no-meta");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "torsion");
  EXPECT_EQ(j["result"]["route"], "direct-integrable");
  EXPECT_NEAR(j["result"]["value"].get<double>(), consistent(1), 1e-9);
  EXPECT_TRUE(j["result"].contains("err"));
  EXPECT_TRUE(j["result"]["components"].is_object());
  EXPECT_FALSE(j.contains("meta"));
}

TEST(Cli, ByteIdenticalReruns) {
  const std::string args = "torsion --bundle canonical:1 --volume canonical --route direct --no-meta";
  const auto a = cli(args), b = cli(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto c = cli("closed-form --ms 0,2 --levels 4 --no-meta --jobs 1"), d = cli("closed-form --ms 0,2 --levels 4 --no-meta --jobs 3");
  EXPECT_EQ(c.out, d.out);
}

TEST(Cli, JsonRoundTripAndFifteenDigits) {
  const auto r = cli("gram --bundle fs:3 --volume fs --no-meta");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(nlohmann::json::parse(j.dump()), j);
  for (const auto& e : j["result"]["entries"]) {
    const double x = e.get<double>();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    EXPECT_EQ(std::strtod(buf, nullptr), x);
  }
  EXPECT_NEAR(j["result"]["entries"][1].get<double>(), 1.0 / 6.0, 1e-13);
}

TEST(Cli, ZhangSupDistance) {
  const auto r = cli("zhang --base fs:1 --p 2 --n 8 --report sup --no-meta");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["result"]["sup_distance"].get<double>(), std::log(2.0) / 256, 1e-15);
}

TEST(Cli, MetaBlock) {
  const auto r = cli("zhang --base fs:1 --n 1");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("meta"));
  EXPECT_TRUE(j["meta"].contains("timestamp"));
}

TEST(Cli, CsvOutputAndFile) {
  const auto path = temp_file("cf.csv");
  const auto r = cli("closed-form --ms 0,1 --levels 0 --format csv --output " + path.string());
  ASSERT_EQ(r.code, 0);
  std::ifstream f(path);
  std::string header, row1, row2, extra;
  std::getline(f, header);
  std::getline(f, row1);
  std::getline(f, row2);
  EXPECT_EQ(header, "m,printed,consistent,direct,transfer,limit,limit_verdict,spread,diff_printed,diff_consistent");
  EXPECT_EQ(row1.substr(0, 2), "0,");
  EXPECT_EQ(row2.substr(0, 2), "1,");
  EXPECT_FALSE(std::getline(f, extra));
  std::filesystem::remove(path);
}

TEST(Cli, ConfigPrecedence) {
  const auto cfg = temp_file("cfg.toml");
  std::ofstream(cfg) << "format = \"csv\"\n[zhang]\nbase = \"fs:2\"\nn = 4\n";
  const auto from_file = cli("--config " + cfg.string() + " zhang");
  ASSERT_EQ(from_file.code, 0);
  EXPECT_EQ(from_file.out.substr(0, 21), "p,n,sup_distance,boun");
  EXPECT_NE(from_file.out.find("\n2,4,"), std::string::npos);
  const auto flag_wins = cli("--config " + cfg.string() + " zhang --n 5");
  EXPECT_NE(flag_wins.out.find("\n2,5,"), std::string::npos);
  const auto via_env = cli("zhang --n 6", "QUILLEN_CONFIG=" + cfg.string());
  EXPECT_NE(via_env.out.find("\n2,6,"), std::string::npos);
  const auto json_wins = cli("zhang --format json --no-meta", "QUILLEN_CONFIG=" + cfg.string());
  const auto j = nlohmann::json::parse(json_wins.out);
  EXPECT_EQ(j["result"]["n"], 4);
  EXPECT_EQ(j["result"]["base"], "fs:2");
  std::filesystem::remove(cfg);
}

TEST(Cli, ConfigSectionsDoNotPickTheCommand) {
  const auto cfg = temp_file("multi.toml");
  std::ofstream(cfg) << "no-meta = true\n[closed-form]\nms = [1]\nlevels = 0\n[zhang]\nn = 3\n";
  const auto r = cli("--config " + cfg.string() + " closed-form");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "closed-form");
  EXPECT_EQ(j["result"]["rows"].size(), 1u);
  EXPECT_FALSE(j.contains("meta"));
  const auto z = nlohmann::json::parse(cli("--config " + cfg.string() + " zhang").out);
  EXPECT_EQ(z["result"]["n"], 3);
  std::filesystem::remove(cfg);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("torsion --bundle bogus:1").code, 2);
  EXPECT_EQ(cli("torsion --route sideways").code, 2);
  EXPECT_EQ(cli("--window 1 zhang").code, 2);
  EXPECT_EQ(cli("--abs-tol -1 zhang").code, 2);
  EXPECT_EQ(cli("--format xml zhang").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("zhang --base fs:1 --n 8 --verify --no-meta").code, 0);
  // the printed closed form is not met (documented conflict), so --verify fails
  EXPECT_EQ(cli("torsion --bundle canonical:1 --volume canonical --verify --no-meta").code, 1);
  EXPECT_EQ(cli("gram --bundle canonical:4 --volume canonical --verify --no-meta").code, 0);
}

TEST(Cli, NumericalFailureGivesDiagnosticJson) {
  const auto r = cli("gram --bundle mollified:m=1,eps=1e-320 --volume fs --no-meta");
  EXPECT_EQ(r.code, 3);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["error"]["kind"], "numerical");
  EXPECT_FALSE(j["error"]["message"].get<std::string>().empty());
}

TEST(Cli, VerifyChecksAreReported) {
  const auto r = cli("anomaly --kind bundle --bundle mollified:m=2,eps=0.2 --bundle2 lse:m=2,eps=0.3 --volume fs --verify --no-meta");
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("checks"));
  for (const auto& c : j["checks"]) EXPECT_TRUE(c["passed"].get<bool>()) << c["name"];
}

TEST(Cli, SampleGridLoads) {
  const std::string grid = std::string(QUILLEN_SOURCE_DIR) + "/samples/grids/canonical1.csv";
  const auto r = cli("gram --bundle grid:" + grid + " --volume canonical --no-meta");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["result"]["entries"][0].get<double>(), 1.5, 1e-9);
}
