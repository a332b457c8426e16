#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(BATCHLAB_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (const auto got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "batchlab_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, ExactTimeJson) {
  const auto r = run("exact-time --p 0.5");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("schema"), "batchlearn.exact_time/1");
  EXPECT_DOUBLE_EQ(j.at("records").at(0).at("steps_expectation").get<double>(), 2.0);
  EXPECT_DOUBLE_EQ(j.at("records").at(0).at("T").get<double>(), 1.0);
}

TEST(Cli, ZetaCsv) {
  const auto r = run("zeta --dist uniform --s 2 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "dist,s,value,error_bound,terms");
  EXPECT_NE(r.out.find("0.6449340668"), std::string::npos);
}

TEST(Cli, NDeltaExact) {
  const auto r = run("ndelta --p 0.5 --delta 0.1 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\n1,0.10000000000000001,4,exact\n"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("ensemble --dist gaussian --n 10").code, 2);
  EXPECT_EQ(run("ensemble --n 10 --trials 0").code, 2);
  EXPECT_EQ(run("scaling --n-sweep 100,1000").code, 2);
  // moment series diverges for the uniform distribution
  EXPECT_EQ(run("ensemble --dist uniform --method moment_series --n 10").code, 3);
  EXPECT_EQ(run("exact-time --p 0.5,1").code, 3);
  // alternating zeta sum loses all digits at n = 31
  EXPECT_EQ(run("ensemble --dist powertail:beta=1 --method zeta_sum --n 31").code, 4);
  // horizon 1 censors most memoryless runs
  EXPECT_EQ(run("ndelta --alg memoryless --n 50 --trials 1000 --horizon 1").code, 4);
  EXPECT_EQ(run("exact-time --p 0.5 --out /nonexistent/dir/x.json").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ConfigFileAndOverrides) {
  const auto dir = temp_dir();
  const auto cfg = dir / "run.cfg";
  const auto saved = dir / "saved.cfg";
  {
    std::ofstream f(cfg);
    f << "# simulate a fixed vector\nfixed_p=0.5\ntrials=2000\nseed=11\nformat=csv\n";
  }
  const auto a = run("simulate --config " + cfg.string() + " --save-config " + saved.string());
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("batch,"), std::string::npos);
  EXPECT_NE(a.out.find(",2000,"), std::string::npos);

  std::ifstream in(saved);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("command=simulate\n"), std::string::npos);
  EXPECT_NE(text.find("seed=11\n"), std::string::npos);

  // Flags win over the file.
  const auto b = run("simulate --config " + cfg.string() + " --trials 3000");
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(b.out.find(",3000,"), std::string::npos);
  EXPECT_EQ(run("simulate --config " + (dir / "missing.cfg").string()).code, 1);
  std::filesystem::remove_all(dir);
}

TEST(Cli, DumpIsPerTrialCsv) {
  const auto r = run("simulate --fixed-p 0,0 --trials 1000 --dump");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "trial,time,censored");
  EXPECT_NE(r.out.find("\n999,1,0\n"), std::string::npos);
}

TEST(Cli, OutputIndependentOfThreads) {
  for (const std::string args :
       {"simulate --dist uniform --n 50 --trials 5000 --seed 4",
        "compare --dist uniform --n 30 --trials 2000 --seed 4",
        "scaling --dist uniform --n-sweep 10,30,100,1000 --method mc_median --trials 1000",
        "extremes --dist uniform --n-sweep 100,1000 --trials 10000"}) {
    const auto one = run(args + " --threads 1");
    const auto four = run(args + " --threads 4");
    ASSERT_EQ(one.code, 0) << args;
    EXPECT_EQ(one.out, four.out) << args;
    EXPECT_EQ(run(args + " --threads 1 --format csv").out, run(args + " --threads 4 --format csv").out)
        << args;
  }
}

TEST(Cli, OutFileMatchesStdout) {
  const auto dir = temp_dir();
  const auto path = dir / "o.json";
  const auto r = run("exact-time --p 0.3,0.6 --out " + path.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, run("exact-time --p 0.3,0.6").out);
  std::filesystem::remove_all(dir);
}
