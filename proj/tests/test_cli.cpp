#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "linkc");
  std::ostringstream out, err;
  const int code = linkc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("linkc_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, CompileEvalVerify) {
  const auto path = temp("square.json");
  auto r = run({"compile", "--poly", "z1*z1", "--domain", "0:1", "--mode", "cabled", "-o", path});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"eval", path, "--input", "0.5+0.5i"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0+0.5i\n");
  r = run({"verify", path, "--samples", "20"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS overall"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  r = run({"eval", path, "--input", "3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("outside"), std::string::npos);
  r = run({"eval", path, "--input", "0.1,0.2"});
  EXPECT_EQ(r.code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, CompileIsDeterministic) {
  const auto a = run({"compile", "--poly", "z1*conj(z1)", "--domain", "0:1"});
  const auto b = run({"compile", "--poly", "z1*conj(z1)", "--domain", "0:1"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ClassicalEvalListsBranches) {
  const auto path = temp("classical.json");
  ASSERT_EQ(run({"compile", "--poly", "2*z1", "--domain", "0:1", "--mode", "classical", "-o", path}).code, 0);
  const auto r = run({"eval", path, "--input", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) EXPECT_EQ(line, "0.5+0i");
  EXPECT_GE(n, 2);
  std::filesystem::remove(path);
}

TEST(Cli, RealizedCircle) {
  const auto path = temp("circle.json");
  ASSERT_EQ(run({"compile", "--poly", "z1*conj(z1) - 1", "--domain", "0:2", "--equalities", "1", "-o", path}).code, 0);
  EXPECT_EQ(run({"eval", path, "--input", "0.6+0.8i"}).code, 0);
  EXPECT_EQ(run({"eval", path, "--input", "0.5"}).code, 1);
  EXPECT_EQ(run({"verify", path, "--samples", "10"}).code, 0);
  std::filesystem::remove(path);
}

TEST(Cli, TraceAndSvg) {
  const auto path = temp("curve.json");
  const auto csv = temp("curve.csv");
  const auto svg = temp("curve.svg");
  ASSERT_EQ(run({"compile", "--poly", "z1 + i*z1*(1-z1)", "--trace-interval", "0:1", "-o", path}).code, 0);
  auto r = run({"trace", path, "--steps", "36", "-o", csv, "--svg", svg});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = slurp(csv);
  EXPECT_EQ(table.rfind("theta,param,out_re,out_im\n", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 37);
  EXPECT_NE(slurp(svg).find("<polyline"), std::string::npos);
  r = run({"export-svg", path, "--overlay", csv});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("</svg>"), std::string::npos);
  for (const auto& p : {path, csv, svg}) std::filesystem::remove(p);
}

TEST(Cli, ProbeSquare) {
  const auto r = run({"probe-square", "--side", "1"});
  EXPECT_NE(r.out.find("generic"), std::string::npos);
  EXPECT_NE(r.out.find("D on A"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"compile"}).code, 2);
  EXPECT_EQ(run({"compile", "--poly", "z1 + w", "--domain", "0:1"}).code, 2);
  EXPECT_EQ(run({"compile", "--poly", "z1", "--domain", "0:1", "--mode", "quantum"}).code, 2);
  EXPECT_EQ(run({"eval", temp("missing.json"), "--input", "0"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, VerifyCatchesTampering) {
  const auto path = temp("tampered.json");
  ASSERT_EQ(run({"compile", "--poly", "z1*z1", "--domain", "0:1", "-o", path}).code, 0);
  std::string text = slurp(path);
  const auto at = text.find("\"length\": ");
  ASSERT_NE(at, std::string::npos);
  text.insert(at + 10, "1");
  std::ofstream(path) << text;
  const auto r = run({"verify", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  std::filesystem::remove(path);
}
