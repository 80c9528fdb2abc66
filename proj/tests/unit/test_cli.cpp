#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(GIMPRINT_EXE) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("gimprint_cli_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST(Cli, PrintConfigIsDocumentedAndParsable) {
  const Outcome o = run_cli("print-config tripod-translation");
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("scenario = tripod-translation"), std::string::npos);
  EXPECT_NE(o.out.find("# "), std::string::npos);
  EXPECT_NE(o.out.find("second_imprint = none"), std::string::npos);
}

TEST(Cli, InvalidInputExitsWithTwo) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("print-config nonsense").code, 2);
  EXPECT_EQ(run_cli("run chirp --no-such-key 1").code, 2);
  EXPECT_EQ(run_cli("run chirp --nx").code, 2);
  EXPECT_EQ(run_cli("run chirp --nx 100").code, 2);
  EXPECT_EQ(run_cli("run chirp stray").code, 2);
  EXPECT_EQ(run_cli("run chirp --config /nonexistent/file.cfg").code, 2);
}

TEST(Cli, RunWritesArtifactsWithOverridesAndConfigFile) {
  const auto dir = scratch_dir("chirp");
  const auto cfg = dir.string() + ".cfg";
  {
    std::ofstream os(cfg);
    os << "scenario = chirp\nnx = 128\nnz = 64\nlz = 64\n";
  }
  const Outcome o = run_cli("run chirp --config " + cfg + " --nz=128 --lz 128 --output-dir " + dir.string());
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("population_2,"), std::string::npos);
  std::ifstream written(dir / "run.cfg");
  std::stringstream text;
  text << written.rdbuf();
  EXPECT_NE(text.str().find("nx = 128"), std::string::npos);
  EXPECT_NE(text.str().find("nz = 128"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "t10.snap"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove(cfg);
}

TEST(Cli, AdiabaticityFailureExitsWithThree) {
  const auto dir = scratch_dir("fast");
  const Outcome o = run_cli(
      "run tripod-translation --engine full --nx 64 --nz 64 --lx 64 --lz 64 --center 0,0 --t_end 0 "
      "--snapshots 0 --omega0 5 --imprint_duration 0.02 --imprint_dt 1e-3 --output_dir " +
      dir.string());
  EXPECT_EQ(o.code, 3);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ThreadCountDoesNotChangeBytes) {
  const auto a = scratch_dir("t1"), b = scratch_dir("t3");
  const std::string common = " run abelian-rotation --nx 64 --nz 64 --lx 64 --lz 64 --sigma 5 --output_dir ";
  ASSERT_EQ(run_cli("--threads 1" + common + a.string()).code, 0);
  ASSERT_EQ(run_cli("--threads 3" + common + b.string()).code, 0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream s;
    s << is.rdbuf();
    return s.str();
  };
  EXPECT_EQ(slurp(a / "t10.snap"), slurp(b / "t10.snap"));
  EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
