#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mating/cli.hpp"

using mating::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("mating_forge_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = temp_dir() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, ParseComplex) {
  EXPECT_EQ(mating::cli::parse_complex("-1,0"), mating::Complex(-1.0, 0.0));
  EXPECT_EQ(mating::cli::parse_complex("0.25,-2e-1"), mating::Complex(0.25, -0.2));
  EXPECT_EQ(mating::cli::parse_complex("1.5"), mating::Complex(1.5, 0.0));
  EXPECT_THROW(mating::cli::parse_complex("abc"), mating::ParseError);
  EXPECT_THROW(mating::cli::parse_complex("1,x"), mating::ParseError);
}

TEST(Cli, LaminationSingletons) {
  const auto r = invoke({"lamination", "--theta", "0", "--depth", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_EQ(j["schema"], "mating-forge/lamination/1");
  for (const auto& c : j["classes"]) EXPECT_EQ(c.size(), 1u);
}

TEST(Cli, MateCheckStrict) {
  auto r = invoke({"mate-check", "--theta-w", "1/3", "--theta-b", "1/3", "--strict"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(parse(r.out)["verdict"], "MooreObstructed");
  r = invoke({"mate-check", "--theta-w", "1/3", "--theta-b", "1/7", "--strict"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse(r.out)["verdict"], "NoObstructionFound");
  r = invoke({"mate-check", "--theta-w", "1/3", "--theta-b", "1/3"});
  EXPECT_EQ(r.code, 0);
}

TEST(Cli, RayClasses) {
  const auto r = invoke({"ray-classes", "--theta-w", "1/3", "--theta-b", "1/3", "--start", "1/3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse(r.out)["schema"], "mating-forge/ray-classes/1");
}

TEST(Cli, ThurstonMatrix) {
  const auto path = write_file("pullback.json", R"({"curves":[{"components":[{"target":1,"degree":1}]},)"
                                                R"({"components":[{"target":0,"degree":2}]}]})");
  auto r = invoke({"thurston-matrix", "--pullback", path, "--strict"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_NEAR(j["leading_eigenvalue"].get<double>(), 1 / std::sqrt(2.0), 1e-12);
  const auto obstructed = write_file("obstructed.json", R"({"curves":[{"components":[{"target":0,"degree":1}]}]})");
  r = invoke({"thurston-matrix", "--pullback", obstructed, "--strict"});
  EXPECT_EQ(r.code, 1);
  const auto bad = write_file("bad.json", R"({"curves":[{"components":[{"target":4,"degree":1}]}]})");
  EXPECT_EQ(invoke({"thurston-matrix", "--pullback", bad}).code, 2);
}

TEST(Cli, Orbifold) {
  auto r = invoke({"orbifold", "--preset", "z2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse(r.out)["chi"], "0");
  const auto path = write_file("portrait.json", R"({"degree":2,"points":[)"
                                                R"({"name":"0","next":"i","local_degree":2},)"
                                                R"({"name":"i","next":"i-1","local_degree":1},)"
                                                R"({"name":"i-1","next":"-i","local_degree":1},)"
                                                R"({"name":"-i","next":"i-1","local_degree":1},)"
                                                R"({"name":"inf","next":"inf","local_degree":2}]})");
  r = invoke({"orbifold", "--portrait", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse(r.out)["chi"], "-1/2");
  EXPECT_EQ(invoke({"orbifold", "--preset", "nonsense"}).code, 2);
}

TEST(Cli, SlowMateSquare) {
  const auto r = invoke({"slow-mate", "--cw", "0,0", "--cb", "0,0", "--t0", "4", "--tmin", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_EQ(j["schema"], "mating-forge/slow-mate/1");
  EXPECT_EQ(j["verdict"]["kind"], "Converged");
}

TEST(Cli, SlowMateNegativeParameterAndFrames) {
  const auto dir = temp_dir() / "frames";
  const auto report = (temp_dir() / "movie.json").string();
  const auto r = invoke({"slow-mate", "--cw", "-1,0", "--cb", "0,0", "--t0", "4", "--tmin", "1", "--frames", dir.string(),
                         "--width", "16", "--height", "12", "--report", report});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "frame_0000.ppm"));
  EXPECT_EQ(std::filesystem::file_size(dir / "frame_0000.ppm"), std::string("P6\n16 12\n255\n").size() + 16 * 12 * 3);
  std::ifstream f(report);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["frames"].size(), 3u);
}

TEST(Cli, SlowMateStrictDegenerates) {
  const auto r = invoke({"slow-mate", "--cw", "-1,0", "--cb", "-1,0", "--t0", "8", "--tmin", "1e-6", "--strict"});
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_EQ(parse(r.out)["verdict"]["kind"], "Degenerated");
}

TEST(Cli, ByteIdenticalOutput) {
  const std::vector<std::vector<std::string>> cases{
      {"lamination", "--theta", "1/7", "--depth", "3"},
      {"mate-check", "--theta-w", "1/7", "--theta-b", "3/7"},
      {"orbifold", "--preset", "rabbit"},
      {"slow-mate", "--cw", "-1,0", "--cb", "0,0", "--t0", "8", "--tmin", "0.1"}};
  for (const auto& args : cases) {
    const auto a = invoke(args), b = invoke(args);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, UsageErrors) {
  auto r = invoke({"lamination", "--theta", "1/7", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"lamination", "--theta", "1/0"}).code, 2);
  EXPECT_EQ(invoke({"lamination", "--theta", "1/7", "--depth", "-3"}).code, 2);
  EXPECT_EQ(invoke({"slow-mate", "--cw", "0.5,0"}).code, 2);
  EXPECT_EQ(invoke({"slow-mate", "--t0", "1"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, InputFileErrors) {
  const auto r = invoke({"thurston-matrix", "--pullback", (temp_dir() / "missing.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  const auto broken = write_file("broken.json", "{\"curves\": [");
  EXPECT_EQ(invoke({"thurston-matrix", "--pullback", broken}).code, 2);
}

TEST(Cli, BudgetFailures) {
  const auto r = invoke({"lamination", "--theta", "1/7", "--depth", "8", "--max-universe", "10"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}
