#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "zetachain/io.hpp"

namespace fs = std::filesystem;
using namespace zetachain;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zetachain_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(ZETACHAIN_CLI) + " " + args + " 2>/dev/null >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> csv_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> v;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) v.push_back(f.empty() ? 0.0 : std::stod(f));
  return v;
}

}  // namespace

TEST(Cli, IfsBuildValidates) {
  const auto dir = scratch("ifs");
  ASSERT_EQ(run("ifs build --n 1,1,1 --ell 10 --kind flow -o " + dir.string()), 0);
  const auto s = io::parse_scheme_json(io::read_file((dir / "ifs.json").string()));
  EXPECT_TRUE(validate_scheme(s).ifs_valid());
  const auto meta = nlohmann::json::parse(io::read_file((dir / "run.json").string()));
  for (const char* key : {"command", "args", "scheme", "order", "tolerances", "wall_ms"}) EXPECT_TRUE(meta.contains(key)) << key;
  EXPECT_EQ(run("ifs validate --input " + (dir / "ifs.json").string() + " -o " + dir.string()), 0);
}

TEST(Cli, PolyRoots) {
  const auto dir = scratch("poly");
  ASSERT_EQ(run("poly roots --n 1,1,1 -o " + dir.string()), 0);
  const auto l = csv_lines(dir / "roots.csv");
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "# zetachain poly roots --n 1,1,1");
  const auto a = fields(l[2]), b = fields(l[3]);
  EXPECT_NEAR(a[0], 0.25, 1e-12);
  EXPECT_EQ(a[2], 1.0);
  EXPECT_NEAR(b[0], 1.0, 1e-12);
  EXPECT_EQ(b[2], 2.0);
}

TEST(Cli, ResonancesFindLeadingZero) {
  const auto dir = scratch("res");
  ASSERT_EQ(run("resonances find --n 1,1,1 --ell 12 --window 0.05,0.2,-0.1,0.1 -o " + dir.string()), 0);
  const auto l = csv_lines(dir / "resonances.csv");
  ASSERT_GE(l.size(), 3u);
  EXPECT_EQ(l[0].rfind("# zetachain resonances find ", 0), 0u);
  bool hit = false;
  for (std::size_t k = 2; k < l.size(); ++k) {
    const auto f = fields(l[k]);
    hit = hit || std::abs(std::complex<double>(f[0], f[1]) - 0.115525) < 1e-4;
  }
  EXPECT_TRUE(hit);
}

TEST(Cli, ByteIdenticalReruns) {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  for (const auto& d : {a, b}) {
    ASSERT_EQ(run("words database --n 4,5,6 --ell 8 --order 8 -o " + d.string()), 0);
    ASSERT_EQ(run("resonances find --n 1,1,1 --ell 10 --window -0.2,0.2,0,2 --threads 2 -o " + d.string()), 0);
    ASSERT_EQ(run("poly chains --n 4,4,5 --window -2,2,-4,4 -o " + d.string()), 0);
  }
  for (const char* f : {"database.csv", "resonances.csv", "chains.csv"}) {
    EXPECT_EQ(io::read_file((a / f).string()), io::read_file((b / f).string())) << f;
  }
}

TEST(Cli, EveryOutputStartsWithHeader) {
  const auto dir = scratch("headers");
  ASSERT_EQ(run("zeta eval --n 1,1,1 --ell 10 --s 0.5,1 -o " + dir.string()), 0);
  ASSERT_EQ(run("poly build --n 4,5,6 -o " + dir.string()), 0);
  ASSERT_EQ(run("words spectrum --n 1,1,1 --ell 10 --lmax 30 -o " + dir.string()), 0);
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string body = io::read_file(e.path().string());
    if (e.path().extension() == ".json") {
      EXPECT_EQ(nlohmann::json::parse(body).at("generator").get<std::string>().rfind("# zetachain ", 0), 0u);
    } else {
      EXPECT_EQ(body.rfind("# zetachain ", 0), 0u) << e.path();
    }
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(run("nonsense"), 2);
  EXPECT_EQ(run("ifs build --n 1,1 --ell 10 -o " + dir.string()), 2);
  EXPECT_EQ(run("ifs build --n 1,1,3 --ell 10 -o " + dir.string()), 2);
  EXPECT_EQ(run("ifs build --n 1,1,1 --ell 6 -o " + dir.string()), 2);
  EXPECT_EQ(run("poly build --n 0,1,1 -o " + dir.string()), 2);
  EXPECT_EQ(run("resonances find --n 1,1,1 --ell 10 --window 0.5,0.1,0,1 -o " + dir.string()), 2);
  EXPECT_EQ(run("resonances delta --n 1,1,1 --ell 12 --z 0 -o " + dir.string()), 3);
}
