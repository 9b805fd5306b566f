#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "arcroute/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = ARCROUTE_FIXTURES;
const std::string kCli = ARCROUTE_CLI;

struct Run {
  int exit = -1;
  std::string out;
};

Run run(const std::string& args) {
  Run r;
  FILE* p = popen((kCli + " " + args + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (auto n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int status = pclose(p);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("arcroute_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { arcroute::write_file(dir_ / name, text); }

  fs::path dir_;
};

const std::string kConfig = (kFixtures / "synth2000" / "config.json").string();
const std::string kSampleAll = (kFixtures / "synth2000" / "sample_all.tsv").string();

}  // namespace

TEST_F(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("sample random /nonexistent/universe.txt --n 5 --seed 1").exit, 2);
  EXPECT_EQ(run("sample random " + kSampleAll).exit, 2);  // missing --n and --seed
  write("empty.tsv", "");
  EXPECT_EQ(run("profile --config " + kConfig + " " + path("empty.tsv") + " -o " + path("out")).exit, 2);
  EXPECT_EQ(run("evaluate --corpora /nonexistent/corpora --seed 1 " + kSampleAll + " -o " + path("ev")).exit, 2);
  auto golden = (kFixtures / "golden" / "profiles_all.json").string();
  EXPECT_EQ(run("route --profile " + golden + " --k 30 http://x.cat").exit, 2);
  EXPECT_EQ(run("route --profile " + golden + " --k 3 mailto:a@b.c").exit, 2);
  EXPECT_EQ(run("nonsense").exit, 2);
}

TEST_F(Cli, SampleRandom) {
  std::string universe;
  for (int i = 0; i < 10000; ++i) universe += "http://host" + std::to_string(i) + ".org/page\n";
  write("universe.txt", universe);
  auto a = run("sample random " + path("universe.txt") + " --n 1000 --seed 5");
  ASSERT_EQ(a.exit, 0);
  EXPECT_EQ(lines(a.out), 1000u);
  EXPECT_EQ(run("sample random " + path("universe.txt") + " --n 1000 --seed 5").out, a.out);
  EXPECT_EQ(a.out.find("/page"), std::string::npos);
  ASSERT_EQ(run("sample random " + path("universe.txt") + " --n 20000 --seed 5 -o " + path("s.tsv")).exit, 0);
  EXPECT_EQ(lines(arcroute::read_file(path("s.tsv"))), 10000u);
}

TEST_F(Cli, SampleOtherSources) {
  auto tld = run("sample tld " + (kFixtures / "synth2000" / "universe.txt").string() + " --tlds is,cat,zz --seed 2");
  EXPECT_EQ(tld.exit, 0);
  EXPECT_GT(lines(tld.out), 0u);
  auto lang = run("sample language " + (kFixtures / "synth2000" / "universe_lang.tsv").string() + " --per-language 5 --seed 2");
  EXPECT_EQ(lang.exit, 0);
  EXPECT_GT(lines(lang.out), 0u);
  auto ft = run("sample fulltext " + (kFixtures / "synth2000" / "fulltext.tsv").string());
  EXPECT_EQ(ft.exit, 0);
  EXPECT_GT(lines(ft.out), 100u);
  write("access.log",
        "1.2.3.4 - - [22/Feb/2012:10:00:00 +0000] \"GET /web/20120222000000/http://x.org/p HTTP/1.1\" 200 5\n"
        "1.2.3.4 - - [22/Feb/2012:10:00:00 +0000] \"GET /robots.txt HTTP/1.1\" 200 5\n");
  auto logs = run("sample logs " + path("access.log") + " --n 10 --seed 1");
  EXPECT_EQ(logs.exit, 0);
  EXPECT_EQ(logs.out, "http://x.org\t\t\t\n");
  write("robots.log", "1.2.3.4 - - [22/Feb/2012:10:00:00 +0000] \"GET /robots.txt HTTP/1.1\" 200 5\n");
  EXPECT_EQ(run("sample logs " + path("robots.log") + " --n 10 --seed 1").exit, 2);
}

TEST_F(Cli, ProfileMatchesGoldenAndRoutes) {
  ASSERT_EQ(run("profile --config " + kConfig + " " + kSampleAll + " -o " + path("p")).exit, 0);
  auto golden = arcroute::read_file(kFixtures / "golden" / "profiles_all.json");
  EXPECT_EQ(arcroute::read_file(path("p/profiles.json")), golden);
  for (auto f : {"coverage.tsv", "tld_coverage.tsv", "tld_distribution.tsv", "language.tsv", "growth.tsv"})
    EXPECT_TRUE(fs::exists(path(std::string("p/") + f))) << f;

  auto r = run("route --profile " + path("p/profiles.json") + " --k 3 http://www.example.cat/page");
  ASSERT_EQ(r.exit, 0);
  EXPECT_EQ(lines(r.out), 3u);
  EXPECT_EQ(r.out.rfind("http://www.example.cat\tcat\t1\tCAT\t", 0), 0u) << r.out;

  auto fb = run("route --profile " + path("p/profiles.json") + " --k 2 http://unknown.zz");
  ASSERT_EQ(fb.exit, 0);
  EXPECT_NE(fb.out.find("# fallback"), std::string::npos);
}

TEST_F(Cli, ProfileFulltextWritesCrossCoverage) {
  auto ft = (kFixtures / "synth2000" / "fulltext.tsv").string();
  ASSERT_EQ(run("profile --config " + kConfig + " --fulltext " + ft + " -o " + path("p")).exit, 0);
  auto cross = arcroute::read_file(path("p/cross_coverage.tsv"));
  EXPECT_EQ(lines(cross), 13u);  // header + 12 archives
}

TEST_F(Cli, SynthThenEvaluateIsDeterministic) {
  ASSERT_EQ(run("synth --seed 3 --universe-size 400 --out " + path("w")).exit, 0);
  for (auto f : {"manifest.json", "universe.txt", "universe_lang.tsv", "fulltext.tsv", "config.json", "corpora/IA.tsv"})
    EXPECT_TRUE(fs::exists(path(std::string("w/") + f))) << f;
  ASSERT_EQ(run("sample random " + path("w/universe.txt") + " --n 200 --seed 4 -o " + path("s.tsv")).exit, 0);
  auto args = " --config " + path("w/config.json") + " --k 3,6 --exclude IA --seed 42 " + path("s.tsv");
  ASSERT_EQ(run("evaluate" + args + " -o " + path("e1")).exit, 0);
  ASSERT_EQ(run("evaluate" + args + " --jobs 4 -o " + path("e2")).exit, 0);
  for (auto f : {"report.json", "report_excluding_IA.json", "summary.tsv", "baseline_summary.tsv", "histogram.tsv"}) {
    ASSERT_TRUE(fs::exists(path(std::string("e1/") + f))) << f;
    EXPECT_EQ(arcroute::read_file(path(std::string("e1/") + f)), arcroute::read_file(path(std::string("e2/") + f))) << f;
  }
  auto summary = arcroute::read_file(path("e1/summary.tsv"));
  EXPECT_NE(summary.find("\n3\tIA\tall\t"), std::string::npos);
  EXPECT_NE(summary.find("\n6\t-\tall\t"), std::string::npos);
  EXPECT_EQ(run("evaluate --corpora " + path("w/corpora") + " --seed 42 --k 3 " + path("s.tsv") + " -o " + path("e3")).exit, 0);
}
