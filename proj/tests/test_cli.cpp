#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "archweave/cli.hpp"
#include "support.hpp"

using namespace archweave;
using archweave::testing::scenario_path;
using archweave::testing::slurp;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("archweave_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_input(const fs::path& dir, const std::string& name, const std::string& text) {
  auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string golden_with(const std::string& extra) { return slurp(scenario_path("office.arch")) + extra; }

}  // namespace

TEST(CliApply, GoldenScenario) {
  auto out = fresh_dir("golden");
  auto r = cli({"apply", scenario_path("office.arch"), "-o", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("13/13 rules fired"), std::string::npos) << r.out;
  std::size_t puml = 0;
  for (const auto& entry : fs::directory_iterator(out)) puml += entry.path().extension() == ".puml";
  EXPECT_EQ(puml, 11u);
  EXPECT_TRUE(fs::exists(out / "office.arch"));
  EXPECT_TRUE(fs::exists(out / "office.json"));
  auto summary = slurp((out / "summary.txt").string());
  EXPECT_NE(summary.find("passes: 2"), std::string::npos);
  EXPECT_NE(summary.find("diagrams: 11 (created RBAUCSZYQM)"), std::string::npos);
  auto reread = parse_model(slurp((out / "office.arch").string()));
  EXPECT_TRUE(check(reread).ok);
}

TEST(CliApply, FormatSelection) {
  auto out = fresh_dir("format");
  auto r = cli({"apply", scenario_path("composite_c1.arch"), "-o", out.string(), "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "composite_c1.json"));
  EXPECT_FALSE(fs::exists(out / "composite_c1.arch"));
  EXPECT_FALSE(fs::exists(out / "R_business_use_case_process_decomposition_diagram.puml"));
  EXPECT_EQ(cli({"apply", scenario_path("composite_c1.arch"), "-o", out.string(), "--format", "svg"}).code, 1);
}

TEST(CliApply, TraceFlag) {
  auto out = fresh_dir("trace");
  auto r = cli({"apply", scenario_path("composite_c1.arch"), "-o", out.string(), "--trace"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pass 1 Xevi(:Decision)Ri(:Request)v(1.Request_service)i(:Decision) @1 ->"), std::string::npos)
      << r.out;
}

TEST(CliApply, MisspelledPatternIsAnError) {
  auto dir = fresh_dir("misspelled");
  auto in = write_input(dir, "seed.arch",
                        slurp(scenario_path("business_actors.arch")) +
                            "rule on B usecase \"1.Request_service\": BauApv({Ofice})\n");
  auto r = cli({"apply", in.string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("pattern not found"), std::string::npos) << r.err;
}

TEST(CliApply, NeverFiredAttachment) {
  auto dir = fresh_dir("never");
  auto in = write_input(dir, "seed.arch", golden_with("rule on R activity \"9.Nothing\": RvBu\n"));
  auto r = cli({"apply", in.string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("13/14 rules fired"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("never fired: R v \"9.Nothing\": RvBu"), std::string::npos) << r.out;
}

TEST(CliApply, SyntaxErrorIsLocated) {
  auto dir = fresh_dir("syntax");
  auto in = write_input(dir, "seed.arch", "architecture \"A\"\ndiagram X \"C\" {\n  gadget \"x\"\n}\n");
  auto r = cli({"apply", in.string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("3:3"), std::string::npos) << r.err;
}

TEST(CliApply, PassLimit) {
  auto out = fresh_dir("passes");
  auto r = cli({"apply", scenario_path("office.arch"), "-o", out.string(), "--max-passes", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("non-termination"), std::string::npos) << r.err;
}

TEST(CliApply, MissingInput) {
  EXPECT_EQ(cli({"apply", "/nonexistent/seed.arch", "-o", fresh_dir("missing").string()}).code, 1);
  EXPECT_EQ(cli({"apply", scenario_path("office.arch")}).code, 1);
}

TEST(CliCheck, GoldenIsConsistent) {
  auto r = cli({"check", scenario_path("office.arch")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("consistent\n", 0), 0u) << r.out;
}

TEST(CliCheck, OrphanIsReported) {
  auto dir = fresh_dir("orphan");
  auto in = write_input(dir, "seed.arch", golden_with("diagram C \"Business Class Diagram\" {\n  class \"Invoice\"\n}\n"));
  auto r = cli({"check", in.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("orphan C"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c Invoice"), std::string::npos) << r.out;
}

TEST(CliCheck, JsonOutput) {
  auto r = cli({"check", scenario_path("office.arch"), "--format", "json"});
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["ok"], true);
}

TEST(CliCheck, EmptyFile) {
  auto dir = fresh_dir("empty");
  auto in = write_input(dir, "empty.arch", "");
  EXPECT_EQ(cli({"check", in.string()}).code, 1);
  auto header_only = write_input(dir, "header.arch", "architecture \"A\"\n");
  EXPECT_EQ(cli({"check", header_only.string()}).code, 1);
}

TEST(CliRules, ListIncludesIndices) {
  auto r = cli({"rules", "list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("C4 R2.5a  BauA(pv+)+"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("R1.22  (no notation)"), std::string::npos) << r.out;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 24);
}

TEST(CliExplain, ShowsWalk) {
  auto r = cli({"explain", "R3.12b"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("source S[r, s]\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("target Z[(v+ i+)+]\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("group plus"), std::string::npos) << r.out;
}

TEST(CliExplain, UnknownAndStub) {
  auto r = cli({"explain", "R9.9"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("R9.9"), std::string::npos);
  EXPECT_EQ(cli({"explain", "R1.5a"}).code, 0);
}

TEST(CliPatterns, ListAndEnvironment) {
  auto r = cli({"patterns", "list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1 A Office"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("3 Q RequestDownloading"), std::string::npos) << r.out;

  auto dir = fresh_dir("env");
  write_input(dir, "tiny.pat",
              "pattern 1 \"Tiny\"\nplaceholders { p: \"Actor1\"; }\ndiagram A \"Tiny\" {\n  partition \"Actor1\"\n}\n");
  ::setenv("ARCHWEAVE_PATTERNS", dir.c_str(), 1);
  auto with_env = cli({"patterns", "list"});
  ::unsetenv("ARCHWEAVE_PATTERNS");
  EXPECT_NE(with_env.out.find("1 A Tiny"), std::string::npos) << with_env.out;
  auto flag = cli({"patterns", "list", "--patterns", dir.string()});
  EXPECT_NE(flag.out.find("1 A Tiny"), std::string::npos);
  EXPECT_EQ(cli({"patterns", "list", "--patterns", (dir / "nope").string()}).code, 1);
}

TEST(CliUsage, BadCommands) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"rules", "show"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}
