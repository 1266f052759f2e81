#include "hypertoric/cli.hpp"
#include "hypertoric/errors.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

using namespace hypertoric;
using cli::Json;

namespace {

const std::string kInputs = HYPERTORIC_INPUTS;
const std::string kTool = HYPERTORIC_TOOL;

cli::InputSpec input(const std::string& name) { return cli::read_input(kInputs + "/" + name + ".json"); }

bool check_passed(const Json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return c["pass"].get<bool>();
  ADD_FAILURE() << "no check named " << name;
  return false;
}

int run_tool(const std::string& args, std::string* out = nullptr) {
  const std::string path = ::testing::TempDir() + "cli_out.json";
  int status = std::system((kTool + " " + args + " > " + path + " 2>/dev/null").c_str());
  if (out) {
    std::ifstream f(path);
    out->assign(std::istreambuf_iterator<char>(f), {});
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

} // namespace

TEST(Input, SchemaErrors) {
  EXPECT_THROW(cli::parse_input("{\"a\": [[1, 1]"), cli::InputError);
  EXPECT_THROW(cli::parse_input("[1, 2]"), cli::InputError);
  EXPECT_THROW(cli::parse_input(R"({"a": [[1, 1]], "theta_hat": [0]})"), cli::InputError);
  EXPECT_THROW(cli::parse_input(R"({"a": [[1, 1], [1]], "theta_hat": [0, 1]})"), cli::InputError);
  EXPECT_THROW(cli::parse_input(R"({"a": [[1, 1.5]], "theta_hat": [0, 1]})"), cli::InputError);
  EXPECT_THROW(cli::parse_input(R"({"a": [[1, 1]], "theta_hat": [0, 1], "extra": 1})"), cli::InputError);
  EXPECT_THROW(cli::parse_input(R"({"a": [[1, 1]], "theta_hat": [0, 1], "params": {"hbar": 0.3}})"),
               cli::InputError);
  EXPECT_THROW(cli::parse_input(R"({"a": [[1, 1]], "theta_hat": [0, 1], "params": {"c": ["1/2", "1"]}})"),
               cli::InputError);
}

TEST(Input, ParamsAndDigest) {
  auto a = cli::parse_input(R"({"a": [[1, -1]], "theta_hat": [1, 0],
                               "params": {"hbar": "1/3", "c": [2], "q": [0.5, [1, 2]]}})");
  auto b = cli::parse_input(R"({"theta_hat":[1,0],"a":[[1,-1]],"params":{"q":[0.5,[1,2]],"c":[2],"hbar":"1/3"}})");
  EXPECT_EQ(*a.hbar, Rational(1, 3));
  EXPECT_EQ((*a.c)[0], 2);
  EXPECT_EQ((*a.q)[1], std::complex<double>(1, 2));
  EXPECT_EQ(a.digest, b.digest);
}

TEST(Check, CotangentP1) {
  auto r = cli::cmd_check(input("cotangent_p1"), {});
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.json["results"]["classification"]["smooth"].get<bool>());
  EXPECT_EQ(r.json["results"]["circuits"].size(), 1u);
  EXPECT_EQ(r.json["results"]["vertices"].size(), 2u);
}

TEST(Check, TwoPlaneCircuits) {
  auto r = cli::cmd_check(input("two_plane"), {});
  std::set<std::string> got;
  for (const auto& c : r.json["results"]["circuits"]) {
    std::string s;
    for (const auto& i : c["support"]) s += std::to_string(i.get<int>());
    got.insert(s);
  }
  EXPECT_EQ(got, (std::set<std::string>{"12", "34", "135", "145", "235", "245"}));
}

TEST(Ring, CotangentP1Quantum) {
  auto r = cli::cmd_ring(input("cotangent_p1"), {});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.json["results"]["relations"][0], "u1*u2 - q^(1,1)*(h-u1)*(h-u2)");
  EXPECT_TRUE(check_passed(r.json, "q_zero_gives_classical_ideal"));
}

TEST(Ring, ClassicalIsQuantumAtZero) {
  cli::RunOptions classical;
  classical.mode = RingMode::Classical;
  auto c = cli::cmd_ring(input("a_tilde1"), classical);
  auto q = cli::cmd_ring(input("a_tilde1"), {});
  EXPECT_EQ(c.json["results"]["relations"][0], "u1*(h-u2)");
  EXPECT_EQ(q.json["results"]["relations"][0], "u1*(h-u2) - q^(1,-1)*(h-u1)*u2");
  EXPECT_EQ(c.json["results"]["relations"][1], q.json["results"]["relations"][1]);
}

TEST(Ring, TwoPlaneRank) {
  auto r = cli::cmd_ring(input("two_plane"), {});
  EXPECT_EQ(r.json["results"]["rank"], 8);
  EXPECT_TRUE(r.pass);
}

TEST(Gkz, Operators) {
  auto r = cli::cmd_gkz(input("cotangent_p1"), {});
  EXPECT_TRUE(r.pass);
  std::set<std::string> texts;
  for (const auto& op : r.json["results"]["operators"]) texts.insert(op["text"]);
  EXPECT_TRUE(texts.count("D1 - D2 - c"));
  EXPECT_TRUE(texts.count("D1*D2 - q^(1,1)*(h-D1)*(h-D2)"));
  auto t = cli::cmd_gkz(input("two_plane"), {});
  EXPECT_EQ(t.json["results"]["operators"].size(), 8u);
  EXPECT_TRUE(t.pass);
}

TEST(MirrorVerify, DimensionOne) {
  for (const std::string name : {"cotangent_p1", "a_tilde1"}) {
    auto r = cli::cmd_mirror_verify(input(name), {});
    EXPECT_TRUE(r.pass) << r.json.dump(2);
    EXPECT_EQ(r.json["results"]["periods"]["period_rank"], 2);
  }
}

TEST(MirrorVerify, DimensionTwoSpectra) {
  auto r = cli::cmd_mirror_verify(input("cotangent_p2"), {});
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.json["results"]["periods"].contains("skipped"));
  EXPECT_EQ(r.json["results"]["critical_points"].size(), 3u);
}

TEST(MirrorVerify, NeedsParams) {
  EXPECT_THROW(cli::cmd_mirror_verify(input("two_plane"), {}), cli::InputError);
}

TEST(Resonance, Examples) {
  auto in = input("cotangent_p1");
  auto generic = cli::cmd_resonance(in, {});
  EXPECT_TRUE(generic.json["results"]["non_resonant"].get<bool>());
  EXPECT_EQ(generic.json["results"]["minimal_saturated"].size(), 4u);
  cli::RunOptions zero;
  zero.hbar = 0;
  zero.c = RatVector{0};
  auto z = cli::cmd_resonance(in, zero);
  EXPECT_FALSE(z.json["results"]["non_resonant"].get<bool>());
  EXPECT_TRUE(check_passed(z.json, "witness_verifies"));
  cli::RunOptions integral;
  integral.hbar = 1;
  integral.c = RatVector{2};
  EXPECT_FALSE(cli::cmd_resonance(in, integral).json["results"]["non_resonant"].get<bool>());
}

TEST(Tool, ExitCodes) {
  EXPECT_EQ(run_tool("check " + kInputs + "/two_plane.json"), 0);
  EXPECT_EQ(run_tool("check " + write_temp("bad.json", "{\"a\": [[1, 1]")), 2);
  EXPECT_EQ(run_tool("check " + kInputs + "/missing.json"), 2);
  EXPECT_EQ(run_tool("frobnicate"), 2);
  EXPECT_EQ(run_tool("resonance --hbar x/2 --c 1 " + kInputs + "/a_tilde1.json"), 2);
  // not smooth: classification works, the ring does not exist
  auto nonsmooth = write_temp("ns.json", R"({"a": [[1, 2]], "theta_hat": [0, 1]})");
  EXPECT_EQ(run_tool("check " + nonsmooth), 0);
  EXPECT_EQ(run_tool("ring " + nonsmooth), 3);
  // not surjective: the check flag fails
  EXPECT_EQ(run_tool("check " + write_temp("nsurj.json", R"({"a": [[2, 2]], "theta_hat": [0, 1]})")), 1);
}

TEST(Tool, ReportsAreDeterministic) {
  auto strip = [](const std::string& text) {
    auto j = Json::parse(text);
    EXPECT_TRUE(j.contains("timestamp"));
    j.erase("timestamp");
    return j.dump();
  };
  for (const std::string args : {"mirror-verify --seed 3 " + kInputs + "/cotangent_p2.json",
                                 "ring " + kInputs + "/two_plane.json",
                                 "resonance --threads 2 --hbar 1 --c 2,1/2 " + kInputs + "/two_plane.json"}) {
    std::string a, b;
    ASSERT_EQ(run_tool(args, &a), 0) << args;
    ASSERT_EQ(run_tool(args, &b), 0) << args;
    EXPECT_EQ(strip(a), strip(b)) << args;
  }
}

TEST(Tool, ExitCodeFollowsChecks) {
  std::string out;
  int code = run_tool("check " + write_temp("nsurj2.json", R"({"a": [[2, 2]], "theta_hat": [0, 1]})"), &out);
  EXPECT_EQ(code, 1);
  EXPECT_FALSE(Json::parse(out)["pass"].get<bool>());
}
