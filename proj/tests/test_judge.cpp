#include <gtest/gtest.h>

#include "debugta/judge.hpp"
#include "support.hpp"

using namespace debugta;
using namespace debugta::judge;

namespace {

corpus::Problem echo_problem(int tests = 3) {
    corpus::Problem p;
    p.id = "echo";
    p.time_limit_ms = 1000;
    for (int i = 1; i <= tests; ++i) p.tests.push_back({i, std::to_string(i) + "\n", std::to_string(i) + "\n"});
    return p;
}

constexpr const char* kEcho = "#include <cstdio>\nint main(){int x; if(scanf(\"%d\",&x)==1) printf(\"%d\\n\",x);}\n";

}  // namespace

TEST(Compile, MinimalProgramSucceeds) {
    const auto r = testsupport::shared_judge().compile("int main(){return 0;}");
    EXPECT_TRUE(r.success);
    EXPECT_TRUE(r.messages.empty());
    EXPECT_EQ(r.compiler_exit_code, 0);
}

TEST(Compile, MissingSemicolonReportsIt) {
    const auto r = testsupport::shared_judge().compile("int main(){return 0}");
    EXPECT_FALSE(r.success);
    EXPECT_FALSE(r.messages.empty());
    EXPECT_NE(r.messages.find("';'"), std::string::npos) << r.messages;
    EXPECT_NE(r.messages.find("main.cpp:1"), std::string::npos) << r.messages;
}

TEST(Compile, EmptySourceFails) {
    const auto r = testsupport::shared_judge().compile("   \n");
    EXPECT_FALSE(r.success);
    EXPECT_FALSE(r.messages.empty());
}

TEST(Compile, WarningsKeptSeparately) {
    JudgeConfig cfg;
    cfg.compiler_cmd = {"g++", "-O0", "-Wall"};
    Judge j(cfg);
    const auto r = j.compile("int main(){int unused; return 0;}");
    EXPECT_TRUE(r.success);
    EXPECT_TRUE(r.messages.empty());
    EXPECT_NE(r.warnings.find("unused"), std::string::npos);
}

TEST(Compile, MissingCompilerIsEnvironmentError) {
    JudgeConfig cfg;
    cfg.compiler_cmd = {"definitely-not-a-compiler-xyz"};
    Judge j(cfg);
    EXPECT_THROW(j.compile("int main(){}"), EnvironmentError);
}

TEST(Compile, TimeoutIsCompileError) {
    JudgeConfig cfg;
    cfg.compiler_cmd = {"sh", "-c", "sleep 5", "sh"};
    Judge j(cfg);
    const auto r = j.compile("int main(){}", CompileLimits{300});
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.messages, "compile timeout");
}

TEST(RunTests, AcceptsCorrectProgram) {
    const auto r = testsupport::shared_judge().run_tests(kEcho, echo_problem());
    EXPECT_TRUE(r.ac_all);
    EXPECT_DOUBLE_EQ(r.ac_rate, 100.0);
    ASSERT_EQ(r.per_test.size(), 3u);
    for (const auto& t : r.per_test) EXPECT_EQ(t.verdict, Verdict::AC);
}

TEST(RunTests, CompileFailureIsAllCE) {
    const auto r = testsupport::shared_judge().run_tests("int main(){return 0}", echo_problem(4));
    ASSERT_EQ(r.per_test.size(), 4u);
    for (const auto& t : r.per_test) EXPECT_EQ(t.verdict, Verdict::CE);
    EXPECT_DOUBLE_EQ(r.ac_rate, 0.0);
    EXPECT_FALSE(r.ac_all);
}

TEST(RunTests, InfiniteLoopIsTLE) {
    const auto r = testsupport::shared_judge().run_tests("int main(){while(1);}", echo_problem(2));
    for (const auto& t : r.per_test) EXPECT_EQ(t.verdict, Verdict::TLE);
}

TEST(RunTests, CrashIsRE) {
    const auto r = testsupport::shared_judge().run_tests("#include <cstdlib>\nint main(){std::abort();}", echo_problem(1));
    EXPECT_EQ(r.per_test[0].verdict, Verdict::RE);
    const auto r2 = testsupport::shared_judge().run_tests("int main(){return 3;}", echo_problem(1));
    EXPECT_EQ(r2.per_test[0].verdict, Verdict::RE);
}

TEST(RunTests, MemoryHogIsMLE) {
    auto p = echo_problem(1);
    p.memory_limit_kb = 64 * 1024;
    const auto r = testsupport::shared_judge().run_tests(
        "#include <vector>\n#include <cstdio>\nint main(){std::vector<char> v(512u<<20, 1); std::printf(\"%d\", v[12345]);}", p);
    EXPECT_EQ(r.per_test[0].verdict, Verdict::MLE);
}

TEST(RunTests, WrongOutputIsWA) {
    const auto r = testsupport::shared_judge().run_tests("#include <cstdio>\nint main(){puts(\"1\");}", echo_problem(3));
    EXPECT_EQ(r.per_test[0].verdict, Verdict::AC);
    EXPECT_EQ(r.per_test[1].verdict, Verdict::WA);
    EXPECT_NEAR(r.ac_rate, 100.0 / 3.0, 1e-9);
}

TEST(RunTests, NetworkAndForkAreDenied) {
    const char* prog =
        "#include <sys/socket.h>\n#include <unistd.h>\n#include <cstdio>\n"
        "int main(){int s=socket(AF_INET,SOCK_STREAM,0); pid_t p=fork(); if(p==0) return 0;"
        " std::printf(\"%d %d\\n\", s<0, p<0);}\n";
    corpus::Problem p = echo_problem(1);
    p.tests[0].expected_output = "1 1\n";
    const auto r = testsupport::shared_judge().run_tests(prog, p);
    EXPECT_EQ(r.per_test[0].verdict, Verdict::AC) << r.per_test[0].output_excerpt;
}

TEST(RunTests, ThreadsStillWork) {
    const char* prog =
        "#include <thread>\n#include <cstdio>\n"
        "int main(){int v=0; std::thread t([&]{v=7;}); t.join(); std::printf(\"%d\\n\", v);}\n";
    corpus::Problem p = echo_problem(1);
    p.tests[0].expected_output = "7\n";
    const auto r = testsupport::shared_judge().run_tests(prog, p);
    EXPECT_EQ(r.per_test[0].verdict, Verdict::AC) << r.per_test[0].output_excerpt;
}

TEST(RunTests, IsDeterministic) {
    const auto a = testsupport::shared_judge().run_tests(kEcho, echo_problem());
    const auto b = testsupport::shared_judge().run_tests(kEcho, echo_problem());
    EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
}

TEST(Score, InvariantsHold) {
    std::vector<TestResult> tests{{1, Verdict::AC, 0, ""}, {2, Verdict::WA, 0, ""}, {3, Verdict::AC, 0, ""},
                                  {4, Verdict::TLE, 0, ""}};
    const auto r = score(tests);
    EXPECT_DOUBLE_EQ(r.ac_rate, 50.0);
    EXPECT_FALSE(r.ac_all);
    const auto all = score({{1, Verdict::AC, 0, ""}});
    EXPECT_TRUE(all.ac_all);
    EXPECT_DOUBLE_EQ(all.ac_rate, 100.0);
}

TEST(Normalize, TrailingWhitespaceAndBlankLines) {
    EXPECT_EQ(normalize_output("1 2  \n3\t\n\n\n"), normalize_output("1 2\n3"));
    EXPECT_NE(normalize_output(" 1\n"), normalize_output("1\n"));
    EXPECT_EQ(normalize_output("a\r\n"), normalize_output("a\n"));
}

TEST(JudgeResultJson, RoundTrips) {
    const auto r = testsupport::shared_judge().run_tests("#include <cstdio>\nint main(){puts(\"1\");}", echo_problem(3));
    const auto back = judge_result_from_json(to_json(r));
    EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
}

TEST(ToyCorpus, PoolsAllAccepted) {
    auto& judge = testsupport::shared_judge();
    for (const auto& p : testsupport::toy().problems) {
        for (const auto& e : p.pool) EXPECT_TRUE(judge.run_tests(e.code, p).ac_all) << p.id << "/" << e.id;
    }
}
