// Drives the percq executable end to end.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(PERCQ_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("percq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, recursion_rows) {
    const auto r = run("recursion --p 0.6 --k-max 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "k,P_k\n0,0.59999999999999998\n1,0.74399999999999999\n2,0.82141439999999999\n");
}

TEST_F(CliTest, recursion_all_ones) {
    const auto r = run("recursion --p 1 --k-max 3 --out " + path("r.csv"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(slurp(path("r.csv")), "k,P_k\n0,1\n1,1\n2,1\n3,1\n");
    const auto manifest = nlohmann::json::parse(slurp(path("r.csv.manifest.json")));
    EXPECT_EQ(manifest["command"], "recursion");
    EXPECT_TRUE(manifest.contains("started_at"));
}

TEST_F(CliTest, domain_and_usage_errors_exit_2_without_output) {
    EXPECT_EQ(run("recursion --p 1.5 --out " + path("bad.csv")).code, 2);
    EXPECT_FALSE(fs::exists(path("bad.csv")));
    EXPECT_EQ(run("recursion --bogus").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("protocol --lambda2 0.7 --out " + path("p.csv")).code, 2);
    EXPECT_FALSE(fs::exists(path("p.csv")));
    EXPECT_EQ(run("distill --lambda2 0.01 --n-nodes 9").code, 2);
    EXPECT_EQ(run("resources --n-nodes 1").code, 2);
    EXPECT_EQ(run("sweep --p-min 0.7 --p-max 0.3").code, 2);
}

TEST_F(CliTest, unwritable_output_exits_1) {
    EXPECT_EQ(run("recursion --p 0.5 --out " + path("missing/dir/x.csv")).code, 1);
}

TEST_F(CliTest, sweep_single_critical_row) {
    const auto r = run("sweep --p-min 0.5 --p-max 0.5 --steps 1 -N 9 -K 4 --trials 2000 --seed 3");
    ASSERT_EQ(r.code, 0);
    std::istringstream is(r.out);
    std::string header, row, extra;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_FALSE(std::getline(is, extra));
    EXPECT_EQ(header.rfind("p,k,trials,successes,estimate,std_error,prediction", 0), 0u);
    EXPECT_NE(row.find(",critical,"), std::string::npos);
}

TEST_F(CliTest, sweep_byte_identical_across_runs_and_threads) {
    const std::string base = "sweep --p-min 0.3 --p-max 0.7 --steps 3 -N 17 -K 5 --trials 5000 --seed 11 ";
    ASSERT_EQ(run(base + "--threads 1 --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run(base + "--threads 4 --out " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, seed_from_environment) {
    const std::string base = "sweep --p-min 0.5 --p-max 0.5 -N 9 -K 4 --trials 3000";
    const auto explicit_seed = run(base + " --seed 77");
    // run() prefixes the binary, so call popen directly for the env form.
    FILE* pipe = popen(("PERCQ_SEED=77 " + std::string(PERCQ_CLI_PATH) + " " + base).c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    EXPECT_EQ(pclose(pipe), 0);
    EXPECT_EQ(out, explicit_seed.out);
    EXPECT_NE(out, run(base + " --seed 78").out);
}

TEST_F(CliTest, net_file_matches_flags) {
    {
        std::ofstream f(path("net.txt"));
        f << "hiernet 9 4\n";
        for (int u = 0; u < 8; ++u) f << "0 " << u << ' ' << u + 1 << '\n';
        f << "1 0 2\n1 2 4\n1 4 6\n1 6 8\n2 0 4\n2 4 8\n3 0 8\n";
    }
    const std::string tail = " --p-min 0.4 --p-max 0.6 --steps 3 --trials 4000 --seed 5";
    const auto by_flags = run("sweep -N 9 -K 4" + tail);
    const auto by_file = run("sweep --net-file " + path("net.txt") + tail);
    ASSERT_EQ(by_flags.code, 0);
    EXPECT_EQ(by_flags.out, by_file.out);
    EXPECT_EQ(run("sweep --net-file " + path("net.txt") + " -N 9" + tail).code, 2);
}

TEST_F(CliTest, protocol_outputs) {
    const auto r = run("protocol -N 9 -K 4 --lambda2 0.5 --mode ideal-scp --trials 1000 --seed 1 --out " + path("lv.csv"));
    ASSERT_EQ(r.code, 0);
    const auto stats = nlohmann::json::parse(slurp(path("lv.csv.json")));
    EXPECT_EQ(stats["border_connected_fraction"], 1.0);
    EXPECT_EQ(stats["mode"], "ideal-scp");
    const std::string csv = slurp(path("lv.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "mode,level,samples,mean_scp,mean_concurrence");
    EXPECT_NE(csv.find("ideal-scp,3,1000,1,1"), std::string::npos);
}

TEST_F(CliTest, protocol_state_tracked_level2) {
    const auto r = run("protocol -N 9 -K 4 --lambda2 0.25 --mode state-tracked --trials 200000 --seed 4");
    ASSERT_EQ(r.code, 0);
    const auto stats = nlohmann::json::parse(r.out);
    // 4e5 level-2 samples; scp standard deviation < 0.45 gives 4 sigma < 0.003.
    EXPECT_NEAR(stats["levels"][2]["mean_scp"].get<double>(), 0.3125, 0.003);
}

TEST_F(CliTest, distill_plan) {
    const auto r = run("distill --lambda2 0.0669873 --n-nodes 3");
    ASSERT_EQ(r.code, 0);
    const auto plan = nlohmann::json::parse(r.out);
    EXPECT_EQ(plan["iterations"], 8);
    EXPECT_EQ(plan["pairs_per_distilled_link"], 32);
    EXPECT_EQ(plan["total_initial_pairs"], 32);
    EXPECT_EQ(plan["trace"].size(), 9u);

    const auto perfect = nlohmann::json::parse(run("distill --lambda2 0.5").out);
    EXPECT_EQ(perfect["iterations"], 0);
}

TEST_F(CliTest, resources) {
    auto r9 = nlohmann::json::parse(run("resources --n-nodes 9").out);
    EXPECT_EQ(r9["total_base_pairs"], 32);
    EXPECT_EQ(r9["paper_estimate"], 36.0);
    EXPECT_EQ(nlohmann::json::parse(run("resources --n-nodes 2").out)["total_base_pairs"], 1);
    EXPECT_EQ(nlohmann::json::parse(run("resources --n-nodes 1025").out)["total_base_pairs"], 11264);
}
