#include "percq/serialize.hpp"
#include "percq/sweep.hpp"

#include <sstream>

#include <gtest/gtest.h>

using namespace percq;

TEST(serialize, format_real_round_trips) {
    for (double x : {0.1, 1.0 / 3.0, 0.8214144, 1e-300, 0.0, 1.0}) {
        EXPECT_EQ(std::stod(format_real(x)), x);
    }
    EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(serialize, csv_quoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    std::ostringstream os;
    write_csv_row(os, {"x", "y,z"});
    EXPECT_EQ(os.str(), "x,\"y,z\"\n");
}

TEST(serialize, recursion_csv) {
    std::ostringstream os;
    write_recursion_csv(os, recursion_iterate(1.0, 2));
    EXPECT_EQ(os.str(), "k,P_k\n0,1\n1,1\n2,1\n");
}

TEST(serialize, mc_json_echoes_config) {
    const HierNet net = build_hiernet(9, 4);
    const auto e = make_estimate(10, 4);
    const Json j = mc_result_json(e, 0.4, net, 99);
    EXPECT_EQ(j["trials"], 10);
    EXPECT_EQ(j["successes"], 4);
    EXPECT_EQ(j["config"]["N"], 9);
    EXPECT_EQ(j["config"]["K"], 4);
    EXPECT_EQ(j["config"]["master_seed"], 99);
    EXPECT_TRUE(j["config"].contains("build"));
}

TEST(serialize, sweep_csv_layout) {
    const HierNet net = build_hiernet(9, 4);
    SweepSpec spec;
    spec.p_min = spec.p_max = 0.5;
    spec.steps = 1;
    spec.trials = 1000;
    const auto rows = run_sweep(net, spec);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].regime, Regime::Critical);
    std::ostringstream os;
    write_sweep_csv(os, net, rows);
    const std::string out = os.str();
    EXPECT_EQ(out.substr(0, out.find('\n')),
              "p,k,trials,successes,estimate,std_error,prediction,n,p_infinity,regime,classical_exact,"
              "classical_paper_variant");
    EXPECT_NE(out.find(",critical,"), std::string::npos);
}

TEST(serialize, sweep_grid) {
    SweepSpec spec;
    spec.p_min = 0.3;
    spec.p_max = 0.7;
    spec.steps = 5;
    EXPECT_DOUBLE_EQ(spec.p_at(0), 0.3);
    EXPECT_DOUBLE_EQ(spec.p_at(2), 0.5);
    EXPECT_DOUBLE_EQ(spec.p_at(4), 0.7);
    spec.p_min = 0.8;
    EXPECT_THROW(spec.validate(), DomainError);
}

TEST(serialize, sweep_bytes_independent_of_threads) {
    const HierNet net = build_hiernet(33, 6);
    auto render = [&](unsigned threads) {
        SweepSpec spec{0.3, 0.7, 5, 20'000, 1234, threads};
        std::ostringstream os;
        write_sweep_csv(os, net, run_sweep(net, spec));
        return os.str();
    };
    const std::string one = render(1);
    EXPECT_EQ(one, render(3));
    EXPECT_EQ(one, render(8));
}
