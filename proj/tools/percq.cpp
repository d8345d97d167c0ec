// percq: command-line front end for the entanglement percolation toolkit.
//
// Every command validates its inputs before computing, writes nothing on
// failure, and exits 0 on success, 1 on I/O failure, 2 on usage or domain
// errors. Data files are deterministic for fixed flags and seed; the run
// timestamp lives in a sidecar "<out>.manifest.json".

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "percq/percq.hpp"

namespace {

using percq::Json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << body;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

// Writes body to path (or stdout when path is empty) and the manifest beside it.
void emit(const std::string& path, const std::string& body, const percq::RunManifest& manifest) {
    if (path.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    write_file(path, body);
    write_file(path + ".manifest.json", percq::to_json(manifest).dump(2) + "\n");
}

percq::RunManifest manifest_for(const std::string& command, Json params, std::uint64_t seed) {
    percq::RunManifest m;
    m.command = command;
    m.parameters = std::move(params);
    m.master_seed = seed;
    m.started_at = percq::utc_timestamp();
    return m;
}

struct NetArgs {
    std::int64_t n_nodes = 9;
    int k_pairs = 4;
    std::string net_file;

    void add_to(CLI::App* cmd) {
        auto* n = cmd->add_option("--n-nodes,-N", n_nodes, "Number of chain nodes")->capture_default_str();
        auto* k = cmd->add_option("--k-pairs,-K", k_pairs, "Entangled pairs per neighbouring edge")->capture_default_str();
        auto* f = cmd->add_option("--net-file", net_file, "Network in 'hiernet N K' text format")
                      ->check(CLI::ExistingFile);
        f->excludes(n)->excludes(k);
    }

    percq::HierNet load() const {
        if (net_file.empty()) return percq::build_hiernet(n_nodes, k_pairs);
        std::ifstream in(net_file);
        if (!in) throw IoError("cannot read '" + net_file + "'");
        return percq::read_hiernet(in);
    }
};

struct SeedArgs {
    std::uint64_t seed = 0;
    unsigned threads = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Master seed")->envname("PERCQ_SEED")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
    }
};

int run_recursion(double p, int k_max, const std::string& out) {
    const auto trace = percq::recursion_iterate(p, k_max);
    std::ostringstream os;
    percq::write_recursion_csv(os, trace);
    emit(out, os.str(), manifest_for("recursion", Json{{"p", p}, {"k_max", k_max}}, 0));
    return 0;
}

int run_sweep_cmd(const percq::SweepSpec& spec, const NetArgs& net_args, const std::string& out) {
    spec.validate();
    const percq::HierNet net = net_args.load();
    percq::require_network(net);
    const auto rows = percq::run_sweep(net, spec);
    std::ostringstream os;
    percq::write_sweep_csv(os, net, rows);
    Json params{{"p_min", spec.p_min}, {"p_max", spec.p_max}, {"steps", spec.steps},   {"n_nodes", net.n_nodes},
                {"k_pairs", net.k_pairs}, {"trials", spec.trials}, {"net_file", net_args.net_file}};
    emit(out, os.str(), manifest_for("sweep", std::move(params), spec.master_seed));
    return 0;
}

int run_protocol_cmd(const NetArgs& net_args, double lambda2, const std::string& mode_name, std::uint64_t trials,
                     const SeedArgs& seed, const std::string& out, std::string json_out) {
    const percq::PurePair base = percq::make_pair(lambda2);
    const percq::ProtocolMode mode = percq::parse_mode(mode_name);
    if (trials < 1) throw percq::DomainError("trials must be at least 1");
    const percq::HierNet net = net_args.load();
    percq::require_network(net);

    const auto stats = percq::run_chain_protocol(net, base, mode, {percq::scp(base), trials, seed.seed, seed.threads});
    Json stats_json = percq::to_json(stats);
    stats_json["config"] = Json{{"lambda2", lambda2},
                                {"N", net.n_nodes},
                                {"K", net.k_pairs},
                                {"master_seed", seed.seed},
                                {"build", percq::kBuildDescribe}};
    Json params{{"n_nodes", net.n_nodes}, {"k_pairs", net.k_pairs}, {"lambda2", lambda2},
                {"mode", mode_name},      {"trials", trials},       {"net_file", net_args.net_file}};
    const auto manifest = manifest_for("protocol", std::move(params), seed.seed);

    if (out.empty()) {
        emit(json_out, stats_json.dump(2) + "\n", manifest);
        return 0;
    }
    std::ostringstream csv;
    percq::write_level_csv(csv, stats);
    if (json_out.empty()) json_out = out + ".json";
    emit(out, csv.str(), manifest);
    write_file(json_out, stats_json.dump(2) + "\n");
    return 0;
}

int run_distill(double lambda2, std::int64_t n_nodes, const std::string& out) {
    const percq::PurePair base = percq::make_pair(lambda2);
    const auto plan = percq::distillation_plan(n_nodes, base);
    Json j = percq::to_json(plan);
    j["lambda2"] = lambda2;
    j["concurrence"] = percq::concurrence(base);
    emit(out, j.dump(2) + "\n", manifest_for("distill", Json{{"lambda2", lambda2}, {"n_nodes", n_nodes}}, 0));
    return 0;
}

int run_resources(std::int64_t n_nodes, std::optional<int> k_pairs, const std::string& out) {
    if (n_nodes < 2) throw percq::DomainError("n_nodes must be at least 2, got " + std::to_string(n_nodes));
    // Deepest level that fits on the chain.
    int k = k_pairs.value_or(1 + static_cast<int>(std::floor(std::log2(static_cast<double>(n_nodes - 1)))));
    const auto report = percq::resource_report(n_nodes, k);
    emit(out, percq::to_json(report).dump(2) + "\n",
         manifest_for("resources", Json{{"n_nodes", n_nodes}, {"k_pairs", k}}, 0));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum entanglement percolation on hierarchical chains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(percq::kToolVersion) + " (" + std::string(percq::kBuildDescribe) + ")");

    std::string out;

    auto* rec = app.add_subcommand("recursion", "Iterate the border-connectivity recursion");
    double rec_p = 0.5;
    int rec_k = 10;
    rec->add_option("--p", rec_p, "Link occupation probability")->required();
    rec->add_option("--k-max", rec_k, "Last recursion index")->capture_default_str();
    rec->add_option("--out,-o", out, "Output CSV (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo vs analytic border connectivity over a p grid");
    percq::SweepSpec spec;
    NetArgs sweep_net;
    SeedArgs sweep_seed;
    spec.trials = 100'000;
    sweep->add_option("--p-min", spec.p_min)->required();
    sweep->add_option("--p-max", spec.p_max)->required();
    sweep->add_option("--steps", spec.steps)->capture_default_str();
    sweep->add_option("--trials", spec.trials)->capture_default_str();
    sweep_net.add_to(sweep);
    sweep_seed.add_to(sweep);
    sweep->add_option("--out,-o", out, "Output CSV (default: stdout)");

    auto* proto = app.add_subcommand("protocol", "State-level simulation of the hierarchical construction");
    NetArgs proto_net;
    SeedArgs proto_seed;
    double proto_lambda2 = 0.25;
    std::string proto_mode = "state-tracked";
    std::uint64_t proto_trials = 100'000;
    std::string proto_json;
    proto->add_option("--lambda2", proto_lambda2, "Smaller Schmidt coefficient of the base pairs")->required();
    proto->add_option("--mode", proto_mode, "ideal-scp or state-tracked")->capture_default_str();
    proto->add_option("--trials", proto_trials)->capture_default_str();
    proto_net.add_to(proto);
    proto_seed.add_to(proto);
    proto->add_option("--out,-o", out, "Per-level CSV (stats JSON goes to stdout when omitted)");
    proto->add_option("--json", proto_json, "Stats JSON path (default: <out>.json)");

    auto* distill = app.add_subcommand("distill", "Distillation resource plan");
    double dist_lambda2 = 0.0;
    std::int64_t dist_n = 9;
    distill->add_option("--lambda2", dist_lambda2)->required();
    distill->add_option("--n-nodes,-N", dist_n, "Chain nodes, 2^m + 1")->capture_default_str();
    distill->add_option("--out,-o", out, "Output JSON (default: stdout)");

    auto* res = app.add_subcommand("resources", "Entangled-pair resource count");
    std::int64_t res_n = 9;
    std::optional<int> res_k;
    res->add_option("--n-nodes,-N", res_n)->required();
    res->add_option("--k-pairs,-K", res_k, "Pairs per edge (default: deepest level that fits)");
    res->add_option("--out,-o", out, "Output JSON (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*rec) return run_recursion(rec_p, rec_k, out);
        if (*sweep) {
            spec.master_seed = sweep_seed.seed;
            spec.threads = sweep_seed.threads;
            return run_sweep_cmd(spec, sweep_net, out);
        }
        if (*proto) return run_protocol_cmd(proto_net, proto_lambda2, proto_mode, proto_trials, proto_seed, out, proto_json);
        if (*distill) return run_distill(dist_lambda2, dist_n, out);
        if (*res) return run_resources(res_n, res_k, out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const percq::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const percq::ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const percq::IterationLimitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
