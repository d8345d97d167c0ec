#pragma once

// CSV and JSON encodings of run results, plus the run manifest that
// accompanies every output file.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "percq/percolation.hpp"
#include "percq/protocol.hpp"
#include "percq/rng.hpp"
#include "percq/topology.hpp"

#ifndef PERCQ_GIT_DESCRIBE
#define PERCQ_GIT_DESCRIBE "unknown"
#endif

namespace percq {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kBuildDescribe = PERCQ_GIT_DESCRIBE;

// Reals are written with 17 significant digits so they round-trip exactly.
inline std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// RFC 4180 field quoting.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
    }
    os << '\n';
}

// ---------------------------------------------------------------------------
// CSV layouts

inline void write_recursion_csv(std::ostream& os, const RecursionTrace& t) {
    write_csv_row(os, {"k", "P_k"});
    for (std::size_t k = 0; k < t.values.size(); ++k) write_csv_row(os, {std::to_string(k), format_real(t.values[k])});
}

inline const std::vector<std::string>& mc_csv_header() {
    static const std::vector<std::string> h{"p", "k", "trials", "successes", "estimate", "std_error", "prediction"};
    return h;
}

inline std::vector<std::string> mc_csv_fields(double p, int k_pairs, const MCEstimate& e, double prediction) {
    return {format_real(p),           std::to_string(k_pairs), std::to_string(e.trials), std::to_string(e.successes),
            format_real(e.estimate), format_real(e.std_error), format_real(prediction)};
}

inline void write_level_csv(std::ostream& os, const ProtocolStats& st) {
    write_csv_row(os, {"mode", "level", "samples", "mean_scp", "mean_concurrence"});
    for (const LevelStats& l : st.levels) {
        write_csv_row(os, {std::string(to_string(st.mode)), std::to_string(l.level), std::to_string(l.samples),
                           format_real(l.mean_scp), format_real(l.mean_concurrence)});
    }
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::ordered_json;

inline Json to_json(const MCEstimate& e) {
    return Json{{"trials", e.trials}, {"successes", e.successes}, {"estimate", e.estimate}, {"std_error", e.std_error}};
}

inline Json mc_result_json(const MCEstimate& e, double p, const HierNet& net, std::uint64_t master_seed) {
    Json j = to_json(e);
    j["config"] = Json{{"p", p},
                       {"K", net.k_pairs},
                       {"N", net.n_nodes},
                       {"master_seed", master_seed},
                       {"stream_scheme", kStreamScheme},
                       {"build", kBuildDescribe}};
    return j;
}

inline Json to_json(const ProtocolStats& st) {
    Json levels = Json::array();
    for (const LevelStats& l : st.levels) {
        levels.push_back(Json{{"level", l.level},
                              {"samples", l.samples},
                              {"mean_scp", l.mean_scp},
                              {"mean_concurrence", l.mean_concurrence}});
    }
    return Json{{"mode", to_string(st.mode)},
                {"trials", st.trials},
                {"mean_scp", st.mean_scp},
                {"mean_concurrence", st.mean_concurrence},
                {"border_connected_fraction", st.border_connected_fraction},
                {"border", to_json(st.border)},
                {"levels", levels}};
}

inline Json to_json(const DistillationPlan& d) {
    return Json{{"n_nodes", d.n_nodes},
                {"k_pairs", d.k_pairs},
                {"base_fidelity", d.base_fidelity},
                {"post_swap_fidelity", d.post_swap_fidelity},
                {"iterations", d.iterations},
                {"trace", d.trace},
                {"success_probability_model", d.success_probability_model},
                {"pairs_per_distilled_link", d.pairs_per_distilled_link},
                {"total_initial_pairs", d.total_initial_pairs},
                {"n6_comparator", d.n6_comparator}};
}

inline Json to_json(const ResourceReport& r) {
    return Json{{"n_nodes", r.n_nodes},
                {"pairs_per_edge", r.pairs_per_edge},
                {"total_base_pairs", r.total_base_pairs},
                {"paper_estimate", r.paper_estimate},
                {"n_squared", r.n_squared}};
}

// ---------------------------------------------------------------------------
// Run manifest

struct RunManifest {
    std::string command;
    Json parameters = Json::object();
    std::uint64_t master_seed = 0;
    std::string tool_version = std::string(kToolVersion) + " (" + std::string(kBuildDescribe) + ")";
    std::string started_at;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline Json to_json(const RunManifest& m) {
    return Json{{"command", m.command},
                {"parameters", m.parameters},
                {"master_seed", m.master_seed},
                {"stream_scheme", kStreamScheme},
                {"tool_version", m.tool_version},
                {"started_at", m.started_at}};
}

} // namespace percq
