#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chainsim/montecarlo.hpp"
#include "chainsim/protocol.hpp"

namespace chainsim {

struct PlanMetadata {
    double delta = 0.0;
    double epsilon = 0.0;
    double fit_alpha = 0.0;
    double fit_beta = 0.0;
    std::uint64_t seed = 0;
};

inline nlohmann::json plan_to_json(const Plan& plan, const PlanMetadata& meta) {
    return nlohmann::json{
        {"segment_length_l", plan.segment_length_l},
        {"segment_time", plan.segment_time},
        {"segments_m", plan.segments_m},
        {"level_k", plan.level_k},
        {"depth_n", plan.depth_n},
        {"p_basic", plan.p_basic},
        {"p_total_bound", plan.p_total_bound},
        {"fidelity_bound", plan.fidelity_bound},
        {"metadata",
         {{"delta", meta.delta},
          {"epsilon", meta.epsilon},
          {"fit_alpha", meta.fit_alpha},
          {"fit_beta", meta.fit_beta},
          {"seed", meta.seed}}},
    };
}

inline std::pair<Plan, PlanMetadata> plan_from_json(const nlohmann::json& j) {
    Plan plan;
    plan.segment_length_l = j.at("segment_length_l").get<double>();
    plan.segment_time = j.at("segment_time").get<double>();
    plan.segments_m = j.at("segments_m").get<int>();
    plan.level_k = j.at("level_k").get<int>();
    plan.depth_n = j.at("depth_n").get<long long>();
    plan.p_basic = j.at("p_basic").get<double>();
    plan.p_total_bound = j.at("p_total_bound").get<double>();
    plan.fidelity_bound = j.at("fidelity_bound").get<double>();
    PlanMetadata meta;
    if (j.contains("metadata")) {
        const auto& m = j.at("metadata");
        meta.delta = m.value("delta", 0.0);
        meta.epsilon = m.value("epsilon", 0.0);
        meta.fit_alpha = m.value("fit_alpha", 0.0);
        meta.fit_beta = m.value("fit_beta", 0.0);
        meta.seed = m.value("seed", std::uint64_t{0});
    }
    return {plan, meta};
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

// Surface CSV: '#'-prefixed metadata header, then t,delta,mean_gamma,stderr,trials.
inline std::string surface_to_csv(const SurfaceGrid& s, GammaMode mode,
                                  const std::string& config_echo) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "# chainsim surface v1\n";
    os << "# mode=" << to_string(mode) << " distribution=" << to_string(s.distribution)
       << " seed=" << s.seed << " geometry="
       << (s.geometry == SurfaceGeometry::fixed_chain ? "fixed" : "arrival") << "\n";
    os << "# chain n=" << s.chain.n_sites << " j=" << s.chain.coupling_j
       << " na=" << s.chain.alice_size << " nb=" << s.chain.bob_size << "\n";
    os << "# packet center=" << s.packet.center << " width=" << s.packet.width
       << " momentum=" << s.packet.momentum << "\n";
    if (!config_echo.empty()) os << "# config " << config_echo << "\n";
    os << "t,delta,mean_gamma,stderr,trials\n";
    for (std::size_t it = 0; it < s.times.size(); ++it)
        for (std::size_t id = 0; id < s.deltas.size(); ++id)
            os << s.times[it] << "," << s.deltas[id] << "," << s.mean(mode)[it][id] << ","
               << s.stderr_of(mode)[it][id] << "," << s.trials << "\n";
    return os.str();
}

inline nlohmann::json fit_to_json(const EmpiricalFit& fit) {
    return nlohmann::json{
        {"alpha", fit.alpha},
        {"beta", fit.beta},
        {"alpha_stderr", fit.alpha_stderr},
        {"beta_stderr", fit.beta_stderr},
        {"r_squared", fit.r_squared},
        {"mode", to_string(fit.mode)},
        {"distribution", to_string(fit.distribution)},
    };
}

inline EmpiricalFit fit_from_json(const nlohmann::json& j) {
    EmpiricalFit fit;
    fit.alpha = j.at("alpha").get<double>();
    fit.beta = j.at("beta").get<double>();
    fit.alpha_stderr = j.value("alpha_stderr", 0.0);
    fit.beta_stderr = j.value("beta_stderr", 0.0);
    fit.r_squared = j.value("r_squared", 0.0);
    fit.mode = j.value("mode", std::string("relative")) == "raw" ? GammaMode::raw
                                                                 : GammaMode::relative;
    fit.distribution = distribution_from_string(j.value("distribution", std::string("uniform")));
    return fit;
}

// Rebuilds a fit-ready grid from a surface CSV. The baseline filter was
// applied at generation time, so baseline_cb is taken as resolved here.
inline std::pair<SurfaceGrid, GammaMode> surface_from_csv(std::istream& in) {
    SurfaceGrid grid;
    GammaMode mode = GammaMode::relative;
    std::string line;
    struct Row { double t, d, g, se; int trials; };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string tok;
            while (meta >> tok) {
                if (tok.rfind("mode=", 0) == 0)
                    mode = tok.substr(5) == "raw" ? GammaMode::raw : GammaMode::relative;
                if (tok.rfind("distribution=", 0) == 0)
                    grid.distribution = distribution_from_string(tok.substr(13));
                if (tok.rfind("seed=", 0) == 0)
                    grid.seed = std::stoull(tok.substr(5));
            }
            continue;
        }
        if (line.rfind("t,", 0) == 0) continue;  // column header
        std::istringstream ls(line);
        Row r{};
        char comma;
        if (!(ls >> r.t >> comma >> r.d >> comma >> r.g >> comma >> r.se >> comma >> r.trials))
            throw std::runtime_error("surface_from_csv: malformed row: " + line);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("surface_from_csv: no data rows");
    for (const auto& r : rows) {
        if (grid.times.empty() || grid.times.back() < r.t) grid.times.push_back(r.t);
        if (std::find(grid.deltas.begin(), grid.deltas.end(), r.d) == grid.deltas.end())
            grid.deltas.push_back(r.d);
    }
    std::sort(grid.deltas.begin(), grid.deltas.end());
    const std::size_t nt = grid.times.size(), nd = grid.deltas.size();
    auto alloc = [&] { return std::vector<std::vector<double>>(nt, std::vector<double>(nd)); };
    grid.mean_gamma_raw = alloc();
    grid.stderr_gamma_raw = alloc();
    grid.mean_gamma_rel = alloc();
    grid.stderr_gamma_rel = alloc();
    grid.baseline_cb.assign(nt, 1.0);
    for (const auto& r : rows) {
        const auto it = static_cast<std::size_t>(
            std::find(grid.times.begin(), grid.times.end(), r.t) - grid.times.begin());
        const auto id = static_cast<std::size_t>(
            std::find(grid.deltas.begin(), grid.deltas.end(), r.d) - grid.deltas.begin());
        grid.mean_gamma_raw[it][id] = grid.mean_gamma_rel[it][id] = r.g;
        grid.stderr_gamma_raw[it][id] = grid.stderr_gamma_rel[it][id] = r.se;
        grid.trials = r.trials;
    }
    return {grid, mode};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace chainsim
