// chainsim: disordered spin-chain transfer, channel fitting, and the
// twirl-encode-correct multi-rail protocol.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chainsim/chainsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;  // 0 = default (flag or CHAINSIM_THREADS or hardware)
    std::string format = "csv";
};

int threads_of(const GlobalOpts& g) {
    return g.threads > 0 ? g.threads : chainsim::default_thread_count();
}

std::string echo_args(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 1; i < argc; ++i) os << (i > 1 ? " " : "") << argv[i];
    return os.str();
}

void add_global(CLI::App* cmd, GlobalOpts& g) {
    cmd->add_option("--seed", g.seed, "base RNG seed");
    cmd->add_option("--out", g.out, "output file path")->required();
    cmd->add_option("--threads", g.threads, "worker threads (default: CHAINSIM_THREADS or cores)");
    cmd->add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

struct ChainOpts {
    int n = 250;
    double j = 0.70710678;  // 1/sqrt(2)
    int na = 40;
    int nb = 40;
    double center = -1.0;  // <0 = default N_A/2
    double width = -1.0;   // <0 = default N_A/6
    double momentum = std::numbers::pi / 2.0;

    chainsim::ChainSpec spec() const { return {n, j, na, nb}; }
    chainsim::PacketParams packet() const {
        auto p = chainsim::default_packet(spec());
        if (center >= 0) p.center = center;
        if (width >= 0) p.width = width;
        p.momentum = momentum;
        return p;
    }
};

void add_chain(CLI::App* cmd, ChainOpts& c, int default_n) {
    c.n = default_n;
    cmd->add_option("--n", c.n, "chain length in sites");
    cmd->add_option("--j", c.j, "coupling J");
    cmd->add_option("--na", c.na, "Alice region size");
    cmd->add_option("--nb", c.nb, "Bob region size");
    cmd->add_option("--center", c.center, "packet center site (default N_A/2)");
    cmd->add_option("--width", c.width, "packet width (default N_A/6)");
    cmd->add_option("--momentum", c.momentum, "carrier momentum k0");
}

// ---------------------------------------------------------------- propagate

int run_propagate(const GlobalOpts& g, const ChainOpts& co, const std::string& dist,
                  std::vector<double> deltas, double dt, int steps, int trials,
                  const std::string& echo) {
    using namespace chainsim;
    if (steps < 1) throw std::invalid_argument("propagate: --steps must be >= 1");
    if (dt < 0) throw std::invalid_argument("propagate: --dt must be >= 0");
    if (trials < 1) throw std::invalid_argument("propagate: --trials must be >= 1");
    if (deltas.empty()) deltas = {0.0, 0.1, 0.2, 0.3};

    const auto chain = co.spec();
    const auto packet = co.packet();
    const auto psi0 = gaussian_wavepacket(chain, packet.center, packet.width, packet.momentum);
    std::vector<double> times(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) times[static_cast<std::size_t>(s)] = dt * (s + 1);

    // probs[delta][time][site], averaged over trials
    std::vector<std::vector<std::vector<double>>> probs(
        deltas.size(), std::vector<std::vector<double>>(
                           times.size(), std::vector<double>(static_cast<std::size_t>(chain.n_sites), 0.0)));
    parallel_for_index(deltas.size() * static_cast<std::size_t>(trials), threads_of(g),
                       [&](std::size_t task) {
        const std::size_t id = task / static_cast<std::size_t>(trials);
        const std::size_t trial = task % static_cast<std::size_t>(trials);
        DisorderModel model{distribution_from_string(dist), deltas[id],
                            derive_seed(g.seed, id + 1)};
        const auto disorder = sample_disorder(model, chain.n_sites, trial, chain.coupling_j);
        const Propagator prop(build_hamiltonian(chain, disorder));
        for (std::size_t it = 0; it < times.size(); ++it) {
            const auto psi = evolve(prop, psi0, times[it]);
            for (int s = 0; s < chain.n_sites; ++s)
                probs[id][it][static_cast<std::size_t>(s)] += psi.site_probability(s);
        }
    });
    for (auto& per_delta : probs)
        for (auto& per_time : per_delta)
            for (auto& v : per_time) v /= trials;

    std::ostringstream os;
    os << std::setprecision(12);
    if (g.format == "json") {
        nlohmann::json j;
        j["config"] = echo;
        j["seed"] = g.seed;
        j["times"] = times;
        for (std::size_t id = 0; id < deltas.size(); ++id) {
            nlohmann::json block;
            block["delta"] = deltas[id];
            block["probabilities"] = probs[id];
            j["snapshots"].push_back(block);
        }
        os << j.dump(2) << "\n";
    } else {
        os << "# chainsim propagate v1\n# config " << echo << "\n# seed=" << g.seed << "\n";
        os << "delta,site";
        for (double t : times) os << ",p_t" << t;
        os << "\n";
        for (std::size_t id = 0; id < deltas.size(); ++id)
            for (int s = 0; s < chain.n_sites; ++s) {
                os << deltas[id] << "," << s;
                for (std::size_t it = 0; it < times.size(); ++it)
                    os << "," << probs[id][it][static_cast<std::size_t>(s)];
                os << "\n";
            }
    }
    write_file(g.out, os.str());
    return kExitOk;
}

// ------------------------------------------------------------ surface / fit

std::vector<double> range_values(double lo, double hi, double step) {
    std::vector<double> v;
    for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
    return v;
}

int run_surface(const GlobalOpts& g, const ChainOpts& co, const std::string& dist,
                double tmin, double tmax, double tstep, double dmin, double dmax,
                double dstep, int trials, const std::string& mode_name,
                const std::string& geometry, const std::string& echo) {
    using namespace chainsim;
    DisorderModel model{distribution_from_string(dist), 0.0, g.seed};
    const auto geo = geometry == "fixed" ? SurfaceGeometry::fixed_chain
                                         : SurfaceGeometry::arrival_matched;
    const auto grid = gamma_surface(co.spec(), model, range_values(tmin, tmax, tstep),
                                    range_values(dmin, dmax, dstep), trials, co.packet(),
                                    threads_of(g), geo);
    const GammaMode mode = mode_name == "raw" ? GammaMode::raw : GammaMode::relative;
    write_file(g.out, surface_to_csv(grid, mode, echo));
    return kExitOk;
}

int run_fit(const GlobalOpts& g, const std::string& input, bool synthetic, double alpha,
            double beta, double tmin, double tmax, double tstep, double dmin, double dmax,
            double dstep, const std::string& echo) {
    using namespace chainsim;
    SurfaceGrid grid;
    GammaMode mode = GammaMode::relative;
    if (synthetic) {
        grid = synthetic_surface(range_values(tmin, tmax, tstep), range_values(dmin, dmax, dstep),
                                 alpha, beta);
    } else {
        if (input.empty()) throw std::invalid_argument("fit: --in or --synthetic required");
        std::ifstream in(input);
        if (!in) throw std::invalid_argument("fit: cannot open " + input);
        std::tie(grid, mode) = surface_from_csv(in);
    }
    const auto fit = fit_empirical(grid, mode);

    nlohmann::json j = fit_to_json(fit);
    j["config"] = echo;
    if (fit.distribution == Distribution::uniform && !synthetic)
        j["reference_uniform"] = {{"alpha", 2.56}, {"beta", 0.029}};
    j["grid_meta"] = {{"times", grid.times},
                      {"deltas", grid.deltas},
                      {"trials", grid.trials},
                      {"cells", grid.times.size() * grid.deltas.size()}};
    nlohmann::json overlay = nlohmann::json::array();
    for (std::size_t it = 0; it < grid.times.size(); ++it)
        for (std::size_t id = 0; id < grid.deltas.size(); ++id)
            overlay.push_back({{"t", grid.times[it]},
                               {"delta", grid.deltas[id]},
                               {"gamma_data", grid.mean(mode)[it][id]},
                               {"gamma_model",
                                predicted_gamma(fit, grid.times[it], grid.deltas[id])}});
    j["surface"] = overlay;
    write_file(g.out, j.dump(2) + "\n");
    return kExitOk;
}

// ------------------------------------------------------------------- qec

int run_qec(const GlobalOpts& g, double pmin, double pmax, double pstep, int kmin, int kmax,
            const std::string& echo) {
    using namespace chainsim;
    std::ostringstream os;
    os << std::setprecision(12);
    os << "# chainsim qec v1\n# config " << echo << "\n";
    os << "p,k,p_enumeration,p_polynomial,bound\n";
    for (double p = pmin; p <= pmax + 1e-12; p += pstep) {
        for (int k = kmin; k <= kmax; ++k) {
            DepolarizingParam en{p}, poly{p};
            for (int i = 0; i < k; ++i) {
                en = effective_depolarizing_after_ec(en);
                poly = lemma2_polynomial(poly);
            }
            os << p << "," << k << "," << en.p << "," << poly.p << ","
               << lemma2_bound(DepolarizingParam{p}, k) << "\n";
        }
    }
    write_file(g.out, os.str());
    return kExitOk;
}

// ------------------------------------------------------------ plan / endtoend

int run_plan(const GlobalOpts& g, double delta, double distance, double epsilon, double p_fixed,
             int m_fixed, const std::string& fit_path, double alpha, double beta,
             const ChainOpts& co, const std::string& dist, double quantile, double margin,
             int planner_trials, const std::string& echo) {
    using namespace chainsim;
    (void)echo;  // plan JSON schema is fixed; no free-form config block
    Plan plan;
    PlanMetadata meta;
    meta.delta = delta;
    meta.epsilon = epsilon;
    meta.seed = g.seed;
    if (p_fixed >= 0.0) {
        // Fixed-p mode: depth sizing only, no physical segment search.
        const int m = m_fixed > 0 ? m_fixed
                                  : static_cast<int>(std::ceil(distance / 1.0));
        if (p_fixed >= kThresholdP)
            throw std::runtime_error("plan: infeasible, p >= 2/15");
        const auto depth = required_depth(m, epsilon, DepolarizingParam{p_fixed});
        plan.segments_m = m;
        plan.level_k = depth.k;
        plan.depth_n = depth.n;
        plan.p_basic = p_fixed;
        plan.segment_length_l = distance > 0 ? distance / m : 0.0;
        plan.segment_time = plan.segment_length_l / (2.0 * co.j);
        plan.p_total_bound = p_total_bound(DepolarizingParam{p_fixed}, depth.k, m);
        plan.fidelity_bound = 1.0 - plan.p_total_bound / 2.0;
    } else {
        EmpiricalFit fit;
        if (!fit_path.empty()) {
            std::ifstream in(fit_path);
            if (!in) throw std::invalid_argument("plan: cannot open " + fit_path);
            nlohmann::json j;
            in >> j;
            fit = fit_from_json(j);
        } else {
            fit.alpha = alpha;
            fit.beta = beta;
            fit.distribution = distribution_from_string(dist);
        }
        meta.fit_alpha = fit.alpha;
        meta.fit_beta = fit.beta;
        PlannerOptions opt;
        opt.quantile = quantile;
        opt.safety_margin = margin;
        opt.trials = planner_trials;
        opt.seed = g.seed;
        plan = plan_transmission(delta, distance, epsilon, fit, co.spec(), opt);
    }
    write_file(g.out, plan_to_json(plan, meta).dump(2) + "\n");
    return kExitOk;
}

int run_endtoend(const GlobalOpts& g, const std::string& plan_path, double p, int k, int m,
                 long long trials, const std::string& echo) {
    using namespace chainsim;
    Plan plan;
    PlanMetadata meta;
    if (!plan_path.empty()) {
        std::ifstream in(plan_path);
        if (!in) throw std::invalid_argument("endtoend: cannot open " + plan_path);
        nlohmann::json j;
        in >> j;
        std::tie(plan, meta) = plan_from_json(j);
    } else {
        if (p < 0) throw std::invalid_argument("endtoend: --p or --plan required");
        plan.level_k = k;
        plan.segments_m = m;
        plan.depth_n = 1;
        for (int i = 0; i < k; ++i) plan.depth_n *= 5;
        plan.p_basic = p;
        plan.p_total_bound =
            p < kThresholdP ? p_total_bound(DepolarizingParam{p}, k, m) : 1.0;
        plan.fidelity_bound = 1.0 - plan.p_total_bound / 2.0;
    }
    const auto res = simulate_protocol(plan, FixedSource{plan.p_basic}, trials, g.seed,
                                       threads_of(g));
    nlohmann::json j{
        {"config", echo},
        {"trials", res.trials},
        {"counts", {{"I", res.counts[0]}, {"X", res.counts[1]}, {"Y", res.counts[2]},
                    {"Z", res.counts[3]}}},
        {"p_hat", res.p_hat},
        {"p_hat_stderr", res.p_hat_stderr},
        {"p_hat_ci_lo", res.p_hat_lo},
        {"p_hat_ci_hi", res.p_hat_hi},
        {"analytic_bound", plan.p_total_bound},
        {"plan", plan_to_json(plan, meta)},
    };
    write_file(g.out, j.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disordered spin-chain transfer and error-corrected multi-rail protocol"};
    app.require_subcommand(1);
    const std::string echo = echo_args(argc, argv);

    GlobalOpts g_prop, g_surf, g_fit, g_qec, g_plan, g_e2e;
    ChainOpts c_prop, c_surf, c_plan;
    std::string dist_prop = "normal", dist_surf = "uniform", dist_plan = "uniform";
    std::vector<double> prop_deltas;
    double dt = 25.0;
    int steps = 8, prop_trials = 1;

    auto* propagate = app.add_subcommand("propagate", "evolve wavepackets and emit |c_j|^2 snapshots");
    add_global(propagate, g_prop);
    add_chain(propagate, c_prop, 501);
    propagate->add_option("--dist", dist_prop, "disorder distribution");
    propagate->add_option("--delta", prop_deltas, "disorder strengths (default 0 0.1 0.2 0.3)");
    propagate->add_option("--dt", dt, "snapshot interval");
    propagate->add_option("--steps", steps, "number of snapshots");
    propagate->add_option("--trials", prop_trials, "realizations to average");

    double tmin = 10, tmax = 120, tstep = 10, dmin = 0.05, dmax = 0.5, dstep = 0.05;
    int surf_trials = 50;
    std::string surf_mode = "relative", surf_geometry = "arrival";
    auto* surface = app.add_subcommand("surface", "disorder-averaged gamma surface over (t, delta)");
    add_global(surface, g_surf);
    add_chain(surface, c_surf, 250);
    surface->add_option("--dist", dist_surf, "disorder distribution");
    surface->add_option("--tmin", tmin);
    surface->add_option("--tmax", tmax);
    surface->add_option("--tstep", tstep);
    surface->add_option("--dmin", dmin);
    surface->add_option("--dmax", dmax);
    surface->add_option("--dstep", dstep);
    surface->add_option("--trials", surf_trials, "trials per cell");
    surface->add_option("--mode", surf_mode)->check(CLI::IsMember({"raw", "relative"}));
    surface->add_option("--geometry", surf_geometry, "fixed chain or arrival-matched length")
        ->check(CLI::IsMember({"fixed", "arrival"}));

    std::string fit_in;
    bool fit_synth = false;
    double fit_alpha = 2.56, fit_beta = 0.029;
    double ftmin = 10, ftmax = 120, ftstep = 10, fdmin = 0.05, fdmax = 0.5, fdstep = 0.05;
    auto* fit = app.add_subcommand("fit", "fit the empirical damping law to a surface");
    add_global(fit, g_fit);
    fit->add_option("--in", fit_in, "surface CSV to fit");
    fit->add_flag("--synthetic", fit_synth, "fit a noise-free synthetic surface instead");
    fit->add_option("--alpha", fit_alpha, "synthetic alpha");
    fit->add_option("--beta", fit_beta, "synthetic beta");
    fit->add_option("--tmin", ftmin);
    fit->add_option("--tmax", ftmax);
    fit->add_option("--tstep", ftstep);
    fit->add_option("--dmin", fdmin);
    fit->add_option("--dmax", fdmax);
    fit->add_option("--dstep", fdstep);

    double pmin = 0.0, pmax = 0.2, pstep = 0.01;
    int kmin = 1, kmax = 3;
    auto* qec = app.add_subcommand("qec", "effective depolarizing parameter tables");
    add_global(qec, g_qec);
    qec->add_option("--pmin", pmin);
    qec->add_option("--pmax", pmax);
    qec->add_option("--pstep", pstep);
    qec->add_option("--kmin", kmin);
    qec->add_option("--kmax", kmax);

    double plan_delta = 0.1, plan_distance = 1000, plan_eps = 0.1, plan_p = -1.0;
    int plan_m = 0, planner_trials = 100;
    double plan_quantile = 0.95, plan_margin = 0.75, plan_alpha = 2.56, plan_beta = 0.029;
    std::string plan_fit;
    auto* plan = app.add_subcommand("plan", "segment-length and code-depth planning");
    add_global(plan, g_plan);
    add_chain(plan, c_plan, 250);
    plan->add_option("--delta", plan_delta);
    plan->add_option("--distance", plan_distance, "total distance in sites");
    plan->add_option("--epsilon", plan_eps, "target channel error");
    plan->add_option("--p", plan_p, "fixed per-segment p (skips physical search)");
    plan->add_option("--m", plan_m, "segment count for fixed-p mode");
    plan->add_option("--fit", plan_fit, "fit JSON path");
    plan->add_option("--alpha", plan_alpha, "fit alpha when no --fit file");
    plan->add_option("--beta", plan_beta, "fit beta when no --fit file");
    plan->add_option("--dist", dist_plan);
    plan->add_option("--quantile", plan_quantile);
    plan->add_option("--margin", plan_margin, "safety factor on the 2/15 threshold");
    plan->add_option("--planner-trials", planner_trials,
                     "disorder samples per candidate length (0 = fit mean only)");

    std::string e2e_plan;
    double e2e_p = -1.0;
    int e2e_k = 1, e2e_m = 1;
    long long e2e_trials = 100000;
    auto* e2e = app.add_subcommand("endtoend", "Pauli-frame simulation of the full protocol");
    add_global(e2e, g_e2e);
    e2e->add_option("--plan", e2e_plan, "plan JSON path");
    e2e->add_option("--p", e2e_p, "per-rail depolarizing parameter");
    e2e->add_option("--k", e2e_k, "concatenation level");
    e2e->add_option("--m", e2e_m, "segment count");
    e2e->add_option("--trials", e2e_trials);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (propagate->parsed())
            return run_propagate(g_prop, c_prop, dist_prop, prop_deltas, dt, steps, prop_trials,
                                 echo);
        if (surface->parsed())
            return run_surface(g_surf, c_surf, dist_surf, tmin, tmax, tstep, dmin, dmax, dstep,
                               surf_trials, surf_mode, surf_geometry, echo);
        if (fit->parsed())
            return run_fit(g_fit, fit_in, fit_synth, fit_alpha, fit_beta, ftmin, ftmax, ftstep,
                           fdmin, fdmax, fdstep, echo);
        if (qec->parsed()) return run_qec(g_qec, pmin, pmax, pstep, kmin, kmax, echo);
        if (plan->parsed())
            return run_plan(g_plan, plan_delta, plan_distance, plan_eps, plan_p, plan_m, plan_fit,
                            plan_alpha, plan_beta, c_plan, dist_plan, plan_quantile, plan_margin,
                            planner_trials, echo);
        if (e2e->parsed())
            return run_endtoend(g_e2e, e2e_plan, e2e_p, e2e_k, e2e_m, e2e_trials, echo);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        return msg.find("infeasible") != std::string::npos ? kExitInfeasible : kExitNumerical;
    }
    return kExitUsage;
}
