#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainsim/chain.hpp"
#include "chainsim/parallel.hpp"
#include "chainsim/transfer.hpp"

namespace chainsim {

enum class GammaMode { raw, relative };

inline std::string to_string(GammaMode m) {
    return m == GammaMode::raw ? "raw" : "relative";
}

// Disorder-averaged damping surface over (t, delta). Both conventions are
// recorded: raw gamma = 1 - C_B, and gamma relative to the zero-disorder
// baseline (1 - C_B,delta / C_B,0), which vanishes at delta = 0.
// Chain geometry for the surface sweep. fixed_chain keeps Bob at the end of
// the given chain for every t; arrival_matched sizes the chain per time so
// the packet reaches Bob's window at t (distance = 2J t), which treats the
// time axis as propagation distance.
enum class SurfaceGeometry { fixed_chain, arrival_matched };

struct SurfaceGrid {
    std::vector<double> times;
    std::vector<double> deltas;
    // indexed [time][delta]
    std::vector<std::vector<double>> mean_gamma_raw;
    std::vector<std::vector<double>> stderr_gamma_raw;
    std::vector<std::vector<double>> mean_gamma_rel;
    std::vector<std::vector<double>> stderr_gamma_rel;
    std::vector<double> baseline_cb;  // zero-disorder C_B per time
    int trials = 0;
    Distribution distribution = Distribution::uniform;
    ChainSpec chain;
    PacketParams packet{};
    std::uint64_t seed = 0;
    SurfaceGeometry geometry = SurfaceGeometry::fixed_chain;
    std::vector<int> n_sites_per_time;

    const std::vector<std::vector<double>>& mean(GammaMode m) const {
        return m == GammaMode::raw ? mean_gamma_raw : mean_gamma_rel;
    }
    const std::vector<std::vector<double>>& stderr_of(GammaMode m) const {
        return m == GammaMode::raw ? stderr_gamma_raw : stderr_gamma_rel;
    }
};

struct EmpiricalFit {
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_stderr = 0.0;
    double beta_stderr = 0.0;
    double r_squared = 0.0;
    GammaMode mode = GammaMode::relative;
    Distribution distribution = Distribution::uniform;
};

// Baseline C_B below this is treated as numerically unresolved and the cell
// is excluded from relative-mode statistics.
inline constexpr double kBaselineFloor = 1e-9;
inline constexpr double kSaturationCutoff = 0.999;

inline SurfaceGrid gamma_surface(const ChainSpec& chain, const DisorderModel& model_template,
                                 std::vector<double> times, std::vector<double> deltas,
                                 int trials, const PacketParams& packet,
                                 int threads = 1,
                                 SurfaceGeometry geometry = SurfaceGeometry::fixed_chain) {
    chain.validate();
    if (trials < 1) throw std::invalid_argument("gamma_surface: trials must be >= 1");
    if (times.empty() || deltas.empty())
        throw std::invalid_argument("gamma_surface: times and deltas must be nonempty");
    if (!std::is_sorted(times.begin(), times.end()) ||
        !std::is_sorted(deltas.begin(), deltas.end()))
        throw std::invalid_argument("gamma_surface: times and deltas must be ascending");

    const std::size_t nt = times.size(), nd = deltas.size();
    SurfaceGrid grid;
    grid.times = std::move(times);
    grid.deltas = std::move(deltas);
    grid.trials = trials;
    grid.distribution = model_template.distribution;
    grid.chain = chain;
    grid.packet = packet;
    grid.seed = model_template.seed;
    grid.geometry = geometry;

    // Per-time chain: fixed, or sized so the packet arrives in Bob's window
    // at time t travelling at group velocity 2J.
    grid.n_sites_per_time.resize(nt);
    const double velocity = 2.0 * chain.coupling_j;
    for (std::size_t it = 0; it < nt; ++it) {
        if (geometry == SurfaceGeometry::fixed_chain) {
            grid.n_sites_per_time[it] = chain.n_sites;
        } else {
            const int n = static_cast<int>(
                std::lround(packet.center + velocity * grid.times[it] + chain.bob_size / 2.0));
            grid.n_sites_per_time[it] = std::max(n, chain.alice_size + chain.bob_size);
        }
    }
    auto chain_at = [&](std::size_t it) {
        ChainSpec c = chain;
        c.n_sites = grid.n_sites_per_time[it];
        return c;
    };

    // Zero-disorder baseline shared by every cell.
    grid.baseline_cb.resize(nt);
    if (geometry == SurfaceGeometry::fixed_chain) {
        const auto psi0 =
            gaussian_wavepacket(chain, packet.center, packet.width, packet.momentum);
        DisorderRealization none;
        none.epsilons.assign(static_cast<std::size_t>(chain.n_sites), 0.0);
        const Propagator prop(build_hamiltonian(chain, none));
        for (std::size_t it = 0; it < nt; ++it)
            grid.baseline_cb[it] = bob_capture(evolve(prop, psi0, grid.times[it]), chain);
    } else {
        parallel_for_index(nt, threads, [&](std::size_t it) {
            const auto c = chain_at(it);
            DisorderRealization none;
            none.epsilons.assign(static_cast<std::size_t>(c.n_sites), 0.0);
            const auto psi0 =
                gaussian_wavepacket(c, packet.center, packet.width, packet.momentum);
            const Propagator prop(build_hamiltonian(c, none));
            grid.baseline_cb[it] = bob_capture(evolve(prop, psi0, grid.times[it]), c);
        });
    }

    // cb[delta][trial][time]
    std::vector<std::vector<std::vector<double>>> cb(
        nd, std::vector<std::vector<double>>(static_cast<std::size_t>(trials),
                                             std::vector<double>(nt)));
    parallel_for_index(nd * static_cast<std::size_t>(trials), threads, [&](std::size_t task) {
        const std::size_t id = task / static_cast<std::size_t>(trials);
        const std::size_t trial = task % static_cast<std::size_t>(trials);
        DisorderModel model = model_template;
        model.delta = grid.deltas[id];
        model.seed = derive_seed(model_template.seed, id + 1);  // per-delta stream
        if (geometry == SurfaceGeometry::fixed_chain) {
            const auto psi0 =
                gaussian_wavepacket(chain, packet.center, packet.width, packet.momentum);
            const auto disorder =
                sample_disorder(model, chain.n_sites, trial, chain.coupling_j);
            const Propagator prop(build_hamiltonian(chain, disorder));
            for (std::size_t it = 0; it < nt; ++it)
                cb[id][trial][it] = bob_capture(evolve(prop, psi0, grid.times[it]), chain);
        } else {
            for (std::size_t it = 0; it < nt; ++it) {
                const auto c = chain_at(it);
                // Same stream prefix for every t: the realization is one
                // chain viewed at growing length.
                const auto disorder = sample_disorder(model, c.n_sites, trial, c.coupling_j);
                const auto psi0 =
                    gaussian_wavepacket(c, packet.center, packet.width, packet.momentum);
                const Propagator prop(build_hamiltonian(c, disorder));
                cb[id][trial][it] = bob_capture(evolve(prop, psi0, grid.times[it]), c);
            }
        }
    });

    auto alloc = [&] { return std::vector<std::vector<double>>(nt, std::vector<double>(nd)); };
    grid.mean_gamma_raw = alloc();
    grid.stderr_gamma_raw = alloc();
    grid.mean_gamma_rel = alloc();
    grid.stderr_gamma_rel = alloc();

    auto accumulate = [&](std::size_t it, std::size_t id, auto value) {
        double sum = 0.0, sq = 0.0;
        for (int tr = 0; tr < trials; ++tr) {
            const double g = value(cb[id][static_cast<std::size_t>(tr)][it]);
            sum += g;
            sq += g * g;
        }
        const double mean = sum / trials;
        double var = (sq - trials * mean * mean) / (trials > 1 ? trials - 1 : 1);
        var = std::max(var, 0.0);
        return std::pair<double, double>{mean, std::sqrt(var / trials)};
    };
    for (std::size_t it = 0; it < nt; ++it) {
        const double base = grid.baseline_cb[it];
        for (std::size_t id = 0; id < nd; ++id) {
            auto [mr, sr] = accumulate(it, id, [](double c) { return 1.0 - c; });
            grid.mean_gamma_raw[it][id] = mr;
            grid.stderr_gamma_raw[it][id] = sr;
            auto [mrel, srel] = accumulate(it, id, [&](double c) {
                if (base < kBaselineFloor) return 1.0;
                return std::clamp(1.0 - c / base, 0.0, 1.0);
            });
            grid.mean_gamma_rel[it][id] = mrel;
            grid.stderr_gamma_rel[it][id] = srel;
        }
    }
    return grid;
}

// Cells entering the fit: positive time, unsaturated, and (in relative mode)
// a resolvable zero-disorder baseline.
inline bool fit_cell_usable(const SurfaceGrid& s, GammaMode mode, std::size_t it,
                            std::size_t id) {
    if (s.times[it] <= 0.0) return false;
    if (mode == GammaMode::relative && s.baseline_cb[it] < kBaselineFloor) return false;
    return s.mean(mode)[it][id] <= kSaturationCutoff;
}

// Least squares for gamma = 1 - exp(-alpha t (delta^2 + beta delta)):
// linear in y = -ln(1 - gamma)/t against (delta^2, delta), followed by a
// Gauss-Newton refinement on the original form.
inline EmpiricalFit fit_empirical(const SurfaceGrid& surface,
                                  GammaMode mode = GammaMode::relative,
                                  int refine_iterations = 20) {
    struct Cell { double t, d, gamma; };
    std::vector<Cell> cells;
    for (std::size_t it = 0; it < surface.times.size(); ++it)
        for (std::size_t id = 0; id < surface.deltas.size(); ++id)
            if (fit_cell_usable(surface, mode, it, id))
                cells.push_back({surface.times[it], surface.deltas[id],
                                 surface.mean(mode)[it][id]});
    if (cells.size() < 6)
        throw std::runtime_error("fit_empirical: fewer than 6 usable cells after filtering");

    // Normal equations for y = a*d^2 + b*d with a = alpha, b = alpha*beta.
    double s22 = 0, s21 = 0, s11 = 0, sy2 = 0, sy1 = 0;
    for (const auto& c : cells) {
        const double y = -std::log1p(-c.gamma) / c.t;
        const double d2 = c.d * c.d;
        s22 += d2 * d2;
        s21 += d2 * c.d;
        s11 += c.d * c.d;
        sy2 += y * d2;
        sy1 += y * c.d;
    }
    const double det = s22 * s11 - s21 * s21;
    if (std::abs(det) < 1e-300) throw std::runtime_error("fit_empirical: degenerate design");
    double a = (sy2 * s11 - sy1 * s21) / det;
    double b = (s22 * sy1 - s21 * sy2) / det;
    if (a <= 0.0)
        throw std::runtime_error("fit_empirical: fitted alpha is not positive");

    // Diagnostics in transformed coordinates.
    double ssr = 0, sst = 0, ybar = 0;
    for (const auto& c : cells) ybar += -std::log1p(-c.gamma) / c.t;
    ybar /= static_cast<double>(cells.size());
    for (const auto& c : cells) {
        const double y = -std::log1p(-c.gamma) / c.t;
        const double fit = a * c.d * c.d + b * c.d;
        ssr += (y - fit) * (y - fit);
        sst += (y - ybar) * (y - ybar);
    }
    const double r2 = sst > 0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;
    const double dof = static_cast<double>(cells.size()) - 2.0;
    const double sigma2 = dof > 0 ? ssr / dof : 0.0;
    const double var_a = sigma2 * s11 / det;
    const double var_b = sigma2 * s22 / det;

    // Gauss-Newton on the untransformed residuals.
    for (int iter = 0; iter < refine_iterations; ++iter) {
        double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
        for (const auto& c : cells) {
            const double expo = a * c.d * c.d + b * c.d;
            const double model = 1.0 - std::exp(-c.t * expo);
            const double resid = c.gamma - model;
            const double e = std::exp(-c.t * expo);
            const double da = c.t * c.d * c.d * e;
            const double db = c.t * c.d * e;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * resid;
            gb += db * resid;
        }
        const double jdet = jaa * jbb - jab * jab;
        if (std::abs(jdet) < 1e-300) break;
        const double step_a = (ga * jbb - gb * jab) / jdet;
        const double step_b = (jaa * gb - jab * ga) / jdet;
        a += step_a;
        b += step_b;
        if (a <= 0) { a -= step_a; b -= step_b; break; }
        if (std::abs(step_a) < 1e-14 * std::abs(a) && std::abs(step_b) < 1e-14) break;
    }

    EmpiricalFit fit;
    fit.alpha = a;
    fit.beta = b / a;
    fit.alpha_stderr = std::sqrt(std::max(var_a, 0.0));
    // delta method for beta = b/a
    fit.beta_stderr = std::abs(fit.beta) > 0 || var_b > 0
                          ? std::sqrt(std::max(var_b / (a * a) +
                                                   var_a * (b * b) / (a * a * a * a),
                                               0.0))
                          : 0.0;
    fit.r_squared = r2;
    fit.mode = mode;
    fit.distribution = surface.distribution;
    return fit;
}

inline double predicted_gamma(const EmpiricalFit& fit, double t, double delta) {
    if (t < 0 || delta < 0)
        throw std::invalid_argument("predicted_gamma: t and delta must be >= 0");
    return 1.0 - std::exp(-fit.alpha * t * (delta * delta + fit.beta * delta));
}

// Noise-free surface synthesized from the empirical law; used for fit
// self-consistency checks and the synthetic CLI mode.
inline SurfaceGrid synthetic_surface(std::vector<double> times, std::vector<double> deltas,
                                     double alpha, double beta) {
    SurfaceGrid grid;
    grid.times = std::move(times);
    grid.deltas = std::move(deltas);
    grid.trials = 1;
    grid.baseline_cb.assign(grid.times.size(), 1.0);
    EmpiricalFit law;
    law.alpha = alpha;
    law.beta = beta;
    const std::size_t nt = grid.times.size(), nd = grid.deltas.size();
    auto alloc = [&] { return std::vector<std::vector<double>>(nt, std::vector<double>(nd)); };
    grid.mean_gamma_raw = alloc();
    grid.stderr_gamma_raw = alloc();
    grid.mean_gamma_rel = alloc();
    grid.stderr_gamma_rel = alloc();
    for (std::size_t it = 0; it < nt; ++it)
        for (std::size_t id = 0; id < nd; ++id) {
            const double g = predicted_gamma(law, grid.times[it], grid.deltas[id]);
            grid.mean_gamma_raw[it][id] = g;
            grid.mean_gamma_rel[it][id] = g;
        }
    return grid;
}

}  // namespace chainsim
