#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "chainsim/chain.hpp"
#include "chainsim/channels.hpp"
#include "chainsim/montecarlo.hpp"
#include "chainsim/parallel.hpp"
#include "chainsim/qec.hpp"
#include "chainsim/transfer.hpp"

namespace chainsim {

inline constexpr double kThresholdP = 2.0 / 15.0;

struct Plan {
    double segment_length_l = 0.0;  // sites
    double segment_time = 0.0;      // hbar/J
    int segments_m = 1;
    int level_k = 0;
    long long depth_n = 1;  // 5^k rails
    double p_basic = 0.0;
    double p_total_bound = 0.0;
    double fidelity_bound = 1.0;
};

// 1 - (1 - lemma2_bound(p,k))^m, clamped; vacuous bounds collapse to 1.
inline double p_total_bound(DepolarizingParam p, int k, int m) {
    if (m < 1) throw std::invalid_argument("p_total_bound: m must be >= 1");
    const double per_block = lemma2_bound(p, k);
    if (per_block >= 1.0) return 1.0;
    return std::clamp(1.0 - std::pow(1.0 - per_block, m), 0.0, 1.0);
}

struct DepthRequirement {
    int k = 0;
    long long n = 1;  // 5^k
};

// Smallest k with 5^k > (ln(m/eps))^3 / (-ln(15p/2))^3; by the protocol's
// inequality chain this forces p_total_bound(p, k, m) < eps.
inline DepthRequirement required_depth(int m, double epsilon, DepolarizingParam p) {
    if (m < 1) throw std::invalid_argument("required_depth: m must be >= 1");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("required_depth: epsilon must be in (0,1]");
    if (!(p.p > 0.0 && p.p < kThresholdP))
        throw std::invalid_argument("required_depth: p must be in (0, 2/15)");
    const double rhs = std::pow(std::log(m / epsilon) / (-std::log(7.5 * p.p)), 3.0);
    int k = 0;
    long long n = 1;
    while (static_cast<double>(n) <= rhs) {
        ++k;
        n *= 5;
        if (k > 60) throw std::runtime_error("required_depth: depth overflow");
    }
    // The integer rounding of k already satisfies the target; this guards the
    // guarantee explicitly rather than trusting the chain of inequalities.
    while (p_total_bound(p, k, m) >= epsilon) {
        ++k;
        n *= 5;
        if (k > 60) throw std::runtime_error("required_depth: no feasible depth");
    }
    return DepthRequirement{k, n};
}

struct PlannerOptions {
    double quantile = 0.95;       // quantile of p over disorder realizations
    double safety_margin = 0.75;  // applied to the 2/15 threshold
    int trials = 100;             // disorder samples per candidate L; 0 = use fit mean only
    double min_length = 10.0;     // sites
    double max_length = 4000.0;   // search bound, sites
    std::uint64_t seed = 12345;
};

namespace detail {

// Quantile of the twirled depolarizing parameter for a segment of length L,
// estimated from physical disorder trials on a segment-sized chain.
inline double segment_p_quantile(double length, double delta, const EmpiricalFit& fit,
                                 const ChainSpec& proto, Distribution dist,
                                 const PlannerOptions& opt) {
    const double velocity = 2.0 * proto.coupling_j;  // group velocity at k0 = pi/2
    const double t = length / velocity;
    if (opt.trials == 0) {
        // Fit-mean heuristic: no per-realization spread available.
        return twirl_amplitude_damping(predicted_gamma(fit, t, delta)).p;
    }
    ChainSpec seg = proto;
    seg.n_sites = proto.alice_size + proto.bob_size + static_cast<int>(std::lround(length));
    const auto packet = default_packet(seg);
    DisorderModel model{dist, delta, derive_seed(opt.seed, static_cast<std::uint64_t>(
                                                               std::lround(length * 16)))};
    // Measure at the packet's arrival in Bob's window.
    const double travel = (seg.n_sites - seg.bob_size / 2.0) - packet.center;
    const double t_arrive = travel / velocity;
    // Zero disorder is deterministic; one realization suffices.
    const int n_trials = delta == 0.0 ? 1 : opt.trials;
    std::vector<double> ps(static_cast<std::size_t>(n_trials));
    parallel_for_index(ps.size(), default_thread_count(), [&](std::size_t i) {
        const auto rec = transfer_gamma(seg, model, i, packet, t_arrive);
        ps[i] = twirl_amplitude_damping(rec.gamma).p;
    });
    std::sort(ps.begin(), ps.end());
    const double pos = opt.quantile * (static_cast<double>(ps.size()) - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, ps.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return ps[lo] * (1.0 - frac) + ps[hi] * frac;
}

}  // namespace detail

// Chooses the largest segment length whose p-quantile stays under the damped
// threshold, then sizes the code depth for the requested distance and target.
inline Plan plan_transmission(double delta, double distance_sites, double epsilon,
                              const EmpiricalFit& fit, const ChainSpec& chain,
                              const PlannerOptions& opt = {}) {
    if (distance_sites <= 0) throw std::invalid_argument("plan_transmission: distance must be > 0");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("plan_transmission: epsilon must be in (0,1]");
    if (delta < 0) throw std::invalid_argument("plan_transmission: delta must be >= 0");
    chain.validate();

    const double threshold = kThresholdP * opt.safety_margin;
    auto p_at = [&](double length) {
        return detail::segment_p_quantile(length, delta, fit, chain, fit.distribution, opt);
    };

    if (p_at(opt.min_length) >= threshold)
        throw std::runtime_error(
            "plan_transmission: infeasible, p quantile " +
            std::to_string(p_at(opt.min_length)) + " at minimum segment length exceeds " +
            std::to_string(threshold));

    // p is monotone in segment length in expectation; bisect on the longest
    // admissible L.
    double lo = opt.min_length, hi = opt.max_length;
    if (p_at(hi) < threshold) {
        lo = hi;
    } else {
        for (int iter = 0; iter < 40 && hi - lo > 1.0; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (p_at(mid) < threshold ? lo : hi) = mid;
        }
    }
    const double length = std::min(lo, distance_sites);
    const double p_basic = std::min(p_at(length), threshold);

    Plan plan;
    plan.segment_length_l = length;
    plan.segment_time = length / (2.0 * chain.coupling_j);
    plan.segments_m = static_cast<int>(std::ceil(distance_sites / length));
    const double p_for_depth = std::max(p_basic, 1e-12);  // depth formula needs p > 0
    const auto depth = required_depth(plan.segments_m, epsilon, DepolarizingParam{p_for_depth});
    plan.level_k = depth.k;
    plan.depth_n = depth.n;
    plan.p_basic = p_basic;
    plan.p_total_bound = p_total_bound(DepolarizingParam{p_for_depth}, depth.k, plan.segments_m);
    plan.fidelity_bound = 1.0 - plan.p_total_bound / 2.0;
    return plan;
}

// Per-rail depolarizing parameter sources for the Pauli-frame simulation.
struct FixedSource {
    double p;
};
struct EmpiricalSource {
    EmpiricalFit fit;
    double delta;
};
struct PhysicalSource {
    ChainSpec chain;
    DisorderModel model;
    int pool_size = 256;  // disorder realizations sampled up front
};
using PSource = std::variant<FixedSource, EmpiricalSource, PhysicalSource>;

struct ProtocolResult {
    long long trials = 0;
    long long logical_errors = 0;          // non-identity logical outcomes
    std::array<long long, 4> counts{};     // I, X, Y, Z
    double p_hat = 0.0;                    // (4/3) * error fraction
    double p_hat_stderr = 0.0;
    double p_hat_lo = 0.0;                 // 3-sigma binomial interval, scaled
    double p_hat_hi = 0.0;
};

inline constexpr int kMaxSimulatedLevel = 8;

// Pauli-frame Monte Carlo of the twirl-encode-correct pipeline. Exact for
// Pauli channels and stabilizer codes; no state vectors involved.
inline ProtocolResult simulate_protocol(const Plan& plan, const PSource& source,
                                        long long trials, std::uint64_t seed,
                                        int threads = 1) {
    if (trials < 1) throw std::invalid_argument("simulate_protocol: trials must be >= 1");
    if (plan.level_k < 0 || plan.segments_m < 1)
        throw std::invalid_argument("simulate_protocol: invalid plan");
    if (plan.level_k > kMaxSimulatedLevel)
        throw std::invalid_argument("simulate_protocol: refusing k > 8 (5^k rails)");

    const int k = plan.level_k;
    std::size_t rails = 1;
    for (int i = 0; i < k; ++i) rails *= 5;

    // Pre-sampled physical gamma pool; rails draw from it i.i.d.
    std::vector<double> p_pool;
    if (const auto* phys = std::get_if<PhysicalSource>(&source)) {
        p_pool.resize(static_cast<std::size_t>(phys->pool_size));
        const auto packet = default_packet(phys->chain);
        parallel_for_index(p_pool.size(), threads, [&](std::size_t i) {
            const auto rec =
                transfer_gamma(phys->chain, phys->model, i, packet, plan.segment_time);
            p_pool[i] = twirl_amplitude_damping(rec.gamma).p;
        });
    }
    double p_fixed = 0.0;
    if (const auto* fx = std::get_if<FixedSource>(&source)) {
        if (fx->p < 0 || fx->p > 1)
            throw std::invalid_argument("simulate_protocol: fixed p outside [0,1]");
        p_fixed = fx->p;
    } else if (const auto* emp = std::get_if<EmpiricalSource>(&source)) {
        p_fixed = twirl_amplitude_damping(
                      predicted_gamma(emp->fit, plan.segment_time, emp->delta))
                      .p;
    }

    const auto& table = block_decode_table();
    const int n_threads = std::max(threads, 1);
    std::vector<std::array<long long, 4>> counts(static_cast<std::size_t>(n_threads),
                                                 std::array<long long, 4>{});
    const long long per = (trials + n_threads - 1) / n_threads;

    parallel_for_index(static_cast<std::size_t>(n_threads), n_threads, [&](std::size_t slot) {
        const long long begin = static_cast<long long>(slot) * per;
        const long long end = std::min(trials, begin + per);
        std::vector<int> frame(rails), next(rails);
        for (long long trial = begin; trial < end; ++trial) {
            auto eng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(trial)));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            int logical = 0;
            for (int seg = 0; seg < plan.segments_m; ++seg) {
                // Sample rail errors for this segment.
                for (std::size_t r = 0; r < rails; ++r) {
                    double p = p_fixed;
                    if (!p_pool.empty())
                        p = p_pool[static_cast<std::size_t>(
                            unif(eng) * static_cast<double>(p_pool.size()))];
                    const double u = unif(eng);
                    int sym = 0;
                    if (u < 0.75 * p) sym = 1 + static_cast<int>(u / (0.25 * p));
                    frame[r] = std::min(sym, 3);
                }
                // Decode level by level, innermost first.
                std::size_t width = rails;
                while (width > 1) {
                    width /= 5;
                    for (std::size_t b = 0; b < width; ++b) {
                        int idx = 0;
                        for (int q = 4; q >= 0; --q) idx = idx * 4 + frame[5 * b + q];
                        next[b] = table[static_cast<std::size_t>(idx)];
                    }
                    std::swap(frame, next);
                }
                logical = compose_symbols(logical, frame[0]);
            }
            ++counts[slot][static_cast<std::size_t>(logical)];
        }
    });

    ProtocolResult res;
    res.trials = trials;
    for (const auto& c : counts)
        for (int i = 0; i < 4; ++i) res.counts[static_cast<std::size_t>(i)] += c[i];
    res.logical_errors = trials - res.counts[0];
    const double frac = static_cast<double>(res.logical_errors) / static_cast<double>(trials);
    const double se = std::sqrt(std::max(frac * (1.0 - frac), 1.0 / trials) /
                                static_cast<double>(trials));
    res.p_hat = (4.0 / 3.0) * frac;
    res.p_hat_stderr = (4.0 / 3.0) * se;
    res.p_hat_lo = std::max(0.0, res.p_hat - 3.0 * res.p_hat_stderr);
    res.p_hat_hi = std::min(4.0 / 3.0, res.p_hat + 3.0 * res.p_hat_stderr);
    return res;
}

}  // namespace chainsim
