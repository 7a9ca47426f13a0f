#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainsim/rng.hpp"

namespace chainsim {

struct ChainSpec {
    int n_sites = 0;
    double coupling_j = 1.0;  // J, energy units with hbar = 1
    int alice_size = 0;       // N_A, sites 0 .. alice_size-1
    int bob_size = 0;         // N_B, sites n_sites-bob_size .. n_sites-1

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("ChainSpec: n_sites must be >= 1");
        if (coupling_j <= 0) throw std::invalid_argument("ChainSpec: coupling_j must be > 0");
        if (alice_size < 1 || bob_size < 1)
            throw std::invalid_argument("ChainSpec: endpoint regions must be >= 1 site");
        if (alice_size + bob_size > n_sites)
            throw std::invalid_argument("ChainSpec: alice_size + bob_size exceeds n_sites");
    }
};

enum class Distribution { uniform, normal, cauchy };

inline std::string to_string(Distribution d) {
    switch (d) {
        case Distribution::uniform: return "uniform";
        case Distribution::normal: return "normal";
        case Distribution::cauchy: return "cauchy";
    }
    return "?";
}

inline Distribution distribution_from_string(const std::string& s) {
    if (s == "uniform") return Distribution::uniform;
    if (s == "normal") return Distribution::normal;
    if (s == "cauchy") return Distribution::cauchy;
    throw std::invalid_argument("unknown distribution: " + s);
}

struct DisorderModel {
    Distribution distribution = Distribution::uniform;
    double delta = 0.0;  // uniform: support [-delta,delta]; normal: stddev; cauchy: scale
    std::uint64_t seed = 0;

    void validate() const {
        if (delta < 0) throw std::invalid_argument("DisorderModel: delta must be >= 0");
    }
};

struct DisorderRealization {
    std::vector<double> epsilons;       // on-site energies, one per site
    std::size_t clamped_draws = 0;      // Cauchy draws clipped at the clamp bound
};

// Cauchy draws are clamped at |eps| <= cauchy_clamp to keep the eigensolver
// well-conditioned; the clip count is reported in the realization.
inline constexpr double kCauchyClampFactor = 1e3;

// n i.i.d. draws, fully determined by (model.seed, trial_index).
inline DisorderRealization sample_disorder(const DisorderModel& model, int n,
                                           std::uint64_t trial_index,
                                           double coupling_j = 1.0) {
    model.validate();
    if (n < 1) throw std::invalid_argument("sample_disorder: n must be >= 1");
    DisorderRealization r;
    r.epsilons.assign(static_cast<std::size_t>(n), 0.0);
    if (model.delta == 0.0) return r;

    auto eng = make_engine(derive_seed(model.seed, trial_index));
    switch (model.distribution) {
        case Distribution::uniform: {
            std::uniform_real_distribution<double> d(-model.delta, model.delta);
            for (auto& e : r.epsilons) e = d(eng);
            break;
        }
        case Distribution::normal: {
            std::normal_distribution<double> d(0.0, model.delta);
            for (auto& e : r.epsilons) e = d(eng);
            break;
        }
        case Distribution::cauchy: {
            std::cauchy_distribution<double> d(0.0, model.delta);
            const double clamp = kCauchyClampFactor * coupling_j;
            for (auto& e : r.epsilons) {
                e = d(eng);
                if (std::abs(e) > clamp) {
                    e = (e > 0 ? clamp : -clamp);
                    ++r.clamped_draws;
                }
            }
            break;
        }
    }
    return r;
}

}  // namespace chainsim
