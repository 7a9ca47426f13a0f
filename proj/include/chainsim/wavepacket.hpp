#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "chainsim/chain.hpp"
#include "chainsim/hamiltonian.hpp"

namespace chainsim {

// Site amplitudes c_j of a single-excitation state, unit norm.
struct Wavepacket {
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
    int size() const { return static_cast<int>(amplitudes.size()); }

    double site_probability(int j) const { return std::norm(amplitudes[j]); }

    // Probability-weighted mean site index.
    double centroid() const {
        double c = 0.0;
        for (int j = 0; j < size(); ++j) c += j * site_probability(j);
        return c;
    }
};

struct PacketParams {
    double center;    // site index, 0-based
    double width;     // Gaussian envelope width (sigma of the amplitudes)
    double momentum;  // carrier wavenumber k0
};

inline PacketParams default_packet(const ChainSpec& chain) {
    return PacketParams{0.5 * (chain.alice_size - 1),
                        chain.alice_size / 6.0,
                        std::numbers::pi / 2.0};
}

// Gaussian envelope with carrier momentum, truncated to Alice's region and
// renormalized. width == 0 degenerates to a single-site packet at round(center).
inline Wavepacket gaussian_wavepacket(const ChainSpec& chain, double center, double width,
                                      double momentum) {
    chain.validate();
    if (width < 0) throw std::invalid_argument("gaussian_wavepacket: width must be >= 0");
    Wavepacket psi;
    psi.amplitudes = Eigen::VectorXcd::Zero(chain.n_sites);
    if (width == 0.0) {
        const int j = static_cast<int>(std::lround(center));
        if (j < 0 || j >= chain.alice_size)
            throw std::invalid_argument("gaussian_wavepacket: packet vanishes after truncation");
        psi.amplitudes[j] = 1.0;
        return psi;
    }
    for (int j = 0; j < chain.alice_size; ++j) {
        const double d = j - center;
        const double env = std::exp(-d * d / (4.0 * width * width));
        psi.amplitudes[j] = env * std::exp(std::complex<double>(0.0, momentum * j));
    }
    const double n = psi.amplitudes.norm();
    if (n < 1e-300)
        throw std::invalid_argument("gaussian_wavepacket: packet vanishes after truncation");
    psi.amplitudes /= n;
    return psi;
}

inline Wavepacket evolve(const Propagator& prop, const Wavepacket& psi, double t) {
    if (t < 0) throw std::invalid_argument("evolve: t must be >= 0");
    return Wavepacket{prop.apply(psi.amplitudes, t)};
}

inline Wavepacket evolve(const SingleExcitationHamiltonian& h, const Wavepacket& psi, double t) {
    return evolve(Propagator(h), psi, t);
}

// C_B: probability mass on Bob's trailing bob_size sites.
inline double bob_capture(const Wavepacket& psi, const ChainSpec& chain) {
    chain.validate();
    if (psi.size() != chain.n_sites)
        throw std::invalid_argument("bob_capture: dimension mismatch");
    double c = 0.0;
    for (int j = chain.n_sites - chain.bob_size; j < chain.n_sites; ++j)
        c += psi.site_probability(j);
    return c;
}

}  // namespace chainsim
