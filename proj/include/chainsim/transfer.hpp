#pragma once

#include <cstdint>

#include "chainsim/chain.hpp"
#include "chainsim/hamiltonian.hpp"
#include "chainsim/wavepacket.hpp"

namespace chainsim {

struct TransferRecord {
    double time = 0.0;  // units of hbar/J
    double c_b = 0.0;   // Bob's captured mass
    double gamma = 0.0; // 1 - c_b
};

// One disorder realization, evolved once; gamma = 1 - C_B at time t.
inline TransferRecord transfer_gamma(const ChainSpec& chain, const DisorderModel& model,
                                     std::uint64_t trial_index, const PacketParams& packet,
                                     double t) {
    const auto disorder = sample_disorder(model, chain.n_sites, trial_index, chain.coupling_j);
    const auto h = build_hamiltonian(chain, disorder);
    const Propagator prop(h);
    const auto psi0 = gaussian_wavepacket(chain, packet.center, packet.width, packet.momentum);
    const auto psi = evolve(prop, psi0, t);
    const double cb = bob_capture(psi, chain);
    return TransferRecord{t, cb, 1.0 - cb};
}

}  // namespace chainsim
