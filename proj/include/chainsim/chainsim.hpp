#pragma once

#include "chainsim/chain.hpp"
#include "chainsim/channels.hpp"
#include "chainsim/hamiltonian.hpp"
#include "chainsim/io.hpp"
#include "chainsim/montecarlo.hpp"
#include "chainsim/parallel.hpp"
#include "chainsim/pauli.hpp"
#include "chainsim/protocol.hpp"
#include "chainsim/qec.hpp"
#include "chainsim/rng.hpp"
#include "chainsim/transfer.hpp"
#include "chainsim/wavepacket.hpp"
