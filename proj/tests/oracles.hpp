// Independent reference computations used only by the test suite.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "chainsim/channels.hpp"
#include "chainsim/pauli.hpp"

namespace oracles {

using chainsim::Mat2;
using cplx = std::complex<double>;

// ------------------------------------------------------------------ spins

// Full 2^N Hamiltonian of the disordered Heisenberg chain:
// H = -(J/2) sum_bonds (XX + YY + ZZ) + sum_j eps_j |j><j|
// with |j> the single-excitation basis state (bit j set, spin-down = |1>).
inline Eigen::MatrixXd full_hamiltonian(int n, double j, const std::vector<double>& eps) {
    const int dim = 1 << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int b = 0; b + 1 < n; ++b) {
            const int zi = (s >> b) & 1 ? -1 : 1;
            const int zj = (s >> (b + 1)) & 1 ? -1 : 1;
            diag += -(j / 2.0) * zi * zj;
            if (zi != zj) {
                // XX + YY flips an antiparallel pair with matrix element 2.
                const int flipped = s ^ (0b11 << b);
                h(flipped, s) += -j;
            }
        }
        if (__builtin_popcount(static_cast<unsigned>(s)) == 1) {
            const int site = __builtin_ctz(static_cast<unsigned>(s));
            diag += eps[static_cast<std::size_t>(site)];
        }
        h(s, s) += diag;
    }
    return h;
}

// Evolves single-excitation amplitudes through the full 2^N Hamiltonian and
// returns them with the vacuum phase factored out.
inline Eigen::VectorXcd full_space_evolve(int n, double j, const std::vector<double>& eps,
                                          const Eigen::VectorXcd& amplitudes, double t) {
    const int dim = 1 << n;
    const Eigen::MatrixXd h = full_hamiltonian(n, j, eps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(dim);
    for (int site = 0; site < n; ++site) state[1 << site] = amplitudes[site];
    Eigen::VectorXcd modes = solver.eigenvectors().transpose() * state;
    for (int m = 0; m < dim; ++m)
        modes[m] *= std::exp(cplx(0.0, -solver.eigenvalues()[m] * t));
    state = solver.eigenvectors() * modes;
    const double vacuum_energy = h(0, 0);
    Eigen::VectorXcd out(n);
    for (int site = 0; site < n; ++site)
        out[site] = state[1 << site] * std::exp(cplx(0.0, vacuum_energy * t));
    return out;
}

// Single-excitation eigenvalues of the full Hamiltonian, relative to vacuum.
inline Eigen::VectorXd full_space_single_excitation_spectrum(int n, double j,
                                                             const std::vector<double>& eps) {
    const Eigen::MatrixXd h = full_hamiltonian(n, j, eps);
    Eigen::MatrixXd block(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) block(a, b) = h(1 << a, 1 << b);
    block -= h(0, 0) * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    return solver.eigenvalues();
}

// Projection of the full Hamiltonian onto the single-excitation basis,
// relative to the vacuum energy.
inline Eigen::MatrixXd single_excitation_block(int n, double j, const std::vector<double>& eps) {
    const Eigen::MatrixXd h = full_hamiltonian(n, j, eps);
    Eigen::MatrixXd block(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) block(a, b) = h(1 << a, 1 << b);
    block -= h(0, 0) * Eigen::MatrixXd::Identity(n, n);
    return block;
}

// ---------------------------------------------------------------- channels

// The 24 single-qubit Cliffords, generated by closure of {H, S} with global
// phase normalized away.
inline const std::vector<Mat2>& clifford_group() {
    static const std::vector<Mat2> group = [] {
        auto normalize = [](Mat2 u) {
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    if (std::abs(u(r, c)) > 1e-9) {
                        u *= std::conj(u(r, c)) / std::abs(u(r, c));
                        return u;
                    }
            return u;
        };
        auto key = [](const Mat2& u) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f",
                          u(0, 0).real(), u(0, 0).imag(), u(0, 1).real(), u(0, 1).imag(),
                          u(1, 0).real(), u(1, 0).imag(), u(1, 1).real(), u(1, 1).imag());
            return std::string(buf);
        };
        Mat2 h, s;
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        s << 1, 0, 0, cplx(0, 1);
        std::vector<Mat2> group{normalize(Mat2::Identity())};
        std::vector<std::string> seen{key(group[0])};
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (const Mat2& g : {h, s}) {
                const Mat2 u = normalize(group[i] * g);
                const auto k = key(u);
                bool found = false;
                for (const auto& kk : seen) found |= (kk == k);
                if (!found) {
                    group.push_back(u);
                    seen.push_back(k);
                }
            }
        }
        return group;
    }();
    return group;
}

// Diagonal of the chi matrix in the Pauli basis: for a Pauli channel these
// are the Pauli probabilities.
inline std::array<double, 4> chi_diagonal(const std::vector<Mat2>& kraus) {
    std::array<double, 4> c{};
    for (int p = 0; p < 4; ++p) {
        const Mat2 pauli = chainsim::pauli_matrix(p);
        for (const auto& k : kraus)
            c[static_cast<std::size_t>(p)] += std::norm((pauli.adjoint() * k).trace()) / 4.0;
    }
    return c;
}

// Exact 2-design twirl: averages the channel over the Clifford group and
// reads off the depolarizing parameter from the chi diagonal.
inline double clifford_twirl_p(const chainsim::QubitChannel& ch) {
    const auto& cliffords = clifford_group();
    std::vector<Mat2> kraus;
    const double scale = 1.0 / std::sqrt(static_cast<double>(cliffords.size()));
    for (const auto& u : cliffords)
        for (const auto& k : ch.kraus()) kraus.push_back(scale * u.adjoint() * k * u);
    const auto c = chi_diagonal(kraus);
    return (4.0 / 3.0) * (1.0 - c[0]);
}

// Random CPTP channel with `ranks` Kraus operators via a Haar random isometry.
inline chainsim::QubitChannel random_channel(std::mt19937_64& eng, int ranks = 3) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(2 * ranks, 2);
    for (int r = 0; r < 2 * ranks; ++r)
        for (int c = 0; c < 2; ++c) g(r, c) = cplx(gauss(eng), gauss(eng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * ranks, 2);
    std::vector<Mat2> kraus;
    for (int i = 0; i < ranks; ++i) kraus.push_back(q.block<2, 2>(2 * i, 0));
    return chainsim::QubitChannel::from_kraus(kraus);
}

// m-fold composition of a depolarizing channel as Pauli probability vectors.
inline double compose_pauli_probs_p(double p, int m) {
    std::array<double, 4> acc = {1, 0, 0, 0};
    const std::array<double, 4> single = {1 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p};
    for (int i = 0; i < m; ++i) {
        std::array<double, 4> next{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                next[static_cast<std::size_t>(chainsim::compose_symbols(a, b))] +=
                    acc[static_cast<std::size_t>(a)] * single[static_cast<std::size_t>(b)];
        acc = next;
    }
    return (4.0 / 3.0) * (1.0 - acc[0]);
}

// Haar-averaged input-output fidelity by direct sampling of pure states.
inline double sampled_average_fidelity(const chainsim::QubitChannel& ch, int samples,
                                       std::mt19937_64& eng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        Eigen::Vector2cd psi(cplx(gauss(eng), gauss(eng)), cplx(gauss(eng), gauss(eng)));
        psi.normalize();
        const Mat2 rho = psi * psi.adjoint();
        const Mat2 out = ch.apply(rho);
        sum += (psi.adjoint() * out * psi)(0, 0).real();
    }
    return sum / samples;
}

}  // namespace oracles
