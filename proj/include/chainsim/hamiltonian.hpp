#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "chainsim/chain.hpp"

namespace chainsim {

// Restriction of the disordered Heisenberg Hamiltonian to the single-excitation
// subspace, relative to the vacuum energy. Real symmetric tridiagonal:
//   diagonal[j]     = J * (number of neighbours of site j) + eps_j
//   off_diagonal[j] = -J
struct SingleExcitationHamiltonian {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;  // length n_sites - 1

    int size() const { return static_cast<int>(diagonal.size()); }
};

inline SingleExcitationHamiltonian build_hamiltonian(const ChainSpec& chain,
                                                     const DisorderRealization& disorder) {
    chain.validate();
    const int n = chain.n_sites;
    if (static_cast<int>(disorder.epsilons.size()) != n)
        throw std::invalid_argument("build_hamiltonian: disorder length mismatch");

    SingleExcitationHamiltonian h;
    h.diagonal.resize(n);
    h.off_diagonal.assign(n > 0 ? n - 1 : 0, -chain.coupling_j);
    const double j = chain.coupling_j;
    for (int i = 0; i < n; ++i) {
        const int neighbours = (i > 0 ? 1 : 0) + (i < n - 1 ? 1 : 0);
        h.diagonal[i] = j * neighbours + disorder.epsilons[i];
    }
    return h;
}

// Exact spectral propagator exp(-i H t); the eigendecomposition is computed
// once and reused across evolution times.
class Propagator {
  public:
    explicit Propagator(const SingleExcitationHamiltonian& h) {
        const int n = h.size();
        if (n < 1) throw std::invalid_argument("Propagator: empty Hamiltonian");
        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(h.diagonal.data(), n);
        Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
        if (n > 1)
            sub = Eigen::Map<const Eigen::VectorXd>(h.off_diagonal.data(), n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("Propagator: tridiagonal eigensolver failed");
        evals_ = solver.eigenvalues();
        evecs_ = solver.eigenvectors();
    }

    int size() const { return static_cast<int>(evals_.size()); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& psi, double t) const {
        if (psi.size() != evals_.size())
            throw std::invalid_argument("Propagator: dimension mismatch");
        Eigen::VectorXcd modes = evecs_.transpose() * psi;
        for (Eigen::Index k = 0; k < modes.size(); ++k)
            modes[k] *= std::exp(std::complex<double>(0.0, -evals_[k] * t));
        return evecs_ * modes;
    }

    const Eigen::VectorXd& eigenvalues() const { return evals_; }

  private:
    Eigen::VectorXd evals_;
    Eigen::MatrixXd evecs_;
};

}  // namespace chainsim
