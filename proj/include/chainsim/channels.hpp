#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>
#include <vector>

namespace chainsim {

using Mat2 = Eigen::Matrix2cd;

inline Mat2 pauli_matrix(int idx) {
    using namespace std::complex_literals;
    Mat2 m;
    switch (idx) {
        case 0: m << 1, 0, 0, 1; break;          // I
        case 1: m << 0, 1, 1, 0; break;          // X
        case 2: m << 0, -1i, 1i, 0; break;       // Y
        case 3: m << 1, 0, 0, -1; break;         // Z
        default: throw std::invalid_argument("pauli_matrix: index out of range");
    }
    return m;
}

// Single-qubit CPTP map, either as a Kraus list or as a Pauli probability
// 4-vector over {I, X, Y, Z}. Validated at construction.
class QubitChannel {
  public:
    static constexpr double kCptpTol = 1e-10;

    static QubitChannel from_kraus(std::vector<Mat2> ops) {
        Mat2 sum = Mat2::Zero();
        for (const auto& k : ops) sum += k.adjoint() * k;
        if ((sum - Mat2::Identity()).cwiseAbs().maxCoeff() > kCptpTol)
            throw std::invalid_argument("QubitChannel: Kraus set is not trace preserving");
        QubitChannel ch;
        ch.rep_ = std::move(ops);
        return ch;
    }

    static QubitChannel from_pauli_probs(std::array<double, 4> probs) {
        double sum = 0.0;
        for (double q : probs) {
            if (q < -1e-12) throw std::invalid_argument("QubitChannel: negative Pauli probability");
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("QubitChannel: Pauli probabilities must sum to 1");
        QubitChannel ch;
        ch.rep_ = probs;
        return ch;
    }

    bool is_pauli() const { return std::holds_alternative<std::array<double, 4>>(rep_); }

    const std::array<double, 4>& pauli_probs() const {
        return std::get<std::array<double, 4>>(rep_);
    }

    // Kraus form; Pauli channels expand to sqrt(q_P) * P.
    std::vector<Mat2> kraus() const {
        if (auto* ops = std::get_if<std::vector<Mat2>>(&rep_)) return *ops;
        std::vector<Mat2> ops;
        const auto& q = pauli_probs();
        for (int i = 0; i < 4; ++i)
            if (q[i] > 0) ops.push_back(std::sqrt(q[i]) * pauli_matrix(i));
        return ops;
    }

    Mat2 apply(const Mat2& rho) const {
        Mat2 out = Mat2::Zero();
        for (const auto& k : kraus()) out += k * rho * k.adjoint();
        return out;
    }

    // Entanglement fidelity with the maximally entangled reference state.
    double entanglement_fidelity() const {
        if (is_pauli()) return pauli_probs()[0];
        double f = 0.0;
        for (const auto& k : std::get<std::vector<Mat2>>(rep_))
            f += std::norm(k.trace()) / 4.0;
        return f;
    }

  private:
    QubitChannel() = default;
    std::variant<std::vector<Mat2>, std::array<double, 4>> rep_;
};

struct DepolarizingParam {
    double p = 0.0;
};

inline QubitChannel amplitude_damping(double gamma) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("amplitude_damping: gamma must be in [0,1]");
    Mat2 k0, k1;
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    return QubitChannel::from_kraus({k0, k1});
}

inline QubitChannel depolarizing(DepolarizingParam p) {
    if (p.p < 0.0 || p.p > 1.0)
        throw std::invalid_argument("depolarizing: p must be in [0,1]");
    return QubitChannel::from_pauli_probs(
        {1.0 - 0.75 * p.p, 0.25 * p.p, 0.25 * p.p, 0.25 * p.p});
}

// Haar-average input-output fidelity, f = (2 F_e + 1) / 3.
inline double average_fidelity(const QubitChannel& ch) {
    return (2.0 * ch.entanglement_fidelity() + 1.0) / 3.0;
}

// Depolarizing parameter with the same average fidelity as the input channel,
// i.e. the unique p with 1 - p/2 = f. Channels with f < 1/2 give p in
// (1, 4/3]; the Pauli probability vector stays valid on that whole range.
inline DepolarizingParam twirl_to_depolarizing(const QubitChannel& ch) {
    const double p = 2.0 * (1.0 - average_fidelity(ch));
    if (p < -1e-10 || p > 4.0 / 3.0 + 1e-10)
        throw std::invalid_argument("twirl_to_depolarizing: fidelity outside qubit-channel range");
    return DepolarizingParam{std::clamp(p, 0.0, 4.0 / 3.0)};
}

// Closed form for the twirled amplitude damping channel:
// p = [gamma + 2(1 - sqrt(1 - gamma))] / 3.
inline DepolarizingParam twirl_amplitude_damping(double gamma) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("twirl_amplitude_damping: gamma must be in [0,1]");
    return DepolarizingParam{(gamma + 2.0 * (1.0 - std::sqrt(1.0 - gamma))) / 3.0};
}

// m sequential depolarizing channels with equal parameter: 1 - (1-p)^m.
inline DepolarizingParam compose_depolarizing(DepolarizingParam p, int m) {
    if (m < 1) throw std::invalid_argument("compose_depolarizing: m must be >= 1");
    if (p.p < 0.0 || p.p > 1.0)
        throw std::invalid_argument("compose_depolarizing: p must be in [0,1]");
    return DepolarizingParam{1.0 - std::pow(1.0 - p.p, m)};
}

}  // namespace chainsim
