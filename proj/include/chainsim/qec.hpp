#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "chainsim/channels.hpp"
#include "chainsim/pauli.hpp"

namespace chainsim {

enum class LogicalAction { I, X, Y, Z, NONZERO_SYNDROME };

struct StabilizerCode {
    std::array<PauliOperator, 4> generators;
    PauliOperator logical_x;
    PauliOperator logical_z;
};

// The [[5,1,3]] code: XZZXI and its cyclic shifts, logicals XXXXX / ZZZZZ.
inline StabilizerCode five_qubit_code() {
    StabilizerCode code;
    code.generators = {PauliOperator::from_string("XZZXI"),
                       PauliOperator::from_string("IXZZX"),
                       PauliOperator::from_string("XIXZZ"),
                       PauliOperator::from_string("ZXIXZ")};
    code.logical_x = PauliOperator::from_string("XXXXX");
    code.logical_z = PauliOperator::from_string("ZZZZZ");
    return code;
}

// 4-bit syndrome; bit i indicates anticommutation with generator i.
inline int syndrome(const StabilizerCode& code, const PauliOperator& e) {
    if (e.n != 5) throw std::invalid_argument("syndrome: operator must act on 5 qubits");
    int s = 0;
    for (int i = 0; i < 4; ++i)
        s |= symplectic_product(e, code.generators[i]) << i;
    return s;
}

// Coset classification of a zero-syndrome residual.
inline LogicalAction logical_action(const StabilizerCode& code, const PauliOperator& r) {
    if (r.n != 5) throw std::invalid_argument("logical_action: operator must act on 5 qubits");
    if (syndrome(code, r) != 0) return LogicalAction::NONZERO_SYNDROME;
    const bool x_part = symplectic_product(r, code.logical_z) != 0;
    const bool z_part = symplectic_product(r, code.logical_x) != 0;
    if (x_part && z_part) return LogicalAction::Y;
    if (x_part) return LogicalAction::X;
    if (z_part) return LogicalAction::Z;
    return LogicalAction::I;
}

// Minimum-weight lookup decoder: syndrome -> unique weight-<=1 correction.
struct SyndromeTable {
    std::array<PauliOperator, 16> corrections;

    static SyndromeTable build(const StabilizerCode& code) {
        SyndromeTable t;
        std::array<bool, 16> filled{};
        t.corrections[0] = PauliOperator::identity(5);
        filled[0] = true;
        for (int q = 0; q < 5; ++q) {
            for (int sym = 1; sym <= 3; ++sym) {
                PauliOperator e = PauliOperator::identity(5);
                e.set_symbol(q, sym);
                const int s = syndrome(code, e);
                if (s == 0 || filled[static_cast<std::size_t>(s)])
                    throw std::runtime_error("SyndromeTable: weight-1 syndromes not distinct");
                t.corrections[static_cast<std::size_t>(s)] = e;
                filled[static_cast<std::size_t>(s)] = true;
            }
        }
        return t;
    }
};

// Logical class (0=I,1=X,2=Y,3=Z) after syndrome correction of a 5-qubit
// error pattern, indexed by sum_j 4^j * symbol_j. Shared by the exact
// enumeration and the Pauli-frame Monte Carlo.
inline const std::array<std::uint8_t, 1024>& block_decode_table() {
    static const std::array<std::uint8_t, 1024> table = [] {
        const auto code = five_qubit_code();
        const auto synd = SyndromeTable::build(code);
        std::array<std::uint8_t, 1024> t{};
        for (int idx = 0; idx < 1024; ++idx) {
            PauliOperator e = PauliOperator::identity(5);
            int v = idx;
            for (int q = 0; q < 5; ++q) {
                e.set_symbol(q, v & 3);
                v >>= 2;
            }
            const auto residual = e * synd.corrections[static_cast<std::size_t>(syndrome(code, e))];
            switch (logical_action(code, residual)) {
                case LogicalAction::I: t[static_cast<std::size_t>(idx)] = 0; break;
                case LogicalAction::X: t[static_cast<std::size_t>(idx)] = 1; break;
                case LogicalAction::Y: t[static_cast<std::size_t>(idx)] = 2; break;
                case LogicalAction::Z: t[static_cast<std::size_t>(idx)] = 3; break;
                case LogicalAction::NONZERO_SYNDROME:
                    throw std::runtime_error("block_decode_table: residual has nonzero syndrome");
            }
        }
        return t;
    }();
    return table;
}

// Logical Pauli channel after one error-correction round, by exhaustive
// enumeration of all 4^5 i.i.d. Pauli patterns.
inline std::array<double, 4> logical_channel_after_ec(DepolarizingParam p) {
    if (p.p < 0.0 || p.p > 1.0)
        throw std::invalid_argument("logical_channel_after_ec: p must be in [0,1]");
    const std::array<double, 4> single = {1.0 - 0.75 * p.p, 0.25 * p.p, 0.25 * p.p, 0.25 * p.p};
    const auto& table = block_decode_table();
    std::array<double, 4> q{};
    for (int idx = 0; idx < 1024; ++idx) {
        double prob = 1.0;
        int v = idx;
        for (int qubit = 0; qubit < 5; ++qubit) {
            prob *= single[static_cast<std::size_t>(v & 3)];
            v >>= 2;
        }
        q[table[static_cast<std::size_t>(idx)]] += prob;
    }
    return q;
}

inline DepolarizingParam effective_depolarizing_after_ec(DepolarizingParam p) {
    const auto q = logical_channel_after_ec(p);
    const double tol = 1e-12;
    if (std::abs(q[1] - q[2]) > tol || std::abs(q[1] - q[3]) > tol)
        throw std::runtime_error("effective_depolarizing_after_ec: logical channel not symmetric");
    return DepolarizingParam{(4.0 / 3.0) * (1.0 - q[0])};
}

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational reduced() const {
        long long g = std::gcd(std::abs(num), den);
        if (g == 0) return Rational{0, 1};
        long long n = num / g, d = den / g;
        if (d < 0) { n = -n; d = -d; }
        return Rational{n, d};
    }
    bool operator==(const Rational& o) const {
        const auto a = reduced(), b = o.reduced();
        return a.num == b.num && a.den == b.den;
    }
};

// Exact polynomial coefficients of the effective parameter p'(p), degree 0..5,
// extracted from the enumeration with integer arithmetic.
inline std::array<Rational, 6> effective_parameter_coefficients() {
    const auto& table = block_decode_table();
    // q_I(p) = sum over identity-decoding patterns of (p/4)^w (1 - 3p/4)^(5-w);
    // coefficient of p^d carries denominator 4^d.
    std::array<long long, 6> num{};
    auto binom = [](int n, int k) -> long long {
        long long r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    for (int idx = 0; idx < 1024; ++idx) {
        if (table[static_cast<std::size_t>(idx)] != 0) continue;
        int w = 0, v = idx;
        for (int qubit = 0; qubit < 5; ++qubit) {
            if ((v & 3) != 0) ++w;
            v >>= 2;
        }
        for (int d = w; d <= 5; ++d) {
            long long term = binom(5 - w, d - w);
            for (int i = 0; i < d - w; ++i) term *= -3;
            num[static_cast<std::size_t>(d)] += term;
        }
    }
    // p'(p) = (4/3) (1 - q_I(p))
    std::array<Rational, 6> c;
    c[0] = Rational{4 * (1 - num[0]), 3}.reduced();
    long long den = 3;  // 3 * 4^(d-1) after cancelling one factor of 4
    for (int d = 1; d <= 5; ++d) {
        c[static_cast<std::size_t>(d)] = Rational{-num[static_cast<std::size_t>(d)], den}.reduced();
        den *= 4;
    }
    return c;
}

// p' = (15/2) p^2 - (25/2) p^3 + (15/2) p^4 - (3/2) p^5
inline DepolarizingParam lemma2_polynomial(DepolarizingParam p) {
    if (p.p < 0.0 || p.p > 1.0)
        throw std::invalid_argument("lemma2_polynomial: p must be in [0,1]");
    const double x = p.p;
    return DepolarizingParam{x * x * (7.5 + x * (-12.5 + x * (7.5 - 1.5 * x)))};
}

inline DepolarizingParam concatenated_parameter(DepolarizingParam p, int k) {
    if (k < 0) throw std::invalid_argument("concatenated_parameter: k must be >= 0");
    DepolarizingParam out = p;
    for (int i = 0; i < k; ++i) out = lemma2_polynomial(out);
    return out;
}

// (2/15) (15 p / 2)^(2^k); upper-bounds the k-fold concatenated parameter.
inline double lemma2_bound(DepolarizingParam p, int k) {
    if (k < 0) throw std::invalid_argument("lemma2_bound: k must be >= 0");
    return (2.0 / 15.0) * std::pow(7.5 * p.p, std::exp2(k));
}

}  // namespace chainsim
