#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chainsim {

// n-qubit Pauli operator in binary-symplectic form, phase discarded.
// Bit j of x_bits / z_bits is the X / Z component on qubit j.
struct PauliOperator {
    int n = 0;
    std::uint32_t x_bits = 0;
    std::uint32_t z_bits = 0;

    static PauliOperator identity(int n) { return PauliOperator{n, 0, 0}; }

    static PauliOperator from_string(const std::string& s) {
        PauliOperator p{static_cast<int>(s.size()), 0, 0};
        for (int j = 0; j < p.n; ++j) {
            switch (s[static_cast<std::size_t>(j)]) {
                case 'I': break;
                case 'X': p.x_bits |= 1u << j; break;
                case 'Y': p.x_bits |= 1u << j; p.z_bits |= 1u << j; break;
                case 'Z': p.z_bits |= 1u << j; break;
                default: throw std::invalid_argument("PauliOperator: bad character in " + s);
            }
        }
        return p;
    }

    std::string str() const {
        std::string s(static_cast<std::size_t>(n), 'I');
        for (int j = 0; j < n; ++j) {
            const bool x = (x_bits >> j) & 1u, z = (z_bits >> j) & 1u;
            s[static_cast<std::size_t>(j)] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
        }
        return s;
    }

    // Single-qubit symbol on qubit j: 0=I, 1=X, 2=Y, 3=Z.
    int symbol(int j) const {
        const bool x = (x_bits >> j) & 1u, z = (z_bits >> j) & 1u;
        return x ? (z ? 2 : 1) : (z ? 3 : 0);
    }

    void set_symbol(int j, int sym) {
        x_bits &= ~(1u << j);
        z_bits &= ~(1u << j);
        if (sym == 1 || sym == 2) x_bits |= 1u << j;
        if (sym == 2 || sym == 3) z_bits |= 1u << j;
    }

    int weight() const {
        int w = 0;
        for (int j = 0; j < n; ++j)
            if (((x_bits | z_bits) >> j) & 1u) ++w;
        return w;
    }

    bool is_identity() const { return x_bits == 0 && z_bits == 0; }

    bool operator==(const PauliOperator&) const = default;
};

// Phase-free product.
inline PauliOperator operator*(const PauliOperator& a, const PauliOperator& b) {
    if (a.n != b.n) throw std::invalid_argument("Pauli product: length mismatch");
    return PauliOperator{a.n, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits};
}

// 1 if a and b anticommute, 0 if they commute.
inline int symplectic_product(const PauliOperator& a, const PauliOperator& b) {
    if (a.n != b.n) throw std::invalid_argument("symplectic_product: length mismatch");
    const std::uint32_t v = (a.x_bits & b.z_bits) ^ (a.z_bits & b.x_bits);
    return __builtin_popcount(v) & 1;
}

// Composition of single-qubit Pauli symbols (0=I,1=X,2=Y,3=Z), phase-free.
inline int compose_symbols(int a, int b) {
    static constexpr int xa[4] = {0, 1, 1, 0};
    static constexpr int za[4] = {0, 0, 1, 1};
    const int x = xa[a] ^ xa[b], z = za[a] ^ za[b];
    return x ? (z ? 2 : 1) : (z ? 3 : 0);
}

}  // namespace chainsim
