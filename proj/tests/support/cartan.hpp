#pragma once

// Independent Cartan-calculus oracle for the ansatz coframe. Exterior
// derivatives of t-dependent coefficients are taken with dual numbers seeded
// from the jet, so A'' enters only through d/dt of the connection.

#include "cohom/frame.hpp"

#include <array>

namespace cohom::support {

struct Dual {
    double v = 0, d = 0;
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual constant(double c) { return {c, 0}; }

/// Coefficients w[k][l] of eps^k ^ eps^l, kept antisymmetric.
struct TwoForm {
    std::array<std::array<double, 4>, 4> w{};

    void add(int k, int l, double c) {
        if (k == l) return;
        w[k][l] += c;
        w[l][k] -= c;
    }
};

using OneFormCoeffs = std::array<double, 4>;

inline TwoForm wedge(const OneFormCoeffs& a, const OneFormCoeffs& b) {
    TwoForm f;
    for (int k = 0; k < 4; ++k)
        for (int l = k + 1; l < 4; ++l) f.add(k, l, a[k] * b[l] - a[l] * b[k]);
    return f;
}

/// d eps^i from d(A_i e^i) with de^i = 2 e^j ^ e^k over cyclic (i, j, k).
inline std::array<TwoForm, 4> coframe_differential(const JetPoint& j) {
    const std::array<double, 4> a{1, j.a1, j.a2, j.a2}, ap{0, j.a1p, j.a2p, j.a2p};
    std::array<TwoForm, 4> d{};
    for (int i = 1; i <= 3; ++i) {
        int p = i % 3 + 1, q = p % 3 + 1;
        d[i].add(0, i, ap[i] / a[i]);
        d[i].add(p, q, 2 * a[i] / (a[p] * a[q]));
    }
    return d;
}

/// Entries of -omega as dual-valued coefficients on eps^k: value and d/dt.
inline std::array<std::array<std::array<Dual, 4>, 4>, 4> connection_dual(const JetPoint& j) {
    const Dual a1{j.a1, j.a1p}, a2{j.a2, j.a2p}, a1p{j.a1p, j.a1pp}, a2p{j.a2p, j.a2pp};
    const Dual r1 = a1p / a1, r2 = a2p / a2, s = a1 / (a2 * a2);
    const Dual u = (a1 * a1 - constant(2) * a2 * a2) / (a1 * a2 * a2);
    std::array<std::array<std::array<Dual, 4>, 4>, 4> m{};
    auto set = [&](int row, int col, int basis, Dual v) {
        m[row][col][basis] = v;
        m[col][row][basis] = -v;
    };
    set(0, 1, 1, r1);
    set(0, 2, 2, r2);
    set(0, 3, 3, r2);
    set(1, 2, 3, -s);
    set(1, 3, 2, s);
    set(2, 3, 1, u);
    return m;
}

/// d eps^i - sum_j N^i_j ^ eps^j with N = -omega; zero when the first
/// structure equation holds.
inline std::array<TwoForm, 4> first_structure_defect(const JetPoint& j, const ConnectionMatrix& n) {
    auto d = coframe_differential(j);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            OneFormCoeffs e{};
            e[k] = 1;
            TwoForm t = wedge(n(i, k).c, e);
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q) d[i].w[p][q] -= t.w[p][q];
        }
    return d;
}

/// Omega^i_j = d omega^i_j + omega^i_k ^ omega^k_j, written with N = -omega.
inline std::array<std::array<TwoForm, 4>, 4> cartan_curvature(const JetPoint& j) {
    auto n = connection_dual(j);
    auto de = coframe_differential(j);
    std::array<std::array<TwoForm, 4>, 4> omega{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            TwoForm& o = omega[i][k];
            for (int b = 0; b < 4; ++b) {
                // d(f eps^b) = f' eps^0 ^ eps^b + f d eps^b
                const Dual f = n[i][k][b];
                o.add(0, b, -f.d);
                for (int p = 0; p < 4; ++p)
                    for (int q = p + 1; q < 4; ++q) o.add(p, q, -f.v * de[b].w[p][q]);
            }
            for (int m = 0; m < 4; ++m) {
                OneFormCoeffs x{}, y{};
                for (int b = 0; b < 4; ++b) {
                    x[b] = n[i][m][b].v;
                    y[b] = n[m][k][b].v;
                }
                TwoForm w = wedge(x, y);
                for (int p = 0; p < 4; ++p)
                    for (int q = p + 1; q < 4; ++q) o.add(p, q, w.w[p][q]);
            }
        }
    return omega;
}

} // namespace cohom::support
