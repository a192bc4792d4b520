#pragma once

// Connection and curvature of g = dt^2 + A1^2 (e1)^2 + A2^2 ((e2)^2 + (e3)^2)
// in the orthonormal coframe eps0 = dt, eps1 = A1 e1, eps2 = A2 e2,
// eps3 = A2 e3, with de^i = 2 e^(i+1) ^ e^(i+2).

#include "cohom/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace cohom {

/// (A1, A1', A1'', A2, A2', A2'') at one time.
struct JetPoint {
    double a1 = 0, a1p = 0, a1pp = 0;
    double a2 = 0, a2p = 0, a2pp = 0;
};

inline void validate(const JetPoint& j) {
    if (!(j.a1 > 0) || !(j.a2 > 0))
        throw DomainError("jet requires A1 > 0 and A2 > 0 (got A1=" + std::to_string(j.a1) +
                          ", A2=" + std::to_string(j.a2) + ")");
    if (!std::isfinite(j.a1p) || !std::isfinite(j.a1pp) || !std::isfinite(j.a2p) || !std::isfinite(j.a2pp) ||
        !std::isfinite(j.a1) || !std::isfinite(j.a2))
        throw DomainError("jet has non-finite entries");
}

/// 1-form sum_k c[k] eps^k.
struct OneForm {
    std::array<double, 4> c{};

    double operator[](int k) const { return c[k]; }
    friend bool operator==(const OneForm& a, const OneForm& b) { return a.c == b.c; }
};

/// The matrix -omega_i^j of connection 1-forms, row i, column j.
struct ConnectionMatrix {
    std::array<std::array<OneForm, 4>, 4> entries{};

    const OneForm& operator()(int i, int j) const { return entries[i][j]; }
    OneForm& operator()(int i, int j) { return entries[i][j]; }

    bool is_antisymmetric() const {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    if (entries[i][j].c[k] != -entries[j][i].c[k]) return false;
        return true;
    }
};

inline ConnectionMatrix connection_matrix(const JetPoint& j) {
    validate(j);
    const double r1 = j.a1p / j.a1;
    const double r2 = j.a2p / j.a2;
    const double s = j.a1 / (j.a2 * j.a2);
    const double u = (j.a1 * j.a1 - 2 * j.a2 * j.a2) / (j.a1 * j.a2 * j.a2);
    ConnectionMatrix m;
    auto set = [&](int row, int col, int basis, double value) {
        m(row, col).c[basis] = value;
        m(col, row).c[basis] = -value;
    };
    set(0, 1, 1, r1);
    set(0, 2, 2, r2);
    set(0, 3, 3, r2);
    set(1, 2, 3, -s);
    set(1, 3, 2, s);
    set(2, 3, 1, u);
    return m;
}

/// Coefficient of eps^k ^ eps^l for one basis 2-form.
struct TwoFormTerm {
    int k = 0, l = 0;
    double value = 0;
};

/// Omega^i_j expanded on its two basis 2-forms.
struct CurvatureForm {
    int upper = 0, lower = 0;
    std::array<TwoFormTerm, 2> terms{};

    /// Coefficient of eps^k ^ eps^l, respecting eps^l ^ eps^k = -eps^k ^ eps^l.
    double on(int k, int l) const {
        for (const auto& t : terms) {
            if (t.k == k && t.l == l) return t.value;
            if (t.k == l && t.l == k) return -t.value;
        }
        return 0.0;
    }
};

/// The six independent curvature forms; Omega^j_i = -Omega^i_j.
struct CurvatureCoeffs {
    CurvatureForm o01, o02, o03, o12, o13, o23;

    /// Omega^i_j for any i != j.
    CurvatureForm omega(int i, int j) const {
        if (i > j) {
            CurvatureForm f = omega(j, i);
            std::swap(f.upper, f.lower);
            for (auto& t : f.terms) t.value = -t.value;
            return f;
        }
        switch (i * 4 + j) {
        case 1: return o01;
        case 2: return o02;
        case 3: return o03;
        case 6: return o12;
        case 7: return o13;
        case 11: return o23;
        default: throw DomainError("omega(i, j) needs distinct indices in 0..3");
        }
    }
};

inline CurvatureCoeffs curvature_coeffs(const JetPoint& j) {
    validate(j);
    const double a1 = j.a1, a2 = j.a2;
    const double a22 = a2 * a2, a23 = a22 * a2, a24 = a22 * a22;
    // Mixed term A1'/A2^2 - A1 A2'/A2^3 shared by Omega^0_2, Omega^1_2 and their mirrors.
    const double mixed = j.a1p / a22 - a1 * j.a2p / a23;
    const double cross12 = a1 * a1 / a24 - j.a1p * j.a2p / (a1 * a2);
    CurvatureCoeffs c;
    c.o01 = {0, 1, {{{0, 1, -j.a1pp / a1}, {2, 3, -2 * mixed}}}};
    c.o02 = {0, 2, {{{0, 2, -j.a2pp / a2}, {3, 1, mixed}}}};
    c.o12 = {1, 2, {{{0, 3, mixed}, {1, 2, cross12}}}};
    c.o23 = {2, 3, {{{0, 1, -2 * mixed}, {2, 3, 4 / a22 - 3 * a1 * a1 / a24 - j.a2p * j.a2p / a22}}}};
    // 2 <-> 3 mirrors (cyclic relabelling of the basis 2-forms).
    c.o03 = {0, 3, {{{0, 3, c.o02.terms[0].value}, {1, 2, c.o02.terms[1].value}}}};
    c.o13 = {1, 3, {{{2, 0, c.o12.terms[0].value}, {1, 3, c.o12.terms[1].value}}}};
    return c;
}

/// Frame components Ric_00, Ric_11, Ric_22 (= Ric_33) and the scalar curvature.
struct RicciValues {
    double ric00 = 0, ric11 = 0, ric22 = 0, scalar = 0;
};

inline RicciValues with_scalar(double r00, double r11, double r22) {
    return {r00, r11, r22, r00 + r11 + 2 * r22};
}

inline RicciValues ricci_from_jet(const JetPoint& j) {
    validate(j);
    const double a1 = j.a1, a2 = j.a2;
    const double a22 = a2 * a2, a24 = a22 * a22;
    const double cross = j.a1p * j.a2p / (a1 * a2);
    const double r00 = -2 * j.a1pp / a1 - 4 * j.a2pp / a2;
    const double r11 = -2 * j.a1pp / a1 - 4 * cross + 4 * a1 * a1 / a24;
    const double r22 = -2 * j.a2pp / a2 - 2 * cross - 4 * a1 * a1 / a24 - 2 * j.a2p * j.a2p / a22 + 8 / a22;
    return with_scalar(r00, r11, r22);
}

/// Ricci normalization of this family's frame formulas: Ric_jj is twice the
/// trace sum_i R^i_{jij} of the curvature forms.
inline constexpr double ricci_contraction_factor = 2.0;

inline RicciValues ricci_from_curvature(const CurvatureCoeffs& c) {
    auto ric = [&](int jdx) {
        double sum = 0;
        for (int i = 0; i < 4; ++i)
            if (i != jdx) sum += c.omega(i, jdx).on(i, jdx);
        return ricci_contraction_factor * sum;
    };
    return with_scalar(ric(0), ric(1), ric(2));
}

inline RicciValues ricci_from_curvature(const JetPoint& j) { return ricci_from_curvature(curvature_coeffs(j)); }

inline double scalar_curvature(const JetPoint& j) { return ricci_from_jet(j).scalar; }

} // namespace cohom
