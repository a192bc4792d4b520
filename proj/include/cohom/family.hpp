#pragma once

// The quadratic ODE family
//     A1' = k1 x^2 + k2 x + k3,   A2' = l1 x^2 + l2 x + l3,   x = A1/A2,
// and its Ricci residuals as Laurent polynomials in x.
//
// Along a solution x' = P(x)/A2 with P = F - x G, so A1'' = F'(x) P/A2 and
// A2'' = G'(x) P/A2. Substituting into the frame Ricci formulas, every
// component becomes L_ii(x)/A2^2.

#include "cohom/errors.hpp"
#include "cohom/laurent.hpp"
#include "cohom/param_poly.hpp"
#include "cohom/rational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cohom {

/// (k1, k2, k3, l1, l2, l3) over a coefficient ring.
template <class C>
struct Coefficients {
    std::array<C, 6> values{};

    Coefficients() = default;
    Coefficients(C k1, C k2, C k3, C l1, C l2, C l3)
        : values{std::move(k1), std::move(k2), std::move(k3), std::move(l1), std::move(l2), std::move(l3)} {}

    const C& operator[](Param p) const { return values[static_cast<int>(p)]; }
    C& operator[](Param p) { return values[static_cast<int>(p)]; }

    const C& k1() const { return values[0]; }
    const C& k2() const { return values[1]; }
    const C& k3() const { return values[2]; }
    const C& l1() const { return values[3]; }
    const C& l2() const { return values[4]; }
    const C& l3() const { return values[5]; }

    friend bool operator==(const Coefficients& a, const Coefficients& b) { return a.values == b.values; }
    friend bool operator!=(const Coefficients& a, const Coefficients& b) { return !(a == b); }
    friend bool operator<(const Coefficients& a, const Coefficients& b) { return a.values < b.values; }
};

/// Exact parameter set of the family.
using ParamSet = Coefficients<Rational>;

inline ParamSet make_params(int k1, int k2, int k3, int l1, int l2, int l3) {
    return ParamSet(k1, k2, k3, l1, l2, l3);
}

inline bool all_zero(const ParamSet& p) {
    return std::all_of(p.values.begin(), p.values.end(), [](const Rational& r) { return r.is_zero(); });
}

inline void validate(const ParamSet& p) {
    if (all_zero(p)) throw InvalidArgument("parameter set must not be all zero");
}

inline std::string to_string(const ParamSet& p) {
    std::string s = "(";
    for (int i = 0; i < 6; ++i) s += (i ? "," : "") + cohom::to_string(p.values[i]);
    return s + ")";
}

/// Global negation; (p) and (-p) describe the same metric with t reversed.
template <class C>
Coefficients<C> sign_flip(const Coefficients<C>& p) {
    Coefficients<C> r = p;
    for (auto& v : r.values) v = -v;
    return r;
}

/// Representative of {p, -p} whose first nonzero entry is positive.
inline ParamSet canonical_sign(const ParamSet& p) {
    for (const auto& v : p.values) {
        if (v > 0) return p;
        if (v < 0) return sign_flip(p);
    }
    return p;
}

inline bool sign_equivalent(const ParamSet& a, const ParamSet& b) {
    return canonical_sign(a) == canonical_sign(b);
}

/// The family's polynomials for one parameter set.
template <class C>
struct FamilyPolys {
    LaurentPoly<C> F;  // A1' as a function of x
    LaurentPoly<C> G;  // A2' as a function of x
    LaurentPoly<C> P;  // x' * A2 = F - x G
    LaurentPoly<C> Q;  // second factor of L00: 4 l1 x^2 + 2 (k1 + l2) x + k2
};

template <class C>
LaurentPoly<C> quadratic_in_x(const C& a2, const C& a1, const C& a0) {
    using Term = typename LaurentPoly<C>::Term;
    return LaurentPoly<C>::from_terms(std::vector<Term>{{2, a2}, {1, a1}, {0, a0}});
}

template <class C>
FamilyPolys<C> family_polys(const Coefficients<C>& p) {
    using L = LaurentPoly<C>;
    FamilyPolys<C> f;
    f.F = quadratic_in_x(p.k1(), p.k2(), p.k3());
    f.G = quadratic_in_x(p.l1(), p.l2(), p.l3());
    f.P = f.F - L::x() * f.G;
    f.Q = quadratic_in_x(C(C(4) * p.l1()), C(C(2) * C(p.k1() + p.l2())), p.k2());
    return f;
}

/// P(x) = -l1 x^3 + (k1 - l2) x^2 + (k2 - l3) x + k3, so that x' = P(x)/A2.
template <class C>
LaurentPoly<C> x_prime_poly(const Coefficients<C>& p) {
    return family_polys(p).P;
}

/// Ric_ii = L_ii(x) / A2^2 along any solution.
template <class C>
struct SymbolicRicci {
    LaurentPoly<C> l00, l11, l22;
};

template <class C>
SymbolicRicci<C> symbolic_ricci_from(const FamilyPolys<C>& f) {
    using L = LaurentPoly<C>;
    const L inv_x = L::monomial(C(1), -1);
    const L x2 = L::monomial(C(1), 2);
    // A1''/A1 = F' P / x, A2''/A2 = G' P, A1'A2'/(A1 A2) = F G / x (all times A2^-2).
    const L a1pp_over_a1 = f.F.derivative() * f.P * inv_x;
    const L a2pp_over_a2 = f.G.derivative() * f.P;
    const L cross = f.F * f.G * inv_x;
    SymbolicRicci<C> r;
    r.l00 = L(-2) * a1pp_over_a1 - L(4) * a2pp_over_a2;
    r.l11 = L(-2) * a1pp_over_a1 - L(4) * cross + L(4) * x2;
    r.l22 = L(-2) * a2pp_over_a2 - L(2) * cross - L(4) * x2 - L(2) * f.G * f.G + L(8);
    return r;
}

template <class C>
SymbolicRicci<C> symbolic_ricci(const Coefficients<C>& p) {
    return symbolic_ricci_from(family_polys(p));
}

template <class C>
bool is_ricci_flat(const SymbolicRicci<C>& s) {
    return s.l00.is_zero() && s.l11.is_zero() && s.l22.is_zero();
}

inline bool is_ricci_flat(const ParamSet& p) { return is_ricci_flat(symbolic_ricci(p)); }

/// (L00 - L11, L00 - L22); both vanish identically for an Einstein candidate.
template <class C>
std::pair<LaurentPoly<C>, LaurentPoly<C>> einstein_difference_polys(const Coefficients<C>& p) {
    SymbolicRicci<C> s = symbolic_ricci(p);
    return {s.l00 - s.l11, s.l00 - s.l22};
}

/// A2^3 d/dt (L00(x)/A2^2) = L00'(x) P(x) - 2 L00(x) G(x). Ric00 is constant
/// along every solution exactly when this vanishes identically.
template <class C>
LaurentPoly<C> einstein_constancy_poly(const FamilyPolys<C>& f, const SymbolicRicci<C>& s) {
    return s.l00.derivative() * f.P - LaurentPoly<C>(2) * s.l00 * f.G;
}

template <class C>
LaurentPoly<C> einstein_constancy_poly(const Coefficients<C>& p) {
    FamilyPolys<C> f = family_polys(p);
    return einstein_constancy_poly(f, symbolic_ricci_from(f));
}

/// True when the differences vanish, Ric00 is constant along solutions and
/// the metric is not Ricci-flat.
inline bool is_einstein_not_flat(const ParamSet& p) {
    FamilyPolys<Rational> f = family_polys(p);
    SymbolicRicci<Rational> s = symbolic_ricci_from(f);
    if (s.l00.is_zero()) return false;
    if (s.l00 != s.l11 || s.l00 != s.l22) return false;
    return einstein_constancy_poly(f, s).is_zero();
}

/// Parameters converted once for the right-hand side.
struct NumericParams {
    double k1, k2, k3, l1, l2, l3;

    static NumericParams from(const ParamSet& p) {
        return {to_double(p.k1()), to_double(p.k2()), to_double(p.k3()),
                to_double(p.l1()), to_double(p.l2()), to_double(p.l3())};
    }
};

/// (A1', A2') at (a1, a2). Throws DomainError at a2 = 0 (singular time).
inline std::pair<double, double> rhs(const NumericParams& p, double a1, double a2) {
    if (a2 == 0.0) throw DomainError("rhs: A2 = 0, ratio A1/A2 undefined");
    const double x = a1 / a2;
    return {(p.k1 * x + p.k2) * x + p.k3, (p.l1 * x + p.l2) * x + p.l3};
}

inline std::pair<double, double> rhs(const ParamSet& p, double a1, double a2) {
    return rhs(NumericParams::from(p), a1, a2);
}

/// (A1'', A2'') from the chain rule: F'(x) P(x)/A2 and G'(x) P(x)/A2.
inline std::pair<double, double> second_derivatives(const NumericParams& p, double a1, double a2) {
    if (a2 == 0.0) throw DomainError("second_derivatives: A2 = 0");
    const double x = a1 / a2;
    const double big_p = ((-p.l1 * x + (p.k1 - p.l2)) * x + (p.k2 - p.l3)) * x + p.k3;
    return {(2 * p.k1 * x + p.k2) * big_p / a2, (2 * p.l1 * x + p.l2) * big_p / a2};
}

namespace detail {

// Real roots of a dense polynomial (ascending coefficients) by bisection on
// the monotone pieces between critical points.
inline std::vector<double> real_roots(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() <= 1) return {};
    const std::size_t n = c.size() - 1;
    auto eval = [&](double x) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    };
    if (n == 1) return {-c[0] / c[1]};
    std::vector<double> d(n);
    for (std::size_t i = 1; i <= n; ++i) d[i - 1] = c[i] * static_cast<double>(i);
    std::vector<double> crit = real_roots(d);
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[i] / c[n]));
    bound += 1.0;
    std::vector<double> knots{-bound};
    for (double x : crit)
        if (x > -bound && x < bound) knots.push_back(x);
    knots.push_back(bound);
    std::sort(knots.begin(), knots.end());

    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double lo = knots[i], hi = knots[i + 1];
        double flo = eval(lo), fhi = eval(hi);
        if (flo == 0.0) { roots.push_back(lo); continue; }
        if ((flo < 0) == (fhi < 0)) continue;
        for (int it = 0; it < 200 && hi - lo > 0; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            double fm = eval(mid);
            if (fm == 0.0) { lo = hi = mid; break; }
            if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
            else hi = mid;
        }
        roots.push_back(0.5 * (lo + hi));
    }
    if (eval(knots.back()) == 0.0) roots.push_back(knots.back());
    // Touching roots sit on critical points.
    for (double x : crit)
        if (std::abs(eval(x)) <= 1e-14 * scale * std::max(1.0, std::pow(std::abs(x), static_cast<double>(n))))
            roots.push_back(x);
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || std::abs(r - unique.back()) > 1e-12 * std::max(1.0, std::abs(r))) unique.push_back(r);
    return unique;
}

} // namespace detail

/// Every ratio is preserved when P vanishes identically (k3 = l1 = 0, k2 = l3, k1 = l2).
inline bool ratio_is_conserved(const ParamSet& p) { return x_prime_poly(p).is_zero(); }

/// Positive real roots of P: ratios x for which A1 = x A2 is an invariant ray.
/// Empty when P has no positive root, and also when P vanishes identically
/// (see ratio_is_conserved).
inline std::vector<double> fixed_points(const ParamSet& p) {
    RationalLaurent poly = x_prime_poly(p);
    if (poly.is_zero()) return {};
    std::vector<double> dense(static_cast<std::size_t>(poly.max_exponent()) + 1, 0.0);
    for (const auto& [n, c] : poly.terms()) dense[static_cast<std::size_t>(n)] = to_double(c);
    std::vector<double> out;
    for (double r : detail::real_roots(dense)) {
        // Snap to an exact rational root when one is this close.
        Rational guess(static_cast<long long>(std::llround(r * 1e6)), 1000000LL);
        if (poly.eval_exact(guess).is_zero()) r = to_double(guess);
        if (r > 0) out.push_back(r);
    }
    return out;
}

} // namespace cohom
