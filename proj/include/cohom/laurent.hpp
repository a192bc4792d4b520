#pragma once

#include "cohom/errors.hpp"
#include "cohom/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace cohom {

/// How a coefficient renders inside a polynomial: sign pulled out so that
/// terms join with " + " / " - ".
struct CoefficientText {
    bool negative = false;
    bool is_one = false;  // magnitude is exactly 1
    bool atomic = true;   // needs no parentheses before "*x^n"
    std::string magnitude;
};

inline CoefficientText format_coefficient(const Rational& c) {
    Rational m = c < 0 ? Rational(-c) : c;
    return {c < 0, m == 1, true, to_string(m)};
}

inline CoefficientText format_coefficient(const Integer& c) {
    Integer m = c < 0 ? Integer(-c) : c;
    return {c < 0, m == 1, true, m.str()};
}

/// Finite sum of c_n x^n over integer n (negative allowed) with exact
/// coefficients. Terms are kept sorted by exponent; zero coefficients are
/// never stored, so the zero polynomial has no terms.
///
/// `C` is any exact commutative ring with `C{}` as zero, `C(int)`, the
/// usual arithmetic operators and a free `is_zero(const C&)`.
template <class C>
class LaurentPoly {
public:
    using Coefficient = C;
    using Exponent = std::int64_t;
    using Term = std::pair<Exponent, C>;

    LaurentPoly() = default;
    LaurentPoly(const C& constant) { push(0, constant); }  // NOLINT: implicit lift of scalars
    LaurentPoly(int constant) : LaurentPoly(C(constant)) {}  // NOLINT

    static LaurentPoly monomial(C coefficient, Exponent exponent) {
        LaurentPoly p;
        p.push(exponent, std::move(coefficient));
        return p;
    }

    /// The variable x itself.
    static LaurentPoly x() { return monomial(C(1), 1); }

    /// From (exponent, coefficient) pairs in any order; repeated exponents are summed.
    static LaurentPoly from_terms(std::vector<Term> terms) {
        LaurentPoly p;
        p.terms_ = std::move(terms);
        p.normalize();
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.front().first == 0); }
    std::size_t size() const { return terms_.size(); }

    C coefficient(Exponent n) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), n,
                                   [](const Term& t, Exponent e) { return t.first < e; });
        return (it != terms_.end() && it->first == n) ? it->second : C{};
    }

    /// Lowest / highest stored exponent; zero polynomial has none.
    Exponent min_exponent() const { require_nonzero(); return terms_.front().first; }
    Exponent max_exponent() const { require_nonzero(); return terms_.back().first; }

    bool has_negative_powers() const { return !terms_.empty() && terms_.front().first < 0; }

    friend bool operator==(const LaurentPoly& p, const LaurentPoly& q) { return p.terms_ == q.terms_; }
    friend bool operator!=(const LaurentPoly& p, const LaurentPoly& q) { return !(p == q); }

    friend LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q) { return merge(p, q, false); }
    friend LaurentPoly operator-(const LaurentPoly& p, const LaurentPoly& q) { return merge(p, q, true); }

    friend LaurentPoly operator-(const LaurentPoly& p) {
        LaurentPoly r = p;
        for (auto& [n, c] : r.terms_) c = -c;
        return r;
    }

    friend LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q) {
        if (p.is_zero() || q.is_zero()) return {};
        std::vector<Term> prod;
        prod.reserve(p.terms_.size() * q.terms_.size());
        for (const auto& [a, ca] : p.terms_)
            for (const auto& [b, cb] : q.terms_) prod.emplace_back(a + b, ca * cb);
        return from_terms(std::move(prod));
    }

    LaurentPoly& operator+=(const LaurentPoly& q) { return *this = *this + q; }
    LaurentPoly& operator-=(const LaurentPoly& q) { return *this = *this - q; }
    LaurentPoly& operator*=(const LaurentPoly& q) { return *this = *this * q; }

    /// Multiplication by x^n.
    LaurentPoly shifted(Exponent n) const {
        LaurentPoly r = *this;
        for (auto& t : r.terms_) t.first += n;
        return r;
    }

    /// Term-wise derivative n c_n x^(n-1).
    LaurentPoly derivative() const {
        LaurentPoly r;
        for (const auto& [n, c] : terms_)
            if (n != 0) r.terms_.emplace_back(n - 1, c * C(static_cast<int>(n)));
        r.drop_zeros();
        return r;
    }

    /// Applies `f` to every coefficient (e.g. substitution inside a
    /// coefficient ring); the result is re-normalized.
    template <class F>
    auto map_coefficients(F&& f) const -> LaurentPoly<std::decay_t<decltype(f(std::declval<const C&>()))>> {
        using D = std::decay_t<decltype(f(std::declval<const C&>()))>;
        std::vector<typename LaurentPoly<D>::Term> out;
        out.reserve(terms_.size());
        for (const auto& [n, c] : terms_) out.emplace_back(n, f(c));
        return LaurentPoly<D>::from_terms(std::move(out));
    }

    /// Floating evaluation. Throws ZeroArgumentError at x0 = 0 when negative
    /// powers are present.
    double eval(double x0) const {
        if (terms_.empty()) return 0.0;
        if (x0 == 0.0) {
            if (has_negative_powers())
                throw ZeroArgumentError("Laurent polynomial with negative powers evaluated at 0");
            return to_double(coefficient(0));
        }
        // Horner separately over the non-negative and the negative part.
        double pos = 0.0, neg = 0.0;
        const double inv = 1.0 / x0;
        Exponent top = terms_.back().first;
        if (top >= 0) {
            auto it = terms_.rbegin();
            for (Exponent n = top; n >= 0; --n) {
                pos *= x0;
                if (it != terms_.rend() && it->first == n) { pos += to_double(it->second); ++it; }
            }
        }
        Exponent bottom = terms_.front().first;
        if (bottom < 0) {
            auto it = terms_.begin();
            for (Exponent n = bottom; n < 0; ++n) {
                if (it != terms_.end() && it->first == n) { neg += to_double(it->second); ++it; }
                neg *= inv;
            }
        }
        return pos + neg;
    }

    /// Exact evaluation at a rational point.
    Rational eval_exact(const Rational& x0) const {
        if (x0.is_zero()) {
            if (has_negative_powers())
                throw ZeroArgumentError("Laurent polynomial with negative powers evaluated at 0");
            return Rational(coefficient(0));
        }
        Rational sum = 0;
        for (const auto& [n, c] : terms_) {
            Rational power = 1;
            const Rational base = n >= 0 ? x0 : Rational(1 / x0);
            for (Exponent i = 0; i < (n >= 0 ? n : -n); ++i) power *= base;
            sum += Rational(c) * power;
        }
        return sum;
    }

    /// Canonical text: descending exponents, explicit signs, e.g. "2*x^2 - x^-1".
    std::string to_string(const std::string& var = "x") const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [n, c] = *it;
            CoefficientText ct = format_coefficient(c);
            if (first) out += ct.negative ? "-" : "";
            else out += ct.negative ? " - " : " + ";
            first = false;
            std::string power = n == 1 ? var : var + "^" + std::to_string(n);
            if (n == 0) out += ct.atomic ? ct.magnitude : "(" + ct.magnitude + ")";
            else if (ct.is_one) out += power;
            else out += (ct.atomic ? ct.magnitude : "(" + ct.magnitude + ")") + "*" + power;
        }
        return out;
    }

private:
    std::vector<Term> terms_;

    void push(Exponent n, C c) {
        if (!is_zero_coefficient(c)) terms_.emplace_back(n, std::move(c));
    }

    static bool is_zero_coefficient(const C& c) {
        using cohom::is_zero;
        return is_zero(c);
    }

    void require_nonzero() const {
        if (terms_.empty()) throw DomainError("zero polynomial has no exponents");
    }

    void drop_zeros() {
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                    [](const Term& t) { return is_zero_coefficient(t.second); }),
                     terms_.end());
    }

    void normalize() {
        std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        std::vector<Term> merged;
        merged.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!merged.empty() && merged.back().first == t.first) merged.back().second += t.second;
            else merged.push_back(std::move(t));
        }
        terms_ = std::move(merged);
        drop_zeros();
    }

    static LaurentPoly merge(const LaurentPoly& p, const LaurentPoly& q, bool subtract) {
        LaurentPoly r;
        r.terms_.reserve(p.terms_.size() + q.terms_.size());
        auto a = p.terms_.begin(), b = q.terms_.begin();
        while (a != p.terms_.end() || b != q.terms_.end()) {
            if (b == q.terms_.end() || (a != p.terms_.end() && a->first < b->first)) {
                r.terms_.push_back(*a++);
            } else if (a == p.terms_.end() || b->first < a->first) {
                r.terms_.emplace_back(b->first, subtract ? C(-b->second) : b->second);
                ++b;
            } else {
                C c = subtract ? C(a->second - b->second) : C(a->second + b->second);
                if (!is_zero_coefficient(c)) r.terms_.emplace_back(a->first, std::move(c));
                ++a;
                ++b;
            }
        }
        return r;
    }
};

using RationalLaurent = LaurentPoly<Rational>;

// Lets RationalLaurent serve as a coefficient ring itself.
inline bool is_zero(const RationalLaurent& p) { return p.is_zero(); }

inline CoefficientText format_coefficient(const RationalLaurent& p) {
    if (p.size() == 1 && p.terms().front().first == 0) return format_coefficient(p.terms().front().second);
    return {false, false, false, p.to_string()};
}

template <class C> LaurentPoly<C> add(const LaurentPoly<C>& p, const LaurentPoly<C>& q) { return p + q; }
template <class C> LaurentPoly<C> mul(const LaurentPoly<C>& p, const LaurentPoly<C>& q) { return p * q; }
template <class C> LaurentPoly<C> ddx(const LaurentPoly<C>& p) { return p.derivative(); }
template <class C> double eval_at(const LaurentPoly<C>& p, double x0) { return p.eval(x0); }
template <class C> Rational eval_at(const LaurentPoly<C>& p, const Rational& x0) { return p.eval_exact(x0); }

template <class C>
LaurentPoly<C> operator*(const C& s, const LaurentPoly<C>& p) { return LaurentPoly<C>(s) * p; }

} // namespace cohom
