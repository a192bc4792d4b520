#pragma once

#include "cohom/laurent.hpp"
#include "cohom/rational.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cohom {

/// The six coefficients of the quadratic ODE family, in canonical order.
enum class Param : std::uint8_t { k1, k2, k3, l1, l2, l3 };

inline constexpr std::array<Param, 6> all_params{Param::k1, Param::k2, Param::k3,
                                                 Param::l1, Param::l2, Param::l3};

inline const char* param_name(Param p) {
    static constexpr const char* names[] = {"k1", "k2", "k3", "l1", "l2", "l3"};
    return names[static_cast<int>(p)];
}

/// Polynomial with rational coefficients in the six family parameters.
/// Only ring operations, substitution and evaluation: it is the coefficient
/// ring for Laurent polynomials in x when the parameters are kept symbolic.
class ParamPoly {
public:
    using Exponents = std::array<std::uint8_t, 6>;

    ParamPoly() = default;
    ParamPoly(int c) : ParamPoly(Rational(c)) {}  // NOLINT: scalar lift
    ParamPoly(const Rational& c) {                 // NOLINT
        if (!c.is_zero()) terms_.emplace(Exponents{}, c);
    }

    static ParamPoly variable(Param p) {
        ParamPoly r;
        Exponents e{};
        e[static_cast<int>(p)] = 1;
        r.terms_.emplace(e, Rational(1));
        return r;
    }

    const std::map<Exponents, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents{}); }
    Rational constant_term() const {
        auto it = terms_.find(Exponents{});
        return it == terms_.end() ? Rational(0) : it->second;
    }
    std::size_t size() const { return terms_.size(); }

    bool contains(Param p) const { return degree_in(p) > 0; }

    int degree_in(Param p) const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[static_cast<int>(p)]));
        return d;
    }

    std::vector<Param> variables() const {
        std::vector<Param> out;
        for (Param p : all_params)
            if (contains(p)) out.push_back(p);
        return out;
    }

    /// Coefficient of p^k, as a polynomial in the other parameters.
    ParamPoly coefficient_of(Param p, int k) const {
        ParamPoly r;
        const int i = static_cast<int>(p);
        for (const auto& [e, c] : terms_) {
            if (e[i] != k) continue;
            Exponents rest = e;
            rest[i] = 0;
            r.terms_.emplace(rest, c);
        }
        return r;
    }

    /// Replaces the parameter p by `value` everywhere.
    ParamPoly substitute(Param p, const ParamPoly& value) const {
        const int i = static_cast<int>(p);
        int top = degree_in(p);
        std::vector<ParamPoly> powers{ParamPoly(1)};
        for (int k = 1; k <= top; ++k) powers.push_back(powers.back() * value);
        ParamPoly r;
        for (const auto& [e, c] : terms_) {
            Exponents rest = e;
            rest[i] = 0;
            ParamPoly term;
            term.terms_.emplace(rest, c);
            r += term * powers[e[i]];
        }
        return r;
    }

    /// If every term contains p, returns this / p.
    std::optional<ParamPoly> divided_by(Param p) const {
        const int i = static_cast<int>(p);
        ParamPoly r;
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) return std::nullopt;
            Exponents q = e;
            --q[i];
            r.terms_.emplace(q, c);
        }
        return r;
    }

    template <class Values>
    Rational evaluate(const Values& v) const {
        Rational sum = 0;
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (Param p : all_params)
                for (int k = 0; k < e[static_cast<int>(p)]; ++k) t *= v[p];
            sum += t;
        }
        return sum;
    }

    /// For a polynomial in one parameter only: its coefficients as a polynomial in that parameter.
    RationalLaurent as_univariate(Param p) const {
        std::vector<RationalLaurent::Term> out;
        for (const auto& [e, c] : terms_) out.emplace_back(e[static_cast<int>(p)], c);
        return RationalLaurent::from_terms(std::move(out));
    }

    friend bool operator==(const ParamPoly& a, const ParamPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const ParamPoly& a, const ParamPoly& b) { return !(a == b); }

    friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
    friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }
    friend ParamPoly operator-(ParamPoly a) {
        for (auto& [e, c] : a.terms_) c = -c;
        return a;
    }

    ParamPoly& operator+=(const ParamPoly& b) { accumulate(b, 1); return *this; }
    ParamPoly& operator-=(const ParamPoly& b) { accumulate(b, -1); return *this; }

    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
        ParamPoly r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e;
                for (int i = 0; i < 6; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
                auto [it, inserted] = r.terms_.try_emplace(e, ca * cb);
                if (!inserted) {
                    it->second += ca * cb;
                    if (it->second.is_zero()) r.terms_.erase(it);
                }
            }
        return r;
    }
    ParamPoly& operator*=(const ParamPoly& b) { return *this = *this * b; }

    /// E.g. "-4*l2^2 + 4"; graded descending order, parameters named k1..l3.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::vector<std::pair<Exponents, Rational>> ordered(terms_.begin(), terms_.end());
        auto degree = [](const Exponents& e) { int d = 0; for (auto v : e) d += v; return d; };
        std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
            if (degree(a.first) != degree(b.first)) return degree(a.first) > degree(b.first);
            return a.first > b.first;
        });
        std::string out;
        bool first = true;
        for (const auto& [e, c] : ordered) {
            const bool neg = c < 0;
            Rational mag = neg ? Rational(-c) : c;
            out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
            first = false;
            std::string mono;
            for (Param p : all_params) {
                int k = e[static_cast<int>(p)];
                if (k == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += param_name(p);
                if (k > 1) mono += "^" + std::to_string(k);
            }
            if (mono.empty()) out += cohom::to_string(mag);
            else if (mag == 1) out += mono;
            else out += cohom::to_string(mag) + "*" + mono;
        }
        return out;
    }

private:
    std::map<Exponents, Rational> terms_;

    void accumulate(const ParamPoly& b, int sign) {
        for (const auto& [e, c] : b.terms_) {
            auto [it, inserted] = terms_.try_emplace(e, sign > 0 ? c : Rational(-c));
            if (!inserted) {
                if (sign > 0) it->second += c;
                else it->second -= c;
                if (it->second.is_zero()) terms_.erase(it);
            }
        }
    }
};

inline bool is_zero(const ParamPoly& p) { return p.is_zero(); }

inline CoefficientText format_coefficient(const ParamPoly& p) {
    if (p.size() == 1) {
        const auto& [e, c] = *p.terms().begin();
        if (c < 0) {
            ParamPoly m = -p;
            return {true, m == ParamPoly(1), true, m.to_string()};
        }
        return {false, p == ParamPoly(1), true, p.to_string()};
    }
    return {false, false, false, p.to_string()};
}

} // namespace cohom
