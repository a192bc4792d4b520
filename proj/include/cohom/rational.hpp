#pragma once

#include "cohom/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

namespace cohom {

using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;
/// Exact rational in lowest terms with positive denominator.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

inline Integer numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline bool is_zero(const Integer& z) { return z.is_zero(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const Integer& z) { return z.convert_to<double>(); }

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
    if (denominator_of(r) == 1) return numerator_of(r).str();
    return numerator_of(r).str() + "/" + denominator_of(r).str();
}

/// Always "p/q", also for integers ("2/1").
inline std::string to_fraction_string(const Rational& r) {
    return numerator_of(r).str() + "/" + denominator_of(r).str();
}

namespace detail {

inline Integer parse_digits(std::string_view s, std::string_view whole) {
    if (s.empty()) throw InvalidArgument("not a number: '" + std::string(whole) + "'");
    Integer v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw InvalidArgument("not a number: '" + std::string(whole) + "'");
        v = v * 10 + (c - '0');
    }
    return v;
}

inline Integer pow10(unsigned n) {
    Integer v = 1;
    for (unsigned i = 0; i < n; ++i) v *= 10;
    return v;
}

// Terminating decimal with optional sign, fraction and exponent, parsed exactly.
inline Rational parse_decimal(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view es = s.substr(e + 1);
        bool eneg = false;
        if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
            eneg = es.front() == '-';
            es.remove_prefix(1);
        }
        if (es.empty() || es.size() > 4)
            throw InvalidArgument("bad exponent in '" + std::string(whole) + "'");
        exponent = static_cast<long>(parse_digits(es, whole).convert_to<long>());
        if (eneg) exponent = -exponent;
        s = s.substr(0, e);
    }
    std::string_view int_part = s, frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty())
        throw InvalidArgument("not a number: '" + std::string(whole) + "'");
    Integer digits = 0;
    if (!int_part.empty()) digits = parse_digits(int_part, whole);
    if (!frac_part.empty()) digits = digits * pow10(static_cast<unsigned>(frac_part.size())) + parse_digits(frac_part, whole);
    exponent -= static_cast<long>(frac_part.size());
    Rational r(digits);
    if (exponent > 0) r *= Rational(pow10(static_cast<unsigned>(exponent)));
    if (exponent < 0) r /= Rational(pow10(static_cast<unsigned>(-exponent)));
    return negative ? Rational(-r) : r;
}

} // namespace detail

/// Parses "p/q", an integer, or a terminating decimal ("0.25", "-1e-3") exactly.
inline Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw InvalidArgument("empty rational");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = detail::parse_decimal(s.substr(0, slash), text);
        std::string_view den_text = s.substr(slash + 1);
        if (!den_text.empty() && (den_text.front() == '-' || den_text.front() == '+'))
            throw InvalidArgument("denominator must be unsigned in '" + std::string(text) + "'");
        Rational den = detail::parse_decimal(den_text, text);
        if (den.is_zero()) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return detail::parse_decimal(s, text);
}

} // namespace cohom
