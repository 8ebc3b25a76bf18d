#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace rigidity {

// Exact scalar mode. mpq_class keeps values as fully reduced fractions with
// positive denominator, and all arithmetic stays inside the rationals.
using Rational = mpq_class;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double to_double(double x) { return x; }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static double to_double(const Rational& q) { return q.get_d(); }
};

template <class T>
inline double to_double(const T& x) {
    return scalar_traits<T>::to_double(x);
}

template <class T>
T from_rational(const Rational& q);
template <>
inline double from_rational<double>(const Rational& q) { return q.get_d(); }
template <>
inline Rational from_rational<Rational>(const Rational& q) { return q; }

inline int sign(const Rational& q) { return sgn(q); }
inline int sign(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

inline std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

// Accepts "3", "-3/2" and plain decimal forms such as "0.9" (= 9/10).
inline std::optional<Rational> parse_rational(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::string s(text);
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) return std::nullopt;
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const size_t frac_len = s.size() - dot - 1;
        if (frac_len == 0 || digits.empty()) return std::nullopt;
        for (size_t i = 0; i < digits.size(); ++i) {
            const char c = digits[i];
            if (i == 0 && (c == '+' || c == '-')) continue;
            if (c < '0' || c > '9') return std::nullopt;
        }
        if (digits == "+" || digits == "-") return std::nullopt;
        mpz_class num(digits, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) return std::nullopt;
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
}

}  // namespace rigidity
