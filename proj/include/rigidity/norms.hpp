#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rigidity/matrix.hpp"
#include "rigidity/rational.hpp"

namespace rigidity {

enum class NormKind { Euclidean, Lp, Polyhedral };

// Which norm governs edge lengths. Polyhedral norms are kept as exact
// rational functionals closed under negation; lp norms are float-only with
// finite p > 1 (p = 2 is normalized to Euclidean at construction).
class NormSpec {
public:
    NormKind kind = NormKind::Euclidean;
    int dim = 0;
    double p = 2.0;                                   // Lp only
    std::vector<std::vector<Rational>> functionals;   // Polyhedral only, -S = S
    std::vector<int> functional_class;                // index of the {f,-f} pair representative

    static NormSpec euclidean(int dim) {
        require_dim(dim);
        NormSpec s;
        s.kind = NormKind::Euclidean;
        s.dim = dim;
        return s;
    }

    static NormSpec lp(int dim, double p) {
        require_dim(dim);
        if (!(p > 1.0) || !std::isfinite(p))
            throw std::invalid_argument("lp norm requires finite p > 1 (give l1/linf as polyhedral)");
        if (p == 2.0) return euclidean(dim);
        NormSpec s;
        s.kind = NormKind::Lp;
        s.dim = dim;
        s.p = p;
        return s;
    }

    static NormSpec polyhedral(int dim, std::vector<std::vector<Rational>> fs) {
        require_dim(dim);
        if (fs.empty()) throw std::invalid_argument("polyhedral norm needs at least one functional");
        std::vector<std::vector<Rational>> closed;
        for (auto& f : fs) {
            if (static_cast<int>(f.size()) != dim)
                throw std::invalid_argument("functional dimension mismatch");
            if (is_zero_vector(f)) throw std::invalid_argument("zero functional is not allowed");
            if (!contains(closed, f)) closed.push_back(f);
        }
        // close under negation
        const size_t declared = closed.size();
        for (size_t i = 0; i < declared; ++i) {
            std::vector<Rational> neg = scaled(closed[i], Rational(-1));
            if (!contains(closed, neg)) closed.push_back(std::move(neg));
        }
        Matrix<Rational> span_check = Matrix<Rational>::from_columns(dim, closed).transposed();
        if (rank(span_check) != dim)
            throw std::invalid_argument("functionals do not span the dual space; not a norm");
        NormSpec s;
        s.kind = NormKind::Polyhedral;
        s.dim = dim;
        s.functionals = std::move(closed);
        s.functional_class.resize(s.functionals.size());
        for (size_t i = 0; i < s.functionals.size(); ++i) {
            std::vector<Rational> neg = scaled(s.functionals[i], Rational(-1));
            size_t mate = i;
            for (size_t j = 0; j < s.functionals.size(); ++j)
                if (s.functionals[j] == neg) { mate = j; break; }
            s.functional_class[i] = static_cast<int>(std::min(i, mate));
        }
        return s;
    }

    static NormSpec linf(int dim) {
        std::vector<std::vector<Rational>> fs;
        for (int i = 0; i < dim; ++i) {
            std::vector<Rational> e(dim, Rational(0));
            e[i] = 1;
            fs.push_back(std::move(e));
        }
        return polyhedral(dim, std::move(fs));
    }

    static NormSpec l1(int dim) {
        // all sign patterns starting with +1; negation closure adds the rest
        std::vector<std::vector<Rational>> fs;
        const int count = 1 << (dim - 1);
        for (int mask = 0; mask < count; ++mask) {
            std::vector<Rational> f(dim, Rational(1));
            for (int i = 1; i < dim; ++i)
                if (mask & (1 << (i - 1))) f[i] = -1;
            fs.push_back(std::move(f));
        }
        return polyhedral(dim, std::move(fs));
    }

private:
    static void require_dim(int dim) {
        if (dim <= 0) throw std::invalid_argument("norm dimension must be positive");
    }
    static bool contains(const std::vector<std::vector<Rational>>& set,
                         const std::vector<Rational>& f) {
        for (const auto& g : set)
            if (g == f) return true;
        return false;
    }
};

// Relative tolerance for active-functional detection in float mode; exact
// mode decides ties exactly.
inline constexpr double kActiveTol = 1e-9;

// Per-edge differential data of the norm at the edge vector.
template <class T>
struct EdgeGeometry {
    enum class Class { Smooth, PolyhedralActive, ZeroLength };
    Class cls = Class::ZeroLength;

    // Smooth (lp / Euclidean at x != 0)
    std::vector<T> gradient;                 // d(norm) at x
    std::vector<T> power_gradient;           // x^(p-1); x itself for Euclidean
    std::optional<Matrix<T>> hessian;        // Hessian of the norm
    std::optional<Matrix<T>> power_hessian;  // diag |x_i|^(p-2); identity for Euclidean

    // PolyhedralActive (x != 0): the signed functionals attaining the norm
    std::vector<std::vector<T>> active_rows;
    std::vector<int> active_functional;  // index into NormSpec::functionals
    std::vector<int> active_sign;

    bool badly_positioned() const {
        return cls == Class::ZeroLength ||
               (cls == Class::PolyhedralActive && active_rows.size() > 1);
    }
    bool twice_differentiable() const {
        if (cls == Class::ZeroLength) return false;
        if (cls == Class::PolyhedralActive) return active_rows.size() == 1;
        return power_hessian.has_value();
    }
};

template <class T>
T norm_evaluate(const NormSpec& spec, const std::vector<T>& x) {
    if (static_cast<int>(x.size()) != spec.dim)
        throw std::invalid_argument("norm_evaluate: dimension mismatch");
    switch (spec.kind) {
        case NormKind::Polyhedral: {
            T best(0);
            for (const auto& f : spec.functionals) {
                T v(0);
                for (int i = 0; i < spec.dim; ++i) v += from_rational<T>(f[i]) * x[i];
                if (v < T(0)) v = -v;
                if (v > best) best = v;
            }
            return best;
        }
        case NormKind::Euclidean: {
            if constexpr (scalar_traits<T>::exact) {
                throw std::logic_error("Euclidean norm values are irrational; use float mode");
            } else {
                return std::sqrt(dot(x, x));
            }
        }
        case NormKind::Lp: {
            if constexpr (scalar_traits<T>::exact) {
                throw std::logic_error("lp norms require float mode");
            } else {
                double s = 0.0;
                for (double xi : x) s += std::pow(std::abs(xi), spec.p);
                return std::pow(s, 1.0 / spec.p);
            }
        }
    }
    throw std::logic_error("unreachable");
}

template <class T>
EdgeGeometry<T> classify_edge_vector(const NormSpec& spec, const std::vector<T>& x) {
    if (static_cast<int>(x.size()) != spec.dim)
        throw std::invalid_argument("classify_edge_vector: dimension mismatch");
    EdgeGeometry<T> g;
    if (is_zero_vector(x)) {
        g.cls = EdgeGeometry<T>::Class::ZeroLength;
        return g;
    }

    if (spec.kind == NormKind::Polyhedral) {
        g.cls = EdgeGeometry<T>::Class::PolyhedralActive;
        const T norm = norm_evaluate(spec, x);
        std::vector<std::vector<Rational>> seen;  // signed rational rows, for dedup
        for (size_t i = 0; i < spec.functionals.size(); ++i) {
            T v(0);
            for (int k = 0; k < spec.dim; ++k) v += from_rational<T>(spec.functionals[i][k]) * x[k];
            T av = v < T(0) ? -v : v;
            bool active;
            if constexpr (scalar_traits<T>::exact)
                active = (av == norm);
            else
                active = (to_double(norm) - to_double(av) <= kActiveTol * to_double(norm));
            if (!active) continue;
            const int s = v < T(0) ? -1 : 1;  // v != 0 since |v| = norm > 0
            std::vector<Rational> key = s < 0 ? scaled(spec.functionals[i], Rational(-1))
                                              : spec.functionals[i];
            bool dup = false;
            for (const auto& k : seen)
                if (k == key) { dup = true; break; }
            if (dup) continue;
            std::vector<T> row(spec.dim);
            for (int k = 0; k < spec.dim; ++k) row[k] = from_rational<T>(key[k]);
            g.active_rows.push_back(std::move(row));
            g.active_functional.push_back(static_cast<int>(i));
            g.active_sign.push_back(s);
            seen.push_back(std::move(key));
        }
        return g;
    }

    if constexpr (scalar_traits<T>::exact) {
        throw std::logic_error("smooth norms require float mode");
    } else {
        g.cls = EdgeGeometry<double>::Class::Smooth;
        const int d = spec.dim;
        if (spec.kind == NormKind::Euclidean) {
            const double n = std::sqrt(dot(x, x));
            g.power_gradient = x;
            g.gradient = scaled(x, 1.0 / n);
            g.power_hessian = Matrix<double>::identity(d);
            Matrix<double> h(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    h(i, j) = ((i == j ? 1.0 : 0.0) - x[i] * x[j] / (n * n)) / n;
            g.hessian = std::move(h);
            return g;
        }
        const double p = spec.p;
        double s = 0.0;
        bool has_zero_coord = false;
        g.power_gradient.resize(d);
        for (int i = 0; i < d; ++i) {
            const double a = std::abs(x[i]);
            if (a == 0.0) has_zero_coord = true;
            s += std::pow(a, p);
            g.power_gradient[i] = (x[i] >= 0 ? 1.0 : -1.0) * std::pow(a, p - 1.0);
            if (x[i] == 0.0) g.power_gradient[i] = 0.0;
        }
        const double n = std::pow(s, 1.0 / p);
        const double np1 = std::pow(n, p - 1.0);
        g.gradient = scaled(g.power_gradient, 1.0 / np1);
        if (p > 2.0 || !has_zero_coord) {
            Matrix<double> ph(d, d);
            for (int i = 0; i < d; ++i) ph(i, i) = std::pow(std::abs(x[i]), p - 2.0);
            // norm Hessian: (p-1)/n^{p-1} * (diag - g_pow g_pow^T / n^p)
            Matrix<double> h(d, d);
            const double npow = std::pow(n, p);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    h(i, j) = (p - 1.0) / np1 *
                              ((i == j ? ph(i, i) : 0.0) -
                               g.power_gradient[i] * g.power_gradient[j] / npow);
            g.power_hessian = std::move(ph);
            g.hessian = std::move(h);
        }
        return g;
    }
}

// One-sided directional derivative of the norm at x in direction u. At a
// smooth point this is the gradient applied to u; at a polyhedral corner it
// is the max over the active signed functionals; at x = 0 the subdifferential
// is the whole dual unit ball, so the value is ||u||.
template <class T>
T one_sided_directional(const NormSpec& spec, const std::vector<T>& x, const std::vector<T>& u) {
    if (static_cast<int>(u.size()) != spec.dim)
        throw std::invalid_argument("one_sided_directional: dimension mismatch");
    if (is_zero_vector(x)) return norm_evaluate(spec, u);
    EdgeGeometry<T> g = classify_edge_vector(spec, x);
    if (g.cls == EdgeGeometry<T>::Class::Smooth) return dot(g.gradient, u);
    T best(0);
    bool first = true;
    for (const auto& row : g.active_rows) {
        const T v = dot(row, u);
        if (first || v > best) { best = v; first = false; }
    }
    return best;
}

}  // namespace rigidity
