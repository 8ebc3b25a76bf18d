#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "rigidity/matrix.hpp"
#include "rigidity/rational.hpp"

namespace rigidity {

namespace detail {

// Exact two-phase primal simplex, maximization, Bland's rule throughout so
// termination is guaranteed. Column count stays fixed; artificial columns
// are appended on the right and removed again after phase one.
class ExactSimplex {
public:
    // a x = b, x >= 0, b >= 0 after row normalization done by the caller.
    ExactSimplex(Matrix<Rational> a, std::vector<Rational> b)
        : a_(std::move(a)), b_(std::move(b)), m_(a_.rows()), n_(a_.cols()) {}

    // Returns the optimal structural solution of max c.x, or nullopt when the
    // system is infeasible. Throws on an unbounded ray (impossible for the
    // boxed systems built below).
    std::optional<std::vector<Rational>> maximize(const std::vector<Rational>& c,
                                                  Rational* value_out) {
        // Phase one: artificial identity basis, minimize artificial mass.
        Matrix<Rational> t = a_.hstacked(Matrix<Rational>::identity(m_));
        std::vector<int> basis(m_);
        for (int i = 0; i < m_; ++i) basis[i] = n_ + i;
        std::vector<Rational> phase1(n_ + m_, Rational(0));
        for (int i = 0; i < m_; ++i) phase1[n_ + i] = -1;
        run(t, basis, phase1, n_ + m_);
        Rational art_mass(0);
        for (int i = 0; i < m_; ++i)
            if (basis[i] >= n_) art_mass += b_[i];
        if (art_mass != 0) return std::nullopt;

        // Drive leftover zero-level artificials out of the basis; a row with
        // no structural pivot candidate is redundant and gets dropped.
        for (int i = static_cast<int>(basis.size()) - 1; i >= 0; --i) {
            if (basis[i] < n_) continue;
            int enter = -1;
            for (int j = 0; j < n_; ++j)
                if (t(i, j) != 0) { enter = j; break; }
            if (enter >= 0) {
                pivot(t, basis, i, enter);
            } else {
                drop_row(t, i);
                basis.erase(basis.begin() + i);
                b_.erase(b_.begin() + i);
                --m_;
            }
        }

        std::vector<Rational> c2(n_, Rational(0));
        for (int j = 0; j < n_; ++j) c2[j] = c[j];
        run(t, basis, c2, n_);

        std::vector<Rational> x(n_, Rational(0));
        for (int i = 0; i < m_; ++i)
            if (basis[i] < n_) x[basis[i]] = b_[i];
        if (value_out) {
            Rational v(0);
            for (int j = 0; j < n_; ++j) v += c[j] * x[j];
            *value_out = v;
        }
        return x;
    }

private:
    void run(Matrix<Rational>& t, std::vector<int>& basis, const std::vector<Rational>& c,
             int allowed_cols) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < allowed_cols; ++j) {
                Rational reduced = c[j];
                for (int i = 0; i < m_; ++i)
                    if (c[basis[i]] != 0) reduced -= c[basis[i]] * t(i, j);
                if (reduced > 0) { enter = j; break; }  // Bland: lowest index
            }
            if (enter < 0) return;
            int leave = -1;
            Rational best_ratio(0);
            for (int i = 0; i < m_; ++i) {
                if (t(i, enter) <= 0) continue;
                const Rational ratio = b_[i] / t(i, enter);
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) throw std::logic_error("simplex: unbounded direction in boxed system");
            pivot(t, basis, leave, enter);
        }
    }

    void pivot(Matrix<Rational>& t, std::vector<int>& basis, int row, int col) {
        const Rational inv = Rational(1) / t(row, col);
        for (int j = 0; j < t.cols(); ++j) t(row, j) *= inv;
        b_[row] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == row || t(i, col) == 0) continue;
            const Rational f = t(i, col);
            for (int j = 0; j < t.cols(); ++j) t(i, j) -= f * t(row, j);
            b_[i] -= f * b_[row];
        }
        basis[row] = col;
    }

    void drop_row(Matrix<Rational>& t, int row) {
        Matrix<Rational> t2(t.rows() - 1, t.cols());
        for (int i = 0, k = 0; i < t.rows(); ++i) {
            if (i == row) continue;
            for (int j = 0; j < t.cols(); ++j) t2(k, j) = t(i, j);
            ++k;
        }
        t = std::move(t2);
    }

    Matrix<Rational> a_;
    std::vector<Rational> b_;
    int m_;
    int n_;
};

}  // namespace detail

// Homogeneous feasibility: find a nonzero rational u with
// inequalities.u >= 0 (componentwise) and equalities.u = 0, or report that
// u = 0 is the only solution. For each coordinate i and sign s the LP
// max s*u_i subject to the constraints and the box -1 <= u_j <= 1 is solved;
// the first positive optimum yields the witness.
inline std::optional<std::vector<Rational>> lp_feasible_nonzero(const Matrix<Rational>& inequalities,
                                                                const Matrix<Rational>& equalities) {
    const int n = inequalities.cols() > 0 ? inequalities.cols() : equalities.cols();
    if (n == 0) return std::nullopt;
    if ((inequalities.rows() > 0 && inequalities.cols() != n) ||
        (equalities.rows() > 0 && equalities.cols() != n) ||
        (inequalities.cols() > 0 && equalities.cols() > 0 && inequalities.cols() != equalities.cols()))
        throw std::invalid_argument("lp_feasible_nonzero: column counts differ");

    const int mi = inequalities.rows();
    const int me = equalities.rows();
    // Shift u = x - 1 so the box becomes 0 <= x <= 2, then standard form:
    //   ineq row r:  r.x - s      = r.1   (slack s >= 0)
    //   eq row e:    e.x          = e.1
    //   box:         x_j + t_j    = 2
    const int cols = n + mi + n;
    const int rows = mi + me + n;
    Matrix<Rational> a(rows, cols);
    std::vector<Rational> b(rows, Rational(0));
    for (int r = 0; r < mi; ++r) {
        Rational rhs(0);
        for (int j = 0; j < n; ++j) {
            a(r, j) = inequalities(r, j);
            rhs += inequalities(r, j);
        }
        a(r, n + r) = -1;
        b[r] = rhs;
    }
    for (int r = 0; r < me; ++r) {
        Rational rhs(0);
        for (int j = 0; j < n; ++j) {
            a(mi + r, j) = equalities(r, j);
            rhs += equalities(r, j);
        }
        b[mi + r] = rhs;
    }
    for (int j = 0; j < n; ++j) {
        a(mi + me + j, j) = 1;
        a(mi + me + j, n + mi + j) = 1;
        b[mi + me + j] = 2;
    }
    for (int r = 0; r < rows; ++r) {
        if (b[r] >= 0) continue;
        for (int j = 0; j < cols; ++j) a(r, j) = -a(r, j);
        b[r] = -b[r];
    }

    for (int i = 0; i < n; ++i) {
        for (int s : {1, -1}) {
            std::vector<Rational> c(cols, Rational(0));
            c[i] = s;
            detail::ExactSimplex lp(a, b);
            Rational value;
            auto x = lp.maximize(c, &value);
            if (!x) throw std::logic_error("lp_feasible_nonzero: homogeneous system reported infeasible");
            // optimum of s*u_i is s*(x_i - 1)
            if (Rational(s) * ((*x)[i] - 1) > 0) {
                std::vector<Rational> u(n);
                for (int j = 0; j < n; ++j) u[j] = (*x)[j] - 1;
                return u;
            }
        }
    }
    return std::nullopt;
}

}  // namespace rigidity
