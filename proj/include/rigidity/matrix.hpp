#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rigidity/rational.hpp"

namespace rigidity {

// Dense row-major matrix over one scalar mode (double or Rational). All the
// frameworks analysed here are desk scale, so the kernels below favour
// determinism and exactness over asymptotics.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
        data_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), T(0));
    }
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = static_cast<int>(init.size());
        cols_ = rows_ == 0 ? 0 : static_cast<int>(init.begin()->size());
        data_.reserve(static_cast<size_t>(rows_) * cols_);
        for (const auto& r : init) {
            if (static_cast<int>(r.size()) != cols_)
                throw std::invalid_argument("ragged initializer");
            for (const auto& x : r) data_.push_back(x);
        }
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
    static Matrix from_columns(int ambient_rows, const std::vector<std::vector<T>>& cols) {
        Matrix m(ambient_rows, static_cast<int>(cols.size()));
        for (int j = 0; j < m.cols(); ++j) {
            if (static_cast<int>(cols[j].size()) != ambient_rows)
                throw std::invalid_argument("column length mismatch");
            for (int i = 0; i < ambient_rows; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matmul shape mismatch");
        Matrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                if (a == T(0)) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    std::vector<T> mul_vec(const std::vector<T>& x) const {
        if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("matvec shape mismatch");
        std::vector<T> y(rows_, T(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    std::vector<T> row(int i) const {
        std::vector<T> r(cols_);
        for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }
    std::vector<T> col(int j) const {
        std::vector<T> c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_row(int i, const std::vector<T>& r) {
        for (int j = 0; j < cols_; ++j) (*this)(i, j) = r[j];
    }
    void set_col(int j, const std::vector<T>& c) {
        for (int i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    // Rows of `o` appended below this matrix.
    Matrix vstacked(const Matrix& o) const {
        if (!empty() && !o.empty() && cols_ != o.cols_)
            throw std::invalid_argument("vstack shape mismatch");
        const int c = cols_ > 0 ? cols_ : o.cols_;
        Matrix r(rows_ + o.rows_, c);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
        for (int i = 0; i < o.rows_; ++i)
            for (int j = 0; j < o.cols_; ++j) r(rows_ + i, j) = o(i, j);
        return r;
    }
    Matrix hstacked(const Matrix& o) const {
        if (!empty() && !o.empty() && rows_ != o.rows_)
            throw std::invalid_argument("hstack shape mismatch");
        const int rr = rows_ > 0 ? rows_ : o.rows_;
        Matrix r(rr, cols_ + o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
        for (int i = 0; i < o.rows_; ++i)
            for (int j = 0; j < o.cols_; ++j) r(i, cols_ + j) = o(i, j);
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const T& x : data_) m = std::max(m, std::abs(to_double(x)));
        return m;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot length mismatch");
    T s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

template <class T>
std::vector<T> sub(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub length mismatch");
    std::vector<T> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

template <class T>
std::vector<T> scaled(const std::vector<T>& a, const T& s) {
    std::vector<T> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

template <class T>
bool is_zero_vector(const std::vector<T>& a) {
    for (const T& x : a)
        if (x != T(0)) return false;
    return true;
}

// Column basis of a linear subspace of R^ambient_dim.
template <class T>
struct SubspaceBasis {
    int ambient_dim = 0;
    Matrix<T> basis;  // ambient_dim x dim, columns independent
    int dim() const { return basis.cols(); }
};

namespace detail {

// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<int> rref(Matrix<Rational>& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int piv = -1;
        for (int i = row; i < m.rows(); ++i)
            if (m(i, col) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != row)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
        const Rational inv = Rational(1) / m(row, col);
        for (int j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col) == 0) continue;
            const Rational f = m(i, col);
            for (int j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

// One-sided Jacobi: returns descending singular values, the matching right
// singular vectors as columns of v, and the rotated copy of the input whose
// j-th column is sigma_j * u_j.
struct JacobiSvd {
    std::vector<double> sigma;
    Matrix<double> v;
    Matrix<double> b;
};

inline JacobiSvd jacobi_svd(const Matrix<double>& a) {
    const int n = a.cols();
    JacobiSvd out;
    out.b = a;
    out.v = Matrix<double>::identity(n);
    Matrix<double>& b = out.b;
    Matrix<double>& v = out.v;
    const int m = a.rows();
    const double conv = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0, beta = 0, gamma = 0;
                for (int i = 0; i < m; ++i) {
                    alpha += b(i, p) * b(i, p);
                    beta += b(i, q) * b(i, q);
                    gamma += b(i, p) * b(i, q);
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= conv * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < m; ++i) {
                    const double bp = b(i, p), bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
                for (int i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    out.sigma.assign(n, 0.0);
    for (int j = 0; j < n; ++j) out.sigma[j] = norm2(b.col(j));
    // Stable descending order so kernel columns come out in a fixed order.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return out.sigma[i] > out.sigma[j]; });
    std::vector<double> sig(n);
    Matrix<double> vv(n, n), bb(m, n);
    for (int j = 0; j < n; ++j) {
        sig[j] = out.sigma[idx[j]];
        vv.set_col(j, v.col(idx[j]));
        bb.set_col(j, b.col(idx[j]));
    }
    out.sigma = std::move(sig);
    out.v = std::move(vv);
    out.b = std::move(bb);
    return out;
}

// Fixed orientation so repeated runs emit identical bases: the largest-|.|
// entry of each column is made positive.
inline void canonicalize_column_signs(Matrix<double>& m) {
    for (int j = 0; j < m.cols(); ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < m.rows(); ++i) {
            const double a = std::abs(m(i, j));
            if (a > best + 1e-15) { best = a; arg = i; }
        }
        if (m.rows() > 0 && m(arg, j) < 0)
            for (int i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
    }
}

}  // namespace detail

// Rank with tolerance relative to the largest singular value; the tolerance
// is ignored in exact mode.
template <class T>
int rank(const Matrix<T>& m, double tol = 1e-9) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    if constexpr (scalar_traits<T>::exact) {
        Matrix<Rational> work = m;
        return static_cast<int>(detail::rref(work).size());
    } else {
        auto svd = detail::jacobi_svd(m);
        const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
        if (smax == 0.0) return 0;
        int r = 0;
        for (double s : svd.sigma)
            if (s > tol * smax) ++r;
        return r;
    }
}

template <class T>
SubspaceBasis<T> null_space(const Matrix<T>& m, double tol = 1e-9) {
    const int n = m.cols();
    if (m.rows() == 0 || n == 0)
        return {n, Matrix<T>::identity(n)};
    if constexpr (scalar_traits<T>::exact) {
        Matrix<Rational> work = m;
        const std::vector<int> pivots = detail::rref(work);
        std::vector<bool> is_pivot(n, false);
        for (int p : pivots) is_pivot[p] = true;
        std::vector<std::vector<Rational>> cols;
        for (int j = 0; j < n; ++j) {
            if (is_pivot[j]) continue;
            std::vector<Rational> v(n, Rational(0));
            v[j] = 1;
            for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -work(static_cast<int>(r), j);
            cols.push_back(std::move(v));
        }
        return {n, Matrix<Rational>::from_columns(n, cols)};
    } else {
        auto svd = detail::jacobi_svd(m);
        const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
        Matrix<double> basis(n, 0);
        std::vector<std::vector<double>> cols;
        for (int j = 0; j < n; ++j)
            if (smax == 0.0 || svd.sigma[j] <= tol * smax) cols.push_back(svd.v.col(j));
        Matrix<double> b = Matrix<double>::from_columns(n, cols);
        detail::canonicalize_column_signs(b);
        return {n, b};
    }
}

template <class T>
SubspaceBasis<T> left_null_space(const Matrix<T>& m, double tol = 1e-9) {
    return null_space(m.transposed(), tol);
}

struct SymEigen {
    std::vector<double> values;  // ascending
    Matrix<double> vectors;      // columns match values
};

// Cyclic Jacobi rotations; inputs here are at most ~50x50.
inline SymEigen sym_eigen(const Matrix<double>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("sym_eigen: matrix not square");
    const int n = m.rows();
    const double scale = std::max(m.max_abs(), 1e-300);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale)
                throw std::invalid_argument("sym_eigen: matrix not symmetric");

    Matrix<double> a = m;
    Matrix<double> v = Matrix<double>::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-15 * scale * n) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= 1e-18 * scale) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    SymEigen out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return out.values[i] < out.values[j]; });
    std::vector<double> vals(n);
    Matrix<double> vecs(n, n);
    for (int j = 0; j < n; ++j) {
        vals[j] = out.values[idx[j]];
        vecs.set_col(j, v.col(idx[j]));
    }
    detail::canonicalize_column_signs(vecs);
    out.values = std::move(vals);
    out.vectors = std::move(vecs);
    return out;
}

// Minimum-norm least-squares solution of a x = b.
inline std::vector<double> lstsq_min_norm(const Matrix<double>& a, const std::vector<double>& b,
                                          double tol = 1e-9) {
    if (static_cast<int>(b.size()) != a.rows()) throw std::invalid_argument("lstsq shape mismatch");
    auto svd = detail::jacobi_svd(a);
    const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    std::vector<double> x(a.cols(), 0.0);
    for (int j = 0; j < a.cols(); ++j) {
        if (smax == 0.0 || svd.sigma[j] <= tol * smax) continue;
        // u_j = b-column j / sigma_j
        double coef = 0.0;
        for (int i = 0; i < a.rows(); ++i) coef += svd.b(i, j) * b[i];
        coef /= svd.sigma[j] * svd.sigma[j];
        for (int i = 0; i < a.cols(); ++i) x[i] += coef * svd.v(i, j);
    }
    return x;
}

// Modified Gram-Schmidt; keeps a column when its residual is significant.
// Returns an orthonormal basis of the column span.
inline Matrix<double> orthonormal_columns(const Matrix<double>& m, double tol = 1e-9) {
    std::vector<std::vector<double>> q;
    for (int j = 0; j < m.cols(); ++j) {
        std::vector<double> v = m.col(j);
        const double orig = norm2(v);
        if (orig == 0.0) continue;
        for (const auto& u : q) {
            const double c = dot(u, v);
            for (size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
        }
        // second pass for numerical safety
        for (const auto& u : q) {
            const double c = dot(u, v);
            for (size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
        }
        const double r = norm2(v);
        if (r > tol * orig) {
            for (double& x : v) x /= r;
            q.push_back(std::move(v));
        }
    }
    Matrix<double> out = Matrix<double>::from_columns(m.rows(), q);
    detail::canonicalize_column_signs(out);
    return out;
}

// Component of v orthogonal to the span of the orthonormal columns q.
inline std::vector<double> project_out(const Matrix<double>& q, std::vector<double> v) {
    for (int j = 0; j < q.cols(); ++j) {
        double c = 0.0;
        for (int i = 0; i < q.rows(); ++i) c += q(i, j) * v[i];
        for (int i = 0; i < q.rows(); ++i) v[i] -= c * q(i, j);
    }
    return v;
}

// Exact membership test: is v in the column span of basis?
inline bool in_span(const Matrix<Rational>& basis, const std::vector<Rational>& v) {
    Matrix<Rational> aug = basis.hstacked(Matrix<Rational>::from_columns(static_cast<int>(v.size()), {v}));
    return rank(aug) == rank(basis);
}

}  // namespace rigidity
