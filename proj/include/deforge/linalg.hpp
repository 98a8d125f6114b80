#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "deforge/scalar.hpp"

namespace deforge {

template <class K>
using Vec = std::vector<K>;

// Dense row-major matrix over an exact or float scalar field.
template <class K>
struct Mat {
    int rows = 0, cols = 0;
    std::vector<K> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, K(0)) {}

    K& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const K& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = K(1);
        return m;
    }

    static Mat from_columns(const std::vector<Vec<K>>& cols_in) {
        if (cols_in.empty()) return Mat(0, 0);
        Mat m(static_cast<int>(cols_in[0].size()), static_cast<int>(cols_in.size()));
        for (int j = 0; j < m.cols; ++j)
            for (int i = 0; i < m.rows; ++i) m.at(i, j) = cols_in[j][i];
        return m;
    }

    Vec<K> column(int j) const {
        Vec<K> v(rows);
        for (int i = 0; i < rows; ++i) v[i] = at(i, j);
        return v;
    }

    Mat transpose() const {
        Mat m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    Mat conj_transpose() const {
        Mat m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m.at(j, i) = conj_val(at(i, j));
        return m;
    }

    bool is_zero() const {
        for (const K& x : a)
            if (!deforge::is_zero(x)) return false;
        return true;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        if (x.cols != y.rows) throw InvariantViolation("matrix product shape mismatch");
        Mat m(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                const K& v = x.at(i, k);
                if (deforge::is_zero(v)) continue;
                for (int j = 0; j < y.cols; ++j) m.at(i, j) += v * y.at(k, j);
            }
        return m;
    }

    friend Mat operator+(Mat x, const Mat& y) {
        if (x.rows != y.rows || x.cols != y.cols) throw InvariantViolation("matrix sum shape mismatch");
        for (size_t k = 0; k < x.a.size(); ++k) x.a[k] += y.a[k];
        return x;
    }

    friend Mat operator-(Mat x, const Mat& y) {
        if (x.rows != y.rows || x.cols != y.cols) throw InvariantViolation("matrix difference shape mismatch");
        for (size_t k = 0; k < x.a.size(); ++k) x.a[k] -= y.a[k];
        return x;
    }

    friend Mat operator*(const K& s, Mat x) {
        for (K& v : x.a) v = s * v;
        return x;
    }

    friend bool operator==(const Mat& x, const Mat& y) {
        if (x.rows != y.rows || x.cols != y.cols) return false;
        for (size_t k = 0; k < x.a.size(); ++k)
            if (!deforge::is_zero(x.a[k] - y.a[k])) return false;
        return true;
    }

    friend Vec<K> operator*(const Mat& m, const Vec<K>& v) {
        if (static_cast<int>(v.size()) != m.cols) throw InvariantViolation("matrix-vector shape mismatch");
        Vec<K> out(m.rows, K(0));
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j)
                if (!deforge::is_zero(m.at(i, j))) out[i] += m.at(i, j) * v[j];
        return out;
    }
};

template <class K>
Mat<K> hstack(const Mat<K>& x, const Mat<K>& y) {
    if (x.rows != y.rows) throw InvariantViolation("hstack row mismatch");
    Mat<K> m(x.rows, x.cols + y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) m.at(i, j) = x.at(i, j);
        for (int j = 0; j < y.cols; ++j) m.at(i, x.cols + j) = y.at(i, j);
    }
    return m;
}

template <class K>
Mat<K> vstack(const Mat<K>& x, const Mat<K>& y) {
    if (x.cols != y.cols) throw InvariantViolation("vstack column mismatch");
    Mat<K> m(x.rows + y.rows, x.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) m.at(i, j) = x.at(i, j);
    for (int i = 0; i < y.rows; ++i)
        for (int j = 0; j < y.cols; ++j) m.at(x.rows + i, j) = y.at(i, j);
    return m;
}

namespace detail {
inline double pivot_mag(const GQ& x) { return is_zero(x) ? 0.0 : 1.0; }
inline double pivot_mag(const mpq_class& x) { return is_zero(x) ? 0.0 : 1.0; }
inline double pivot_mag(const CD& x) { return is_zero(x) ? 0.0 : std::abs(x.v); }
}  // namespace detail

// In-place reduced row echelon form; returns pivot column indices.
// Exact backends take the first nonzero pivot, the float backend the largest.
template <class K>
std::vector<int> rref(Mat<K>& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int best = -1;
        double best_mag = 0.0;
        for (int i = row; i < m.rows; ++i) {
            double mag = detail::pivot_mag(m.at(i, col));
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
                if constexpr (!std::is_same_v<K, CD>) break;  // first nonzero suffices
            }
        }
        if (best < 0) continue;
        if (best != row)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(row, j), m.at(best, j));
        K piv_inv = inv_val(m.at(row, col));
        for (int j = col; j < m.cols; ++j) m.at(row, j) = piv_inv * m.at(row, j);
        m.at(row, col) = K(1);
        for (int i = 0; i < m.rows; ++i) {
            if (i == row || deforge::is_zero(m.at(i, col))) continue;
            K f = m.at(i, col);
            for (int j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(row, j);
            m.at(i, col) = K(0);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class K>
int rank(Mat<K> m) {
    return static_cast<int>(rref(m).size());
}

// Columns form a basis of the null space {x : Ax = 0}.
template <class K>
Mat<K> kernel_basis(Mat<K> m) {
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(m.cols, false);
    for (int p : pivots) is_pivot[p] = true;
    Mat<K> ker(m.cols, m.cols - static_cast<int>(pivots.size()));
    int out = 0;
    for (int free_col = 0; free_col < m.cols; ++free_col) {
        if (is_pivot[free_col]) continue;
        ker.at(free_col, out) = K(1);
        for (size_t r = 0; r < pivots.size(); ++r) ker.at(pivots[r], out) = -m.at(static_cast<int>(r), free_col);
        ++out;
    }
    return ker;
}

// Any particular solution of Ax = b, or nullopt when inconsistent.
template <class K>
std::optional<Vec<K>> solve(const Mat<K>& a, const Vec<K>& b) {
    Mat<K> aug = hstack(a, Mat<K>::from_columns({b}));
    std::vector<int> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == a.cols) return std::nullopt;
    Vec<K> x(a.cols, K(0));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(static_cast<int>(r), a.cols);
    return x;
}

// Solves AX = B column by column; nullopt if any column is inconsistent.
template <class K>
std::optional<Mat<K>> solve_multi(const Mat<K>& a, const Mat<K>& b) {
    Mat<K> aug = hstack(a, b);
    std::vector<int> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() >= a.cols) return std::nullopt;
    Mat<K> x(a.cols, b.cols);
    for (size_t r = 0; r < pivots.size(); ++r)
        for (int j = 0; j < b.cols; ++j) x.at(pivots[r], j) = aug.at(static_cast<int>(r), a.cols + j);
    return x;
}

template <class K>
Mat<K> conj_entries(Mat<K> m) {
    for (K& v : m.a) v = conj_val(v);
    return m;
}

// Determinant by Gaussian elimination with row pivoting.
template <class K>
K det(Mat<K> m) {
    if (m.rows != m.cols) throw InvariantViolation("determinant of non-square matrix");
    K result(1);
    for (int col = 0; col < m.cols; ++col) {
        int best = -1;
        double best_mag = 0.0;
        for (int i = col; i < m.rows; ++i) {
            double mag = detail::pivot_mag(m.at(i, col));
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
                if constexpr (!std::is_same_v<K, CD>) break;
            }
        }
        if (best < 0) return K(0);
        if (best != col) {
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(col, j), m.at(best, j));
            result = -result;
        }
        const K piv = m.at(col, col);
        result = result * piv;
        K piv_inv = inv_val(piv);
        for (int i = col + 1; i < m.rows; ++i) {
            if (deforge::is_zero(m.at(i, col))) continue;
            K f = piv_inv * m.at(i, col);
            for (int j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(col, j);
        }
    }
    return result;
}

template <class K>
std::optional<Mat<K>> inverse(const Mat<K>& m) {
    if (m.rows != m.cols) throw InvariantViolation("inverse of non-square matrix");
    Mat<K> aug = hstack(m, Mat<K>::identity(m.rows));
    std::vector<int> pivots = rref(aug);
    if (static_cast<int>(pivots.size()) != m.rows || (!pivots.empty() && pivots.back() >= m.cols))
        return std::nullopt;
    Mat<K> inv(m.rows, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.rows; ++j) inv.at(i, j) = aug.at(i, m.cols + j);
    return inv;
}

// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
// Returns ascending eigenvalues and the matching unitary column basis.
struct HermEigen {
    std::vector<double> values;
    Mat<CD> vectors;
};

inline HermEigen jacobi_hermitian(Mat<CD> A) {
    const int n = A.rows;
    if (A.cols != n) throw InvariantViolation("eigendecomposition of non-square matrix");
    Mat<CD> Q = Mat<CD>::identity(n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(A.at(i, i).v));
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(A.at(p, q).v);
        if (std::sqrt(off) <= 1e-14 * scale * n) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                std::complex<double> g = A.at(p, q).v;
                if (std::abs(g) <= 1e-300) continue;
                std::complex<double> u = g / std::abs(g);
                double alpha = A.at(p, p).v.real();
                double beta = A.at(q, q).v.real();
                double tau = (beta - alpha) / (2.0 * std::abs(g));
                double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // Unitary: column p <- u*c*col_p - s*col_q, column q <- u*s*col_p + c*col_q.
                auto rotate_cols = [&](Mat<CD>& M) {
                    for (int r = 0; r < M.rows; ++r) {
                        std::complex<double> xp = M.at(r, p).v, xq = M.at(r, q).v;
                        M.at(r, p) = CD(u * c * xp - s * xq);
                        M.at(r, q) = CD(u * s * xp + c * xq);
                    }
                };
                rotate_cols(A);
                rotate_cols(Q);
                for (int cidx = 0; cidx < n; ++cidx) {
                    std::complex<double> xp = A.at(p, cidx).v, xq = A.at(q, cidx).v;
                    A.at(p, cidx) = CD(std::conj(u) * c * xp - s * xq);
                    A.at(q, cidx) = CD(std::conj(u) * s * xp + c * xq);
                }
            }
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return A.at(x, x).v.real() < A.at(y, y).v.real(); });
    HermEigen out;
    out.values.resize(n);
    out.vectors = Mat<CD>(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = A.at(order[j], order[j]).v.real();
        for (int i = 0; i < n; ++i) out.vectors.at(i, j) = Q.at(i, order[j]);
    }
    return out;
}

}  // namespace deforge
