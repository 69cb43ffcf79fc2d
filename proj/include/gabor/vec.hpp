#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include "gabor/errors.hpp"

namespace gabor {

/// Fixed-capacity vector for points in R^d, d <= 6. Value type, no heap.
class Vec {
public:
    static constexpr int kMaxDim = 6;

    Vec() : n_(0) { v_.fill(0.0); }
    explicit Vec(int dim) : n_(dim) {
        if (dim < 0 || dim > kMaxDim) throw InvalidArgument("Vec: dimension out of range");
        v_.fill(0.0);
    }
    Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
        if (n_ > kMaxDim) throw InvalidArgument("Vec: dimension out of range");
        v_.fill(0.0);
        int i = 0;
        for (double x : xs) v_[i++] = x;
    }

    int dim() const { return n_; }
    double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<size_t>(i)]; }

    const double* data() const { return v_.data(); }

    bool finite() const {
        for (int i = 0; i < n_; ++i)
            if (!std::isfinite(v_[static_cast<size_t>(i)])) return false;
        return true;
    }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += v_[static_cast<size_t>(i)] * o.v_[static_cast<size_t>(i)];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    double norm_inf() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(v_[static_cast<size_t>(i)]));
        return m;
    }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n_; ++i) v_[static_cast<size_t>(i)] += o.v_[static_cast<size_t>(i)];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n_; ++i) v_[static_cast<size_t>(i)] -= o.v_[static_cast<size_t>(i)];
        return *this;
    }
    Vec& operator*=(double t) {
        for (int i = 0; i < n_; ++i) v_[static_cast<size_t>(i)] *= t;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double t, Vec a) { return a *= t; }
    friend Vec operator*(Vec a, double t) { return a *= t; }
    friend Vec operator-(Vec a) { return a *= -1.0; }
    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            if (a.v_[static_cast<size_t>(i)] != b.v_[static_cast<size_t>(i)]) return false;
        return true;
    }

    Vec normalized() const {
        double r = norm();
        if (r == 0.0) throw InvalidArgument("Vec: cannot normalize the zero vector");
        Vec out = *this;
        out *= 1.0 / r;
        return out;
    }

    static Vec unit(int dim, int axis) {
        Vec e(dim);
        e[axis] = 1.0;
        return e;
    }

private:
    std::array<double, kMaxDim> v_;
    int n_;
};

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Fixed-capacity dense square matrix, row-major, dim <= 6.
class Mat {
public:
    Mat() : n_(0) { m_.fill(0.0); }
    explicit Mat(int dim) : n_(dim) {
        if (dim < 0 || dim > Vec::kMaxDim) throw InvalidArgument("Mat: dimension out of range");
        m_.fill(0.0);
    }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diagonal(const Vec& d) {
        Mat m(d.dim());
        for (int i = 0; i < d.dim(); ++i) m(i, i) = d[i];
        return m;
    }

    int dim() const { return n_; }
    double operator()(int i, int j) const { return m_[static_cast<size_t>(i * Vec::kMaxDim + j)]; }
    double& operator()(int i, int j) { return m_[static_cast<size_t>(i * Vec::kMaxDim + j)]; }

    Vec apply(const Vec& x) const {
        Vec y(n_);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    bool is_diagonal(double tol = 0.0) const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (i != j && std::abs((*this)(i, j)) > tol) return false;
        return true;
    }

    /// Gauss-Jordan inverse with partial pivoting. Throws on (near-)singular input.
    Mat inverse() const {
        Mat a = *this;
        Mat inv = identity(n_);
        for (int col = 0; col < n_; ++col) {
            int piv = col;
            for (int r = col + 1; r < n_; ++r)
                if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
            if (std::abs(a(piv, col)) < 1e-14) throw InvalidArgument("Mat: singular matrix");
            if (piv != col)
                for (int j = 0; j < n_; ++j) {
                    std::swap(a(piv, j), a(col, j));
                    std::swap(inv(piv, j), inv(col, j));
                }
            double p = a(col, col);
            for (int j = 0; j < n_; ++j) {
                a(col, j) /= p;
                inv(col, j) /= p;
            }
            for (int r = 0; r < n_; ++r) {
                if (r == col) continue;
                double f = a(r, col);
                if (f == 0.0) continue;
                for (int j = 0; j < n_; ++j) {
                    a(r, j) -= f * a(col, j);
                    inv(r, j) -= f * inv(col, j);
                }
            }
        }
        return inv;
    }

    double determinant() const {
        Mat a = *this;
        double det = 1.0;
        for (int col = 0; col < n_; ++col) {
            int piv = col;
            for (int r = col + 1; r < n_; ++r)
                if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
            if (std::abs(a(piv, col)) == 0.0) return 0.0;
            if (piv != col) {
                det = -det;
                for (int j = 0; j < n_; ++j) std::swap(a(piv, j), a(col, j));
            }
            det *= a(col, col);
            for (int r = col + 1; r < n_; ++r) {
                double f = a(r, col) / a(col, col);
                for (int j = col; j < n_; ++j) a(r, j) -= f * a(col, j);
            }
        }
        return det;
    }

private:
    std::array<double, Vec::kMaxDim * Vec::kMaxDim> m_;
    int n_;
};

namespace detail {

/// Cyclic Jacobi eigensolver for small symmetric matrices. Returns eigenvalues
/// ascending; columns of `vectors` are the matching eigenvectors.
inline void jacobi_eigen(const Mat& sym, Vec& values, Mat& vectors) {
    const int n = sym.dim();
    Mat a = sym;
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values = Vec(n);
    for (int i = 0; i < n; ++i) values[i] = a(i, i);
    // sort ascending, keeping vectors in sync
    for (int i = 0; i < n; ++i) {
        int best = i;
        for (int j = i + 1; j < n; ++j)
            if (values[j] < values[best]) best = j;
        if (best != i) {
            std::swap(values[i], values[best]);
            for (int k = 0; k < n; ++k) std::swap(v(k, i), v(k, best));
        }
    }
    vectors = v;
}

/// Deterministic orthonormal basis whose last column is `axis` (unit).
inline Mat basis_with_last_axis(const Vec& axis) {
    const int n = axis.dim();
    Vec u = axis.normalized();
    // Start from the identity column least aligned with u, then Gram-Schmidt.
    Mat b(n);
    int cols = 0;
    for (int i = 0; i < n && cols < n - 1; ++i) {
        Vec e = Vec::unit(n, i);
        Vec w = e - u.dot(e) * u;
        for (int j = 0; j < cols; ++j) {
            Vec col(n);
            for (int k = 0; k < n; ++k) col[k] = b(k, j);
            w -= col.dot(w) * col;
        }
        if (w.norm() > 1e-8) {
            w = w.normalized();
            for (int k = 0; k < n; ++k) b(k, cols) = w[k];
            ++cols;
        }
    }
    if (cols != n - 1) throw InvalidArgument("basis_with_last_axis: degenerate axis");
    for (int k = 0; k < n; ++k) b(k, n - 1) = u[k];
    return b;
}

}  // namespace detail
}  // namespace gabor
