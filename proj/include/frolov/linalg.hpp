#pragma once

// Small dense linear algebra for the d x d generator matrices (d <= 12).

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace frolov {

using Vec = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
        if (dim < 1) throw std::invalid_argument("Matrix: dim must be >= 1");
    }
    Matrix(int dim, std::vector<double> row_major) : dim_(dim), a_(std::move(row_major)) {
        if (dim < 1 || a_.size() != static_cast<std::size_t>(dim) * dim)
            throw std::invalid_argument("Matrix: bad entry count");
    }

    int dim() const { return dim_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const std::vector<double>& data() const { return a_; }

    Matrix transposed() const {
        Matrix t(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix scaled(double c) const {
        Matrix s = *this;
        for (double& x : s.a_) x *= c;
        return s;
    }

    Vec apply(std::span<const double> x) const {
        Vec y(dim_, 0.0);
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
        return y;
    }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    int dim_ = 0;
    std::vector<double> a_;
};

namespace detail {

// LU with partial pivoting; returns false on (numerical) singularity.
struct Lu {
    Matrix lu;
    std::vector<int> perm;
    int sign = 1;
    bool ok = false;
};

inline Lu lu_decompose(const Matrix& m) {
    const int d = m.dim();
    Lu f{m, std::vector<int>(static_cast<std::size_t>(d)), 1, true};
    for (int i = 0; i < d; ++i) f.perm[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < d; ++k) {
        int piv = k;
        double best = std::fabs(f.lu(k, k));
        for (int i = k + 1; i < d; ++i) {
            const double v = std::fabs(f.lu(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) { f.ok = false; return f; }
        if (piv != k) {
            for (int j = 0; j < d; ++j) std::swap(f.lu(piv, j), f.lu(k, j));
            std::swap(f.perm[static_cast<std::size_t>(piv)], f.perm[static_cast<std::size_t>(k)]);
            f.sign = -f.sign;
        }
        for (int i = k + 1; i < d; ++i) {
            f.lu(i, k) /= f.lu(k, k);
            const double l = f.lu(i, k);
            for (int j = k + 1; j < d; ++j) f.lu(i, j) -= l * f.lu(k, j);
        }
    }
    return f;
}

} // namespace detail

inline double determinant(const Matrix& m) {
    const auto f = detail::lu_decompose(m);
    if (!f.ok) return 0.0;
    double det = f.sign;
    for (int i = 0; i < m.dim(); ++i) det *= f.lu(i, i);
    return det;
}

inline Matrix inverse(const Matrix& m) {
    const int d = m.dim();
    const auto f = detail::lu_decompose(m);
    if (!f.ok) throw std::invalid_argument("inverse: singular matrix");
    Matrix inv(d);
    Vec col(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < d; ++i)
            col[static_cast<std::size_t>(i)] = (f.perm[static_cast<std::size_t>(i)] == c) ? 1.0 : 0.0;
        for (int i = 1; i < d; ++i)
            for (int j = 0; j < i; ++j) col[static_cast<std::size_t>(i)] -= f.lu(i, j) * col[static_cast<std::size_t>(j)];
        for (int i = d - 1; i >= 0; --i) {
            for (int j = i + 1; j < d; ++j) col[static_cast<std::size_t>(i)] -= f.lu(i, j) * col[static_cast<std::size_t>(j)];
            col[static_cast<std::size_t>(i)] /= f.lu(i, i);
        }
        for (int i = 0; i < d; ++i) inv(i, c) = col[static_cast<std::size_t>(i)];
    }
    return inv;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const int d = a.dim();
    if (d != b.dim()) throw std::invalid_argument("multiply: dim mismatch");
    Matrix c(d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

} // namespace frolov
