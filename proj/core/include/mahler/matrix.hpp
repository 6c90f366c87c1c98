#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/poly.hpp"

namespace mahler {

// Dense row-major matrix over a ring T (T constructible from int).
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, T(0)) {}
    Matrix(std::size_t rows, std::size_t cols, const T& fill) : r_(rows), c_(cols), a_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        r_ = rows.size();
        c_ = r_ ? rows.begin()->size() : 0;
        for (const auto& row : rows) {
            require(row.size() == c_, ErrorKind::InvalidArgument, "ragged matrix literal");
            for (const auto& x : row) a_.push_back(x);
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    bool square() const { return r_ == c_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    template <class F>
    auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
        Matrix<decltype(f(std::declval<const T&>()))> out(r_, c_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) out(i, j) = f((*this)(i, j));
        return out;
    }

    friend Matrix operator+(const Matrix& x, const Matrix& y) {
        check_same(x, y);
        Matrix m(x.r_, x.c_);
        for (std::size_t k = 0; k < x.a_.size(); ++k) m.a_[k] = x.a_[k] + y.a_[k];
        return m;
    }
    friend Matrix operator-(const Matrix& x, const Matrix& y) {
        check_same(x, y);
        Matrix m(x.r_, x.c_);
        for (std::size_t k = 0; k < x.a_.size(); ++k) m.a_[k] = x.a_[k] - y.a_[k];
        return m;
    }
    Matrix operator-() const {
        Matrix m(r_, c_);
        for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = -a_[k];
        return m;
    }
    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        require(x.c_ == y.r_, ErrorKind::InvalidArgument, "matrix shape mismatch in product");
        Matrix m(x.r_, y.c_);
        for (std::size_t i = 0; i < x.r_; ++i)
            for (std::size_t k = 0; k < x.c_; ++k) {
                const T& xik = x(i, k);
                if (is_zero(xik)) continue;
                for (std::size_t j = 0; j < y.c_; ++j) m(i, j) = m(i, j) + xik * y(k, j);
            }
        return m;
    }
    friend Matrix operator*(const T& s, const Matrix& x) {
        Matrix m(x.r_, x.c_);
        for (std::size_t k = 0; k < x.a_.size(); ++k) m.a_[k] = s * x.a_[k];
        return m;
    }
    friend bool operator==(const Matrix& x, const Matrix& y) {
        if (x.r_ != y.r_ || x.c_ != y.c_) return false;
        for (std::size_t k = 0; k < x.a_.size(); ++k)
            if (!(x.a_[k] == y.a_[k])) return false;
        return true;
    }
    friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }

    Matrix transpose() const {
        Matrix m(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    Matrix block(std::size_t i0, std::size_t j0, std::size_t nr, std::size_t nc) const {
        Matrix m(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
        return m;
    }
    void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    bool is_zero_matrix() const {
        for (const auto& x : a_)
            if (!is_zero(x)) return false;
        return true;
    }

private:
    static void check_same(const Matrix& x, const Matrix& y) {
        require(x.r_ == y.r_ && x.c_ == y.c_, ErrorKind::InvalidArgument, "matrix shape mismatch");
    }

    std::size_t r_ = 0, c_ = 0;
    std::vector<T> a_;
};

template <class T>
Matrix<T> matrix_pow(const Matrix<T>& m, long e) {
    Matrix<T> r = Matrix<T>::identity(m.rows());
    for (long i = 0; i < e; ++i) r = r * m;
    return r;
}

// Characteristic polynomial det(xI - M) by Berkowitz's division-free algorithm
// (valid over any commutative ring).
template <class T>
Poly<T> charpoly(const Matrix<T>& m) {
    require(m.square(), ErrorKind::InvalidArgument, "charpoly of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return Poly<T>::constant(T(1));
    // v holds coefficients (highest first) of the char poly of the leading r x r block.
    std::vector<T> v{T(1), T(-1) * m(0, 0)};
    for (std::size_t r = 1; r < n; ++r) {
        // Partition leading (r+1)x(r+1) block as [[A, R],[S, a]] with a = m(r,r)?
        // Berkowitz uses the trailing convention; we work with the leading block
        // of size r and the new row/column r.
        std::vector<T> col(r), row(r);
        for (std::size_t i = 0; i < r; ++i) {
            col[i] = m(i, r);
            row[i] = m(r, i);
        }
        const T& a = m(r, r);
        // Toeplitz entries: 1, -a, -R C, -R A C, -R A^2 C, ...
        std::vector<T> t(r + 2, T(0));
        t[0] = T(1);
        t[1] = T(-1) * a;
        std::vector<T> cur = col;
        for (std::size_t k = 2; k <= r + 1; ++k) {
            T s(0);
            for (std::size_t i = 0; i < r; ++i) s = s + row[i] * cur[i];
            t[k] = T(-1) * s;
            std::vector<T> nxt(r, T(0));
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) nxt[i] = nxt[i] + m(i, j) * cur[j];
            cur = std::move(nxt);
        }
        std::vector<T> w(r + 2, T(0));
        for (std::size_t i = 0; i < r + 2; ++i)
            for (std::size_t j = 0; j <= i && j < v.size(); ++j) w[i] = w[i] + t[i - j] * v[j];
        v = std::move(w);
    }
    std::vector<T> asc(v.rbegin(), v.rend());
    return Poly<T>(std::move(asc));
}

// Gaussian elimination helpers over an exact field.
template <class T>
struct Elimination {
    Matrix<T> echelon;            // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
    T determinant{1};
};

template <class T>
Elimination<T> row_reduce(Matrix<T> m) {
    Elimination<T> out;
    std::size_t row = 0;
    T det(1);
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && is_zero(m(piv, col))) ++piv;
        if (piv == m.rows()) {
            det = T(0);
            continue;
        }
        if (piv != row) {
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
            det = T(-1) * det;
        }
        T inv = T(1) / m(row, col);
        det = det * m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || is_zero(m(i, col))) continue;
            T f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    if (row < m.rows()) det = T(0);
    out.echelon = std::move(m);
    out.determinant = det;
    return out;
}

template <class T>
T determinant(const Matrix<T>& m) {
    require(m.square(), ErrorKind::InvalidArgument, "determinant of non-square matrix");
    return row_reduce(m).determinant;
}

template <class T>
std::size_t rank(const Matrix<T>& m) {
    return row_reduce(m).pivots.size();
}

template <class T>
std::optional<Matrix<T>> try_inverse(const Matrix<T>& m) {
    require(m.square(), ErrorKind::InvalidArgument, "inverse of non-square matrix");
    const std::size_t n = m.rows();
    Matrix<T> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = T(1);
    }
    auto red = row_reduce(aug);
    if (red.pivots.size() < n || red.pivots[n - 1] != n - 1) return std::nullopt;
    return red.echelon.block(0, n, n, n);
}

template <class T>
Matrix<T> inverse(const Matrix<T>& m) {
    auto inv = try_inverse(m);
    require(inv.has_value(), ErrorKind::InvalidArgument, "matrix is singular");
    return *inv;
}

// Basis of the right nullspace {x : m x = 0}, as columns of the result.
template <class T>
Matrix<T> nullspace(const Matrix<T>& m) {
    auto red = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : red.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (!is_pivot[j]) free_cols.push_back(j);
    Matrix<T> basis(m.cols(), free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        std::size_t f = free_cols[k];
        basis(f, k) = T(1);
        for (std::size_t r = 0; r < red.pivots.size(); ++r) basis(red.pivots[r], k) = T(-1) * red.echelon(r, f);
    }
    return basis;
}

// Solve m x = b for a square invertible m.
template <class T>
Matrix<T> solve(const Matrix<T>& m, const Matrix<T>& b) {
    return inverse(m) * b;
}

template <class T>
Matrix<T> poly_of_matrix(const Poly<T>& f, const Matrix<T>& m) {
    Matrix<T> r(m.rows(), m.cols());
    for (std::size_t i = f.coeffs().size(); i-- > 0;)
        r = r * m + f.coeffs()[i] * Matrix<T>::identity(m.rows());
    return r;
}

}  // namespace mahler
