#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace muonlab {

// Dense row-major double matrix. This is deliberately a small value type:
// the whole library works on 2-D parameters, so we only need construction,
// element access, a handful of reductions, and the linear-algebra free
// functions below.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

bool operator==(const Matrix& a, const Matrix& b);

// Elementwise arithmetic. Shapes must match exactly; no broadcasting.
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix& operator+=(Matrix& a, const Matrix& b);
Matrix& operator-=(Matrix& a, const Matrix& b);
Matrix& operator*=(Matrix& a, double s);

// a(m,k) * b(k,n) -> (m,n).
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// sqrt(sum of squares). Zero for an empty matrix is rejected upstream where
// it matters; here an empty matrix just returns 0.
double frobenius_norm(const Matrix& a);

// Root-mean-square entry magnitude: ||A||_F / sqrt(rows*cols).
double rms(const Matrix& a);

double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

// Thin singular value decomposition A = U * diag(s) * Vt with
// U (m,r), s descending of length r, Vt (r,n), r = min(m,n).
struct SvdResult {
    Matrix u;
    std::vector<double> singular_values;
    Matrix vt;
};

// One-sided Jacobi SVD. Deterministic: fixed cyclic sweep order, no
// randomized pivoting. Throws ShapeError for empty input or when either side
// exceeds 4096, and ConvergenceError if the off-diagonal mass has not dropped
// below a 1e-14 relative threshold within 100 * max(rows, cols) sweeps.
// Columns of U / rows of Vt paired with exactly zero singular values are
// completed to an orthonormal basis, so U and V are always orthogonal.
SvdResult svd(const Matrix& a);

}  // namespace muonlab
