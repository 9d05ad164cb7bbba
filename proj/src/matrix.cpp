#include "muonlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "muonlab/errors.hpp"

namespace muonlab {

namespace {

constexpr std::size_t kMaxSvdSide = 4096;
constexpr double kJacobiRelTol = 1e-14;
constexpr std::size_t kSweepCapFactor = 100;

std::string shape_str(const Matrix& a) {
    return "(" + std::to_string(a.rows()) + ", " + std::to_string(a.cols()) + ")";
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) +
                         " vs " + shape_str(b));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ > 0 ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw ShapeError("Matrix initializer rows have unequal lengths");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool operator==(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) return false;
    return std::equal(a.data(), a.data() + a.size(), b.data());
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    out += b;
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    out -= b;
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    out *= s;
    return out;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator+");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) pa[i] += pb[i];
    return a;
}

Matrix& operator-=(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator-");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) pa[i] -= pb[i];
    return a;
}

Matrix& operator*=(Matrix& a, double s) {
    double* pa = a.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) pa[i] *= s;
    return a;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_str(a) +
                         " * " + shape_str(b));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n, 0.0);
    // i-k-j order keeps the inner loop contiguous over rows of b and c.
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c.data() + i * n;
        const double* arow = a.data() + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = arow[kk];
            const double* brow = b.data() + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    return out;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) acc += p[i] * p[i];
    return std::sqrt(acc);
}

double rms(const Matrix& a) {
    if (a.empty()) throw ShapeError("rms: empty matrix");
    return frobenius_norm(a) / std::sqrt(static_cast<double>(a.size()));
}

double max_abs(const Matrix& a) {
    double best = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i)
        best = std::max(best, std::abs(p[i]));
    return best;
}

bool all_finite(const Matrix& a) {
    const double* p = a.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

namespace {

// One-sided Jacobi on a tall matrix (rows >= cols). Columns of `w` converge
// to u_j * sigma_j while `v` accumulates the right rotations. Both are stored
// column-major so the inner loops walk contiguous memory.
struct JacobiWork {
    std::size_t m = 0, n = 0;
    std::vector<double> w;  // m x n, column-major
    std::vector<double> v;  // n x n, column-major

    double* wcol(std::size_t j) { return w.data() + j * m; }
    double* vcol(std::size_t j) { return v.data() + j * n; }
};

// A rotation of two columns that were parallel to working precision leaves
// one column holding pure rounding debris — still parallel to its partner,
// so the relative-cosine sweep criterion would fire on it forever. Flush
// such a column to an exact zero (the basis-completion step rebuilds its
// left singular vector). The ratio bound sits at eps^2, far below anything
// a genuine singular value of a double matrix can reach relative to its
// pair partner, so real spectrum content is never discarded.
void flush_parallel_remnant(JacobiWork& jw, std::size_t p, std::size_t q) {
    constexpr double kFlushRatio = 1e-28;
    double np = 0.0, nq = 0.0;
    const double* wp = jw.wcol(p);
    const double* wq = jw.wcol(q);
    for (std::size_t i = 0; i < jw.m; ++i) {
        np += wp[i] * wp[i];
        nq += wq[i] * wq[i];
    }
    std::size_t victim = std::size_t(-1);
    if (nq <= kFlushRatio * np) {
        victim = q;
    } else if (np <= kFlushRatio * nq) {
        victim = p;
    }
    if (victim != std::size_t(-1)) {
        std::fill(jw.wcol(victim), jw.wcol(victim) + jw.m, 0.0);
    }
}

void rotate_pair(JacobiWork& jw, std::size_t p, std::size_t q, double alpha,
                 double beta, double gamma) {
    const double zeta = (beta - alpha) / (2.0 * gamma);
    const double t = std::copysign(1.0, zeta) /
                     (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;

    double* wp = jw.wcol(p);
    double* wq = jw.wcol(q);
    for (std::size_t i = 0; i < jw.m; ++i) {
        const double a = wp[i], b = wq[i];
        wp[i] = c * a - s * b;
        wq[i] = s * a + c * b;
    }
    double* vp = jw.vcol(p);
    double* vq = jw.vcol(q);
    for (std::size_t i = 0; i < jw.n; ++i) {
        const double a = vp[i], b = vq[i];
        vp[i] = c * a - s * b;
        vq[i] = s * a + c * b;
    }
}

// Fill any u-columns whose singular value is exactly zero with deterministic
// orthonormal completions: project standard basis vectors against the
// finished columns (two passes for stability) and keep the first candidates
// that survive with enough mass.
void complete_zero_columns(std::vector<double>& ucols, std::size_t m,
                           std::size_t r, const std::vector<bool>& filled) {
    std::vector<std::size_t> missing;
    for (std::size_t j = 0; j < r; ++j)
        if (!filled[j]) missing.push_back(j);
    if (missing.empty()) return;

    std::size_t next = 0;
    std::vector<double> cand(m);
    for (std::size_t k = 0; k < m && next < missing.size(); ++k) {
        std::fill(cand.begin(), cand.end(), 0.0);
        cand[k] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            // Unfilled columns still hold zeros and contribute nothing, so we
            // can project against every slot, including completions made
            // earlier in this loop.
            for (std::size_t j = 0; j < r; ++j) {
                const double* uj = ucols.data() + j * m;
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += uj[i] * cand[i];
                for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * uj[i];
            }
        }
        double norm2 = 0.0;
        for (double x : cand) norm2 += x * x;
        if (norm2 > 0.25) {
            const double inv = 1.0 / std::sqrt(norm2);
            double* dst = ucols.data() + missing[next] * m;
            for (std::size_t i = 0; i < m; ++i) dst[i] = cand[i] * inv;
            ++next;
        }
    }
    if (next < missing.size()) {
        throw NumericsError("svd: failed to complete orthonormal basis");
    }
}

SvdResult svd_tall(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    JacobiWork jw;
    jw.m = m;
    jw.n = n;
    jw.w.resize(m * n);
    jw.v.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        jw.vcol(j)[j] = 1.0;
        double* col = jw.wcol(j);
        for (std::size_t i = 0; i < m; ++i) col[i] = a(i, j);
    }

    const std::size_t sweep_cap = kSweepCapFactor * std::max(m, n);
    bool converged = false;
    for (std::size_t sweep = 0; sweep < sweep_cap && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double* wp = jw.wcol(p);
                const double* wq = jw.wcol(q);
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += wp[i] * wp[i];
                    beta += wq[i] * wq[i];
                    gamma += wp[i] * wq[i];
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) > kJacobiRelTol * std::sqrt(alpha * beta)) {
                    // |cos| within 5e-11 of 1: parallel to working precision.
                    const bool near_parallel =
                        gamma * gamma >= 0.9999999999 * (alpha * beta);
                    rotate_pair(jw, p, q, alpha, beta, gamma);
                    if (near_parallel) flush_parallel_remnant(jw, p, q);
                    converged = false;
                }
            }
        }
    }
    if (!converged) {
        throw ConvergenceError(
            "svd: Jacobi sweeps exceeded cap of " + std::to_string(sweep_cap) +
            " without reaching the 1e-14 off-diagonal threshold");
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* col = jw.wcol(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += col[i] * col[i];
        sigma[j] = std::sqrt(acc);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    SvdResult out;
    out.singular_values.resize(n);
    std::vector<double> ucols(m * n, 0.0);  // column-major
    std::vector<bool> filled(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.singular_values[j] = sigma[src];
        if (sigma[src] > 0.0) {
            const double inv = 1.0 / sigma[src];
            const double* col = jw.wcol(src);
            double* dst = ucols.data() + j * m;
            for (std::size_t i = 0; i < m; ++i) dst[i] = col[i] * inv;
            filled[j] = true;
        }
    }
    complete_zero_columns(ucols, m, n, filled);

    out.u = Matrix(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* col = ucols.data() + j * m;
        for (std::size_t i = 0; i < m; ++i) out.u(i, j) = col[i];
    }
    out.vt = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* col = jw.vcol(order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vt(j, i) = col[i];
    }
    return out;
}

}  // namespace

SvdResult svd(const Matrix& a) {
    if (a.empty()) throw ShapeError("svd: empty matrix");
    if (a.rows() > kMaxSvdSide || a.cols() > kMaxSvdSide) {
        throw ShapeError("svd: dimension exceeds " + std::to_string(kMaxSvdSide) +
                         ", got " + shape_str(a));
    }
    if (!all_finite(a)) throw NumericsError("svd: input has non-finite entries");
    // The iteration works on unscaled Gram accumulations, which overflow for
    // astronomically large entries; refuse instead of returning garbage.
    if (max_abs(a) > 1e150) {
        throw NumericsError("svd: entry magnitude exceeds 1e150; rescale first");
    }

    if (a.rows() >= a.cols()) return svd_tall(a);

    // Wide input: decompose the transpose and swap the factor roles,
    // A^T = U S V^T  =>  A = V S U^T.
    SvdResult t = svd_tall(transpose(a));
    SvdResult out;
    out.singular_values = std::move(t.singular_values);
    out.u = transpose(t.vt);
    out.vt = transpose(t.u);
    return out;
}

}  // namespace muonlab
