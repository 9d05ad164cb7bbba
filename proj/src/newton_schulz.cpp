#include "muonlab/newton_schulz.hpp"

#include <string>

#include "muonlab/errors.hpp"

namespace muonlab {

namespace {

void validate_steps(int steps) {
    if (steps < 0) {
        throw ValueError("newton_schulz: steps must be >= 0, got " +
                         std::to_string(steps));
    }
}

}  // namespace

Matrix newton_schulz(const Matrix& m, const NsConfig& cfg) {
    validate_steps(cfg.steps);
    if (m.empty()) throw ShapeError("newton_schulz: empty matrix");
    if (!all_finite(m)) throw NumericsError("newton_schulz: input has non-finite entries");

    const double norm = frobenius_norm(m);
    if (norm == 0.0) {
        throw NumericsError("newton_schulz: zero matrix cannot be normalized");
    }

    const bool tall = m.rows() > m.cols();
    Matrix x = tall ? transpose(m) : m;
    x *= 1.0 / norm;

    for (int step = 0; step < cfg.steps; ++step) {
        const Matrix xt = transpose(x);
        const Matrix gram = matmul(x, xt);                    // (r, r), r = min side
        Matrix b = cfg.b * gram + cfg.c * matmul(gram, gram);
        x = cfg.a * x + matmul(b, x);
        if (!all_finite(x)) {
            throw NumericsError("newton_schulz: iterate went non-finite at step " +
                                std::to_string(step + 1));
        }
    }

    return tall ? transpose(x) : x;
}

double ns_polynomial(double x, const NsConfig& cfg) {
    const double x2 = x * x;
    return x * (cfg.a + x2 * (cfg.b + x2 * cfg.c));
}

std::vector<double> scalar_ns_trajectory(double x0, const NsConfig& cfg) {
    validate_steps(cfg.steps);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    out.push_back(x0);
    double x = x0;
    for (int step = 0; step < cfg.steps; ++step) {
        x = ns_polynomial(x, cfg);
        out.push_back(x);
    }
    return out;
}

}  // namespace muonlab
