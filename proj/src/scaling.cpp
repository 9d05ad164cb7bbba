#include "muonlab/scaling.hpp"

#include <cmath>

#include "muonlab/errors.hpp"

namespace muonlab {

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) {
        throw ValueError("fit_power_law: need at least 2 points");
    }
    const std::size_t n = points.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [c, v] = points[i];
        if (!(c > 0.0) || !(v > 0.0) || !std::isfinite(c) || !std::isfinite(v)) {
            throw ValueError("fit_power_law: points must be finite and positive");
        }
        x[i] = std::log(c);
        y[i] = std::log(v);
    }

    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x_mean += x[i];
        y_mean += y[i];
    }
    x_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    // Centered normal equations keep precision at compute scales ~1e22.
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x_mean;
        sxx += dx * dx;
        sxy += dx * (y[i] - y_mean);
    }
    if (sxx == 0.0) {
        throw ValueError("fit_power_law: c values must not all coincide");
    }

    FitResult out;
    out.law.exponent = sxy / sxx;
    out.law.coefficient = std::exp(y_mean - out.law.exponent * x_mean);
    out.n_points = n;

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = y_mean + out.law.exponent * (x[i] - x_mean);
        const double r = y[i] - pred;
        ss += r * r;
    }
    out.log_residual_rms = std::sqrt(ss / static_cast<double>(n));
    return out;
}

double evaluate(const PowerLaw& law, double c) {
    if (!(c > 0.0)) throw ValueError("evaluate: c must be positive");
    return law.coefficient * std::pow(c, law.exponent);
}

double compute_flops(double params_n, double tokens_d) {
    if (!(params_n > 0.0) || !(tokens_d > 0.0)) {
        throw ValueError("compute_flops: N and D must be positive");
    }
    return 6.0 * params_n * tokens_d;
}

}  // namespace muonlab
