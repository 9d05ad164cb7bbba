#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace muonlab {

// y = coefficient * c ^ exponent
struct PowerLaw {
    double coefficient = 1.0;
    double exponent = 0.0;
};

struct FitResult {
    PowerLaw law;
    double log_residual_rms = 0.0;  // RMS residual in log-log space
    std::size_t n_points = 0;
};

// Ordinary least squares on (log c, log y). Requires >= 2 points, strictly
// positive coordinates, and at least two distinct c values.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

double evaluate(const PowerLaw& law, double c);

// Training compute budget: 6 * N * D FLOPs for N parameters and D tokens.
double compute_flops(double params_n, double tokens_d);

}  // namespace muonlab
