#pragma once

#include <vector>

#include "muonlab/matrix.hpp"

namespace muonlab {

// Coefficients and step count for the quintic orthogonalization iteration
//   X <- a*X + (b*(X X^T) + c*(X X^T)^2) X.
// The defaults trade exactness for speed: they push singular values into a
// band around 1 in few steps instead of converging to 1 exactly.
struct NsConfig {
    int steps = 5;
    double a = 3.4445;
    double b = -4.7750;
    double c = 2.0315;
};

// Orthogonalizes a matrix: returns approximately U V^T where M = U S V^T.
// The input is Frobenius-normalized first; a zero or non-finite input raises
// NumericsError, as does a non-finite iterate (message names the step).
// Tall inputs are transposed so the Gram matrix is built on the short side,
// then transposed back.
Matrix newton_schulz(const Matrix& m, const NsConfig& cfg = {});

// The scalar polynomial the iteration applies to each singular value.
double ns_polynomial(double x, const NsConfig& cfg = {});

// Trajectory {x0, f(x0), f(f(x0)), ...} with cfg.steps applications.
std::vector<double> scalar_ns_trajectory(double x0, const NsConfig& cfg = {});

}  // namespace muonlab
