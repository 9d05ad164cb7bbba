#include "muonlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "muonlab/errors.hpp"

namespace muonlab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double Rng::uniform01() {
    // Top 53 bits -> [0, 1) on the dyadic grid.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller, trigonometric form. u1 is shifted into (0, 1] so the log is
    // always finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ValueError("Rng::below: n must be positive");
    // Rejection sampling to stay exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

Matrix Rng::normal_matrix(std::size_t rows, std::size_t cols, double scale) {
    Matrix m(rows, cols);
    double* p = m.data();
    for (std::size_t i = 0, n = m.size(); i < n; ++i) p[i] = scale * normal();
    return m;
}

}  // namespace muonlab
