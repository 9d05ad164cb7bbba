#pragma once

#include <cstdint>
#include <random>

#include "muonlab/matrix.hpp"

namespace muonlab {

// Finalizing mixer from the splitmix64 generator. Used to derive independent
// stream seeds from (base seed, stream index) pairs so results do not depend
// on how work is partitioned across trials.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic random source: std::mt19937_64 for bits, explicit Box-Muller
// for normals (std::normal_distribution's byte stream is implementation
// defined; this one is pinned by the code below).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01();                    // [0, 1)
    double normal();                       // standard normal
    std::uint64_t next_u64() { return gen_(); }
    std::uint64_t below(std::uint64_t n);  // uniform in [0, n), n > 0

    Matrix normal_matrix(std::size_t rows, std::size_t cols, double scale = 1.0);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace muonlab
