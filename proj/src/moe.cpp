#include "muonlab/moe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "muonlab/errors.hpp"
#include "muonlab/rng.hpp"

namespace muonlab {

namespace {

void validate(const GateConfig& cfg) {
    if (cfg.num_experts < 1) throw ValueError("GateConfig: num_experts must be >= 1");
    if (cfg.topk < 1 || cfg.topk > cfg.num_experts) {
        throw ValueError("GateConfig: topk must lie in [1, num_experts]");
    }
    if (cfg.iter_times < 1) throw ValueError("GateConfig: iter_times must be >= 1");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double gate_scaling_factor(const GateConfig& cfg, const LogitSource& source) {
    validate(cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.num_experts);
    const std::size_t k = static_cast<std::size_t>(cfg.topk);

    std::vector<double> logits(n);
    std::vector<std::size_t> idx(n);
    double total = 0.0;

    for (long trial = 0; trial < cfg.iter_times; ++trial) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
        if (source) {
            source(rng, logits);
        } else {
            for (double& x : logits) x = rng.normal();
        }

        for (double& x : logits) x = sigmoid(x);

        // Top-k by gate value, index ascending on ties, so selection is
        // deterministic even for degenerate logit sources.
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (logits[a] != logits[b]) return logits[a] > logits[b];
                              return a < b;
                          });

        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += logits[idx[i]];
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double p = logits[idx[i]] / sum;
            sum_sq += p * p;
        }
        total += 1.0 / std::sqrt(sum_sq);
    }
    return total / static_cast<double>(cfg.iter_times);
}

double sign(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

std::vector<double> auxfree_bias_delta(const std::vector<double>& violation,
                                       double u) {
    if (violation.empty()) throw ShapeError("auxfree_bias_delta: empty violation");
    if (!(u >= 0.0) || !std::isfinite(u)) {
        throw ValueError("auxfree_bias_delta: u must be finite and >= 0");
    }
    double sum_sign = 0.0;
    for (double e : violation) sum_sign += sign(e);
    const double mean_sign = sum_sign / static_cast<double>(violation.size());

    std::vector<double> out(violation.size());
    for (std::size_t i = 0; i < violation.size(); ++i) {
        out[i] = u * (sign(violation[i]) - mean_sign);
    }
    return out;
}

std::vector<double> auxfree_bias_update(const std::vector<double>& bias,
                                        const std::vector<double>& violation,
                                        double u) {
    if (bias.size() != violation.size()) {
        throw ShapeError("auxfree_bias_update: bias and violation lengths differ");
    }
    std::vector<double> delta = auxfree_bias_delta(violation, u);
    for (std::size_t i = 0; i < bias.size(); ++i) delta[i] += bias[i];
    return delta;
}

std::vector<double> auxfree_bias_update_deepseek(const std::vector<double>& bias,
                                                 const std::vector<double>& violation,
                                                 double u) {
    if (bias.size() != violation.size()) {
        throw ShapeError("auxfree_bias_update_deepseek: lengths differ");
    }
    if (!(u >= 0.0) || !std::isfinite(u)) {
        throw ValueError("auxfree_bias_update_deepseek: u must be finite and >= 0");
    }
    std::vector<double> out(bias.size());
    for (std::size_t i = 0; i < bias.size(); ++i) {
        out[i] = bias[i] + u * sign(violation[i]);
    }
    return out;
}

}  // namespace muonlab
