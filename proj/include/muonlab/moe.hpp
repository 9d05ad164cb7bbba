#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace muonlab {

class Rng;

// Monte Carlo estimate of how much a top-k-renormalized gate attenuates
// output magnitude relative to a dense layer.
struct GateConfig {
    long num_experts = 0;
    long topk = 0;
    long iter_times = 0;
    std::uint64_t seed = 0;
};

// Fills `logits` (pre-sized to num_experts) for one trial. The default
// source draws standard normals; tests may substitute degenerate sources
// (e.g. all-equal logits).
using LogitSource = std::function<void(Rng&, std::vector<double>&)>;

// Mean over iter_times trials of 1/sqrt(sum p_i^2), where p is the top-k of
// sigmoid(logits) renormalized to sum 1. Each trial draws from an Rng seeded
// by derive_seed(cfg.seed, trial), so the estimate does not depend on how
// trials would be batched. Always lies in [1, sqrt(topk)].
double gate_scaling_factor(const GateConfig& cfg, const LogitSource& source = {});

// sign with sign(0) = 0, as used by the bias rules below.
double sign(double x);

// Per-expert bias increments of the centered update rule:
//   delta_i = u * (sign(e_i) - mean_j sign(e_j))
// These sum to zero by construction, so biases stay bounded.
std::vector<double> auxfree_bias_delta(const std::vector<double>& violation,
                                       double u);

// bias + delta (the centered rule).
std::vector<double> auxfree_bias_update(const std::vector<double>& bias,
                                        const std::vector<double>& violation,
                                        double u);

// The original uncentered rule, bias_i + u * sign(e_i), kept for
// differential testing: the two rules differ by a uniform shift, so top-k
// selection over logit + bias is identical under either.
std::vector<double> auxfree_bias_update_deepseek(const std::vector<double>& bias,
                                                 const std::vector<double>& violation,
                                                 double u);

}  // namespace muonlab
