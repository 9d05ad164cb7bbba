// Acceptance gate: one check per shipped guarantee, each printing exactly one
// [PASS]/[FAIL] line (plus indented context lines where the guarantee is
// about reporting rather than asserting). Tolerances and runtime budgets are
// pinned below. Exit status is the number of failed checks.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "muonlab/dist.hpp"
#include "muonlab/matrix.hpp"
#include "muonlab/moe.hpp"
#include "muonlab/newton_schulz.hpp"
#include "muonlab/optim.hpp"
#include "muonlab/rng.hpp"
#include "muonlab/scaling.hpp"
#include "muonlab/spectral.hpp"
#include "muonlab/trainer.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace muonlab;
using namespace muonlab::testsupport;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances and runtime budgets (seconds).
// ---------------------------------------------------------------------------
constexpr double kRmsLawTol = 1e-10;         // check 1
constexpr double kSpectrumOracleTol = 1e-8;  // check 2
constexpr double kShardDeviationTol = 1e-9;  // check 3
constexpr double kRatioLimitTol = 1e-5;      // check 4, ratio at dp = 1e6
constexpr double kUpdateNormTol = 1e-12;     // check 6, per-step update RMS
constexpr double kPolarSeamTol = 1e-10;      // check 6, exact-polar backend
constexpr double kLawRecoveryTol = 1e-6;     // check 7, relative
constexpr double kEntropyMidTol = 1e-12;     // check 8, half-entropy anchor
constexpr double kEqualLogitTol = 1e-12;     // check 9, sqrt(topk) seam
constexpr double kGateSpreadTol = 0.005;     // check 9, cross-seed spread
constexpr double kFiniteDiffTol = 1e-5;      // check 11, relative

constexpr double kBudget1 = 10.0;
constexpr double kBudget2 = 30.0;
constexpr double kBudget3 = 30.0;
constexpr double kBudget4 = 5.0;
constexpr double kBudget7 = 1.0;
constexpr double kBudget12 = 300.0;

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------
struct Outcome {
    bool ok = false;
    std::string detail;
    std::vector<std::string> context;  // extra indented lines, reports only
};

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return std::string(buf);
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

int g_failures = 0;

void run_check(int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail = strf("exception: %s", e.what());
        o.context.clear();
    }
    std::printf("[%s] %2d %s: %s\n", o.ok ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    for (const std::string& line : o.context) {
        std::printf("          %s\n", line.c_str());
    }
    std::fflush(stdout);
    if (!o.ok) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. RMS of a rank-r orthonormal product follows sqrt(r / (m*n)).
// ---------------------------------------------------------------------------
Outcome check_low_rank_rms_law() {
    Timer timer;
    Rng shapes(101);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + shapes.below(127);  // [2, 128]
        const std::size_t m = 2 + shapes.below(n - 1);  // [2, n]
        const std::size_t r = 2 + shapes.below(m - 1);  // [2, m]
        const Matrix u = random_orthogonal(m, derive_seed(11, t));
        const Matrix v = random_orthogonal(n, derive_seed(12, t));
        Matrix prod(m, n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < r; ++k)
                for (std::size_t j = 0; j < n; ++j)
                    prod(i, j) += u(i, k) * v(k, j);
        const double got =
            frobenius_norm(prod) / std::sqrt(static_cast<double>(m * n));
        const double want = std::sqrt(static_cast<double>(r) /
                                      static_cast<double>(m * n));
        worst = std::max(worst, std::abs(got - want));
    }
    const double secs = timer.seconds();
    const bool ok = worst <= kRmsLawTol && secs < kBudget1;
    return {ok,
            strf("50 random (n,m,r) triples, max |rms - sqrt(r/(m*n))| = "
                 "%.2e (tol %.0e), %.2fs (budget %.0fs)",
                 worst, kRmsLawTol, secs, kBudget1),
            {}};
}

// ---------------------------------------------------------------------------
// 2. Orthogonalization spectra match the scalar-iteration oracle.
// ---------------------------------------------------------------------------
Outcome check_spectrum_oracle() {
    Timer timer;
    Rng shapes(202);
    const NsConfig cfg;  // 5 steps by default
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t rows = 2 + shapes.below(63);  // [2, 64]
        const std::size_t cols = 2 + shapes.below(95);  // [2, 96]
        const Matrix m = random_matrix(rows, cols, derive_seed(21, t));
        const Matrix o = newton_schulz(m, cfg);
        const std::vector<double> got = svd(o).singular_values;  // descending

        const double fro = frobenius_norm(m);
        std::vector<double> mapped;
        for (double s : svd(m).singular_values) {
            double x = s / fro;
            for (int k = 0; k < cfg.steps; ++k) x = ns_polynomial_oracle(x, cfg);
            mapped.push_back(x);
        }
        // The quintic is not monotone, so the mapped spectrum must be
        // re-sorted before it can be compared entrywise.
        std::sort(mapped.begin(), mapped.end(), std::greater<>());
        for (std::size_t i = 0; i < got.size(); ++i)
            worst = std::max(worst, std::abs(got[i] - mapped[i]));
    }
    const double secs = timer.seconds();
    const bool ok = worst <= kSpectrumOracleTol && secs < kBudget2;
    return {ok,
            strf("20 random matrices up to 64x96, max spectrum deviation = "
                 "%.2e (tol %.0e), %.2fs (budget %.0fs)",
                 worst, kSpectrumOracleTol, secs, kBudget2),
            {}};
}

// ---------------------------------------------------------------------------
// 3. Sharded data-parallel updates match a single device on one parameter.
// ---------------------------------------------------------------------------
Outcome check_distributed_equivalence() {
    Timer timer;
    const std::size_t rows = 33, cols = 47;  // 1551 elements, never divisible
    const MuonConfig cfg;
    double worst = 0.0;
    for (int dp : {1, 2, 3, 4, 8}) {
        const Matrix init = Rng(derive_seed(31, 0)).normal_matrix(rows, cols);
        DpWorld world(dp);
        world.add_param("w", init);
        ParamState single = make_param("w", ParamKind::MatrixParam, init);
        for (int step = 0; step < 10; ++step) {
            std::vector<Matrix> grads;
            Matrix total(rows, cols, 0.0);
            for (int rank = 0; rank < dp; ++rank) {
                const std::uint64_t stream =
                    1 + static_cast<std::uint64_t>(step) * 8 +
                    static_cast<std::uint64_t>(rank);
                grads.push_back(
                    Rng(derive_seed(32, stream)).normal_matrix(rows, cols));
                total += grads.back();
            }
            std::map<std::string, std::vector<Matrix>> gm;
            gm["w"] = std::move(grads);
            distributed_muon_step(world, gm, cfg, cfg.lr);
            single = muon_step(single, total, cfg, cfg.lr).first;
            const double dev = max_abs_diff(world.weight("w"), single.weight) /
                               max_abs(single.weight);
            worst = std::max(worst, dev);
        }
    }
    const double secs = timer.seconds();
    const bool ok = worst <= kShardDeviationTol && secs < kBudget3;
    return {ok,
            strf("dp in {1,2,3,4,8}, 10 steps on 33x47, max relative weight "
                 "deviation = %.2e (tol %.0e), %.2fs (budget %.0fs)",
                 worst, kShardDeviationTol, secs, kBudget3),
            {}};
}

// ---------------------------------------------------------------------------
// 4. Measured communication ratio is exact and confined to (1, 1.25].
// ---------------------------------------------------------------------------
Outcome check_communication_ratio() {
    Timer timer;
    const std::size_t rows = 9, cols = 7;  // 63 elements, odd on purpose
    bool ok = true;
    std::string worst_note = "all exact";
    for (int dp : {2, 4, 8, 64}) {
        const Matrix init = Rng(derive_seed(41, dp)).normal_matrix(rows, cols);
        DpWorld muon_world(dp), adamw_world(dp);
        muon_world.add_param("w", init);
        adamw_world.add_param("w", init);
        const MuonConfig mcfg;
        const AdamWConfig acfg;
        for (int step = 0; step < 3; ++step) {
            std::vector<Matrix> grads;
            for (int rank = 0; rank < dp; ++rank)
                grads.push_back(Rng(derive_seed(42, 1 + step * 64 + rank))
                                    .normal_matrix(rows, cols));
            std::map<std::string, std::vector<Matrix>> gm;
            gm["w"] = grads;
            distributed_muon_step(muon_world, gm, mcfg, mcfg.lr);
            distributed_adamw_step(adamw_world, gm, acfg, acfg.lr);
        }
        const double measured = communication_ratio(muon_world, adamw_world);
        const double closed =
            (8.0 + 2.0 * (static_cast<double>(dp) - 1.0) /
                       static_cast<double>(dp)) /
            8.0;
        if (measured != closed || !(measured > 1.0) || !(measured <= 1.25)) {
            ok = false;
            worst_note = strf("dp=%d measured %.17g closed %.17g", dp,
                              measured, closed);
        }
    }
    // The 1.25 ceiling is approached, never exceeded, as dp grows.
    const double at_million = (8.0 + 2.0 * (1e6 - 1.0) / 1e6) / 8.0;
    if (std::abs(at_million - 1.25) > kRatioLimitTol || at_million > 1.25) {
        ok = false;
        worst_note = strf("dp=1e6 ratio %.17g", at_million);
    }
    const double secs = timer.seconds();
    ok = ok && secs < kBudget4;
    return {ok,
            strf("measured == (8 + 2*(dp-1)/dp)/8 exactly for dp in "
                 "{2,4,8,64}, all in (1, 1.25], dp=1e6 within %.0e of 1.25 "
                 "(%s), %.2fs (budget %.0fs)",
                 kRatioLimitTol, worst_note.c_str(), secs, kBudget4),
            {}};
}

// ---------------------------------------------------------------------------
// 5. Sharded Muon optimizer state is exactly half of sharded AdamW's.
// ---------------------------------------------------------------------------
Outcome check_state_memory() {
    const Matrix a = Rng(derive_seed(51, 0)).normal_matrix(9, 7);
    const Matrix b = Rng(derive_seed(51, 1)).normal_matrix(5, 11);
    DpWorld muon_world(4), adamw_world(4);
    for (DpWorld* w : {&muon_world, &adamw_world}) {
        w->add_param("a", a);
        w->add_param("b", b);
    }
    const bool lazy = muon_world.optimizer_state_elements() == 0 &&
                      adamw_world.optimizer_state_elements() == 0;

    const MuonConfig mcfg;
    const AdamWConfig acfg;
    for (int step = 0; step < 2; ++step) {
        std::map<std::string, std::vector<Matrix>> gm;
        for (const char* name : {"a", "b"}) {
            const Matrix& init = std::string(name) == "a" ? a : b;
            std::vector<Matrix> grads;
            for (int rank = 0; rank < 4; ++rank)
                grads.push_back(Rng(derive_seed(52, 1 + step * 8 + rank))
                                    .normal_matrix(init.rows(), init.cols()));
            gm[name] = std::move(grads);
        }
        distributed_muon_step(muon_world, gm, mcfg, mcfg.lr);
        distributed_adamw_step(adamw_world, gm, acfg, acfg.lr);
    }
    const std::size_t muon_elems = muon_world.optimizer_state_elements();
    const std::size_t adamw_elems = adamw_world.optimizer_state_elements();
    const std::size_t total = a.size() + b.size();
    const bool ok =
        lazy && muon_elems == total && 2 * muon_elems == adamw_elems;
    return {ok,
            strf("state starts empty, after stepping: %zu momentum elements "
                 "vs %zu moment elements (exactly half of %zu)",
                 muon_elems, adamw_elems, adamw_elems),
            {}};
}

// ---------------------------------------------------------------------------
// 6. Update-RMS matching hits the 0.2 target.
// ---------------------------------------------------------------------------
Outcome check_update_rms_matching() {
    // (a) Norm-matched mode: every matrix update of a 200-step run has RMS
    // exactly at the target, to within accumulation rounding.
    ToyModelConfig arch;
    arch.dims = {8, 16, 8};
    arch.seed = 61;
    TaskSpec task;
    task.input_dim = 8;
    task.dataset_size = 64;
    task.noise = 0.05;
    task.seed = 62;
    TrainSpec spec;
    spec.steps = 200;
    spec.muon.scaling.variant = ScalingVariant::UpdateNorm;
    const TrainResult res = train(make_toy_model(arch), task, spec);

    double worst_run = 0.0;
    std::size_t matrix_records = 0;
    for (const MetricsRecord& rec : res.log.records) {
        if (rec.param.find(".weight") == std::string::npos) continue;
        ++matrix_records;
        worst_run = std::max(worst_run, std::abs(rec.update_rms - 0.2));
    }

    // (b) Shape-aware mode with an exact polar backend: rms(U V^T) is
    // sqrt(min/(A*B)), so the sqrt(max(A,B)) factor lands RMS on the target.
    double worst_seam = 0.0;
    const std::size_t shapes[][2] = {{64, 64}, {64, 256}, {16, 256}};
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t a = shapes[i][0], b = shapes[i][1];
        const ParamState p =
            make_param("w", ParamKind::MatrixParam,
                       Rng(derive_seed(63, i)).normal_matrix(a, b));
        const Matrix grad = Rng(derive_seed(64, i)).normal_matrix(a, b);
        MuonConfig cfg;
        cfg.scaling.variant = ScalingVariant::AdjustedLR;
        const auto [next, stats] = muon_step(p, grad, cfg, cfg.lr, svd_polar);
        worst_seam = std::max(worst_seam, std::abs(stats.update_rms - 0.2));
    }
    const bool ok = matrix_records == 400 && worst_run <= kUpdateNormTol &&
                    worst_seam <= kPolarSeamTol;
    return {ok,
            strf("norm-matched mode: %zu matrix updates over 200 steps, max "
                 "|rms - 0.2| = %.2e (tol %.0e); shape-aware mode with exact "
                 "polar factors at (64,64),(64,256),(16,256): max |rms - 0.2| "
                 "= %.2e (tol %.0e)",
                 matrix_records, worst_run, kUpdateNormTol, worst_seam,
                 kPolarSeamTol),
            {}};
}

// ---------------------------------------------------------------------------
// 7. Power-law fits recover the reference scaling constants.
// ---------------------------------------------------------------------------
Outcome check_scaling_recovery() {
    Timer timer;
    struct Law {
        const char* what;
        double coefficient, exponent;
    };
    const Law laws[] = {
        {"loss vs compute, orthogonalized", 2.506, -0.052},
        {"loss vs compute, adaptive baseline", 2.608, -0.054},
        {"optimal params vs compute", 0.0483359, 0.5112684},
        {"optimal tokens vs compute", 3.4480927, 0.4887316},
        {"optimal lr vs compute", 0.0127339, -0.0574752},
        {"optimal batch vs compute", 0.0065202, 0.4137915},
    };
    double worst = 0.0;
    std::string worst_what = "none";
    for (const Law& law : laws) {
        std::vector<std::pair<double, double>> points;
        for (int k = 0; k < 20; ++k) {
            const double c = 1e18 * std::pow(10.0, k / 3.0);
            points.emplace_back(
                c, evaluate({law.coefficient, law.exponent}, c));
        }
        const FitResult fit = fit_power_law(points);
        const double err =
            std::max(rel_err(fit.law.coefficient, law.coefficient),
                     rel_err(fit.law.exponent, law.exponent));
        if (err > worst) {
            worst = err;
            worst_what = law.what;
        }
    }
    const double secs = timer.seconds();
    const bool ok = worst <= kLawRecoveryTol && secs < kBudget7;
    return {ok,
            strf("6 reference laws from 20 exact samples each, worst relative "
                 "recovery error = %.2e (%s, tol %.0e), %.3fs (budget %.0fs)",
                 worst, worst_what.c_str(), kLawRecoveryTol, secs, kBudget7),
            {}};
}

// ---------------------------------------------------------------------------
// 8. Spectral entropy hits its closed-form anchor points.
// ---------------------------------------------------------------------------
Outcome check_entropy_anchors() {
    const double uniform4 = svd_entropy({1.7, 1.7, 1.7, 1.7}, 4);
    const double uniform8 =
        svd_entropy({0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3}, 8);
    const double rank1 = svd_entropy({2.5, 0.0, 0.0, 0.0, 0.0}, 5);
    const double half = svd_entropy({1.0, 1.0, 0.0, 0.0}, 4);
    const bool ok = uniform4 == 1.0 && uniform8 == 1.0 && rank1 == 0.0 &&
                    std::abs(half - 0.5) <= kEntropyMidTol;
    return {ok,
            strf("uniform spectra -> %.17g and %.17g (want 1 exactly), "
                 "rank-1 -> %.17g (want 0 exactly), (1,1,0,0) with n=4 -> "
                 "|%.17g - 0.5| <= %.0e",
                 uniform4, uniform8, rank1, half, kEntropyMidTol),
            {}};
}

// ---------------------------------------------------------------------------
// 9. Gate attenuation factor: exact anchors and a stable estimate.
// ---------------------------------------------------------------------------
Outcome check_gate_factor() {
    GateConfig top1;
    top1.num_experts = 64;
    top1.topk = 1;
    top1.iter_times = 1000;
    top1.seed = 91;
    const double unit = gate_scaling_factor(top1);

    GateConfig equal_cfg;
    equal_cfg.num_experts = 16;
    equal_cfg.topk = 4;
    equal_cfg.iter_times = 100;
    equal_cfg.seed = 92;
    const LogitSource all_equal = [](Rng&, std::vector<double>& logits) {
        std::fill(logits.begin(), logits.end(), 0.7);
    };
    const double equal = gate_scaling_factor(equal_cfg, all_equal);

    GateConfig big;
    big.num_experts = 64;
    big.topk = 6;
    big.iter_times = 1000000;
    double lo = 1e9, hi = -1e9, mean = 0.0;
    for (int s = 0; s < 5; ++s) {
        big.seed = 910 + s;
        const double f = gate_scaling_factor(big);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
        mean += f / 5.0;
    }
    const bool ok = unit == 1.0 && std::abs(equal - 2.0) <= kEqualLogitTol &&
                    (hi - lo) <= kGateSpreadTol;
    return {ok,
            strf("top-1 factor %.17g (want 1 exactly); equal-logit top-4 "
                 "factor %.17g (want 2 within %.0e); 64-expert top-6 estimate "
                 "mean %.4f, spread %.4f over 5 seeds of 1e6 trials (tol "
                 "%.3f)",
                 unit, equal, kEqualLogitTol, mean, hi - lo, kGateSpreadTol),
            {strf("reference estimate for that last configuration is 2.446 "
                  "(reported for context, its exact setup is unstated; "
                  "not asserted)")}};
}

// ---------------------------------------------------------------------------
// 10. Bias-balancing updates sum to zero and never change rankings.
// ---------------------------------------------------------------------------
Outcome check_auxfree_bias() {
    const std::size_t n = 64;
    const double u = 0x1.0p-10;
    Rng rng(1001);
    std::vector<double> bias_centered(n, 0.0), bias_original(n, 0.0);
    std::vector<double> logits(n);
    for (double& l : logits) l = rng.normal();

    int zero_sums = 0, matching_orders = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> violation(n);
        for (std::size_t i = 0; i < n; ++i)
            violation[i] = (i % 7 == 3) ? 0.0 : rng.normal();

        const std::vector<double> delta = auxfree_bias_delta(violation, u);
        double total = 0.0;
        for (double d : delta) total += d;
        if (total == 0.0) ++zero_sums;

        bias_centered = auxfree_bias_update(bias_centered, violation, u);
        bias_original =
            auxfree_bias_update_deepseek(bias_original, violation, u);

        auto order_of = [&](const std::vector<double>& bias) {
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) {
                                 return logits[a] + bias[a] >
                                        logits[b] + bias[b];
                             });
            return idx;
        };
        if (order_of(bias_centered) == order_of(bias_original))
            ++matching_orders;
    }
    const bool ok = zero_sums == 100 && matching_orders == 100;
    return {ok,
            strf("100 random violation vectors (n=64, u=2^-10): %d/100 "
                 "exactly zero-sum deltas, %d/100 identical expert rankings "
                 "between centered and uncentered rules",
                 zero_sums, matching_orders),
            {}};
}

// ---------------------------------------------------------------------------
// 11. Analytic gradients agree with central finite differences.
// ---------------------------------------------------------------------------
Outcome check_finite_differences() {
    const std::vector<std::vector<std::size_t>> dims_list = {
        {3, 4, 2}, {4, 6, 3}, {2, 5, 4, 2}, {6, 4}, {3, 3, 3}};
    const Nonlinearity nls[] = {Nonlinearity::Tanh, Nonlinearity::Relu,
                                Nonlinearity::Identity};
    const TaskKind kinds[] = {TaskKind::TeacherStudentRegression,
                              TaskKind::SyntheticClassification};
    const double h = 1e-5;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        ToyModelConfig arch;
        arch.dims = dims_list[t % dims_list.size()];
        arch.nonlinearity = nls[t % 3];
        arch.seed = derive_seed(111, t);
        const TaskKind kind = kinds[t % 2];
        const ToyModel model = make_toy_model(arch);

        Rng data(derive_seed(112, t));
        const std::size_t batch = 4;
        const Matrix inputs = data.normal_matrix(batch, arch.dims.front());
        Matrix targets(batch, arch.dims.back(), 0.0);
        if (kind == TaskKind::TeacherStudentRegression) {
            targets = data.normal_matrix(batch, arch.dims.back());
        } else {
            for (std::size_t r = 0; r < batch; ++r)
                targets(r, data.below(arch.dims.back())) = 1.0;
        }

        const ForwardBackward fb = forward_backward(model, inputs, targets, kind);
        for (std::size_t pi = 0; pi < model.params.size(); ++pi) {
            const Matrix& g = fb.grads.at(model.params[pi].name);
            for (std::size_t i = 0; i < g.rows(); ++i) {
                for (std::size_t j = 0; j < g.cols(); ++j) {
                    ToyModel plus = model, minus = model;
                    plus.params[pi].weight(i, j) += h;
                    minus.params[pi].weight(i, j) -= h;
                    const double fd =
                        (forward_backward(plus, inputs, targets, kind).loss -
                         forward_backward(minus, inputs, targets, kind).loss) /
                        (2.0 * h);
                    const double rel =
                        std::abs(g(i, j) - fd) /
                        std::max(1e-10, std::abs(g(i, j)) + std::abs(fd));
                    worst = std::max(worst, rel);
                }
            }
        }
    }
    const bool ok = worst <= kFiniteDiffTol;
    return {ok,
            strf("20 random models (both tasks, all nonlinearities), worst "
                 "relative gradient deviation = %.2e (tol %.0e)",
                 worst, kFiniteDiffTol),
            {}};
}

// ---------------------------------------------------------------------------
// 12. Weight decay caps matrix-weight growth in an over-trained run.
// ---------------------------------------------------------------------------
Outcome check_weight_decay_ablation() {
    Timer timer;
    // Plateau on this configuration: training loss reaches within 5% of its
    // long-run floor by roughly step 250 (measured); 1250 steps is 5x that.
    const long steps = 1250;
    // Compare matrix parameters only: the vector gains are free to grow to
    // compensate for decayed matrices and would mask the effect under a
    // global max.
    const auto terminal_matrix_rms = [steps](const MetricsLog& log) {
        double worst = 0.0;
        for (const MetricsRecord& rec : log.records)
            if (rec.step == steps &&
                rec.param.find(".weight") != std::string::npos)
                worst = std::max(worst, rec.weight_rms);
        return worst;
    };

    int rms_lower_with_decay = 0, val_better_with_decay = 0;
    std::string per_seed;
    for (int s = 0; s < 5; ++s) {
        ToyModelConfig arch;
        arch.dims = {16, 64, 8};
        arch.seed = derive_seed(9000, 2 * s);
        TaskSpec task;
        task.input_dim = 16;
        task.dataset_size = 128;
        task.noise = 0.05;
        task.seed = derive_seed(9000, 2 * s + 1);
        TrainSpec spec;
        spec.steps = steps;
        const AblationReport rep =
            ablation_weight_decay(arch, task, spec, 0.0, 0.1);
        const double off = terminal_matrix_rms(rep.no_decay.log);
        const double on = terminal_matrix_rms(rep.with_decay.log);
        if (on < off) ++rms_lower_with_decay;
        if (rep.with_decay.final_val_loss < rep.no_decay.final_val_loss)
            ++val_better_with_decay;
        per_seed += strf("%s%.3f->%.3f", s ? ", " : "", off, on);
    }
    const double secs = timer.seconds();
    const bool ok = rms_lower_with_decay == 5 && secs < kBudget12;
    return {ok,
            strf("hidden-64 teacher-student, 1250 steps (~5x past plateau): "
                 "decay lowered terminal matrix-weight RMS in %d/5 seeds "
                 "(%s), %.1fs (budget %.0fs)",
                 rms_lower_with_decay, per_seed.c_str(), secs, kBudget12),
            {strf("validation loss was better with decay in %d/5 seeds "
                  "(direction reported, not asserted)",
                  val_better_with_decay)}};
}

// ---------------------------------------------------------------------------
// 13. Out-of-scope claims are stated; the optimizer comparison is
//     descriptive only.
// ---------------------------------------------------------------------------
Outcome check_scope_statement() {
    ToyModelConfig arch;
    arch.dims = {8, 16, 8};
    arch.seed = 131;
    TaskSpec task;
    task.input_dim = 8;
    task.dataset_size = 64;
    task.noise = 0.05;
    task.seed = 132;
    TrainSpec spec;
    spec.steps = 60;
    const CompareReport rep = compare_optimizers(arch, task, spec, spec);
    const bool ok = std::isfinite(rep.muon.final_val_loss) &&
                    std::isfinite(rep.adamw.final_val_loss) &&
                    std::isfinite(rep.muon.final_train_loss) &&
                    std::isfinite(rep.adamw.final_train_loss);
    return {
        ok,
        "out-of-scope claims documented below; toy comparison ran to "
        "completion",
        {
            "not validated at this scale (documented, not asserted):",
            "  - the claimed ~2x training-compute efficiency of the "
            "orthogonalized optimizer on production language models",
            "  - benchmark-suite scores of billion-parameter pretrained "
            "checkpoints",
            "  - singular-value-entropy orderings measured across "
            "multi-billion-parameter checkpoint families",
            "those rest on production training runs; this gate substitutes "
            "the closed-form laws, oracle equivalences,",
            "and invariants above, plus this descriptive toy-scale "
            "comparison (nothing asserted about a winner):",
            strf("  orthogonalized-momentum arm: final train %.6f, val %.6f",
                 rep.muon.final_train_loss, rep.muon.final_val_loss),
            strf("  adaptive-moments arm:        final train %.6f, val %.6f",
                 rep.adamw.final_train_loss, rep.adamw.final_val_loss),
        }};
}

}  // namespace

int main() {
    run_check(1, "low-rank orthonormal product RMS law", check_low_rank_rms_law);
    run_check(2, "orthogonalization spectrum vs scalar oracle",
              check_spectrum_oracle);
    run_check(3, "data-parallel equivalence to single device",
              check_distributed_equivalence);
    run_check(4, "communication byte-ratio bound", check_communication_ratio);
    run_check(5, "optimizer state memory halved", check_state_memory);
    run_check(6, "update-RMS matched to 0.2 target", check_update_rms_matching);
    run_check(7, "scaling-law constant recovery", check_scaling_recovery);
    run_check(8, "spectral entropy anchors", check_entropy_anchors);
    run_check(9, "gate attenuation factor", check_gate_factor);
    run_check(10, "bias balancing: zero-sum and rank-safe", check_auxfree_bias);
    run_check(11, "analytic gradients vs finite differences",
              check_finite_differences);
    run_check(12, "weight decay caps over-trained weight growth",
              check_weight_decay_ablation);
    run_check(13, "scale limits stated, comparison descriptive",
              check_scope_statement);

    std::printf("%d/13 checks passed\n", 13 - g_failures);
    return g_failures;
}
