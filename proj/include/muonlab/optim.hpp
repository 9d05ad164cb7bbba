#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "muonlab/matrix.hpp"
#include "muonlab/newton_schulz.hpp"

namespace muonlab {

// How the orthogonalized direction is rescaled before the learning rate is
// applied. All three variants multiply by rms_target (0.2 by default):
//   BaselineSqrtH: rms_target * sqrt(hidden) * O       (shape-blind)
//   UpdateNorm:    rms_target * O / rms(O)             (update RMS exactly rms_target)
//   AdjustedLR:    rms_target * sqrt(max(A, B)) * O    (shape-aware, default)
enum class ScalingVariant { BaselineSqrtH, UpdateNorm, AdjustedLR };

struct ScalingMode {
    ScalingVariant variant = ScalingVariant::AdjustedLR;
    long hidden = 0;          // required positive for BaselineSqrtH, unused otherwise
    double rms_target = 0.2;
};

struct MuonConfig {
    double lr = 0.02;
    double momentum = 0.95;
    double weight_decay = 0.1;
    NsConfig ns;              // steps = 5 by default
    bool nesterov = true;
    ScalingMode scaling;
};

struct AdamWConfig {
    double lr = 0.02;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double epsilon = 1e-8;
    double weight_decay = 0.1;
};

// Throw ValueError on out-of-range fields. lr is allowed to be exactly zero
// so a zero-learning-rate run is expressible; everything else follows the
// ranges documented on the structs.
void validate(const MuonConfig& cfg);
void validate(const AdamWConfig& cfg);
void validate(const ScalingMode& mode);

enum class ParamKind { MatrixParam, VectorParam };

// A named parameter plus whatever optimizer buffers have been touched so
// far. Buffers start empty and are zero-initialized to the weight's shape on
// first use, so a state carries only the memory its optimizer needs.
struct ParamState {
    std::string name;
    ParamKind kind = ParamKind::MatrixParam;
    Matrix weight;
    Matrix momentum;    // Muon
    Matrix m, v;        // AdamW first/second moments
    long step = 0;      // AdamW step counter
};

ParamState make_param(std::string name, ParamKind kind, Matrix weight);

struct UpdateStats {
    double update_rms = 0.0;   // rms of the pre-decay scaled update
    double weight_rms = 0.0;   // rms of the weight after the step
};

// Injectable orthogonalization backend. Production callers leave it empty,
// which means newton_schulz; tests may substitute an exact polar factor.
using Orthogonalizer = std::function<Matrix(const Matrix&, const NsConfig&)>;

// One Muon update on a matrix parameter:
//   momentum <- mu * momentum + grad
//   O <- orthogonalize(mu * momentum + grad)      (nesterov)
//        orthogonalize(momentum)                  (otherwise)
//   weight <- weight - step_lr * (scale(O) + weight_decay * weight)
// A zero orthogonalization input produces a zero update (nothing to
// orthogonalize). Throws ShapeError / ValueError / NumericsError on bad
// shapes, wrong kind, or non-finite gradients.
std::pair<ParamState, UpdateStats> muon_step(const ParamState& state,
                                             const Matrix& grad,
                                             const MuonConfig& cfg,
                                             double step_lr,
                                             const Orthogonalizer& ortho = {});

// Rescale an orthogonalized direction; `rows`/`cols` are the expected shape
// and are checked against o. A zero matrix passes through unchanged in every
// mode (UpdateNorm would otherwise divide by zero).
Matrix scale(const Matrix& o, std::size_t rows, std::size_t cols,
             const ScalingMode& mode);

// Bias-corrected AdamW with decoupled weight decay:
//   m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;  t <- t+1
//   update = (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
//   weight <- weight - step_lr * (update + weight_decay * weight)
std::pair<ParamState, UpdateStats> adamw_step(const ParamState& state,
                                              const Matrix& grad,
                                              const AdamWConfig& cfg,
                                              double step_lr);

// Route a whole named parameter set through one optimizer step:
// MatrixParam -> Muon, VectorParam -> AdamW. Every parameter must have a
// gradient. Names in decay_exclude are updated with weight decay forced to
// zero (norm-gain style parameters can opt out of the shared decay).
struct HybridResult {
    std::vector<ParamState> params;
    std::map<std::string, UpdateStats> stats;
};

HybridResult hybrid_step(const std::vector<ParamState>& params,
                         const std::map<std::string, Matrix>& grads,
                         const MuonConfig& muon_cfg,
                         const AdamWConfig& adamw_cfg,
                         double step_lr,
                         const std::set<std::string>& decay_exclude = {},
                         const Orthogonalizer& ortho = {});

// Load both optimizer configs from one key-value file. Recognized keys:
//   lr, momentum, weight_decay, ns_steps, scaling_mode, rms_target,
//   nesterov, betas, epsilon
// lr and weight_decay apply to both optimizers; momentum, ns_steps,
// scaling_mode, rms_target and nesterov shape the Muon side; betas (two
// comma-separated reals) and epsilon shape the AdamW side. scaling_mode is
// one of adjusted_lr | update_norm | baseline_sqrt_h:<hidden>.
struct OptimizerFileConfig {
    MuonConfig muon;
    AdamWConfig adamw;
};

OptimizerFileConfig parse_optimizer_config(const std::string& text);
OptimizerFileConfig load_optimizer_config(const std::string& path);

}  // namespace muonlab
