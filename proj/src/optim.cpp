#include "muonlab/optim.hpp"

#include <algorithm>
#include <cmath>

#include "muonlab/errors.hpp"
#include "muonlab/io.hpp"

namespace muonlab {

namespace {

void require_finite_grad(const Matrix& grad, const std::string& name) {
    if (!all_finite(grad)) {
        throw NumericsError("gradient for '" + name + "' has non-finite entries");
    }
}

void require_grad_shape(const ParamState& state, const Matrix& grad) {
    if (!state.weight.same_shape(grad)) {
        throw ShapeError("gradient shape does not match weight shape for '" +
                         state.name + "'");
    }
}

// Buffers are created lazily; once present they must match the weight.
Matrix& ensure_buffer(Matrix& buf, const Matrix& weight, const std::string& name) {
    if (buf.empty()) {
        buf = Matrix(weight.rows(), weight.cols(), 0.0);
    } else if (!buf.same_shape(weight)) {
        throw ShapeError("optimizer buffer shape does not match weight for '" +
                         name + "'");
    }
    return buf;
}

}  // namespace

void validate(const ScalingMode& mode) {
    if (!(mode.rms_target > 0.0) || !std::isfinite(mode.rms_target)) {
        throw ValueError("ScalingMode: rms_target must be positive and finite");
    }
    if (mode.variant == ScalingVariant::BaselineSqrtH && mode.hidden < 1) {
        throw ValueError("ScalingMode: BaselineSqrtH requires a positive hidden dim");
    }
}

void validate(const MuonConfig& cfg) {
    if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) {
        throw ValueError("MuonConfig: lr must be finite and >= 0");
    }
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
        throw ValueError("MuonConfig: momentum must lie in [0, 1)");
    }
    if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay)) {
        throw ValueError("MuonConfig: weight_decay must be finite and >= 0");
    }
    if (cfg.ns.steps < 1) {
        throw ValueError("MuonConfig: ns.steps must be >= 1");
    }
    validate(cfg.scaling);
}

void validate(const AdamWConfig& cfg) {
    if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) {
        throw ValueError("AdamWConfig: lr must be finite and >= 0");
    }
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) {
        throw ValueError("AdamWConfig: beta1 must lie in [0, 1)");
    }
    if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
        throw ValueError("AdamWConfig: beta2 must lie in [0, 1)");
    }
    if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
        throw ValueError("AdamWConfig: epsilon must be positive and finite");
    }
    if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay)) {
        throw ValueError("AdamWConfig: weight_decay must be finite and >= 0");
    }
}

ParamState make_param(std::string name, ParamKind kind, Matrix weight) {
    if (weight.empty()) {
        throw ShapeError("make_param: empty weight for '" + name + "'");
    }
    ParamState s;
    s.name = std::move(name);
    s.kind = kind;
    s.weight = std::move(weight);
    return s;
}

Matrix scale(const Matrix& o, std::size_t rows, std::size_t cols,
             const ScalingMode& mode) {
    validate(mode);
    if (o.rows() != rows || o.cols() != cols) {
        throw ShapeError("scale: matrix does not have the declared shape");
    }
    switch (mode.variant) {
        case ScalingVariant::BaselineSqrtH:
            return (mode.rms_target * std::sqrt(static_cast<double>(mode.hidden))) * o;
        case ScalingVariant::UpdateNorm: {
            if (frobenius_norm(o) == 0.0) return o;
            return (mode.rms_target / rms(o)) * o;
        }
        case ScalingVariant::AdjustedLR: {
            const double dim = static_cast<double>(std::max(rows, cols));
            return (mode.rms_target * std::sqrt(dim)) * o;
        }
    }
    throw ValueError("scale: unknown scaling variant");
}

std::pair<ParamState, UpdateStats> muon_step(const ParamState& state,
                                             const Matrix& grad,
                                             const MuonConfig& cfg,
                                             double step_lr,
                                             const Orthogonalizer& ortho) {
    validate(cfg);
    if (state.kind != ParamKind::MatrixParam) {
        throw ValueError("muon_step: '" + state.name + "' is not a MatrixParam");
    }
    if (!(step_lr >= 0.0) || !std::isfinite(step_lr)) {
        throw ValueError("muon_step: step_lr must be finite and >= 0");
    }
    require_grad_shape(state, grad);
    require_finite_grad(grad, state.name);

    ParamState next = state;
    Matrix& momentum = ensure_buffer(next.momentum, next.weight, next.name);
    momentum *= cfg.momentum;
    momentum += grad;

    Matrix ortho_input = cfg.nesterov ? cfg.momentum * momentum + grad : momentum;

    Matrix update;
    if (frobenius_norm(ortho_input) == 0.0) {
        // Nothing to orthogonalize; the update is pure weight decay.
        update = Matrix(state.weight.rows(), state.weight.cols(), 0.0);
    } else {
        Matrix o = ortho ? ortho(ortho_input, cfg.ns) : newton_schulz(ortho_input, cfg.ns);
        update = scale(o, state.weight.rows(), state.weight.cols(), cfg.scaling);
    }

    UpdateStats stats;
    stats.update_rms = rms(update);

    update += cfg.weight_decay * next.weight;
    next.weight -= step_lr * update;
    stats.weight_rms = rms(next.weight);
    return {std::move(next), stats};
}

std::pair<ParamState, UpdateStats> adamw_step(const ParamState& state,
                                              const Matrix& grad,
                                              const AdamWConfig& cfg,
                                              double step_lr) {
    validate(cfg);
    if (!(step_lr >= 0.0) || !std::isfinite(step_lr)) {
        throw ValueError("adamw_step: step_lr must be finite and >= 0");
    }
    require_grad_shape(state, grad);
    require_finite_grad(grad, state.name);

    ParamState next = state;
    Matrix& m = ensure_buffer(next.m, next.weight, next.name);
    Matrix& v = ensure_buffer(next.v, next.weight, next.name);
    next.step = state.step + 1;

    const std::size_t n = next.weight.size();
    const double* g = grad.data();
    double* pm = m.data();
    double* pv = v.data();
    for (std::size_t i = 0; i < n; ++i) {
        pm[i] = cfg.beta1 * pm[i] + (1.0 - cfg.beta1) * g[i];
        pv[i] = cfg.beta2 * pv[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    }

    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(next.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(next.step));

    Matrix update(next.weight.rows(), next.weight.cols());
    double* pu = update.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double mhat = pm[i] / bc1;
        const double vhat = pv[i] / bc2;
        pu[i] = mhat / (std::sqrt(vhat) + cfg.epsilon);
    }

    UpdateStats stats;
    stats.update_rms = rms(update);

    update += cfg.weight_decay * next.weight;
    next.weight -= step_lr * update;
    stats.weight_rms = rms(next.weight);
    return {std::move(next), stats};
}

HybridResult hybrid_step(const std::vector<ParamState>& params,
                         const std::map<std::string, Matrix>& grads,
                         const MuonConfig& muon_cfg,
                         const AdamWConfig& adamw_cfg,
                         double step_lr,
                         const std::set<std::string>& decay_exclude,
                         const Orthogonalizer& ortho) {
    HybridResult out;
    out.params.reserve(params.size());
    for (const ParamState& p : params) {
        const auto it = grads.find(p.name);
        if (it == grads.end()) {
            throw ValueError("hybrid_step: missing gradient for '" + p.name + "'");
        }
        const bool no_decay = decay_exclude.count(p.name) > 0;
        if (p.kind == ParamKind::MatrixParam) {
            MuonConfig cfg = muon_cfg;
            if (no_decay) cfg.weight_decay = 0.0;
            auto [next, stats] = muon_step(p, it->second, cfg, step_lr, ortho);
            out.stats[p.name] = stats;
            out.params.push_back(std::move(next));
        } else {
            AdamWConfig cfg = adamw_cfg;
            if (no_decay) cfg.weight_decay = 0.0;
            auto [next, stats] = adamw_step(p, it->second, cfg, step_lr);
            out.stats[p.name] = stats;
            out.params.push_back(std::move(next));
        }
    }
    return out;
}

namespace {

const std::set<std::string> kOptimizerConfigKeys = {
    "lr",       "momentum",     "weight_decay", "ns_steps", "scaling_mode",
    "rms_target", "nesterov",   "betas",        "epsilon"};

ScalingMode parse_scaling_mode(const std::string& value, double rms_target) {
    ScalingMode mode;
    mode.rms_target = rms_target;
    if (value == "adjusted_lr") {
        mode.variant = ScalingVariant::AdjustedLR;
    } else if (value == "update_norm") {
        mode.variant = ScalingVariant::UpdateNorm;
    } else if (value.rfind("baseline_sqrt_h:", 0) == 0) {
        mode.variant = ScalingVariant::BaselineSqrtH;
        mode.hidden = parse_long(value.substr(16), "scaling_mode hidden dim");
    } else {
        throw ParseError(
            "scaling_mode: expected adjusted_lr | update_norm | "
            "baseline_sqrt_h:<hidden>, got '" + value + "'");
    }
    return mode;
}

}  // namespace

OptimizerFileConfig parse_optimizer_config(const std::string& text) {
    const auto kv = parse_kv_config(text, kOptimizerConfigKeys);
    OptimizerFileConfig out;

    if (auto it = kv.find("lr"); it != kv.end()) {
        out.muon.lr = out.adamw.lr = parse_double(it->second, "lr");
    }
    if (auto it = kv.find("weight_decay"); it != kv.end()) {
        out.muon.weight_decay = out.adamw.weight_decay =
            parse_double(it->second, "weight_decay");
    }
    if (auto it = kv.find("momentum"); it != kv.end()) {
        out.muon.momentum = parse_double(it->second, "momentum");
    }
    if (auto it = kv.find("ns_steps"); it != kv.end()) {
        out.muon.ns.steps = static_cast<int>(parse_long(it->second, "ns_steps"));
    }
    if (auto it = kv.find("nesterov"); it != kv.end()) {
        out.muon.nesterov = parse_bool(it->second, "nesterov");
    }
    double rms_target = out.muon.scaling.rms_target;
    if (auto it = kv.find("rms_target"); it != kv.end()) {
        rms_target = parse_double(it->second, "rms_target");
        out.muon.scaling.rms_target = rms_target;
    }
    if (auto it = kv.find("scaling_mode"); it != kv.end()) {
        out.muon.scaling = parse_scaling_mode(it->second, rms_target);
    }
    if (auto it = kv.find("epsilon"); it != kv.end()) {
        out.adamw.epsilon = parse_double(it->second, "epsilon");
    }
    if (auto it = kv.find("betas"); it != kv.end()) {
        const std::string& s = it->second;
        const auto comma = s.find(',');
        if (comma == std::string::npos) {
            throw ParseError("betas: expected two comma-separated values");
        }
        out.adamw.beta1 = parse_double(s.substr(0, comma), "beta1");
        auto beta2_str = s.substr(comma + 1);
        const auto b = beta2_str.find_first_not_of(" \t");
        out.adamw.beta2 = parse_double(
            b == std::string::npos ? beta2_str : beta2_str.substr(b), "beta2");
    }

    validate(out.muon);
    validate(out.adamw);
    return out;
}

OptimizerFileConfig load_optimizer_config(const std::string& path) {
    return parse_optimizer_config(read_text_file(path));
}

}  // namespace muonlab
