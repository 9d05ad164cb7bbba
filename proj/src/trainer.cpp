#include "muonlab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "muonlab/errors.hpp"
#include "muonlab/io.hpp"
#include "muonlab/rng.hpp"

namespace muonlab {

namespace {

constexpr double kDivergenceThreshold = 1e6;

// Distinct sub-stream indices hung off a task/model seed.
constexpr std::uint64_t kStreamInputs = 1;
constexpr std::uint64_t kStreamTeacher = 2;
constexpr std::uint64_t kStreamNoise = 3;

std::string layer_name(std::size_t i, const char* kind) {
    return "layer" + std::to_string(i) + "." + kind;
}

double apply_nonlinearity(Nonlinearity nl, double z) {
    switch (nl) {
        case Nonlinearity::Tanh: return std::tanh(z);
        case Nonlinearity::Relu: return z > 0.0 ? z : 0.0;
        case Nonlinearity::Identity: return z;
    }
    throw ValueError("unknown nonlinearity");
}

// Derivative expressed in terms of pre-activation z and activation a.
double nonlinearity_grad(Nonlinearity nl, double z, double a) {
    switch (nl) {
        case Nonlinearity::Tanh: return 1.0 - a * a;
        case Nonlinearity::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Nonlinearity::Identity: return 1.0;
    }
    throw ValueError("unknown nonlinearity");
}

}  // namespace

ToyModel make_toy_model(const ToyModelConfig& cfg) {
    if (cfg.dims.size() < 2) {
        throw ValueError("make_toy_model: need at least input and output dims");
    }
    for (std::size_t d : cfg.dims) {
        if (d == 0) throw ValueError("make_toy_model: zero-width layer");
    }

    ToyModel model;
    model.dims = cfg.dims;
    model.nonlinearity = cfg.nonlinearity;
    const std::size_t layers = cfg.dims.size() - 1;
    model.params.reserve(layers * 2);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = cfg.dims[l];
        const std::size_t out = cfg.dims[l + 1];
        Rng rng(derive_seed(cfg.seed, l));
        const double init_scale = 1.0 / std::sqrt(static_cast<double>(in));
        model.params.push_back(make_param(layer_name(l, "weight"),
                                          ParamKind::MatrixParam,
                                          rng.normal_matrix(out, in, init_scale)));
        model.params.push_back(make_param(layer_name(l, "gain"),
                                          ParamKind::VectorParam,
                                          Matrix(1, out, 1.0)));
    }
    return model;
}

std::size_t param_count(const ToyModel& model) {
    std::size_t n = 0;
    for (const ParamState& p : model.params) n += p.weight.size();
    return n;
}

namespace {

struct ForwardTrace {
    // activations[l] feeds layer l; activations[layers] is the output.
    std::vector<Matrix> activations;
    std::vector<Matrix> pre_gain;   // S_l = A_l * W_l^T
    std::vector<Matrix> pre_activ;  // Z_l = S_l * diag(gain_l)
};

ForwardTrace run_forward(const ToyModel& model, const Matrix& inputs) {
    if (inputs.cols() != model.dims.front()) {
        throw ShapeError("forward: input width does not match model input dim");
    }
    const std::size_t layers = model.dims.size() - 1;
    ForwardTrace t;
    t.activations.reserve(layers + 1);
    t.activations.push_back(inputs);
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = model.params[2 * l].weight;
        const Matrix& gain = model.params[2 * l + 1].weight;
        Matrix s = matmul(t.activations[l], transpose(w));
        Matrix z = s;
        for (std::size_t r = 0; r < z.rows(); ++r)
            for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) *= gain(0, c);
        Matrix a = z;
        if (l + 1 < layers) {
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t c = 0; c < a.cols(); ++c)
                    a(r, c) = apply_nonlinearity(model.nonlinearity, a(r, c));
        }
        t.pre_gain.push_back(std::move(s));
        t.pre_activ.push_back(std::move(z));
        t.activations.push_back(std::move(a));
    }
    return t;
}

}  // namespace

Matrix forward(const ToyModel& model, const Matrix& inputs) {
    return run_forward(model, inputs).activations.back();
}

Dataset make_dataset(const TaskSpec& task, const ToyModelConfig& arch) {
    if (task.dataset_size < 2) {
        throw ValueError("make_dataset: dataset_size must be >= 2");
    }
    if (task.input_dim != arch.dims.front()) {
        throw ShapeError("make_dataset: task input_dim does not match architecture");
    }
    if (!(task.noise >= 0.0)) {
        throw ValueError("make_dataset: noise must be >= 0");
    }

    Rng input_rng(derive_seed(task.seed, kStreamInputs));
    Matrix inputs = input_rng.normal_matrix(task.dataset_size, task.input_dim);

    ToyModelConfig teacher_cfg = arch;
    teacher_cfg.seed = derive_seed(task.seed, kStreamTeacher);
    const ToyModel teacher = make_toy_model(teacher_cfg);
    Matrix outputs = forward(teacher, inputs);

    Rng noise_rng(derive_seed(task.seed, kStreamNoise));
    if (task.noise > 0.0) {
        for (std::size_t r = 0; r < outputs.rows(); ++r)
            for (std::size_t c = 0; c < outputs.cols(); ++c)
                outputs(r, c) += task.noise * noise_rng.normal();
    }

    Matrix targets;
    if (task.kind == TaskKind::TeacherStudentRegression) {
        targets = std::move(outputs);
    } else {
        // One-hot argmax of the (noisy) teacher logits; first max wins ties.
        targets = Matrix(outputs.rows(), outputs.cols(), 0.0);
        for (std::size_t r = 0; r < outputs.rows(); ++r) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < outputs.cols(); ++c)
                if (outputs(r, c) > outputs(r, best)) best = c;
            targets(r, best) = 1.0;
        }
    }

    const std::size_t n_val = std::max<std::size_t>(1, task.dataset_size / 10);
    const std::size_t n_train = task.dataset_size - n_val;

    Dataset d;
    d.kind = task.kind;
    d.train_inputs = Matrix(n_train, inputs.cols());
    d.train_targets = Matrix(n_train, targets.cols());
    d.val_inputs = Matrix(n_val, inputs.cols());
    d.val_targets = Matrix(n_val, targets.cols());
    for (std::size_t r = 0; r < task.dataset_size; ++r) {
        const bool is_val = r >= n_train;
        Matrix& mi = is_val ? d.val_inputs : d.train_inputs;
        Matrix& mt = is_val ? d.val_targets : d.train_targets;
        const std::size_t rr = is_val ? r - n_train : r;
        for (std::size_t c = 0; c < inputs.cols(); ++c) mi(rr, c) = inputs(r, c);
        for (std::size_t c = 0; c < targets.cols(); ++c) mt(rr, c) = targets(r, c);
    }
    return d;
}

namespace {

// Loss value plus its gradient wrt the model output.
std::pair<double, Matrix> loss_and_grad(const Matrix& pred, const Matrix& targets,
                                        TaskKind kind) {
    if (!pred.same_shape(targets)) {
        throw ShapeError("loss: prediction and target shapes differ");
    }
    const std::size_t b = pred.rows(), d = pred.cols();
    if (kind == TaskKind::TeacherStudentRegression) {
        double acc = 0.0;
        Matrix grad(b, d);
        const double inv = 1.0 / static_cast<double>(b * d);
        for (std::size_t r = 0; r < b; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                const double e = pred(r, c) - targets(r, c);
                acc += e * e;
                grad(r, c) = 2.0 * e * inv;
            }
        }
        return {acc * inv, std::move(grad)};
    }

    // Softmax cross-entropy, numerically shifted per row.
    double loss = 0.0;
    Matrix grad(b, d);
    const double invb = 1.0 / static_cast<double>(b);
    for (std::size_t r = 0; r < b; ++r) {
        double mx = pred(r, 0);
        for (std::size_t c = 1; c < d; ++c) mx = std::max(mx, pred(r, c));
        double z = 0.0;
        for (std::size_t c = 0; c < d; ++c) z += std::exp(pred(r, c) - mx);
        const double logz = std::log(z);
        for (std::size_t c = 0; c < d; ++c) {
            const double logp = pred(r, c) - mx - logz;
            loss -= targets(r, c) * logp;
            grad(r, c) = (std::exp(logp) - targets(r, c)) * invb;
        }
    }
    return {loss * invb, std::move(grad)};
}

}  // namespace

ForwardBackward forward_backward(const ToyModel& model, const Matrix& inputs,
                                 const Matrix& targets, TaskKind kind) {
    const std::size_t layers = model.dims.size() - 1;
    ForwardTrace t = run_forward(model, inputs);

    ForwardBackward out;
    auto [loss, dout] = loss_and_grad(t.activations.back(), targets, kind);
    out.loss = loss;

    // dz starts as the loss gradient wrt the last pre-activation (no
    // nonlinearity after the final layer).
    Matrix dz = std::move(dout);
    for (std::size_t li = layers; li-- > 0;) {
        const Matrix& w = model.params[2 * li].weight;
        const Matrix& gain = model.params[2 * li + 1].weight;
        const Matrix& s = t.pre_gain[li];
        const Matrix& a_in = t.activations[li];

        // Gain gradient: z = s * g_c, so dg_c = sum_batch dz * s.
        Matrix dgain(1, gain.cols(), 0.0);
        for (std::size_t r = 0; r < dz.rows(); ++r)
            for (std::size_t c = 0; c < dz.cols(); ++c)
                dgain(0, c) += dz(r, c) * s(r, c);

        // ds = dz * g_c.
        Matrix ds = dz;
        for (std::size_t r = 0; r < ds.rows(); ++r)
            for (std::size_t c = 0; c < ds.cols(); ++c) ds(r, c) *= gain(0, c);

        out.grads[layer_name(li, "weight")] = matmul(transpose(ds), a_in);
        out.grads[layer_name(li, "gain")] = std::move(dgain);

        if (li > 0) {
            Matrix da = matmul(ds, w);
            // a_in is the activation feeding layer li, i.e. layer li-1's
            // post-nonlinearity output, paired with its pre-activation.
            const Matrix& z_prev = t.pre_activ[li - 1];
            for (std::size_t r = 0; r < da.rows(); ++r)
                for (std::size_t c = 0; c < da.cols(); ++c)
                    da(r, c) *= nonlinearity_grad(model.nonlinearity, z_prev(r, c),
                                                  a_in(r, c));
            dz = std::move(da);
        }
    }
    return out;
}

double schedule_factor(Schedule schedule, long step, long total_steps) {
    if (total_steps < 1) throw ValueError("schedule_factor: total_steps must be >= 1");
    if (step < 0 || step >= total_steps) {
        throw ValueError("schedule_factor: step out of range");
    }
    const double t = static_cast<double>(step) / static_cast<double>(total_steps);
    switch (schedule) {
        case Schedule::Constant: return 1.0;
        case Schedule::Linear: return 1.0 - t;
        case Schedule::Cosine: return 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
    throw ValueError("schedule_factor: unknown schedule");
}

std::string MetricsLog::to_csv() const {
    std::string out = "step,train_loss,val_loss,lr,param,update_rms,weight_rms\n";
    for (const MetricsRecord& r : records) {
        out += std::to_string(r.step);
        out += ',';
        out += format_g17(r.train_loss);
        out += ',';
        out += format_g17(r.val_loss);
        out += ',';
        out += format_g17(r.lr);
        out += ',';
        out += r.param;
        out += ',';
        out += format_g17(r.update_rms);
        out += ',';
        out += format_g17(r.weight_rms);
        out += '\n';
    }
    return out;
}

namespace {

const MetricsRecord& last_record(const MetricsLog& log) {
    if (log.records.empty()) throw ValueError("MetricsLog: empty log");
    return log.records.back();
}

}  // namespace

double MetricsLog::final_train_loss() const { return last_record(*this).train_loss; }

double MetricsLog::final_val_loss() const { return last_record(*this).val_loss; }

double MetricsLog::terminal_max_weight_rms() const {
    const long last = last_record(*this).step;
    double best = 0.0;
    for (const MetricsRecord& r : records) {
        if (r.step == last) best = std::max(best, r.weight_rms);
    }
    return best;
}

TrainResult train(const ToyModel& model, const TaskSpec& task, const TrainSpec& spec) {
    ToyModelConfig arch;
    arch.dims = model.dims;
    arch.nonlinearity = model.nonlinearity;
    return train(model, make_dataset(task, arch), spec);
}

TrainResult train(const ToyModel& model, const Dataset& data, const TrainSpec& spec) {
    validate(spec.muon);
    validate(spec.adamw);
    if (spec.steps < 1) throw ValueError("train: steps must be >= 1");
    const std::size_t n_train = data.train_inputs.rows();
    if (spec.batch_size > n_train) {
        throw ValueError("train: batch_size exceeds training set size");
    }

    TrainResult result;
    result.model = model;

    const double base_lr = spec.optimizer == OptimizerChoice::AdamW
                               ? spec.adamw.lr
                               : spec.muon.lr;

    for (long step = 0; step < spec.steps; ++step) {
        const double step_lr =
            base_lr * schedule_factor(spec.schedule, step, spec.steps);

        // Batch selection: full batch, or a deterministic wrap-around slice.
        Matrix batch_in, batch_tg;
        const Matrix* bin = &data.train_inputs;
        const Matrix* btg = &data.train_targets;
        if (spec.batch_size > 0 && spec.batch_size < n_train) {
            batch_in = Matrix(spec.batch_size, data.train_inputs.cols());
            batch_tg = Matrix(spec.batch_size, data.train_targets.cols());
            const std::size_t start =
                (static_cast<std::size_t>(step) * spec.batch_size) % n_train;
            for (std::size_t r = 0; r < spec.batch_size; ++r) {
                const std::size_t src = (start + r) % n_train;
                for (std::size_t c = 0; c < batch_in.cols(); ++c)
                    batch_in(r, c) = data.train_inputs(src, c);
                for (std::size_t c = 0; c < batch_tg.cols(); ++c)
                    batch_tg(r, c) = data.train_targets(src, c);
            }
            bin = &batch_in;
            btg = &batch_tg;
        }

        ForwardBackward fb = forward_backward(result.model, *bin, *btg, data.kind);
        if (!std::isfinite(fb.loss) || fb.loss > kDivergenceThreshold) {
            throw DivergenceError("train: loss diverged at step " +
                                      std::to_string(step + 1),
                                  step + 1);
        }
        const double val_loss =
            loss_and_grad(forward(result.model, data.val_inputs),
                          data.val_targets, data.kind)
                .first;

        for (ParamState& p : result.model.params) {
            const bool frozen =
                (p.kind == ParamKind::MatrixParam && spec.freeze_matrices) ||
                (p.kind == ParamKind::VectorParam && spec.freeze_vectors);

            UpdateStats stats;
            if (frozen) {
                stats.update_rms = 0.0;
                stats.weight_rms = rms(p.weight);
            } else {
                const auto git = fb.grads.find(p.name);
                if (git == fb.grads.end()) {
                    throw ValueError("train: missing gradient for '" + p.name + "'");
                }
                const bool no_decay = spec.decay_exclude.count(p.name) > 0;
                const bool use_muon = spec.optimizer != OptimizerChoice::AdamW &&
                                      p.kind == ParamKind::MatrixParam;
                if (use_muon) {
                    MuonConfig cfg = spec.muon;
                    if (no_decay) cfg.weight_decay = 0.0;
                    auto [next, s] = muon_step(p, git->second, cfg, step_lr);
                    p = std::move(next);
                    stats = s;
                } else {
                    AdamWConfig cfg = spec.adamw;
                    if (no_decay) cfg.weight_decay = 0.0;
                    auto [next, s] = adamw_step(p, git->second, cfg, step_lr);
                    p = std::move(next);
                    stats = s;
                }
            }

            MetricsRecord rec;
            rec.step = step + 1;
            rec.train_loss = fb.loss;
            rec.val_loss = val_loss;
            rec.lr = step_lr;
            rec.param = p.name;
            rec.update_rms = stats.update_rms;
            rec.weight_rms = stats.weight_rms;
            result.log.records.push_back(std::move(rec));
        }
    }
    return result;
}

AblationReport ablation_weight_decay(const ToyModelConfig& arch, const TaskSpec& task,
                                     const TrainSpec& base, double lambda_off,
                                     double lambda_on) {
    const ToyModel init = make_toy_model(arch);
    const Dataset data = make_dataset(task, arch);

    auto run_arm = [&](double lambda) {
        TrainSpec spec = base;
        spec.muon.weight_decay = lambda;
        spec.adamw.weight_decay = lambda;
        TrainResult r = train(init, data, spec);
        AblationArm arm;
        arm.weight_decay = lambda;
        arm.terminal_max_weight_rms = r.log.terminal_max_weight_rms();
        arm.final_train_loss = r.log.final_train_loss();
        arm.final_val_loss = r.log.final_val_loss();
        arm.log = std::move(r.log);
        return arm;
    };

    AblationReport report;
    report.no_decay = run_arm(lambda_off);
    report.with_decay = run_arm(lambda_on);
    return report;
}

CompareReport compare_optimizers(const ToyModelConfig& arch, const TaskSpec& task,
                                 const TrainSpec& muon_spec,
                                 const TrainSpec& adamw_spec) {
    const ToyModel init = make_toy_model(arch);
    const Dataset data = make_dataset(task, arch);

    auto run_arm = [&](const TrainSpec& base, OptimizerChoice choice,
                       const char* label) {
        TrainSpec spec = base;
        spec.optimizer = choice;
        TrainResult r = train(init, data, spec);
        CompareArm arm;
        arm.label = label;
        arm.final_train_loss = r.log.final_train_loss();
        arm.final_val_loss = r.log.final_val_loss();
        arm.log = std::move(r.log);
        return arm;
    };

    CompareReport report;
    report.muon = run_arm(muon_spec, OptimizerChoice::Muon, "muon");
    report.adamw = run_arm(adamw_spec, OptimizerChoice::AdamW, "adamw");
    return report;
}

}  // namespace muonlab
