#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "muonlab/matrix.hpp"
#include "muonlab/optim.hpp"

namespace muonlab {

// ---------------------------------------------------------------------------
// Model: a stack of (weight, per-output gain) layers with a pointwise
// nonlinearity between layers (never after the last). Weights are
// MatrixParams, gains are VectorParams, which is exactly the split the
// hybrid optimizer routes on.
// ---------------------------------------------------------------------------

enum class Nonlinearity { Tanh, Relu, Identity };

struct ToyModelConfig {
    std::vector<std::size_t> dims = {64, 256, 64};  // layer widths, >= 2 entries
    Nonlinearity nonlinearity = Nonlinearity::Tanh;
    std::uint64_t seed = 0;
};

struct ToyModel {
    std::vector<std::size_t> dims;
    Nonlinearity nonlinearity = Nonlinearity::Tanh;
    // Interleaved layer{i}.weight (out x in, Gaussian / sqrt(fan_in)) and
    // layer{i}.gain (1 x out, initialized to 1).
    std::vector<ParamState> params;
};

ToyModel make_toy_model(const ToyModelConfig& cfg);

// Total scalar parameter count (weights + gains).
std::size_t param_count(const ToyModel& model);

// inputs: batch x dims.front(); returns batch x dims.back().
Matrix forward(const ToyModel& model, const Matrix& inputs);

// ---------------------------------------------------------------------------
// Tasks and data
// ---------------------------------------------------------------------------

enum class TaskKind { TeacherStudentRegression, SyntheticClassification };

struct TaskSpec {
    TaskKind kind = TaskKind::TeacherStudentRegression;
    std::size_t input_dim = 64;
    std::size_t dataset_size = 256;  // >= 2
    double noise = 0.0;              // additive output noise scale
    std::uint64_t seed = 0;          // fully determines the data
};

struct Dataset {
    TaskKind kind = TaskKind::TeacherStudentRegression;
    Matrix train_inputs, train_targets;
    Matrix val_inputs, val_targets;  // held-out last 10% (at least one row)
};

// Synthesizes data from a fixed random teacher with the given architecture.
// Regression targets are teacher outputs plus noise; classification targets
// are one-hot argmax of noisy teacher logits.
Dataset make_dataset(const TaskSpec& task, const ToyModelConfig& arch);

// ---------------------------------------------------------------------------
// Loss and exact gradients
// ---------------------------------------------------------------------------

struct ForwardBackward {
    double loss = 0.0;
    std::map<std::string, Matrix> grads;  // one per param name
};

// MSE (mean over all entries) for regression; softmax cross-entropy with
// one-hot targets (mean over rows) for classification. Gradients are exact
// analytic derivatives for every weight and gain.
ForwardBackward forward_backward(const ToyModel& model, const Matrix& inputs,
                                 const Matrix& targets, TaskKind kind);

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

// Muon routes matrices through Muon and vectors through AdamW (that pairing
// is what "training with Muon" means here); Hybrid is the same path under
// its structural name; AdamW sends everything through AdamW.
enum class OptimizerChoice { Muon, AdamW, Hybrid };

enum class Schedule { Constant, Linear, Cosine };

// Decay multiplier for 0-based step t of total T: constant 1, linear
// 1 - t/T, cosine 0.5 * (1 + cos(pi * t / T)).
double schedule_factor(Schedule schedule, long step, long total_steps);

struct TrainSpec {
    OptimizerChoice optimizer = OptimizerChoice::Muon;
    MuonConfig muon;
    AdamWConfig adamw;
    Schedule schedule = Schedule::Constant;
    long steps = 100;
    std::size_t batch_size = 0;  // 0 = full batch
    bool freeze_matrices = false;
    bool freeze_vectors = false;
    std::set<std::string> decay_exclude;
};

// One CSV row per (step, param): step,train_loss,val_loss,lr,param,
// update_rms,weight_rms. Losses are measured on the weights entering the
// step; update/weight RMS reflect the step's effect.
struct MetricsRecord {
    long step = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
    std::string param;
    double update_rms = 0.0;
    double weight_rms = 0.0;
};

struct MetricsLog {
    std::vector<MetricsRecord> records;

    std::string to_csv() const;
    double final_train_loss() const;
    double final_val_loss() const;
    // Largest per-param weight RMS among the last step's records.
    double terminal_max_weight_rms() const;
};

struct TrainResult {
    ToyModel model;
    MetricsLog log;
};

// Runs `spec.steps` optimizer steps of the chosen optimizer over data built
// from `task` (teacher architecture = the model's). Deterministic given
// seeds. Throws DivergenceError if the training loss exceeds 1e6 or goes
// non-finite, carrying the step index.
TrainResult train(const ToyModel& model, const TaskSpec& task, const TrainSpec& spec);

// As above but on a caller-provided dataset.
TrainResult train(const ToyModel& model, const Dataset& data, const TrainSpec& spec);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct AblationArm {
    double weight_decay = 0.0;
    MetricsLog log;
    double terminal_max_weight_rms = 0.0;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
};

// Same seed, same data, same steps; only the decay differs.
struct AblationReport {
    AblationArm no_decay;    // lambda = lambda_off (default 0)
    AblationArm with_decay;  // lambda = lambda_on  (default 0.1)
};

AblationReport ablation_weight_decay(const ToyModelConfig& arch, const TaskSpec& task,
                                     const TrainSpec& base, double lambda_off = 0.0,
                                     double lambda_on = 0.1);

struct CompareArm {
    std::string label;
    MetricsLog log;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
};

// Muon-routed vs all-AdamW from an identical initialization on identical
// data. Purely descriptive: the curves are reported, nothing is asserted
// about which optimizer wins.
struct CompareReport {
    CompareArm muon;
    CompareArm adamw;
};

CompareReport compare_optimizers(const ToyModelConfig& arch, const TaskSpec& task,
                                 const TrainSpec& muon_spec,
                                 const TrainSpec& adamw_spec);

}  // namespace muonlab
