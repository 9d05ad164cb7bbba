// muonlab command-line front end: every library capability behind one binary.
// Machine-readable results go to stdout as JSON; bulk numeric data lands in
// CSV files under --out-dir. All failures exit nonzero with a structured
// {"error": ...} message on stderr.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "muonlab/dist.hpp"
#include "muonlab/errors.hpp"
#include "muonlab/io.hpp"
#include "muonlab/matrix.hpp"
#include "muonlab/moe.hpp"
#include "muonlab/newton_schulz.hpp"
#include "muonlab/optim.hpp"
#include "muonlab/rng.hpp"
#include "muonlab/scaling.hpp"
#include "muonlab/spectral.hpp"
#include "muonlab/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace muonlab;

namespace {

constexpr const char* kVersionBase = "muonlab 1.0.0";

std::string version_string() {
    const NsConfig d;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  " (newton-schulz defaults: steps=%d, a=%g, b=%g, c=%g)",
                  d.steps, d.a, d.b, d.c);
    return std::string(kVersionBase) + buf;
}

struct GlobalOpts {
    std::string out_dir = ".";
    int precision = 17;
};

// Round a value to the requested number of significant decimal digits before
// it is emitted. 17 digits round-trips doubles exactly, so the default is a
// no-op.
double emitted(double v, int precision) {
    if (precision >= 17) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return std::strtod(buf, nullptr);
}

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return std::string(buf);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

fs::path resolve_out(const GlobalOpts& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw ParseError("write failed: " + path.string());
}

std::vector<std::size_t> parse_dims(const std::string& s) {
    std::vector<std::size_t> dims;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const long v = parse_long(tok, "--dims entry");
        if (v < 1) throw ValueError("--dims entries must be >= 1");
        dims.push_back(static_cast<std::size_t>(v));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (dims.size() < 2) throw ValueError("--dims needs at least two entries");
    return dims;
}

std::pair<std::size_t, std::size_t> parse_shape(const std::string& s) {
    const std::size_t x = s.find_first_of("xX");
    if (x == std::string::npos || x == 0 || x + 1 >= s.size()) {
        throw ParseError("--shape must look like AxB, got '" + s + "'");
    }
    const long a = parse_long(s.substr(0, x), "--shape rows");
    const long b = parse_long(s.substr(x + 1), "--shape cols");
    if (a < 1 || b < 1) throw ValueError("--shape sides must be >= 1");
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

std::string dims_to_string(const std::vector<std::size_t>& dims) {
    std::string out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(dims[i]);
    }
    return out;
}

json sigma_json(const std::vector<double>& sigma, int precision) {
    json arr = json::array();
    for (double s : sigma) arr.push_back(emitted(s, precision));
    return arr;
}

// ---------------------------------------------------------------------------
// Shared train-style options
// ---------------------------------------------------------------------------

struct TrainCliOpts {
    std::string dims = "64,256,64";
    TaskKind task = TaskKind::TeacherStudentRegression;
    Nonlinearity nonlinearity = Nonlinearity::Tanh;
    OptimizerChoice optimizer = OptimizerChoice::Muon;
    Schedule schedule = Schedule::Constant;
    long steps = 100;
    long dataset_size = 256;
    long batch_size = 0;
    double noise = 0.0;
    double lr = 0.0;            // applied only when the flag is present
    double weight_decay = 0.0;  // applied only when the flag is present
    std::string config_path;
    std::uint64_t seed = 0;
};

const std::map<std::string, TaskKind> kTaskNames{
    {"regression", TaskKind::TeacherStudentRegression},
    {"classification", TaskKind::SyntheticClassification}};
const std::map<std::string, Nonlinearity> kNonlinNames{
    {"tanh", Nonlinearity::Tanh},
    {"relu", Nonlinearity::Relu},
    {"identity", Nonlinearity::Identity}};
const std::map<std::string, OptimizerChoice> kOptimizerNames{
    {"muon", OptimizerChoice::Muon},
    {"adamw", OptimizerChoice::AdamW},
    {"hybrid", OptimizerChoice::Hybrid}};
const std::map<std::string, Schedule> kScheduleNames{
    {"constant", Schedule::Constant},
    {"linear", Schedule::Linear},
    {"cosine", Schedule::Cosine}};

std::string name_of(TaskKind k) {
    return k == TaskKind::TeacherStudentRegression ? "regression" : "classification";
}
std::string name_of(Nonlinearity n) {
    switch (n) {
        case Nonlinearity::Tanh: return "tanh";
        case Nonlinearity::Relu: return "relu";
        case Nonlinearity::Identity: return "identity";
    }
    return "?";
}
std::string name_of(OptimizerChoice o) {
    switch (o) {
        case OptimizerChoice::Muon: return "muon";
        case OptimizerChoice::AdamW: return "adamw";
        case OptimizerChoice::Hybrid: return "hybrid";
    }
    return "?";
}
std::string name_of(Schedule s) {
    switch (s) {
        case Schedule::Constant: return "constant";
        case Schedule::Linear: return "linear";
        case Schedule::Cosine: return "cosine";
    }
    return "?";
}
std::string name_of(const ScalingMode& m) {
    switch (m.variant) {
        case ScalingVariant::AdjustedLR: return "adjusted_lr";
        case ScalingVariant::UpdateNorm: return "update_norm";
        case ScalingVariant::BaselineSqrtH:
            return "baseline_sqrt_h:" + std::to_string(m.hidden);
    }
    return "?";
}

void add_train_options(CLI::App* sub, TrainCliOpts& o, bool with_optimizer_choice) {
    sub->add_option("--dims", o.dims,
                    "comma-separated layer widths (input first)")
        ->capture_default_str();
    sub->add_option("--task", o.task, "training task")
        ->transform(CLI::CheckedTransformer(kTaskNames, CLI::ignore_case))
        ->default_str("regression");
    sub->add_option("--nonlinearity", o.nonlinearity, "hidden nonlinearity")
        ->transform(CLI::CheckedTransformer(kNonlinNames, CLI::ignore_case))
        ->default_str("tanh");
    if (with_optimizer_choice) {
        sub->add_option("--optimizer", o.optimizer,
                        "muon routes matrices through the orthogonalizing "
                        "update and vectors through adamw")
            ->transform(CLI::CheckedTransformer(kOptimizerNames, CLI::ignore_case))
            ->default_str("muon");
    }
    sub->add_option("--schedule", o.schedule, "learning-rate schedule")
        ->transform(CLI::CheckedTransformer(kScheduleNames, CLI::ignore_case))
        ->default_str("constant");
    sub->add_option("--steps", o.steps, "optimizer steps")->capture_default_str();
    sub->add_option("--dataset-size", o.dataset_size, "synthetic dataset rows")
        ->capture_default_str();
    sub->add_option("--batch-size", o.batch_size, "minibatch rows (0 = full batch)")
        ->capture_default_str();
    sub->add_option("--noise", o.noise, "target noise scale")->capture_default_str();
    sub->add_option("--lr", o.lr, "override learning rate for both optimizers");
    sub->add_option("--weight-decay", o.weight_decay,
                    "override weight decay for both optimizers");
    sub->add_option("--config", o.config_path,
                    "optimizer key-value config file (fail-closed)");
    sub->add_option("--seed", o.seed, "run seed")->required();
}

struct ResolvedTrain {
    ToyModelConfig arch;
    TaskSpec task;
    TrainSpec spec;
};

ResolvedTrain resolve(const TrainCliOpts& o, const CLI::App* sub) {
    ResolvedTrain r;
    r.arch.dims = parse_dims(o.dims);
    r.arch.nonlinearity = o.nonlinearity;
    r.arch.seed = o.seed;

    r.task.kind = o.task;
    r.task.input_dim = r.arch.dims.front();
    if (o.dataset_size < 2) throw ValueError("--dataset-size must be >= 2");
    r.task.dataset_size = static_cast<std::size_t>(o.dataset_size);
    r.task.noise = o.noise;
    r.task.seed = o.seed;

    r.spec.optimizer = o.optimizer;
    r.spec.schedule = o.schedule;
    r.spec.steps = o.steps;
    if (o.batch_size < 0) throw ValueError("--batch-size must be >= 0");
    r.spec.batch_size = static_cast<std::size_t>(o.batch_size);
    if (!o.config_path.empty()) {
        const OptimizerFileConfig cfg = load_optimizer_config(o.config_path);
        r.spec.muon = cfg.muon;
        r.spec.adamw = cfg.adamw;
    }
    if (sub->count("--lr") > 0) {
        r.spec.muon.lr = o.lr;
        r.spec.adamw.lr = o.lr;
    }
    if (sub->count("--weight-decay") > 0) {
        r.spec.muon.weight_decay = o.weight_decay;
        r.spec.adamw.weight_decay = o.weight_decay;
    }
    validate(r.spec.muon);
    validate(r.spec.adamw);
    return r;
}

std::string run_config_text(const TrainCliOpts& o, const ResolvedTrain& r) {
    std::string t = "# resolved run configuration\n";
    t += "seed = " + std::to_string(o.seed) + "\n";
    t += "dims = " + dims_to_string(r.arch.dims) + "\n";
    t += "task = " + name_of(r.task.kind) + "\n";
    t += "nonlinearity = " + name_of(r.arch.nonlinearity) + "\n";
    t += "optimizer = " + name_of(r.spec.optimizer) + "\n";
    t += "schedule = " + name_of(r.spec.schedule) + "\n";
    t += "steps = " + std::to_string(r.spec.steps) + "\n";
    t += "dataset_size = " + std::to_string(r.task.dataset_size) + "\n";
    t += "batch_size = " + std::to_string(r.spec.batch_size) + "\n";
    t += "noise = " + format_g17(r.task.noise) + "\n";
    t += "lr = " + format_g17(r.spec.muon.lr) + "\n";
    t += "momentum = " + format_g17(r.spec.muon.momentum) + "\n";
    t += "weight_decay = " + format_g17(r.spec.muon.weight_decay) + "\n";
    t += "ns_steps = " + std::to_string(r.spec.muon.ns.steps) + "\n";
    t += "scaling_mode = " + name_of(r.spec.muon.scaling) + "\n";
    t += "rms_target = " + format_g17(r.spec.muon.scaling.rms_target) + "\n";
    t += "nesterov = " + std::string(r.spec.muon.nesterov ? "true" : "false") + "\n";
    t += "betas = " + format_g17(r.spec.adamw.beta1) + "," +
         format_g17(r.spec.adamw.beta2) + "\n";
    t += "epsilon = " + format_g17(r.spec.adamw.epsilon) + "\n";
    return t;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_orthogonalize(const GlobalOpts& g, const std::string& input, long steps,
                      std::string output) {
    if (steps < 0 || steps > 1000000) {
        throw ValueError("--steps must be in [0, 1000000]");
    }
    const Matrix m = read_matrix_csv(input);
    NsConfig cfg;
    cfg.steps = static_cast<int>(steps);
    const Matrix o = newton_schulz(m, cfg);

    if (output.empty()) output = resolve_out(g, "orthogonalized.csv").string();
    write_matrix_csv(output, o);

    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["steps"] = steps;
    j["singular_values_before"] = sigma_json(svd(m).singular_values, g.precision);
    j["singular_values_after"] = sigma_json(svd(o).singular_values, g.precision);
    j["output_csv"] = output;
    write_text(output + ".json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_train(const GlobalOpts& g, const TrainCliOpts& o, const CLI::App* sub,
              std::string metrics_path) {
    const ResolvedTrain r = resolve(o, sub);
    const ToyModel model = make_toy_model(r.arch);
    const TrainResult res = train(model, r.task, r.spec);

    if (metrics_path.empty()) metrics_path = resolve_out(g, "metrics.csv").string();
    write_text(metrics_path, res.log.to_csv());
    const std::string config_path = metrics_path + ".config";
    write_text(config_path, run_config_text(o, r));

    json j;
    j["steps"] = r.spec.steps;
    j["param_count"] = param_count(res.model);
    j["final_train_loss"] = emitted(res.log.final_train_loss(), g.precision);
    j["final_val_loss"] = emitted(res.log.final_val_loss(), g.precision);
    j["metrics_csv"] = metrics_path;
    j["run_config"] = config_path;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_ablate_wd(const GlobalOpts& g, const TrainCliOpts& o, const CLI::App* sub,
                  double lambda_off, double lambda_on, long reps) {
    if (reps < 1) throw ValueError("--reps must be >= 1");
    ResolvedTrain r = resolve(o, sub);

    json rep_list = json::array();
    long better_with_decay = 0;
    for (long rep = 0; rep < reps; ++rep) {
        r.arch.seed = derive_seed(o.seed, static_cast<std::uint64_t>(2 * rep));
        r.task.seed = derive_seed(o.seed, static_cast<std::uint64_t>(2 * rep + 1));
        const AblationReport report =
            ablation_weight_decay(r.arch, r.task, r.spec, lambda_off, lambda_on);
        if (rep == 0) {
            write_text(resolve_out(g, "ablate_wd_nodecay.csv"),
                       report.no_decay.log.to_csv());
            write_text(resolve_out(g, "ablate_wd_decay.csv"),
                       report.with_decay.log.to_csv());
        }
        json jr;
        jr["seed"] = r.arch.seed;
        jr["no_decay_max_weight_rms"] =
            emitted(report.no_decay.terminal_max_weight_rms, g.precision);
        jr["with_decay_max_weight_rms"] =
            emitted(report.with_decay.terminal_max_weight_rms, g.precision);
        jr["no_decay_final_val_loss"] =
            emitted(report.no_decay.final_val_loss, g.precision);
        jr["with_decay_final_val_loss"] =
            emitted(report.with_decay.final_val_loss, g.precision);
        if (report.with_decay.final_val_loss < report.no_decay.final_val_loss) {
            ++better_with_decay;
        }
        rep_list.push_back(std::move(jr));
    }

    json j;
    j["lambda_off"] = lambda_off;
    j["lambda_on"] = lambda_on;
    j["reps"] = rep_list;
    j["val_loss_better_with_decay"] = better_with_decay;
    j["reps_total"] = reps;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_dist_check(const GlobalOpts& g, int dp, const std::string& shape,
                   long steps, std::uint64_t seed) {
    if (dp < 1) throw ValueError("--dp must be >= 1");
    if (steps < 1) throw ValueError("--steps must be >= 1");
    const auto [rows, cols] = parse_shape(shape);

    const Matrix init = Rng(derive_seed(seed, 0)).normal_matrix(rows, cols);
    DpWorld muon_world(dp), adamw_world(dp);
    muon_world.add_param("w", init);
    adamw_world.add_param("w", init);
    ParamState single = make_param("w", ParamKind::MatrixParam, init);

    const MuonConfig mcfg;
    const AdamWConfig acfg;
    double max_dev = 0.0;
    for (long step = 0; step < steps; ++step) {
        std::vector<Matrix> grads;
        Matrix total(rows, cols, 0.0);
        for (int rank = 0; rank < dp; ++rank) {
            const std::uint64_t stream =
                1 + static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(dp) +
                static_cast<std::uint64_t>(rank);
            grads.push_back(Rng(derive_seed(seed, stream)).normal_matrix(rows, cols));
            total += grads.back();
        }
        std::map<std::string, std::vector<Matrix>> gm;
        gm["w"] = std::move(grads);
        distributed_muon_step(muon_world, gm, mcfg, mcfg.lr);
        distributed_adamw_step(adamw_world, gm, acfg, acfg.lr);
        single = muon_step(single, total, mcfg, mcfg.lr).first;

        const double dev = max_abs_diff(muon_world.weight("w"), single.weight) /
                           max_abs(single.weight);
        max_dev = std::max(max_dev, dev);
    }

    json j;
    j["dp"] = dp;
    j["rows"] = rows;
    j["cols"] = cols;
    j["steps"] = steps;
    j["max_deviation"] = emitted(max_dev, g.precision);
    j["comm_ratio"] =
        emitted(communication_ratio(muon_world, adamw_world), g.precision);
    j["ledger_bytes"] = {
        {"reduce_scatter", muon_world.ledger().reduce_scatter_bytes},
        {"gather", muon_world.ledger().gather_bytes},
        {"all_gather", muon_world.ledger().all_gather_bytes},
    };
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_entropy(const GlobalOpts& g, const std::string& checkpoint,
                const std::string& groups_path) {
    if (!fs::is_directory(checkpoint)) {
        throw ParseError("--checkpoint is not a directory: " + checkpoint);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(checkpoint)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError("no .csv weights in " + checkpoint);

    std::vector<std::pair<std::string, Matrix>> weights;
    std::set<std::string> names;
    for (const fs::path& f : files) {
        weights.emplace_back(f.stem().string(), read_matrix_csv(f.string()));
        names.insert(f.stem().string());
    }
    std::map<std::string, std::string> groups =
        read_kv_config_file(groups_path, names);

    const GroupedSpectra rep = spectrum_report(weights, groups);

    std::string csv = "param,group,entropy\n";
    for (const SpectrumReport& p : rep.per_param) {
        csv += p.name + "," + p.group + "," + fmt(p.entropy, g.precision) + "\n";
        std::string spectrum;
        for (double s : p.normalized_singular_values) {
            spectrum += fmt(s, g.precision) + "\n";
        }
        write_text(resolve_out(g, "spectrum_" + p.name + ".csv"), spectrum);
    }
    const fs::path entropy_csv = resolve_out(g, "entropy.csv");
    write_text(entropy_csv, csv);

    json j;
    j["params"] = rep.per_param.size();
    j["entropy_csv"] = entropy_csv.string();
    json groups_json;
    for (const auto& [group, h] : rep.group_entropy) {
        groups_json[group] = emitted(h, g.precision);
    }
    j["group_entropy"] = groups_json;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_fit_scaling(const GlobalOpts& g, const std::string& input) {
    const Matrix table = read_matrix_csv(input);
    if (table.cols() != 2) {
        throw ParseError("--input must be a 2-column CSV of c,y rows");
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        points.emplace_back(table(i, 0), table(i, 1));
    }
    const FitResult fit = fit_power_law(points);

    json j;
    j["coefficient"] = emitted(fit.law.coefficient, g.precision);
    j["exponent"] = emitted(fit.law.exponent, g.precision);
    j["log_residual_rms"] = emitted(fit.log_residual_rms, g.precision);
    j["n_points"] = fit.n_points;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_gate_factor(const GlobalOpts& g, long experts, long topk, long iters,
                    std::uint64_t seed) {
    GateConfig cfg;
    cfg.num_experts = experts;
    cfg.topk = topk;
    cfg.iter_times = iters;
    cfg.seed = seed;
    const double factor = gate_scaling_factor(cfg);

    json j;
    j["experts"] = experts;
    j["topk"] = topk;
    j["iters"] = iters;
    j["seed"] = seed;
    j["factor"] = emitted(factor, g.precision);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_compare(const GlobalOpts& g, const TrainCliOpts& o, const CLI::App* sub) {
    const ResolvedTrain r = resolve(o, sub);
    const CompareReport rep = compare_optimizers(r.arch, r.task, r.spec, r.spec);

    const fs::path muon_csv = resolve_out(g, "compare_muon.csv");
    const fs::path adamw_csv = resolve_out(g, "compare_adamw.csv");
    write_text(muon_csv, rep.muon.log.to_csv());
    write_text(adamw_csv, rep.adamw.log.to_csv());

    json j;
    j["note"] = "descriptive toy-scale comparison; nothing is asserted about "
                "which optimizer wins";
    j["muon"] = {
        {"final_train_loss", emitted(rep.muon.final_train_loss, g.precision)},
        {"final_val_loss", emitted(rep.muon.final_val_loss, g.precision)},
        {"metrics_csv", muon_csv.string()},
    };
    j["adamw"] = {
        {"final_train_loss", emitted(rep.adamw.final_train_loss, g.precision)},
        {"final_val_loss", emitted(rep.adamw.final_val_loss, g.precision)},
        {"metrics_csv", adamw_csv.string()},
    };
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonalized-momentum optimizer toolkit"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out-dir", g.out_dir, "directory for emitted files")
        ->capture_default_str();
    app.add_option("--precision", g.precision,
                   "significant digits in emitted numbers (17 = exact)")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();

    // orthogonalize
    auto* ortho = app.add_subcommand(
        "orthogonalize", "apply the quintic orthogonalizing iteration to a CSV matrix");
    std::string ortho_input, ortho_output;
    long ortho_steps = NsConfig{}.steps;
    ortho->add_option("--input", ortho_input, "input matrix CSV")->required();
    ortho->add_option("--steps", ortho_steps, "iteration count")->capture_default_str();
    ortho->add_option("--output", ortho_output,
                      "result CSV path (default <out-dir>/orthogonalized.csv)");

    // train
    auto* tr = app.add_subcommand("train", "train a toy model and log metrics");
    TrainCliOpts tr_opts;
    add_train_options(tr, tr_opts, /*with_optimizer_choice=*/true);
    std::string tr_metrics;
    tr->add_option("--metrics", tr_metrics,
                   "metrics CSV path (default <out-dir>/metrics.csv)");

    // ablate-wd
    auto* ab = app.add_subcommand(
        "ablate-wd", "weight-decay on/off ablation from one initialization");
    TrainCliOpts ab_opts;
    ab_opts.steps = 200;
    add_train_options(ab, ab_opts, /*with_optimizer_choice=*/false);
    double ab_off = 0.0, ab_on = 0.1;
    long ab_reps = 1;
    ab->add_option("--lambda-off", ab_off, "weight decay for the control arm")
        ->capture_default_str();
    ab->add_option("--lambda-on", ab_on, "weight decay for the treatment arm")
        ->capture_default_str();
    ab->add_option("--reps", ab_reps, "independent seeds to aggregate")
        ->capture_default_str();

    // dist-check
    auto* dc = app.add_subcommand(
        "dist-check", "sharded-optimizer equivalence and byte-ledger report");
    int dc_dp = 4;
    std::string dc_shape = "32x48";
    long dc_steps = 5;
    std::uint64_t dc_seed = 0;
    dc->add_option("--dp", dc_dp, "data-parallel world size")->capture_default_str();
    dc->add_option("--shape", dc_shape, "parameter shape AxB")->capture_default_str();
    dc->add_option("--steps", dc_steps, "optimizer steps")->capture_default_str();
    dc->add_option("--seed", dc_seed, "gradient stream seed")->required();

    // entropy
    auto* en = app.add_subcommand(
        "entropy", "singular-value entropy report over a directory of weight CSVs");
    std::string en_checkpoint, en_groups;
    en->add_option("--checkpoint", en_checkpoint, "directory of <param>.csv weights")
        ->required();
    en->add_option("--groups", en_groups, "key-value file mapping param -> group")
        ->required();

    // fit-scaling
    auto* fitc = app.add_subcommand(
        "fit-scaling", "fit y = A * c^alpha to a 2-column CSV of (c, y) rows");
    std::string fit_input;
    fitc->add_option("--input", fit_input, "points CSV")->required();

    // gate-factor
    auto* gf = app.add_subcommand(
        "gate-factor", "Monte Carlo top-k gate rescaling factor");
    long gf_experts = 64, gf_topk = 6, gf_iters = 100000;
    std::uint64_t gf_seed = 0;
    gf->add_option("--experts", gf_experts, "number of experts")->capture_default_str();
    gf->add_option("--topk", gf_topk, "experts kept per token")->capture_default_str();
    gf->add_option("--iters", gf_iters, "Monte Carlo trials")->capture_default_str();
    gf->add_option("--seed", gf_seed, "trial stream seed")->required();

    // compare-optimizers
    auto* cmp = app.add_subcommand(
        "compare-optimizers",
        "matched-initialization muon-vs-adamw training curves (descriptive only)");
    TrainCliOpts cmp_opts;
    add_train_options(cmp, cmp_opts, /*with_optimizer_choice=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ortho->parsed()) {
            return cmd_orthogonalize(g, ortho_input, ortho_steps, ortho_output);
        }
        if (tr->parsed()) return cmd_train(g, tr_opts, tr, tr_metrics);
        if (ab->parsed()) return cmd_ablate_wd(g, ab_opts, ab, ab_off, ab_on, ab_reps);
        if (dc->parsed()) return cmd_dist_check(g, dc_dp, dc_shape, dc_steps, dc_seed);
        if (en->parsed()) return cmd_entropy(g, en_checkpoint, en_groups);
        if (fitc->parsed()) return cmd_fit_scaling(g, fit_input);
        if (gf->parsed()) return cmd_gate_factor(g, gf_experts, gf_topk, gf_iters, gf_seed);
        if (cmp->parsed()) return cmd_compare(g, cmp_opts, cmp);
        std::cerr << json{{"error", "no subcommand"}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
