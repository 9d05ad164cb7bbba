#include "muonlab/dist.hpp"

#include <algorithm>
#include <cmath>

#include "muonlab/errors.hpp"
#include "muonlab/newton_schulz.hpp"

namespace muonlab {

namespace {

std::vector<int> rank_sequence(int dp, RankOrder order) {
    std::vector<int> seq(dp);
    for (int r = 0; r < dp; ++r) {
        seq[r] = order == RankOrder::Forward ? r : dp - 1 - r;
    }
    return seq;
}

double shard_rms(const std::vector<double>& u) {
    if (u.empty()) return 0.0;
    double acc = 0.0;
    for (double x : u) acc += x * x;
    return std::sqrt(acc / static_cast<double>(u.size()));
}

}  // namespace

DpWorld::DpWorld(int dp_size, WireWidths widths)
    : dp_size_(dp_size), widths_(widths) {
    if (dp_size < 1) throw ValueError("DpWorld: dp_size must be >= 1");
    if (!(widths.grad_width > 0.0) || !(widths.gather_width >= 0.0) ||
        !(widths.param_width > 0.0)) {
        throw ValueError("DpWorld: wire widths must be positive "
                         "(gather_width may be zero)");
    }
}

void DpWorld::add_param(const std::string& name, const Matrix& init) {
    if (init.empty()) throw ShapeError("DpWorld::add_param: empty matrix");
    if (params_.count(name)) {
        throw ValueError("DpWorld::add_param: duplicate param '" + name + "'");
    }
    DistParam p;
    p.rows = init.rows();
    p.cols = init.cols();
    p.weight = init;

    // Row-major flatten, split into dp equal ceil-sized chunks; trailing
    // ranks own whatever real elements remain (possibly none).
    const std::size_t total = init.size();
    const std::size_t chunk = (total + dp_size_ - 1) / dp_size_;
    p.shards.resize(dp_size_);
    p.master.resize(dp_size_);
    p.step.assign(dp_size_, 0);
    for (int r = 0; r < dp_size_; ++r) {
        const std::size_t begin = std::min(static_cast<std::size_t>(r) * chunk, total);
        const std::size_t end = std::min(begin + chunk, total);
        p.shards[r] = {begin, end - begin};
        p.master[r].assign(init.data() + begin, init.data() + end);
    }
    params_[name] = std::move(p);
}

DpWorld::DistParam& DpWorld::find(const std::string& name) {
    const auto it = params_.find(name);
    if (it == params_.end()) throw ValueError("DpWorld: unknown param '" + name + "'");
    return it->second;
}

const DpWorld::DistParam& DpWorld::find(const std::string& name) const {
    const auto it = params_.find(name);
    if (it == params_.end()) throw ValueError("DpWorld: unknown param '" + name + "'");
    return it->second;
}

const Matrix& DpWorld::weight(const std::string& name) const {
    return find(name).weight;
}

std::vector<std::string> DpWorld::param_names() const {
    std::vector<std::string> out;
    out.reserve(params_.size());
    for (const auto& [name, p] : params_) out.push_back(name);
    return out;
}

const std::vector<ShardRange>& DpWorld::shard_map(const std::string& name) const {
    return find(name).shards;
}

std::size_t DpWorld::optimizer_state_elements() const {
    std::size_t count = 0;
    for (const auto& [name, p] : params_) {
        for (const auto& s : p.momentum) count += s.size();
        for (const auto& s : p.m) count += s.size();
        for (const auto& s : p.v) count += s.size();
    }
    return count;
}

Shards reduce_scatter(const std::vector<Matrix>& per_rank_full, DpWorld& world,
                      const std::string& param) {
    auto& p = world.find(param);
    if (per_rank_full.size() != static_cast<std::size_t>(world.dp_size_)) {
        throw ShapeError("reduce_scatter: expected one gradient per rank");
    }
    for (const Matrix& g : per_rank_full) {
        if (g.rows() != p.rows || g.cols() != p.cols) {
            throw ShapeError("reduce_scatter: gradient shape mismatch for '" +
                             param + "'");
        }
    }

    const std::size_t total = p.rows * p.cols;
    std::vector<double> sum(total, 0.0);
    // Fixed reduction order: rank 0 first, then 1, ... so every simulation of
    // the same inputs sums identically.
    for (const Matrix& g : per_rank_full) {
        const double* src = g.data();
        for (std::size_t i = 0; i < total; ++i) sum[i] += src[i];
    }

    Shards out(world.dp_size_);
    for (int r = 0; r < world.dp_size_; ++r) {
        const ShardRange& s = p.shards[r];
        out[r].assign(sum.begin() + s.offset, sum.begin() + s.offset + s.length);
    }
    world.ledger_.reduce_scatter_bytes +=
        world.widths_.grad_width * static_cast<double>(total);
    return out;
}

namespace {

Matrix assemble(const Shards& shards, const std::vector<ShardRange>& map,
                std::size_t rows, std::size_t cols, const char* op) {
    if (shards.size() != map.size()) {
        throw ShapeError(std::string(op) + ": expected one shard per rank");
    }
    Matrix full(rows, cols);
    for (std::size_t r = 0; r < shards.size(); ++r) {
        if (shards[r].size() != map[r].length) {
            throw ShapeError(std::string(op) + ": missing or mis-sized shard for rank " +
                             std::to_string(r));
        }
        std::copy(shards[r].begin(), shards[r].end(), full.data() + map[r].offset);
    }
    return full;
}

}  // namespace

Matrix gather(const Shards& shards, DpWorld& world, const std::string& param) {
    auto& p = world.find(param);
    Matrix full = assemble(shards, p.shards, p.rows, p.cols, "gather");
    const double total = static_cast<double>(p.rows * p.cols);
    const double dp = static_cast<double>(world.dp_size_);
    // (dp-1)/dp of the matrix actually crosses the wire; the local shard is
    // already resident. Kept in this exact expression order so dyadic dp
    // values produce bit-exact ledger entries.
    world.ledger_.gather_bytes += world.widths_.gather_width * total * (dp - 1.0) / dp;
    return full;
}

std::vector<Matrix> all_gather(const Shards& shards, DpWorld& world,
                               const std::string& param) {
    auto& p = world.find(param);
    Matrix full = assemble(shards, p.shards, p.rows, p.cols, "all_gather");
    world.ledger_.all_gather_bytes +=
        world.widths_.param_width * static_cast<double>(p.rows * p.cols);
    std::vector<Matrix> out(world.dp_size_, full);
    return out;
}

std::map<std::string, std::vector<double>> distributed_muon_step(
    DpWorld& world, const std::map<std::string, std::vector<Matrix>>& per_rank_grads,
    const MuonConfig& cfg, double step_lr, RankOrder order,
    const Orthogonalizer& ortho) {
    validate(cfg);
    if (!(step_lr >= 0.0) || !std::isfinite(step_lr)) {
        throw ValueError("distributed_muon_step: step_lr must be finite and >= 0");
    }

    const int dp = world.dp_size_;
    const auto seq = rank_sequence(dp, order);
    std::map<std::string, std::vector<double>> stats;

    for (const auto& [name, grads] : per_rank_grads) {
        auto& p = world.find(name);
        for (const Matrix& g : grads) {
            if (!all_finite(g)) {
                throw NumericsError("distributed_muon_step: non-finite gradient for '" +
                                    name + "'");
            }
        }

        // Line 2: g = reduce_scatter(G).
        Shards g = reduce_scatter(grads, world, name);

        // Lines 3-4: shard-local momentum; the Nesterov combination is
        // elementwise, so applying it on shards matches the full matrix.
        if (p.momentum.empty()) {
            p.momentum.resize(dp);
            for (int r = 0; r < dp; ++r) p.momentum[r].assign(p.shards[r].length, 0.0);
        }
        Shards ortho_in(dp);
        for (int r : seq) {
            auto& mom = p.momentum[r];
            const auto& gr = g[r];
            ortho_in[r].resize(gr.size());
            for (std::size_t i = 0; i < gr.size(); ++i) {
                mom[i] = cfg.momentum * mom[i] + gr[i];
                ortho_in[r][i] = cfg.nesterov ? cfg.momentum * mom[i] + gr[i] : mom[i];
            }
        }

        // Lines 5-6: gather the momentum-processed shards into a full matrix.
        Matrix full_input = gather(ortho_in, world, name);

        // Lines 7-11: every rank owning real elements redundantly
        // orthogonalizes the full matrix, keeps only its own partition of the
        // scaled update, and applies it (plus decoupled weight decay) to its
        // master shard. Ranks whose shard is pure padding own nothing and are
        // skipped; their update RMS is 0.
        std::vector<double> rms_per_rank(dp, 0.0);
        const bool zero_input = frobenius_norm(full_input) == 0.0;
        for (int r : seq) {
            const ShardRange& range = p.shards[r];
            if (range.length == 0) continue;
            std::vector<double> u(range.length, 0.0);
            if (!zero_input) {
                Matrix o = ortho ? ortho(full_input, cfg.ns)
                                 : newton_schulz(full_input, cfg.ns);
                Matrix update = scale(o, p.rows, p.cols, cfg.scaling);
                const double* src = update.data() + range.offset;
                std::copy(src, src + range.length, u.begin());
            }
            rms_per_rank[r] = shard_rms(u);
            auto& master = p.master[r];
            for (std::size_t i = 0; i < range.length; ++i) {
                master[i] -= step_lr * (u[i] + cfg.weight_decay * master[i]);
            }
        }

        // Line 12: all-gather the updated parameter back to full shape. The
        // world keeps one replicated copy rather than dp physical clones.
        p.weight = assemble(p.master, p.shards, p.rows, p.cols, "all_gather");
        world.ledger_.all_gather_bytes +=
            world.widths_.param_width * static_cast<double>(p.rows * p.cols);

        stats[name] = std::move(rms_per_rank);
    }
    return stats;
}

std::map<std::string, std::vector<double>> distributed_adamw_step(
    DpWorld& world, const std::map<std::string, std::vector<Matrix>>& per_rank_grads,
    const AdamWConfig& cfg, double step_lr, RankOrder order) {
    validate(cfg);
    if (!(step_lr >= 0.0) || !std::isfinite(step_lr)) {
        throw ValueError("distributed_adamw_step: step_lr must be finite and >= 0");
    }

    const int dp = world.dp_size_;
    const auto seq = rank_sequence(dp, order);
    std::map<std::string, std::vector<double>> stats;

    for (const auto& [name, grads] : per_rank_grads) {
        auto& p = world.find(name);
        for (const Matrix& g : grads) {
            if (!all_finite(g)) {
                throw NumericsError("distributed_adamw_step: non-finite gradient for '" +
                                    name + "'");
            }
        }

        Shards g = reduce_scatter(grads, world, name);

        if (p.m.empty()) {
            p.m.resize(dp);
            p.v.resize(dp);
            for (int r = 0; r < dp; ++r) {
                p.m[r].assign(p.shards[r].length, 0.0);
                p.v[r].assign(p.shards[r].length, 0.0);
            }
        }

        std::vector<double> rms_per_rank(dp, 0.0);
        for (int r : seq) {
            if (p.shards[r].length == 0) continue;
            auto& m = p.m[r];
            auto& v = p.v[r];
            auto& master = p.master[r];
            p.step[r] += 1;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.step[r]));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.step[r]));
            std::vector<double> u(g[r].size());
            for (std::size_t i = 0; i < g[r].size(); ++i) {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[r][i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[r][i] * g[r][i];
                u[i] = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
            }
            rms_per_rank[r] = shard_rms(u);
            for (std::size_t i = 0; i < u.size(); ++i) {
                master[i] -= step_lr * (u[i] + cfg.weight_decay * master[i]);
            }
        }

        p.weight = assemble(p.master, p.shards, p.rows, p.cols, "all_gather");
        world.ledger_.all_gather_bytes +=
            world.widths_.param_width * static_cast<double>(p.rows * p.cols);
        stats[name] = std::move(rms_per_rank);
    }
    return stats;
}

double communication_ratio(const DpWorld& muon_world, const DpWorld& adamw_world) {
    const double muon_total = muon_world.ledger().total();
    const double adamw_total = adamw_world.ledger().total();
    if (muon_total <= 0.0 || adamw_total <= 0.0) {
        throw ValueError("communication_ratio: a world has an empty byte ledger");
    }
    return muon_total / adamw_total;
}

}  // namespace muonlab
