#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "muonlab/matrix.hpp"
#include "muonlab/optim.hpp"

namespace muonlab {

// Bytes-per-element for each collective on the wire. These affect only the
// byte ledger, never the arithmetic (which is all double).
struct WireWidths {
    double grad_width = 4.0;    // reduce-scatter of gradients
    double gather_width = 2.0;  // gather of momentum-processed shards
    double param_width = 4.0;   // all-gather of updated parameters
};

// Half-open slice of a row-major-flattened parameter owned by one rank.
// Lengths are real element counts; the conceptual zero padding that rounds
// every chunk up to the same size never appears in updates or statistics.
struct ShardRange {
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct ByteLedger {
    double reduce_scatter_bytes = 0.0;
    double gather_bytes = 0.0;
    double all_gather_bytes = 0.0;
    double total() const {
        return reduce_scatter_bytes + gather_bytes + all_gather_bytes;
    }
};

using Shards = std::vector<std::vector<double>>;  // one vector per rank

// Whether per-rank phases run 0..dp-1 or dp-1..0. Results must not depend on
// this; it exists so tests can prove scheduling independence.
enum class RankOrder { Forward, Reverse };

// An in-process data-parallel world: dp ranks, each owning one shard of
// every registered parameter's optimizer state and master weight. Collective
// operations are the only way data crosses ranks, and each one adds to the
// byte ledger.
class DpWorld {
public:
    explicit DpWorld(int dp_size, WireWidths widths = {});

    void add_param(const std::string& name, const Matrix& init);

    int dp_size() const { return dp_size_; }
    const WireWidths& widths() const { return widths_; }
    const ByteLedger& ledger() const { return ledger_; }

    // Replicated full weight (what a forward pass would read).
    const Matrix& weight(const std::string& name) const;
    std::vector<std::string> param_names() const;
    const std::vector<ShardRange>& shard_map(const std::string& name) const;

    // Total optimizer-state elements currently allocated across all ranks
    // and parameters (momentum for Muon worlds, m+v for AdamW worlds).
    std::size_t optimizer_state_elements() const;

private:
    struct DistParam {
        std::size_t rows = 0, cols = 0;
        Matrix weight;                    // replicated copy
        std::vector<ShardRange> shards;   // per rank
        Shards master;                    // per-rank master weight shard
        Shards momentum;                  // Muon state (empty until used)
        Shards m, v;                      // AdamW state (empty until used)
        std::vector<long> step;           // AdamW step counter per rank
    };

    int dp_size_;
    WireWidths widths_;
    ByteLedger ledger_;
    std::map<std::string, DistParam> params_;

    DistParam& find(const std::string& name);
    const DistParam& find(const std::string& name) const;

    friend Shards reduce_scatter(const std::vector<Matrix>&, DpWorld&,
                                 const std::string&);
    friend Matrix gather(const Shards&, DpWorld&, const std::string&);
    friend std::vector<Matrix> all_gather(const Shards&, DpWorld&,
                                          const std::string&);
    friend std::map<std::string, std::vector<double>> distributed_muon_step(
        DpWorld&, const std::map<std::string, std::vector<Matrix>>&,
        const MuonConfig&, double, RankOrder, const Orthogonalizer&);
    friend std::map<std::string, std::vector<double>> distributed_adamw_step(
        DpWorld&, const std::map<std::string, std::vector<Matrix>>&,
        const AdamWConfig&, double, RankOrder);
};

// Sum the per-rank full-shape gradients elementwise (fixed rank order
// 0..dp-1) and hand each rank its own slice of the sum.
// Ledger: += elements * grad_width.
Shards reduce_scatter(const std::vector<Matrix>& per_rank_full, DpWorld& world,
                      const std::string& param);

// Reassemble one full matrix from per-rank shards.
// Ledger: += elements * gather_width * (dp-1)/dp.
Matrix gather(const Shards& shards, DpWorld& world, const std::string& param);

// As gather, replicated to every rank. Ledger: += elements * param_width.
std::vector<Matrix> all_gather(const Shards& shards, DpWorld& world,
                               const std::string& param);

// One full step of data-parallel Muon over every entry of per_rank_grads:
// reduce-scatter gradients, update shard-local momentum, gather the
// momentum-processed shards into a full matrix, orthogonalize it redundantly
// on every rank, keep only the locally owned update partition, apply the
// scaled update plus weight decay to the master shard, and all-gather the
// updated parameter. Returns per-rank update RMS (over real shard elements;
// 0 for an empty shard) for each parameter.
std::map<std::string, std::vector<double>> distributed_muon_step(
    DpWorld& world, const std::map<std::string, std::vector<Matrix>>& per_rank_grads,
    const MuonConfig& cfg, double step_lr, RankOrder order = RankOrder::Forward,
    const Orthogonalizer& ortho = {});

// Data-parallel AdamW baseline: reduce-scatter, shard-local moment update,
// apply to master shard, all-gather. No gather phase (AdamW's update is
// elementwise, so ranks never need the full matrix).
std::map<std::string, std::vector<double>> distributed_adamw_step(
    DpWorld& world, const std::map<std::string, std::vector<Matrix>>& per_rank_grads,
    const AdamWConfig& cfg, double step_lr, RankOrder order = RankOrder::Forward);

// Ratio of cumulative ledger bytes. Both worlds must have traffic recorded.
double communication_ratio(const DpWorld& muon_world, const DpWorld& adamw_world);

}  // namespace muonlab
