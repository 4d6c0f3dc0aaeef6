#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ksel/protocol.hpp"

namespace ksel {

enum class SimMode : std::uint8_t { Naive, Fast };

constexpr std::string_view sim_mode_name(SimMode mode) {
    return mode == SimMode::Naive ? "naive" : "fast";
}

std::optional<SimMode> sim_mode_from_name(std::string_view name);

/// One simulation run: the makespan is the 1-based index of the slot in
/// which the last of the k messages is delivered, counting every slot.
struct TrialResult {
    Variant protocol = Variant::OneFailAdaptive;
    std::uint64_t k = 0;
    std::uint64_t seed = 0;
    std::uint32_t run_index = 0;
    SimMode mode = SimMode::Fast;
    std::uint64_t makespan_slots = 0;

    double ratio() const { return static_cast<double>(makespan_slots) / static_cast<double>(k); }
};

struct AggregateStats {
    Variant protocol = Variant::OneFailAdaptive;
    std::uint64_t k = 0;
    std::uint64_t runs = 0;
    double mean_steps = 0.0;
    double mean_ratio = 0.0;  // mean_steps / k, exactly
    double std_dev = 0.0;     // sample standard deviation of makespan
};

/// Deterministic per-trial seed; independent of execution order and thread
/// count, so campaigns are reproducible under any parallel schedule.
constexpr std::uint64_t trial_seed(std::uint64_t master_seed, Variant protocol, std::uint64_t k,
                                   std::uint32_t run_index) {
    return derive_stream_seed(master_seed,
                              {static_cast<std::uint64_t>(protocol), k, run_index});
}

/// Simulates k per-node protocol instances slot by slot against the shared
/// channel until every node has delivered. Per-node generators are derived
/// from (seed, node id).
TrialResult run_trial_naive(const ProtocolParams& params, std::uint64_t k, std::uint64_t seed);

/// Exact-distribution acceleration. One-fail Adaptive keeps a single shared
/// state (all active nodes provably hold identical state) and draws the
/// transmitter count as one Binomial(active, p) sample per slot; the window
/// protocols run one balls-into-bins round per window. The makespan
/// distribution is identical to run_trial_naive's.
TrialResult run_trial_fast(const ProtocolParams& params, std::uint64_t k, std::uint64_t seed);

struct ExperimentEntry {
    ProtocolParams params;
    std::vector<std::uint64_t> k_values;
    std::uint32_t runs = 10;
};

struct ExperimentConfig {
    std::vector<ExperimentEntry> entries;
    std::uint64_t master_seed = 42;
    SimMode mode = SimMode::Fast;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct EntryError {
    std::size_t entry_index = 0;
    std::string message;
};

struct ExperimentResult {
    std::vector<TrialResult> trials;          // campaign order: entry, k, run
    std::vector<AggregateStats> aggregates;   // one row per (entry, k)
    std::vector<EntryError> errors;           // invalid entries, skipped
};

/// Runs every (entry, k, run) trial, in parallel up to config.threads, and
/// aggregates per (entry, k). Output is independent of scheduling; invalid
/// entries are reported in `errors` without aborting the rest.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Groups trials by (protocol, k) in first-appearance order and recomputes
/// the aggregate rows; used both by run_experiment and by the CSV
/// re-aggregation path.
std::vector<AggregateStats> aggregate_trials(std::span<const TrialResult> trials);

}  // namespace ksel
