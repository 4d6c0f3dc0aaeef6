#include "ksel/engine.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <utility>

#include "ksel/backoff.hpp"
#include "ksel/binomial.hpp"
#include "ksel/channel.hpp"
#include "ksel/ofa.hpp"
#include "ksel/stats.hpp"

namespace ksel {

std::optional<SimMode> sim_mode_from_name(std::string_view name) {
    if (name == "naive") return SimMode::Naive;
    if (name == "fast") return SimMode::Fast;
    return std::nullopt;
}

namespace {

// Per-node stream tag; keeps trial-level draws disjoint from node streams.
constexpr std::uint64_t kFastStreamTag = ~std::uint64_t{0};

template <SlotProtocol Node>
std::uint64_t drive_naive(std::vector<Node>& nodes, std::vector<Rng>& rngs) {
    const auto k = static_cast<NodeId>(nodes.size());
    std::uint64_t active = nodes.size();
    std::uint64_t slot = 0;
    std::vector<NodeId> transmitters;
    std::vector<char> sent(nodes.size(), 0);
    while (active > 0) {
        ++slot;
        transmitters.clear();
        for (NodeId i = 0; i < k; ++i) {
            sent[i] = 0;
            if (nodes[i].terminal()) {
                continue;
            }
            if (nodes[i].decide(slot, rngs[i]).transmit) {
                transmitters.push_back(i);
                sent[i] = 1;
            }
        }
        const SlotOutcome outcome = resolve_slot(transmitters);
        for (NodeId i = 0; i < k; ++i) {
            if (nodes[i].terminal()) {
                continue;
            }
            const Observation obs = observe(i, sent[i] != 0, outcome);
            nodes[i].advance(slot, obs);
            if (obs.kind == Observation::Kind::OwnDelivery) {
                --active;
            }
        }
    }
    return slot;
}

template <SlotProtocol Node, typename MakeNode>
std::uint64_t naive_makespan(std::uint64_t k, std::uint64_t seed, MakeNode make_node) {
    std::vector<Node> nodes;
    std::vector<Rng> rngs;
    nodes.reserve(k);
    rngs.reserve(k);
    for (std::uint64_t node = 0; node < k; ++node) {
        nodes.push_back(make_node());
        rngs.emplace_back(derive_stream_seed(seed, {node}));
    }
    return drive_naive(nodes, rngs);
}

std::uint64_t fast_ofa_makespan(double delta, std::uint64_t k, Rng& rng) {
    OfaState state = ofa_initial_state(delta);
    std::uint64_t active = k;
    std::uint64_t slot = 0;
    for (;;) {
        ++slot;
        const double p = ofa_transmit_probability(state, slot);
        if (sample_binomial(active, p, rng) == 1) {
            if (--active == 0) {
                return slot;
            }
            state = ofa_advance(state, slot, Observation::received_other(0), delta);
        } else {
            state = ofa_advance(state, slot, Observation::nothing(), delta);
        }
    }
}

// One balls-into-bins round per window: each remaining node lands in a
// uniform slot, nodes alone in their slot deliver there.
template <typename Schedule>
std::uint64_t fast_window_makespan(Schedule schedule, std::uint64_t k, Rng& rng) {
    std::uint64_t remaining = k;
    std::uint64_t first_slot_of_window = 0;
    std::vector<std::uint64_t> bins;
    bins.reserve(k);
    for (;;) {
        const std::uint64_t length = schedule.window_length();
        bins.clear();
        for (std::uint64_t ball = 0; ball < remaining; ++ball) {
            bins.push_back(uniform_below(rng, length));
        }
        std::sort(bins.begin(), bins.end());
        std::uint64_t delivered = 0;
        std::uint64_t last_delivery_bin = 0;
        for (std::size_t i = 0; i < bins.size();) {
            std::size_t j = i + 1;
            while (j < bins.size() && bins[j] == bins[i]) {
                ++j;
            }
            if (j - i == 1) {
                ++delivered;
                last_delivery_bin = bins[i];  // sorted, so the final one is the max
            }
            i = j;
        }
        if (delivered == remaining) {
            return first_slot_of_window + last_delivery_bin + 1;
        }
        remaining -= delivered;
        first_slot_of_window += length;
        schedule.next_window();
    }
}

void require_k(std::uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("run_trial: k must be >= 1");
    }
}

}  // namespace

TrialResult run_trial_naive(const ProtocolParams& params, std::uint64_t k, std::uint64_t seed) {
    params.validate();
    require_k(k);
    std::uint64_t makespan = 0;
    switch (params.variant) {
        case Variant::OneFailAdaptive:
            makespan = naive_makespan<OfaNode>(k, seed, [&] { return OfaNode(params.delta); });
            break;
        case Variant::ExpBackOnBackOff:
            makespan = naive_makespan<EboboNode>(
                k, seed, [&] { return EboboNode(EboboSchedule(params.delta)); });
            break;
        case Variant::LoglogIteratedBackoff:
            makespan = naive_makespan<LlibNode>(
                k, seed, [&] { return LlibNode(LlibSchedule(params.r)); });
            break;
    }
    return {params.variant, k, seed, 0, SimMode::Naive, makespan};
}

TrialResult run_trial_fast(const ProtocolParams& params, std::uint64_t k, std::uint64_t seed) {
    params.validate();
    require_k(k);
    Rng rng(derive_stream_seed(seed, {kFastStreamTag}));
    std::uint64_t makespan = 0;
    switch (params.variant) {
        case Variant::OneFailAdaptive:
            makespan = fast_ofa_makespan(params.delta, k, rng);
            break;
        case Variant::ExpBackOnBackOff:
            makespan = fast_window_makespan(EboboSchedule(params.delta), k, rng);
            break;
        case Variant::LoglogIteratedBackoff:
            makespan = fast_window_makespan(LlibSchedule(params.r), k, rng);
            break;
    }
    return {params.variant, k, seed, 0, SimMode::Fast, makespan};
}

std::vector<AggregateStats> aggregate_trials(std::span<const TrialResult> trials) {
    std::vector<AggregateStats> aggregates;
    std::vector<std::vector<double>> makespans;
    for (const TrialResult& trial : trials) {
        std::size_t group = aggregates.size();
        for (std::size_t i = 0; i < aggregates.size(); ++i) {
            if (aggregates[i].protocol == trial.protocol && aggregates[i].k == trial.k) {
                group = i;
                break;
            }
        }
        if (group == aggregates.size()) {
            aggregates.push_back({trial.protocol, trial.k, 0, 0.0, 0.0, 0.0});
            makespans.emplace_back();
        }
        makespans[group].push_back(static_cast<double>(trial.makespan_slots));
    }
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
        aggregates[i].runs = makespans[i].size();
        aggregates[i].mean_steps = mean(makespans[i]);
        aggregates[i].mean_ratio = aggregates[i].mean_steps / static_cast<double>(aggregates[i].k);
        aggregates[i].std_dev = sample_std_dev(makespans[i]);
    }
    return aggregates;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;

    struct Job {
        ProtocolParams params;
        std::uint64_t k = 0;
        std::uint32_t run_index = 0;
        std::uint64_t seed = 0;
    };
    std::vector<Job> jobs;
    std::vector<std::size_t> entry_first_job;  // job offset of each valid entry

    for (std::size_t e = 0; e < config.entries.size(); ++e) {
        const ExperimentEntry& entry = config.entries[e];
        try {
            entry.params.validate();
            if (entry.runs == 0) {
                throw std::invalid_argument("entry: runs must be >= 1");
            }
            if (entry.k_values.empty()) {
                throw std::invalid_argument("entry: k_values must be non-empty");
            }
            for (std::uint64_t k : entry.k_values) {
                if (k == 0) {
                    throw std::invalid_argument("entry: k values must be >= 1");
                }
            }
        } catch (const std::invalid_argument& err) {
            result.errors.push_back({e, err.what()});
            continue;
        }
        entry_first_job.push_back(jobs.size());
        for (std::uint64_t k : entry.k_values) {
            for (std::uint32_t run = 0; run < entry.runs; ++run) {
                jobs.push_back({entry.params, k, run,
                                trial_seed(config.master_seed, entry.params.variant, k, run)});
            }
        }
    }

    result.trials.resize(jobs.size());
    if (!jobs.empty()) {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size() || failed.load()) {
                    return;
                }
                try {
                    const Job& job = jobs[i];
                    TrialResult trial = config.mode == SimMode::Naive
                                            ? run_trial_naive(job.params, job.k, job.seed)
                                            : run_trial_fast(job.params, job.k, job.seed);
                    trial.run_index = job.run_index;
                    result.trials[i] = trial;
                } catch (...) {
                    const std::scoped_lock lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                    failed.store(true);
                    return;
                }
            }
        };
        unsigned threads = config.threads != 0 ? config.threads
                                               : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(
            std::min<std::size_t>(threads, jobs.size()));
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back(worker);
            }
            for (std::thread& t : pool) {
                t.join();
            }
        }
        if (first_error) {
            std::rethrow_exception(first_error);
        }
    }

    // Aggregate per entry so entries that share a protocol keep separate rows.
    for (std::size_t v = 0; v < entry_first_job.size(); ++v) {
        const std::size_t begin = entry_first_job[v];
        const std::size_t end =
            v + 1 < entry_first_job.size() ? entry_first_job[v + 1] : jobs.size();
        const auto slice = std::span<const TrialResult>(result.trials).subspan(begin, end - begin);
        const auto rows = aggregate_trials(slice);
        result.aggregates.insert(result.aggregates.end(), rows.begin(), rows.end());
    }
    return result;
}

}  // namespace ksel
