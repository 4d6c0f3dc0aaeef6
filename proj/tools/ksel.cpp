#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksel/analysis.hpp"
#include "ksel/engine.hpp"
#include "ksel/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

unsigned default_threads() {
    if (const char* env = std::getenv("KSEL_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed > 0) {
            return static_cast<unsigned>(parsed);
        }
    }
    return 0;  // engine falls back to hardware concurrency
}

struct RunOptions {
    std::string config_path;
    std::string protocol;
    std::vector<std::uint64_t> k_values;
    std::uint32_t runs = 10;
    std::uint64_t seed = 42;
    double delta = 0.0;
    double r = 2.0;
    std::string mode = "fast";
    unsigned threads = 0;
    std::string out_path;
    std::string format = "csv";
};

ksel::ProtocolParams params_for(const std::string& protocol_name, const RunOptions& opt,
                                bool delta_given, bool r_given) {
    const auto variant = ksel::variant_from_name(protocol_name);
    if (!variant) {
        throw ksel::ConfigError("unknown protocol '" + protocol_name +
                                "' (expected ofa|ebobo|llib)");
    }
    ksel::ProtocolParams params;
    switch (*variant) {
        case ksel::Variant::OneFailAdaptive:
            params = ksel::ProtocolParams::one_fail_adaptive();
            break;
        case ksel::Variant::ExpBackOnBackOff:
            params = ksel::ProtocolParams::exp_back_on_back_off();
            break;
        case ksel::Variant::LoglogIteratedBackoff:
            params = ksel::ProtocolParams::loglog_iterated_backoff();
            break;
    }
    if (delta_given) {
        params.delta = opt.delta;
    }
    if (r_given) {
        params.r = opt.r;
    }
    return params;
}

int cmd_run(const RunOptions& opt, const CLI::App& cmd) {
    ksel::RunSpec spec;
    if (!opt.config_path.empty()) {
        spec = ksel::load_run_spec(opt.config_path);
    }

    const bool protocol_given = cmd.count("--protocol") > 0;
    if (protocol_given) {
        ksel::ExperimentEntry entry;
        entry.params = params_for(opt.protocol, opt, cmd.count("--delta") > 0,
                                  cmd.count("--r") > 0);
        entry.k_values = opt.k_values;
        entry.runs = opt.runs;
        if (entry.k_values.empty()) {
            throw ksel::ConfigError("--protocol requires --k");
        }
        spec.experiment.entries = {entry};
    } else if (cmd.count("--k") || cmd.count("--delta") || cmd.count("--r")) {
        if (spec.experiment.entries.empty()) {
            throw ksel::ConfigError("--k/--delta/--r need --protocol or --config");
        }
    }
    if (spec.experiment.entries.empty()) {
        throw ksel::ConfigError("nothing to run: give --protocol/--k or --config");
    }
    if (cmd.count("--runs") && !protocol_given) {
        for (auto& entry : spec.experiment.entries) {
            entry.runs = opt.runs;
        }
    }
    if (cmd.count("--seed")) {
        spec.experiment.master_seed = opt.seed;
    }
    if (cmd.count("--mode") || opt.config_path.empty()) {
        const auto mode = ksel::sim_mode_from_name(opt.mode);
        if (!mode) {
            throw ksel::ConfigError("--mode must be naive or fast");
        }
        spec.experiment.mode = *mode;
    }
    if (cmd.count("--threads")) {
        spec.experiment.threads = opt.threads;
    } else if (spec.experiment.threads == 0) {
        spec.experiment.threads = default_threads();
    }
    if (cmd.count("--out")) {
        ksel::OutputSpec output;
        output.path = opt.out_path;
        const auto format = ksel::output_format_from_name(opt.format);
        if (!format) {
            throw ksel::ConfigError("--format must be csv or json");
        }
        output.format = *format;
        spec.output = output;
    }

    const ksel::ExperimentResult result = ksel::run_experiment(spec.experiment);
    for (const ksel::EntryError& err : result.errors) {
        std::cerr << "entry " << err.entry_index << " skipped: " << err.message << "\n";
    }

    if (spec.output) {
        if (spec.output->format == ksel::OutputFormat::Csv) {
            ksel::write_file_atomic(spec.output->path, ksel::render_trials_csv(result.trials));
            ksel::write_file_atomic(ksel::aggregates_path_for(spec.output->path),
                                    ksel::render_aggregates_csv(result.aggregates));
        } else {
            ksel::write_file_atomic(spec.output->path,
                                    ksel::render_results_json(result.trials, result.aggregates));
        }
    }

    std::cout << ksel::render_ratio_table(result.aggregates);
    return result.errors.empty() ? kExitOk : kExitConfigError;
}

int cmd_analyze(double delta, std::uint64_t k) {
    nlohmann::json doc;
    try {
        const ksel::AnalysisQuantities q = ksel::compute_quantities(delta, k);
        doc["delta"] = q.delta;
        doc["k"] = q.k;
        doc["tau"] = q.tau;
        doc["gamma"] = q.gamma;
        doc["s_value"] = q.s_value;
        doc["m_value"] = q.m_value;
        doc["m_value_double"] = q.m_value_double;
        doc["m_precision_warning"] = q.m_precision_warning;
        doc["ofa_bound"] = q.ofa_bound;
        doc["ofa_bound_ratio"] = q.ofa_bound / static_cast<double>(k);
        doc["ebobo_bound"] = q.ebobo_bound;
        doc["ebobo_bound_ratio"] = q.ebobo_bound / static_cast<double>(k);
    } catch (const std::domain_error& err) {
        doc["error"] = err.what();
        std::cout << doc.dump(2) << "\n";
        std::cerr << "analyze: " << err.what() << "\n";
        return kExitConfigError;
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int cmd_aggregate(const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) {
        throw ksel::ConfigError(in_path + ": cannot open trial CSV");
    }
    std::vector<ksel::TrialResult> trials;
    try {
        trials = ksel::parse_trials_csv(in);
    } catch (const ksel::ConfigError& err) {
        throw ksel::ConfigError(in_path + ": " + err.what());
    }
    const auto aggregates = ksel::aggregate_trials(trials);
    const std::string csv = ksel::render_aggregates_csv(aggregates);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        ksel::write_file_atomic(out_path, csv);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis toolkit for randomized contention resolution "
                 "on a slotted shared channel without collision detection"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "Run a simulation campaign");
    run->add_option("--config", run_opt.config_path, "JSON campaign description");
    run->add_option("--protocol", run_opt.protocol, "Protocol: ofa|ebobo|llib");
    run->add_option("--k", run_opt.k_values, "Contender counts")->delimiter(',');
    run->add_option("--runs", run_opt.runs, "Trials per (protocol, k)");
    run->add_option("--seed", run_opt.seed, "Master seed");
    run->add_option("--delta", run_opt.delta, "Protocol delta parameter");
    run->add_option("--r", run_opt.r, "llib window growth factor");
    run->add_option("--mode", run_opt.mode, "naive|fast (default fast)");
    run->add_option("--threads", run_opt.threads, "Worker threads (default: KSEL_THREADS or all cores)");
    run->add_option("--out", run_opt.out_path, "Trial output file");
    run->add_option("--format", run_opt.format, "csv|json (default csv)");

    double analyze_delta = 2.72;
    std::uint64_t analyze_k = 1000;
    CLI::App* analyze = app.add_subcommand("analyze", "Print closed-form bound quantities as JSON");
    analyze->add_option("--delta", analyze_delta, "delta parameter")->required();
    analyze->add_option("--k", analyze_k, "number of contenders")->required();

    std::string agg_in;
    std::string agg_out;
    CLI::App* aggregate = app.add_subcommand("aggregate", "Recompute aggregates from a trial CSV");
    aggregate->add_option("--in", agg_in, "Trial CSV produced by run")->required();
    aggregate->add_option("--out", agg_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kExitConfigError;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_opt, *run);
        }
        if (analyze->parsed()) {
            return cmd_analyze(analyze_delta, analyze_k);
        }
        if (aggregate->parsed()) {
            return cmd_aggregate(agg_in, agg_out);
        }
    } catch (const ksel::ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
