#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "ksel/engine.hpp"

namespace ksel {

/// Configuration or input-file problem; message carries a line-numbered
/// diagnostic where one is available.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat : std::uint8_t { Csv, Json };

std::optional<OutputFormat> output_format_from_name(std::string_view name);

struct OutputSpec {
    std::string path;
    OutputFormat format = OutputFormat::Csv;
};

/// Full declarative run description: campaign plus optional output sink.
struct RunSpec {
    ExperimentConfig experiment;
    std::optional<OutputSpec> output;
};

/// Parses the JSON run description. Parse and validation failures throw
/// ConfigError with "line N:" diagnostics.
RunSpec parse_run_spec_json(const std::string& text);
RunSpec load_run_spec(const std::filesystem::path& path);

// Trial rows: protocol,k,seed,run_index,mode,makespan_slots,ratio
std::string render_trials_csv(std::span<const TrialResult> trials);
// Aggregate rows: protocol,k,runs,mean_steps,mean_ratio,std_dev
std::string render_aggregates_csv(std::span<const AggregateStats> aggregates);
// Single JSON document holding both sections.
std::string render_results_json(std::span<const TrialResult> trials,
                                std::span<const AggregateStats> aggregates);

/// Reads back a trial CSV produced by render_trials_csv. Malformed input
/// throws ConfigError with the offending line number.
std::vector<TrialResult> parse_trials_csv(std::istream& in);

/// Mean ratio table, protocols down, k values across.
std::string render_ratio_table(std::span<const AggregateStats> aggregates);

/// Writes via a temporary file and renames into place, so failed runs leave
/// no partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Sibling path for the aggregate section of a CSV campaign:
/// results.csv -> results.agg.csv.
std::filesystem::path aggregates_path_for(const std::filesystem::path& trials_path);

}  // namespace ksel
