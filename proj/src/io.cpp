#include "ksel/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ksel {

namespace {

using nlohmann::json;

// Shortest representation that round-trips exactly.
std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

std::size_t line_of_byte_offset(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        line += (text[i] == '\n');
    }
    return line;
}

[[noreturn]] void fail_field(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

ExperimentEntry parse_entry(const json& obj, const std::string& where) {
    if (!obj.is_object()) {
        fail_field(where, "entry must be an object");
    }
    ExperimentEntry entry;
    if (!obj.contains("protocol") || !obj["protocol"].is_string()) {
        fail_field(where, "missing string field 'protocol'");
    }
    const auto name = obj["protocol"].get<std::string>();
    const auto variant = variant_from_name(name);
    if (!variant) {
        fail_field(where, "unknown protocol '" + name + "' (expected ofa|ebobo|llib)");
    }
    switch (*variant) {
        case Variant::OneFailAdaptive: entry.params = ProtocolParams::one_fail_adaptive(); break;
        case Variant::ExpBackOnBackOff: entry.params = ProtocolParams::exp_back_on_back_off(); break;
        case Variant::LoglogIteratedBackoff: entry.params = ProtocolParams::loglog_iterated_backoff(); break;
    }
    if (!obj.contains("k_values") || !obj["k_values"].is_array() || obj["k_values"].empty()) {
        fail_field(where, "missing non-empty array field 'k_values'");
    }
    for (const auto& kv : obj["k_values"]) {
        if (!kv.is_number_unsigned() || kv.get<std::uint64_t>() == 0) {
            fail_field(where, "'k_values' entries must be positive integers");
        }
        entry.k_values.push_back(kv.get<std::uint64_t>());
    }
    if (obj.contains("runs")) {
        if (!obj["runs"].is_number_unsigned() || obj["runs"].get<std::uint64_t>() == 0) {
            fail_field(where, "'runs' must be a positive integer");
        }
        entry.runs = obj["runs"].get<std::uint32_t>();
    }
    if (obj.contains("delta")) {
        if (!obj["delta"].is_number()) {
            fail_field(where, "'delta' must be a number");
        }
        entry.params.delta = obj["delta"].get<double>();
    }
    if (obj.contains("r")) {
        if (!obj["r"].is_number()) {
            fail_field(where, "'r' must be a number");
        }
        entry.params.r = obj["r"].get<double>();
    }
    return entry;
}

}  // namespace

std::optional<OutputFormat> output_format_from_name(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    return std::nullopt;
}

RunSpec parse_run_spec_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError("line " + std::to_string(line_of_byte_offset(text, err.byte)) +
                          ": " + err.what());
    }
    if (!doc.is_object()) {
        fail_field("config", "top level must be an object");
    }
    RunSpec spec;
    if (doc.contains("master_seed")) {
        if (!doc["master_seed"].is_number_unsigned()) {
            fail_field("config.master_seed", "must be an unsigned integer");
        }
        spec.experiment.master_seed = doc["master_seed"].get<std::uint64_t>();
    }
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string()) {
            fail_field("config.mode", "must be \"naive\" or \"fast\"");
        }
        const auto mode = sim_mode_from_name(doc["mode"].get<std::string>());
        if (!mode) {
            fail_field("config.mode", "must be \"naive\" or \"fast\"");
        }
        spec.experiment.mode = *mode;
    }
    if (doc.contains("threads")) {
        if (!doc["threads"].is_number_unsigned()) {
            fail_field("config.threads", "must be an unsigned integer");
        }
        spec.experiment.threads = doc["threads"].get<unsigned>();
    }
    if (!doc.contains("entries") || !doc["entries"].is_array()) {
        fail_field("config", "missing array field 'entries'");
    }
    std::size_t index = 0;
    for (const auto& obj : doc["entries"]) {
        spec.experiment.entries.push_back(
            parse_entry(obj, "config.entries[" + std::to_string(index) + "]"));
        ++index;
    }
    if (doc.contains("output")) {
        const auto& out = doc["output"];
        if (!out.is_object() || !out.contains("path") || !out["path"].is_string()) {
            fail_field("config.output", "must be an object with a string 'path'");
        }
        OutputSpec output;
        output.path = out["path"].get<std::string>();
        if (out.contains("format")) {
            if (!out["format"].is_string()) {
                fail_field("config.output.format", "must be \"csv\" or \"json\"");
            }
            const auto format = output_format_from_name(out["format"].get<std::string>());
            if (!format) {
                fail_field("config.output.format", "must be \"csv\" or \"json\"");
            }
            output.format = *format;
        }
        spec.output = std::move(output);
    }
    return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_run_spec_json(buffer.str());
    } catch (const ConfigError& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
}

std::string render_trials_csv(std::span<const TrialResult> trials) {
    std::string out = "protocol,k,seed,run_index,mode,makespan_slots,ratio\n";
    for (const TrialResult& t : trials) {
        out += variant_name(t.protocol);
        out += ',';
        out += std::to_string(t.k);
        out += ',';
        out += std::to_string(t.seed);
        out += ',';
        out += std::to_string(t.run_index);
        out += ',';
        out += sim_mode_name(t.mode);
        out += ',';
        out += std::to_string(t.makespan_slots);
        out += ',';
        out += format_double(t.ratio());
        out += '\n';
    }
    return out;
}

std::string render_aggregates_csv(std::span<const AggregateStats> aggregates) {
    std::string out = "protocol,k,runs,mean_steps,mean_ratio,std_dev\n";
    for (const AggregateStats& a : aggregates) {
        out += variant_name(a.protocol);
        out += ',';
        out += std::to_string(a.k);
        out += ',';
        out += std::to_string(a.runs);
        out += ',';
        out += format_double(a.mean_steps);
        out += ',';
        out += format_double(a.mean_ratio);
        out += ',';
        out += format_double(a.std_dev);
        out += '\n';
    }
    return out;
}

std::string render_results_json(std::span<const TrialResult> trials,
                                std::span<const AggregateStats> aggregates) {
    json doc;
    doc["trials"] = json::array();
    for (const TrialResult& t : trials) {
        doc["trials"].push_back({{"protocol", variant_name(t.protocol)},
                                 {"k", t.k},
                                 {"seed", t.seed},
                                 {"run_index", t.run_index},
                                 {"mode", sim_mode_name(t.mode)},
                                 {"makespan_slots", t.makespan_slots},
                                 {"ratio", t.ratio()}});
    }
    doc["aggregates"] = json::array();
    for (const AggregateStats& a : aggregates) {
        doc["aggregates"].push_back({{"protocol", variant_name(a.protocol)},
                                     {"k", a.k},
                                     {"runs", a.runs},
                                     {"mean_steps", a.mean_steps},
                                     {"mean_ratio", a.mean_ratio},
                                     {"std_dev", a.std_dev}});
    }
    return doc.dump(2) + "\n";
}

std::vector<TrialResult> parse_trials_csv(std::istream& in) {
    std::vector<TrialResult> trials;
    std::string line;
    std::size_t line_number = 0;

    auto fail = [&](const std::string& what) -> void {
        throw ConfigError("line " + std::to_string(line_number) + ": " + what);
    };

    if (!std::getline(in, line)) {
        throw ConfigError("line 1: empty input, expected trial CSV header");
    }
    line_number = 1;
    if (line == "protocol,k,seed,run_index,mode,makespan_slots,ratio\r" ||
        line == "protocol,k,seed,run_index,mode,makespan_slots,ratio") {
        // header ok
    } else {
        fail("unexpected header '" + line + "'");
    }

    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::array<std::string, 7> fields;
        std::size_t field = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (field >= fields.size()) {
                    fail("too many fields");
                }
                fields[field++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (field != fields.size()) {
            fail("expected 7 fields, got " + std::to_string(field));
        }
        TrialResult t;
        const auto variant = variant_from_name(fields[0]);
        if (!variant) {
            fail("unknown protocol '" + fields[0] + "'");
        }
        t.protocol = *variant;
        auto parse_u64 = [&](const std::string& s, const char* what) {
            std::uint64_t value = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                fail(std::string("bad ") + what + " '" + s + "'");
            }
            return value;
        };
        t.k = parse_u64(fields[1], "k");
        if (t.k == 0) {
            fail("k must be positive");
        }
        t.seed = parse_u64(fields[2], "seed");
        t.run_index = static_cast<std::uint32_t>(parse_u64(fields[3], "run_index"));
        const auto mode = sim_mode_from_name(fields[4]);
        if (!mode) {
            fail("unknown mode '" + fields[4] + "'");
        }
        t.mode = *mode;
        t.makespan_slots = parse_u64(fields[5], "makespan_slots");
        // The ratio column is derived from makespan and k; ignored on input.
        trials.push_back(t);
    }
    return trials;
}

std::string render_ratio_table(std::span<const AggregateStats> aggregates) {
    std::vector<std::uint64_t> ks;
    for (const AggregateStats& a : aggregates) {
        if (std::find(ks.begin(), ks.end(), a.k) == ks.end()) {
            ks.push_back(a.k);
        }
    }
    std::sort(ks.begin(), ks.end());

    struct Row {
        Variant protocol;
        std::vector<const AggregateStats*> cells;
    };
    std::vector<Row> rows;
    for (const AggregateStats& a : aggregates) {
        Row* row = nullptr;
        for (Row& r : rows) {
            const std::size_t col = static_cast<std::size_t>(
                std::find(ks.begin(), ks.end(), a.k) - ks.begin());
            if (r.protocol == a.protocol && r.cells[col] == nullptr) {
                row = &r;
                break;
            }
        }
        if (row == nullptr) {
            rows.push_back({a.protocol, std::vector<const AggregateStats*>(ks.size(), nullptr)});
            row = &rows.back();
        }
        const std::size_t col =
            static_cast<std::size_t>(std::find(ks.begin(), ks.end(), a.k) - ks.begin());
        row->cells[col] = &a;
    }

    std::ostringstream out;
    out << "mean ratio steps/k\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-26s", "protocol");
    out << buf;
    for (std::uint64_t k : ks) {
        std::snprintf(buf, sizeof(buf), "%12s", ("k=" + std::to_string(k)).c_str());
        out << buf;
    }
    out << '\n';
    for (const Row& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-26s",
                      std::string(variant_display_name(row.protocol)).c_str());
        out << buf;
        for (const AggregateStats* cell : row.cells) {
            if (cell == nullptr) {
                std::snprintf(buf, sizeof(buf), "%12s", "-");
            } else {
                std::snprintf(buf, sizeof(buf), "%12.2f", cell->mean_ratio);
            }
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("short write to '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

std::filesystem::path aggregates_path_for(const std::filesystem::path& trials_path) {
    std::filesystem::path result = trials_path;
    const std::string extension = result.extension().string();
    result.replace_extension();
    result += ".agg";
    result += extension;
    return result;
}

}  // namespace ksel
