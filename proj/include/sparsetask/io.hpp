#pragma once

#include "sparsetask/core.hpp"
#include "sparsetask/solver.hpp"
#include "sparsetask/synth_env.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsetask {

/// Shortest text that round-trips the double exactly ("%.17g").
[[nodiscard]] std::string format_double(double v);

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored; repeated keys are an error. Typed getters report the offending
/// key on a parse failure.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, std::string origin = "<string>");
    static KeyValueConfig load(const std::string& path);

    [[nodiscard]] bool has(std::string_view key) const;
    [[nodiscard]] std::string get_string(std::string_view key, std::string fallback) const;
    [[nodiscard]] double get_double(std::string_view key, double fallback) const;
    [[nodiscard]] int get_int(std::string_view key, int fallback) const;
    [[nodiscard]] std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
    [[nodiscard]] bool get_bool(std::string_view key, bool fallback) const;
    [[nodiscard]] std::vector<double> get_list(std::string_view key,
                                               std::vector<double> fallback) const;
    [[nodiscard]] std::vector<std::string> get_words(std::string_view key,
                                                     std::vector<std::string> fallback) const;

    /// Throws std::invalid_argument naming the first key not in `allowed`.
    void require_known(const std::vector<std::string_view>& allowed) const;

    void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

private:
    [[nodiscard]] const std::string* find(std::string_view key) const;
    [[noreturn]] void bad_value(std::string_view key, std::string_view expected) const;

    std::map<std::string, std::string, std::less<>> values_;
    std::string origin_;
};

/// Comma-separated numbers, e.g. "1e-3,1e-2".
[[nodiscard]] std::vector<double> parse_number_list(std::string_view text);

/// Keys recognised by solver_config_from.
[[nodiscard]] const std::vector<std::string_view>& solver_config_keys();
[[nodiscard]] SolverConfig solver_config_from(const KeyValueConfig& cfg, SolverConfig base = {});

/// Keys recognised by environment_spec_from (plus "T").
[[nodiscard]] const std::vector<std::string_view>& environment_keys();
[[nodiscard]] EnvironmentSpec environment_spec_from(const KeyValueConfig& cfg);

struct LoadedDataset {
    MultitaskDataset dataset;
    std::optional<std::vector<TaskVector>> truth;
    std::string spec_json;  ///< contents of spec.json, empty when absent
};

/// Writes spec.json, task_<t>.csv (d input columns then the label) and,
/// when given, truth.csv (one row per task vector).
void write_dataset(const std::string& dir, const std::string& spec_json,
                   const MultitaskDataset& data, const std::vector<TaskVector>* truth);

[[nodiscard]] LoadedDataset read_dataset(const std::string& dir);

[[nodiscard]] std::vector<TaskVector> read_truth(const std::string& path);
void write_truth(const std::string& path, const std::vector<TaskVector>& truth);

[[nodiscard]] std::string environment_json(const EnvironmentSpec& spec, int num_tasks);

}  // namespace sparsetask
