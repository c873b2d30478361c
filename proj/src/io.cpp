#include "sparsetask/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparsetask {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(sep, start);
        const auto end = pos == std::string_view::npos ? text.size() : pos;
        out.push_back(trim(text.substr(start, end - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
    return v;
}

template <typename Int>
std::optional<Int> to_int(const std::string& s) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& where) {
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
        const auto v = to_double(cell);
        if (!v) throw std::runtime_error(where + ": bad number '" + cell + "'");
        row.push_back(*v);
    }
    return row;
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        rows.push_back(parse_csv_row(line, path + ":" + std::to_string(lineno)));
        if (rows.back().size() != rows.front().size()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": ragged row");
        }
    }
    return rows;
}

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (j) out << ',';
        out << format_double(row[j]);
    }
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& cell : split(text, ',')) {
        const auto v = to_double(cell);
        if (!v) throw std::invalid_argument("bad number '" + cell + "' in list '" + std::string(text) + "'");
        out.push_back(*v);
    }
    return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string origin) {
    KeyValueConfig cfg;
    cfg.origin_ = std::move(origin);
    std::size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = cfg.origin_ + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw std::invalid_argument(where + ": expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(where + ": empty key");
        if (cfg.values_.count(key)) throw std::invalid_argument(where + ": duplicate key '" + key + "'");
        cfg.values_.emplace(std::move(key), std::move(value));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const std::string* KeyValueConfig::find(std::string_view key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

void KeyValueConfig::bad_value(std::string_view key, std::string_view expected) const {
    throw std::invalid_argument(origin_ + ": key '" + std::string(key) + "': expected " +
                                std::string(expected) + ", got '" + *find(key) + "'");
}

bool KeyValueConfig::has(std::string_view key) const { return find(key) != nullptr; }

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const auto d = to_double(*v);
    if (!d) bad_value(key, "a number");
    return *d;
}

int KeyValueConfig::get_int(std::string_view key, int fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const auto i = to_int<int>(*v);
    if (!i) bad_value(key, "an integer");
    return *i;
}

std::uint64_t KeyValueConfig::get_u64(std::string_view key, std::uint64_t fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const auto i = to_int<std::uint64_t>(*v);
    if (!i) bad_value(key, "an unsigned 64-bit integer");
    return *i;
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    bad_value(key, "true or false");
}

std::vector<double> KeyValueConfig::get_list(std::string_view key,
                                             std::vector<double> fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    try {
        auto list = parse_number_list(*v);
        if (list.empty()) bad_value(key, "a nonempty comma-separated list of numbers");
        return list;
    } catch (const std::invalid_argument&) {
        bad_value(key, "a comma-separated list of numbers");
    }
}

std::vector<std::string> KeyValueConfig::get_words(std::string_view key,
                                                   std::vector<std::string> fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    auto words = split(*v, ',');
    if (std::any_of(words.begin(), words.end(), [](const auto& w) { return w.empty(); })) {
        bad_value(key, "a comma-separated list of names");
    }
    return words;
}

void KeyValueConfig::require_known(const std::vector<std::string_view>& allowed) const {
    for (const auto& [key, value] : values_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string list;
            for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
            throw std::invalid_argument(origin_ + ": unknown key '" + key + "' (allowed: " + list +
                                        ")");
        }
    }
}

const std::vector<std::string_view>& solver_config_keys() {
    static const std::vector<std::string_view> keys = {
        "max_outer_iters", "max_inner_iters", "rel_tol", "restarts", "acceleration", "power_iters"};
    return keys;
}

SolverConfig solver_config_from(const KeyValueConfig& cfg, SolverConfig base) {
    base.max_outer_iters = cfg.get_int("max_outer_iters", base.max_outer_iters);
    base.max_inner_iters = cfg.get_int("max_inner_iters", base.max_inner_iters);
    base.rel_tol = cfg.get_double("rel_tol", base.rel_tol);
    base.restarts = cfg.get_int("restarts", base.restarts);
    base.acceleration = cfg.get_bool("acceleration", base.acceleration);
    base.power_iters = cfg.get_int("power_iters", base.power_iters);
    base.validate();
    return base;
}

const std::vector<std::string_view>& environment_keys() {
    static const std::vector<std::string_view> keys = {"d",     "k_star", "s", "alpha_star",
                                                       "sigma", "m",      "T", "seed"};
    return keys;
}

EnvironmentSpec environment_spec_from(const KeyValueConfig& cfg) {
    EnvironmentSpec spec;
    spec.d = cfg.get_int("d", spec.d);
    spec.k_star = cfg.get_int("k_star", spec.k_star);
    spec.s = cfg.get_int("s", spec.s);
    spec.alpha_star = cfg.get_double("alpha_star", spec.alpha_star);
    spec.sigma = cfg.get_double("sigma", spec.sigma);
    spec.m = cfg.get_int("m", spec.m);
    spec.seed = cfg.get_u64("seed", spec.seed);
    spec.validate();
    return spec;
}

std::string environment_json(const EnvironmentSpec& spec, int num_tasks) {
    nlohmann::ordered_json j;
    j["d"] = spec.d;
    j["k_star"] = spec.k_star;
    j["s"] = spec.s;
    j["alpha_star"] = spec.alpha_star;
    j["sigma"] = spec.sigma;
    j["m"] = spec.m;
    j["T"] = num_tasks;
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

void write_truth(const std::string& path, const std::vector<TaskVector>& truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& w : truth) {
        write_row(out, w.w.transpose());
        out << '\n';
    }
}

std::vector<TaskVector> read_truth(const std::string& path) {
    std::vector<TaskVector> out;
    for (const auto& row : read_csv(path)) {
        out.push_back(TaskVector{Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size()))});
    }
    return out;
}

void write_dataset(const std::string& dir, const std::string& spec_json,
                   const MultitaskDataset& data, const std::vector<TaskVector>* truth) {
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "spec.json");
        out << spec_json;
    }
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const auto& task = data.task(t);
        std::ofstream out(fs::path(dir) / ("task_" + std::to_string(t) + ".csv"));
        if (!out) throw std::runtime_error("cannot write task file in " + dir);
        for (Eigen::Index i = 0; i < task.size(); ++i) {
            write_row(out, task.inputs.row(i));
            out << ',' << format_double(task.labels[i]) << '\n';
        }
    }
    if (truth) write_truth((fs::path(dir) / "truth.csv").string(), *truth);
}

LoadedDataset read_dataset(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("dataset directory not found: " + dir);
    std::vector<TaskData> tasks;
    for (std::size_t t = 0;; ++t) {
        const auto path = fs::path(dir) / ("task_" + std::to_string(t) + ".csv");
        if (!fs::exists(path)) break;
        const auto rows = read_csv(path.string());
        if (rows.empty() || rows.front().size() < 2) {
            throw std::runtime_error(path.string() + ": need at least one row of inputs and a label");
        }
        const auto m = static_cast<Eigen::Index>(rows.size());
        const auto d = static_cast<Eigen::Index>(rows.front().size()) - 1;
        Matrix x(m, d);
        Vector y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < d; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
            y[i] = row.back();
        }
        tasks.emplace_back(std::move(x), std::move(y));
    }
    if (tasks.empty()) throw std::runtime_error("no task_<t>.csv files in " + dir);
    LoadedDataset out{MultitaskDataset(std::move(tasks)), std::nullopt, {}};
    if (const auto truth = fs::path(dir) / "truth.csv"; fs::exists(truth)) {
        out.truth = read_truth(truth.string());
    }
    if (const auto spec = fs::path(dir) / "spec.json"; fs::exists(spec)) {
        std::ifstream in(spec);
        std::stringstream ss;
        ss << in.rdbuf();
        out.spec_json = ss.str();
    }
    return out;
}

}  // namespace sparsetask
