// sparsetask command line: synth | fit | eval | sweep | bounds | pixels
#include "sparsetask/diagnostics.hpp"
#include "sparsetask/harness.hpp"
#include "sparsetask/io.hpp"
#include "sparsetask/synth_env.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fs = std::filesystem;
using namespace sparsetask;

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KeyValueConfig load_config(const std::string& path) {
    return path.empty() ? KeyValueConfig::parse("") : KeyValueConfig::load(path);
}

std::vector<double> grid_or(const std::string& text, std::vector<double> fallback) {
    return text.empty() ? fallback : parse_number_list(text);
}

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_config = true) {
    if (with_config) cmd->add_option("--config", c.config, "key = value configuration file");
    cmd->add_option("--seed", c.seed, "RNG seed (overrides the config)");
    cmd->add_option("--out", c.out, "output path");
    cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
}

int cmd_synth(const Common& c) {
    KeyValueConfig cfg = load_config(c.config);
    std::vector<std::string_view> keys = environment_keys();
    cfg.require_known(keys);
    if (c.seed) cfg.set("seed", std::to_string(*c.seed));
    const EnvironmentSpec spec = environment_spec_from(cfg);
    const int T = cfg.get_int("T", 100);
    if (T < 1) throw std::invalid_argument("key 'T': must be >= 1");
    if (c.out.empty()) throw std::invalid_argument("synth needs --out DIR");
    const GeneratedTasks tasks = generate_environment(spec, T);
    const std::string spec_json = environment_json(spec, T);
    write_dataset(c.out, spec_json, tasks.dataset, &tasks.true_vectors);
    std::cout << "seed " << spec.seed << '\n' << spec_json;
    return 0;
}

struct FitArgs {
    std::string data;
    std::string method = "sc-mtl";
    std::string grid;
    std::string loss = "square";
    std::string validation;
    int folds = 3;
    int atoms = 10;
};

int cmd_fit(const Common& c, const FitArgs& a) {
    const KeyValueConfig cfg = load_config(c.config);
    cfg.require_known(solver_config_keys());
    FitRequest req;
    req.method = method_from_string(a.method);
    req.num_atoms = a.atoms;
    req.cv_folds = a.folds;
    req.loss = LossSpec(loss_kind_from_string(a.loss), 1.0);
    req.solver = solver_config_from(cfg);
    if (c.seed) req.solver.seed = *c.seed;
    req.solver.workers = c.workers;
    req.grid = grid_or(a.grid, {uses_dictionary(req.method) ? 1.0 : 1e-2});
    if (c.out.empty()) throw std::invalid_argument("fit needs --out DIR");

    const LoadedDataset data = read_dataset(a.data);
    const auto start = std::chrono::steady_clock::now();
    FitOutcome outcome;
    if (!a.validation.empty() && req.grid.size() > 1) {
        const LoadedDataset valid = read_dataset(a.validation);
        outcome = fit_with_validation(data.dataset, req, valid.dataset, valid.truth,
                                      valid.dataset.task(0).size() / 2);
    } else {
        outcome = fit_with_selection(data.dataset, req);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::ordered_json metrics;
    metrics["method"] = a.method;
    metrics["selected"] = outcome.selected;
    metrics["selection"] = outcome.cv_scores.empty() ? "none"
                           : a.validation.empty()    ? "cross-validation"
                                                     : "validation-tasks";
    auto scores = nlohmann::ordered_json::array();
    for (const auto& s : outcome.cv_scores) scores.push_back({{"value", s.value}, {"error", s.error}});
    metrics["scores"] = scores;
    metrics["final_objective"] = outcome.final_objective;
    metrics["objective_trace"] = outcome.objective_trace;
    metrics["wall_time_s"] = seconds;

    fs::create_directories(c.out);
    write_text((fs::path(c.out) / "model.json").string(), model_to_json(outcome.model));
    write_text((fs::path(c.out) / "metrics.json").string(), metrics.dump(2) + "\n");
    std::cout << "method " << a.method << " selected " << format_double(outcome.selected)
              << " final_objective " << format_double(outcome.final_objective) << '\n';
    return 0;
}

struct EvalArgs {
    std::string model;
    std::string data;
    std::string mode = "mtl";
    std::string truth;
    bool no_truth = false;
    long split = 0;
};

int cmd_eval(const Common& c, const EvalArgs& a) {
    const Model model = model_from_json(read_text(a.model));
    const LoadedDataset data = read_dataset(a.data);
    EvalMode mode;
    if (a.mode == "mtl") {
        mode = EvalMode::mtl;
    } else if (a.mode == "transfer") {
        mode = EvalMode::transfer;
    } else {
        throw std::invalid_argument("--mode must be mtl or transfer");
    }
    std::optional<std::vector<TaskVector>> truth;
    if (!a.truth.empty()) truth = read_truth(a.truth);
    const Eigen::Index split = a.split > 0 ? a.split : data.dataset.task(0).size() / 2;
    const EvalResult result = evaluate_model(model, data.dataset, mode, truth, split, c.workers);
    write_text(c.out, eval_csv(result));
    return 0;
}

int cmd_sweep(const Common& c, std::optional<int> reps) {
    if (c.config.empty()) throw std::invalid_argument("sweep needs --config PATH");
    KeyValueConfig cfg = KeyValueConfig::load(c.config);
    if (c.seed) cfg.set("seed", std::to_string(*c.seed));
    if (reps) cfg.set("reps", std::to_string(*reps));
    const SweepConfig sweep = sweep_config_from(cfg);
    const SweepResult result = run_sweep(sweep, c.workers);
    write_text(c.out, sweep_csv(sweep, result));
    return 0;
}

struct BoundArgs {
    std::string data;
    double L = 1.0;
    double alpha = 1.0;
    int K = 10;
    double delta = 0.05;
};

int cmd_bounds(const Common& c, const BoundArgs& a) {
    const LoadedDataset data = read_dataset(a.data);
    const BoundReport report = bound_report(data.dataset, a.L, a.alpha, a.K, a.delta);
    write_text(c.out, bound_report_json(report));
    return 0;
}

struct PixelArgs {
    std::string images;
    PixelRequest req;
};

int cmd_pixels(const Common& c, PixelArgs a) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.images)) {
        const auto ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::invalid_argument("no .pgm or .csv images in " + a.images);
    std::vector<Image> images;
    for (const auto& f : files) images.push_back(read_image(f.string()));

    const KeyValueConfig cfg = load_config(c.config);
    cfg.require_known(solver_config_keys());
    a.req.solver = solver_config_from(cfg);
    a.req.solver.workers = c.workers;
    if (c.seed) a.req.seed = *c.seed;
    if (c.out.empty()) throw std::invalid_argument("pixels needs --out DIR");

    const PixelResult result = run_pixels(images, a.req);
    fs::create_directories(c.out);
    for (std::size_t k = 0; k < result.atoms.size(); ++k) {
        write_pgm((fs::path(c.out) / ("atom_" + std::to_string(k) + ".pgm")).string(),
                  result.atoms[k]);
    }
    nlohmann::ordered_json metrics;
    metrics["images"] = images.size();
    metrics["eval_images"] = a.req.eval_count;
    metrics["m"] = a.req.m;
    metrics["K"] = a.req.num_atoms;
    metrics["alpha"] = a.req.alpha;
    metrics["final_objective"] = result.fit.final_objective;
    metrics["heldout_mse"] = result.heldout_mse;
    metrics["ridge_heldout_mse"] = result.ridge_heldout_mse;
    metrics["transfer"] = result.transfer;
    metrics["evaluated_on_training_pixels"] = result.evaluated_on_training_pixels;
    write_text((fs::path(c.out) / "metrics.json").string(), metrics.dump(2) + "\n");
    if (result.evaluated_on_training_pixels) {
        std::cerr << "warning: every pixel was observed; error is measured on training pixels\n";
    }
    std::cout << "heldout_mse " << format_double(result.heldout_mse) << " ridge "
              << format_double(result.ridge_heldout_mse) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse coding multitask and transfer learning"};
    app.require_subcommand(1);

    Common synth_c, fit_c, eval_c, sweep_c, bounds_c, pixels_c;

    auto* synth = app.add_subcommand("synth", "generate a synthetic task environment");
    add_common(synth, synth_c);

    FitArgs fit_a;
    auto* fit = app.add_subcommand("fit", "fit a multitask model");
    add_common(fit, fit_c);
    fit->add_option("--data", fit_a.data, "dataset directory")->required();
    fit->add_option("--method", fit_a.method, "sc-mtl, gomtl-variant, subspace, ridge or mtfl");
    fit->add_option("--grid", fit_a.grid, "comma-separated alpha or lambda values");
    fit->add_option("--cv-folds", fit_a.folds, "cross-validation folds");
    fit->add_option("--K", fit_a.atoms, "dictionary size")->check(CLI::PositiveNumber);
    fit->add_option("--loss", fit_a.loss, "square, squared-hinge or logistic");
    fit->add_option("--validation", fit_a.validation,
                    "dataset of validation tasks for transfer-based selection");

    EvalArgs eval_a;
    auto* eval = app.add_subcommand("eval", "evaluate a fitted model");
    add_common(eval, eval_c, false);
    eval->add_option("--model", eval_a.model, "model file")->required();
    eval->add_option("--data", eval_a.data, "dataset directory")->required();
    eval->add_option("--mode", eval_a.mode, "mtl or transfer");
    eval->add_option("--truth", eval_a.truth, "truth.csv with the true task vectors");
    eval->add_option("--split", eval_a.split,
                     "rows used for fitting in transfer empirical-risk mode (default m/2)");

    std::optional<int> reps;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, sweep_c);
    sweep->add_option("--reps", reps, "repetitions per grid value")->check(CLI::PositiveNumber);

    BoundArgs bound_a;
    auto* bounds = app.add_subcommand("bounds", "complexity statistics and bound values");
    add_common(bounds, bounds_c, false);
    bounds->add_option("--data", bound_a.data, "dataset directory")->required();
    bounds->add_option("--L", bound_a.L, "loss Lipschitz constant");
    bounds->add_option("--alpha", bound_a.alpha, "code l1 radius");
    bounds->add_option("--K", bound_a.K, "dictionary size");
    bounds->add_option("--delta", bound_a.delta, "confidence parameter in (0, 1)");

    PixelArgs pix_a;
    auto* pixels = app.add_subcommand("pixels", "missing-pixel dictionary experiment");
    add_common(pixels, pixels_c);
    pixels->add_option("--images", pix_a.images, "directory of PGM or CSV images")->required();
    pixels->add_option("--m", pix_a.req.m, "observed pixels per image");
    pixels->add_option("--K", pix_a.req.num_atoms, "dictionary size");
    pixels->add_option("--alpha", pix_a.req.alpha, "code l1 radius");
    pixels->add_option("--eval-count", pix_a.req.eval_count, "trailing images used for evaluation");
    pixels->add_option("--ridge-lambda", pix_a.req.ridge_lambda, "ridge baseline lambda");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(synth_c);
        if (*fit) return cmd_fit(fit_c, fit_a);
        if (*eval) return cmd_eval(eval_c, eval_a);
        if (*sweep) return cmd_sweep(sweep_c, reps);
        if (*bounds) return cmd_bounds(bounds_c, bound_a);
        if (*pixels) return cmd_pixels(pixels_c, pix_a);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
