#include "sparsetask/harness.hpp"

#include "sparsetask/baselines.hpp"
#include "sparsetask/parallel.hpp"
#include "sparsetask/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sparsetask {

using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kFreshTaskStream = 0x7f4a7c15ULL;

constexpr Method kAllMethods[] = {Method::sc_mtl, Method::gomtl_variant, Method::subspace,
                                  Method::ridge, Method::mtfl};

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
    return out;
}

Matrix matrix_from_json(const json& values, Eigen::Index rows, Eigen::Index cols,
                        const char* what) {
    if (!values.is_array() || values.size() != static_cast<std::size_t>(rows * cols)) {
        throw std::invalid_argument(std::string("model file: '") + what + "' has the wrong size");
    }
    Matrix m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values.at(i++).get<double>();
    }
    return m;
}

json solver_json(const SolverConfig& cfg) {
    json j;
    j["max_outer_iters"] = cfg.max_outer_iters;
    j["max_inner_iters"] = cfg.max_inner_iters;
    j["rel_tol"] = cfg.rel_tol;
    j["seed"] = cfg.seed;
    j["acceleration"] = cfg.acceleration;
    j["restarts"] = cfg.restarts;
    j["power_iters"] = cfg.power_iters;
    return j;
}

SolverConfig solver_from_json(const json& j) {
    SolverConfig cfg;
    cfg.max_outer_iters = j.at("max_outer_iters").get<int>();
    cfg.max_inner_iters = j.at("max_inner_iters").get<int>();
    cfg.rel_tol = j.at("rel_tol").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.acceleration = j.at("acceleration").get<bool>();
    cfg.restarts = j.at("restarts").get<int>();
    cfg.power_iters = j.at("power_iters").get<int>();
    cfg.validate();
    return cfg;
}

std::vector<TaskVector> dictionary_predictors(const Dictionary& dict, const CodeMatrix& codes) {
    std::vector<TaskVector> out;
    out.reserve(static_cast<std::size_t>(codes.num_tasks()));
    for (Eigen::Index t = 0; t < codes.num_tasks(); ++t) {
        out.push_back(TaskVector{dict.atoms() * codes.codes().col(t)});
    }
    return out;
}

/// Rows of each task selected (keep == true) or rejected by fold label.
MultitaskDataset select_rows(const MultitaskDataset& data,
                             const std::vector<std::vector<int>>& folds, int fold, bool keep) {
    std::vector<TaskData> tasks;
    tasks.reserve(data.num_tasks());
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const auto& task = data.task(t);
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < task.size(); ++i) {
            if ((folds[t][static_cast<std::size_t>(i)] == fold) == keep) rows.push_back(i);
        }
        Matrix x(static_cast<Eigen::Index>(rows.size()), task.dim());
        Vector y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            x.row(static_cast<Eigen::Index>(j)) = task.inputs.row(rows[j]);
            y[static_cast<Eigen::Index>(j)] = task.labels[rows[j]];
        }
        tasks.emplace_back(std::move(x), std::move(y));
    }
    return MultitaskDataset(std::move(tasks));
}

double mean_squared_error(const TaskData& task, const Vector& w) {
    return (task.inputs * w - task.labels).squaredNorm() / static_cast<double>(task.size());
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string format_axis(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Image atom_image(const Vector& atom, Eigen::Index h, Eigen::Index w) {
    Image img(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) img(r, c) = atom[r * w + c];
    }
    const double lo = img.minCoeff();
    const double hi = img.maxCoeff();
    if (hi > lo) return (img.array() - lo) / (hi - lo);
    return Image::Constant(h, w, 0.5);
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::sc_mtl: return "sc-mtl";
        case Method::gomtl_variant: return "gomtl-variant";
        case Method::subspace: return "subspace";
        case Method::ridge: return "ridge";
        case Method::mtfl: return "mtfl";
    }
    return "sc-mtl";
}

Method method_from_string(std::string_view name) {
    for (auto m : kAllMethods) {
        if (name == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (valid: sc-mtl, gomtl-variant, subspace, ridge, mtfl)");
}

bool uses_dictionary(Method method) noexcept {
    return method == Method::sc_mtl || method == Method::gomtl_variant ||
           method == Method::subspace;
}

ConstraintScheme scheme_for(Method method) {
    switch (method) {
        case Method::sc_mtl: return ConstraintScheme::column_l2_task_l1;
        case Method::gomtl_variant: return ConstraintScheme::frobenius_aggregate_l1;
        case Method::subspace: return ConstraintScheme::column_l2_task_l2;
        default: break;
    }
    throw std::invalid_argument("method '" + std::string(to_string(method)) +
                                "' does not learn a dictionary");
}

std::string model_to_json(const Model& model) {
    json j;
    j["method"] = std::string(to_string(model.method));
    j["loss"] = std::string(to_string(model.loss));
    j["regularization"] = model.regularization;
    const auto T = model.task_vectors.size();
    const auto d = T ? model.task_vectors.front().w.size() : Eigen::Index{0};
    j["d"] = d;
    j["T"] = T;
    if (model.dictionary) {
        j["scheme"] = std::string(to_string(scheme_for(model.method)));
        j["K"] = model.dictionary->num_atoms();
        j["dictionary"] = matrix_json(model.dictionary->atoms());
        j["codes"] = matrix_json(model.codes->codes());
    }
    Matrix stack(d, static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) stack.col(static_cast<Eigen::Index>(t)) = model.task_vectors[t].w;
    j["task_vectors"] = matrix_json(stack);
    j["solver"] = solver_json(model.solver);
    return j.dump(2) + "\n";
}

Model model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        Model model;
        model.method = method_from_string(j.at("method").get<std::string>());
        model.loss = loss_kind_from_string(j.at("loss").get<std::string>());
        model.regularization = j.at("regularization").get<double>();
        model.solver = solver_from_json(j.at("solver"));
        const auto d = j.at("d").get<Eigen::Index>();
        const auto T = j.at("T").get<Eigen::Index>();
        const Matrix stack = matrix_from_json(j.at("task_vectors"), d, T, "task_vectors");
        for (Eigen::Index t = 0; t < T; ++t) model.task_vectors.push_back(TaskVector{stack.col(t)});
        if (uses_dictionary(model.method)) {
            const auto K = j.at("K").get<Eigen::Index>();
            const auto scheme = scheme_for(model.method);
            model.dictionary = Dictionary(matrix_from_json(j.at("dictionary"), d, K, "dictionary"),
                                          atom_constraint(scheme));
            model.codes = CodeMatrix(matrix_from_json(j.at("codes"), K, T, "codes"),
                                     model.regularization, code_constraint(scheme));
        }
        return model;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model file: ") + e.what());
    }
}

std::vector<std::vector<int>> fold_assignment(const MultitaskDataset& data, int folds,
                                              std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
    const Rng root(seed);
    std::vector<std::vector<int>> out;
    out.reserve(data.num_tasks());
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const auto m = static_cast<std::size_t>(data.task(t).size());
        if (m < static_cast<std::size_t>(folds)) {
            throw std::invalid_argument("task " + std::to_string(t) + " has " + std::to_string(m) +
                                        " examples, fewer than " + std::to_string(folds) +
                                        " folds");
        }
        Rng rng = root.child(t);
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        std::vector<int> labels(m);
        for (std::size_t pos = 0; pos < m; ++pos) labels[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
        out.push_back(std::move(labels));
    }
    return out;
}

FitOutcome fit_method(const MultitaskDataset& data, const FitRequest& request, double value) {
    FitOutcome out;
    out.selected = value;
    out.model.method = request.method;
    out.model.loss = request.loss.kind;
    out.model.regularization = value;
    out.model.solver = request.solver;
    switch (request.method) {
        case Method::sc_mtl:
        case Method::gomtl_variant:
        case Method::subspace: {
            FitResult fit = fit_variant(data, request.num_atoms, value, request.loss,
                                        request.solver, scheme_for(request.method));
            out.model.task_vectors = dictionary_predictors(fit.dictionary, fit.codes);
            out.objective_trace = fit.objective_trace;
            out.final_objective = fit.final_objective;
            out.model.dictionary = std::move(fit.dictionary);
            out.model.codes = std::move(fit.codes);
            break;
        }
        case Method::ridge: {
            double total = 0.0;
            for (const auto& task : data.tasks()) {
                out.model.task_vectors.push_back(ridge_fit(task, value));
                total += mean_squared_error(task, out.model.task_vectors.back().w) +
                         value * out.model.task_vectors.back().w.squaredNorm();
            }
            out.final_objective = total / static_cast<double>(data.num_tasks());
            break;
        }
        case Method::mtfl: {
            TraceNormResult fit = trace_norm_fit_detailed(data, value, request.solver);
            out.model.task_vectors = std::move(fit.task_vectors);
            out.objective_trace = std::move(fit.objective_trace);
            out.final_objective = fit.final_objective;
            break;
        }
    }
    return out;
}

FitOutcome fit_with_selection(const MultitaskDataset& data, const FitRequest& request) {
    if (request.grid.empty()) throw std::invalid_argument("hyperparameter grid is empty");
    if (request.grid.size() == 1) return fit_method(data, request, request.grid.front());

    const auto folds = fold_assignment(data, request.cv_folds, request.solver.seed);
    std::vector<CrossValidationScore> scores;
    for (double value : request.grid) {
        double error = 0.0;
        for (int f = 0; f < request.cv_folds; ++f) {
            const MultitaskDataset train = select_rows(data, folds, f, false);
            const MultitaskDataset valid = select_rows(data, folds, f, true);
            const FitOutcome fit = fit_method(train, request, value);
            double fold_error = 0.0;
            for (std::size_t t = 0; t < valid.num_tasks(); ++t) {
                fold_error += mean_squared_error(valid.task(t), fit.model.task_vectors[t].w);
            }
            error += fold_error / static_cast<double>(valid.num_tasks());
        }
        scores.push_back({value, error / static_cast<double>(request.cv_folds)});
    }
    const auto best = std::min_element(scores.begin(), scores.end(),
                                       [](const auto& a, const auto& b) { return a.error < b.error; });
    FitOutcome out = fit_method(data, request, best->value);
    out.cv_scores = std::move(scores);
    return out;
}

std::vector<TaskVector> transfer_task_vectors(const Model& model, const MultitaskDataset& data,
                                              Eigen::Index split, std::size_t workers) {
    SolverConfig cfg = model.solver;
    cfg.workers = workers;
    const LossSpec loss(model.loss, 1.0);
    if (model.dictionary) {
        if (model.dictionary->dim() != data.dim()) {
            throw std::invalid_argument("model dimension " + std::to_string(model.dictionary->dim()) +
                                        " does not match data dimension " +
                                        std::to_string(data.dim()));
        }
        return transfer_predictors(*model.dictionary, data, model.regularization, loss, cfg, split,
                                   code_constraint(scheme_for(model.method)));
    }
    if (!model.task_vectors.empty() && model.task_vectors.front().w.size() != data.dim()) {
        throw std::invalid_argument("model dimension does not match data dimension");
    }
    std::vector<TaskVector> out(data.num_tasks());
    parallel_for(data.num_tasks(), workers, [&](std::size_t t) {
        const auto& full = data.task(t);
        if (split > 0 && split >= full.size()) {
            throw std::invalid_argument("held-out split is empty for task " + std::to_string(t));
        }
        const TaskData task = split > 0 ? task_rows(full, 0, split) : full;
        out[t] = model.method == Method::ridge
                     ? ridge_fit(task, model.regularization)
                     : trace_norm_transfer(model.task_vectors, task, model.regularization);
    });
    return out;
}

FitOutcome fit_with_validation(const MultitaskDataset& data, const FitRequest& request,
                               const MultitaskDataset& validation,
                               const std::optional<std::vector<TaskVector>>& truth,
                               Eigen::Index split) {
    if (request.grid.empty()) throw std::invalid_argument("hyperparameter grid is empty");
    std::optional<FitOutcome> best;
    std::vector<CrossValidationScore> scores;
    for (double value : request.grid) {
        FitOutcome fit = fit_method(data, request, value);
        const double error = evaluate_model(fit.model, validation, EvalMode::transfer, truth, split,
                                            request.solver.workers)
                                 .report.mean_error;
        scores.push_back({value, error});
        if (!best || error < best->cv_scores.front().error) {
            best = std::move(fit);
            best->cv_scores = {{value, error}};
        }
    }
    best->cv_scores = std::move(scores);
    return std::move(*best);
}

EvalResult evaluate_model(const Model& model, const MultitaskDataset& data, EvalMode mode,
                          const std::optional<std::vector<TaskVector>>& truth, Eigen::Index split,
                          std::size_t workers) {
    if (truth && truth->size() != data.num_tasks()) {
        throw std::invalid_argument("truth file has " + std::to_string(truth->size()) +
                                    " rows for " + std::to_string(data.num_tasks()) + " tasks");
    }
    if (mode == EvalMode::mtl) {
        if (model.task_vectors.size() != data.num_tasks()) {
            throw std::invalid_argument("model has " + std::to_string(model.task_vectors.size()) +
                                        " tasks but dataset has " +
                                        std::to_string(data.num_tasks()));
        }
        if (truth) return {Metric::estimation_error, estimation_error(*truth, model.task_vectors)};
        std::vector<double> errors;
        for (std::size_t t = 0; t < data.num_tasks(); ++t) {
            errors.push_back(mean_squared_error(data.task(t), model.task_vectors[t].w));
        }
        const double avg = mean(errors);
        return {Metric::empirical_risk, EvaluationReport{std::move(errors), avg, Metric::empirical_risk}};
    }
    if (truth) {
        return {Metric::estimation_error,
                estimation_error(*truth, transfer_task_vectors(model, data, 0, workers))};
    }
    if (split <= 0) throw std::invalid_argument("held-out split is empty");
    const auto predictors = transfer_task_vectors(model, data, split, workers);
    std::vector<double> errors;
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        errors.push_back(held_out_error(data.task(t), predictors[t].w, split));
    }
    const double avg = mean(errors);
    return {Metric::empirical_risk, EvaluationReport{std::move(errors), avg, Metric::empirical_risk}};
}

std::string eval_csv(const EvalResult& result) {
    std::ostringstream out;
    const std::string metric(to_string(result.metric));
    out << "task,metric,error\n";
    for (std::size_t t = 0; t < result.report.per_task_errors.size(); ++t) {
        out << t << ',' << metric << ',' << format_double(result.report.per_task_errors[t]) << '\n';
    }
    out << "mean," << metric << ',' << format_double(result.report.mean_error) << '\n';
    return out.str();
}

SweepConfig sweep_config_from(const KeyValueConfig& cfg) {
    std::vector<std::string_view> allowed = {"axis",      "grid",       "reps",       "methods",
                                             "K",         "new_tasks",  "cv_folds",   "alpha_grid",
                                             "ridge_grid", "mtfl_grid"};
    for (auto k : environment_keys()) allowed.push_back(k);
    for (auto k : solver_config_keys()) allowed.push_back(k);
    cfg.require_known(allowed);

    SweepConfig out;
    const std::string axis = cfg.get_string("axis", "T");
    if (axis == "T") {
        out.axis = SweepAxis::tasks;
    } else if (axis == "K'" || axis == "K") {
        out.axis = SweepAxis::atoms;
    } else if (axis == "sparsity") {
        out.axis = SweepAxis::sparsity;
    } else {
        throw std::invalid_argument("key 'axis': expected T, K' or sparsity, got '" + axis + "'");
    }
    if (!cfg.has("grid")) throw std::invalid_argument("key 'grid' is required");
    out.grid = cfg.get_list("grid", {});
    out.reps = cfg.get_int("reps", out.reps);
    if (out.reps < 1) throw std::invalid_argument("key 'reps': must be >= 1");
    out.methods.clear();
    for (const auto& name : cfg.get_words("methods", {"sc-mtl", "ridge"})) {
        out.methods.push_back(method_from_string(name));
    }
    out.env = environment_spec_from(cfg);
    out.num_tasks = cfg.get_int("T", out.num_tasks);
    out.num_atoms = cfg.get_int("K", out.num_atoms);
    out.new_tasks = cfg.get_int("new_tasks", out.new_tasks);
    out.cv_folds = cfg.get_int("cv_folds", out.cv_folds);
    out.alpha_grid = cfg.get_list("alpha_grid", out.alpha_grid);
    out.ridge_grid = cfg.get_list("ridge_grid", out.ridge_grid);
    out.mtfl_grid = cfg.get_list("mtfl_grid", out.mtfl_grid);
    out.solver = solver_config_from(cfg, out.solver);
    if (out.num_tasks < 1 || out.new_tasks < 1) {
        throw std::invalid_argument("keys 'T' and 'new_tasks' must be >= 1");
    }
    return out;
}

SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers) {
    if (cfg.grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (cfg.methods.empty()) throw std::invalid_argument("sweep needs at least one method");
    if (cfg.reps < 1) throw std::invalid_argument("sweep needs at least one repetition");

    const std::size_t reps = static_cast<std::size_t>(cfg.reps);
    const std::size_t jobs = cfg.grid.size() * reps;
    std::vector<std::vector<SweepRow>> buffered(jobs);

    parallel_for(jobs, workers, [&](std::size_t job) {
        const std::size_t g = job / reps;
        const std::size_t r = job % reps;
        const double value = cfg.grid[g];

        EnvironmentSpec env = cfg.env;
        env.seed = derive_seed(cfg.env.seed, r);
        int num_tasks = cfg.num_tasks;
        int num_atoms = cfg.num_atoms > 0 ? cfg.num_atoms : env.k_star;
        switch (cfg.axis) {
            case SweepAxis::tasks: num_tasks = static_cast<int>(std::lround(value)); break;
            case SweepAxis::atoms: num_atoms = static_cast<int>(std::lround(value)); break;
            case SweepAxis::sparsity:
                env.s = std::clamp(static_cast<int>(std::lround(value * env.k_star)), 1, env.k_star);
                break;
        }
        const GeneratedTasks train = generate_environment(env, num_tasks);
        const GeneratedTasks fresh = generate_tasks(train.true_dictionary, env, cfg.new_tasks,
                                                    derive_seed(env.seed, kFreshTaskStream));

        for (Method method : cfg.methods) {
            FitRequest request;
            request.method = method;
            request.num_atoms = num_atoms;
            request.cv_folds = cfg.cv_folds;
            request.solver = cfg.solver;
            request.solver.workers = 1;
            request.solver.seed = derive_seed(env.seed, g + 1);
            if (uses_dictionary(method)) {
                request.grid = cfg.alpha_grid.empty() ? std::vector<double>{env.alpha_star}
                                                      : cfg.alpha_grid;
            } else {
                request.grid = method == Method::ridge ? cfg.ridge_grid : cfg.mtfl_grid;
            }
            const FitOutcome outcome = fit_with_selection(train.dataset, request);
            const double mtl = estimation_error(train.true_vectors, outcome.model.task_vectors).mean_error;
            const double transfer =
                estimation_error(fresh.true_vectors,
                                 transfer_task_vectors(outcome.model, fresh.dataset))
                    .mean_error;
            buffered[job].push_back(SweepRow{value, env.seed, method, mtl, transfer});
        }
    });

    SweepResult out;
    for (auto& rows : buffered) {
        for (auto& row : rows) out.rows.push_back(row);
    }
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
        for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
            double mtl = 0.0;
            double transfer = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const SweepRow& row = buffered[g * reps + r][k];
                mtl += row.mtl_error;
                transfer += row.transfer_error;
            }
            out.aggregates.push_back(SweepRow{cfg.grid[g], 0, cfg.methods[k],
                                              mtl / static_cast<double>(reps),
                                              transfer / static_cast<double>(reps)});
        }
    }
    return out;
}

std::string sweep_csv(const SweepConfig& cfg, const SweepResult& result) {
    const char* axis = cfg.axis == SweepAxis::tasks ? "T" : cfg.axis == SweepAxis::atoms ? "K'" : "sparsity";
    std::ostringstream out;
    out << "axis,axis_value,seed,method,mtl_error,transfer_error\n";
    for (const auto& row : result.rows) {
        out << axis << ',' << format_axis(row.axis_value) << ',' << row.seed << ','
            << to_string(row.method) << ',' << format_double(row.mtl_error) << ','
            << format_double(row.transfer_error) << '\n';
    }
    for (const auto& row : result.aggregates) {
        out << axis << ',' << format_axis(row.axis_value) << ",mean," << to_string(row.method)
            << ',' << format_double(row.mtl_error) << ',' << format_double(row.transfer_error)
            << '\n';
    }
    return out.str();
}

PixelResult run_pixels(const std::vector<Image>& images, const PixelRequest& request) {
    if (request.eval_count < 0 || static_cast<std::size_t>(request.eval_count) >= images.size()) {
        throw std::invalid_argument("eval image count must leave at least one training image");
    }
    const auto n_train = images.size() - static_cast<std::size_t>(request.eval_count);
    const std::vector<Image> train_images(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<Image> eval_images(images.begin() + static_cast<std::ptrdiff_t>(n_train), images.end());

    const Rng root(request.seed);
    Rng train_rng = root.child(0);
    const PixelTasks train = generate_pixel_tasks(train_images, request.m, train_rng);

    SolverConfig solver = request.solver;
    solver.seed = request.seed;
    const LossSpec loss;
    PixelResult out{fit(train.dataset, request.num_atoms, request.alpha, loss, solver), 0.0, 0.0,
                    false, request.eval_count > 0, {}};

    std::optional<PixelTasks> eval;
    if (request.eval_count > 0) {
        Rng eval_rng = root.child(1);
        eval = generate_pixel_tasks(eval_images, request.m, eval_rng);
    }
    const PixelTasks& scored = eval ? *eval : train;
    const auto n_pixels = scored.height * scored.width;
    out.evaluated_on_training_pixels = request.m == n_pixels;

    double dict_error = 0.0;
    double ridge_error = 0.0;
    const auto n_tasks = scored.dataset.num_tasks();
    for (std::size_t t = 0; t < n_tasks; ++t) {
        const auto& task = scored.dataset.task(t);
        const Vector w = eval ? lasso_predict(out.fit.dictionary, task, request.alpha, loss, solver).w
                              : Vector(out.fit.dictionary.atoms() *
                                       out.fit.codes.codes().col(static_cast<Eigen::Index>(t)));
        const Vector ridge = ridge_fit(task, request.ridge_lambda).w;

        std::vector<bool> seen(static_cast<std::size_t>(n_pixels), false);
        for (auto p : scored.observed[t]) seen[static_cast<std::size_t>(p)] = true;
        double de = 0.0;
        double re = 0.0;
        std::size_t count = 0;
        for (Eigen::Index p = 0; p < n_pixels; ++p) {
            if (seen[static_cast<std::size_t>(p)] && !out.evaluated_on_training_pixels) continue;
            const double truth = scored.full_labels[t][p];
            de += (w[p] - truth) * (w[p] - truth);
            re += (ridge[p] - truth) * (ridge[p] - truth);
            ++count;
        }
        dict_error += de / static_cast<double>(count);
        ridge_error += re / static_cast<double>(count);
    }
    out.heldout_mse = dict_error / static_cast<double>(n_tasks);
    out.ridge_heldout_mse = ridge_error / static_cast<double>(n_tasks);
    for (Eigen::Index k = 0; k < out.fit.dictionary.num_atoms(); ++k) {
        out.atoms.push_back(atom_image(out.fit.dictionary.atoms().col(k), train.height, train.width));
    }
    return out;
}

std::string bound_report_json(const BoundReport& report) {
    json j;
    j["s1"] = report.s1;
    j["s_inf"] = report.s_inf;
    j["eigen_converged"] = report.eigen_converged;
    j["thm1_rhs"] = report.thm1_rhs;
    j["thm2_rhs"] = report.thm2_rhs;
    j["sc_limit_rhs"] = report.sc_limit_rhs;
    j["delta"] = report.delta;
    j["inputs"] = {{"L", report.inputs.lipschitz},
                   {"alpha", report.inputs.alpha},
                   {"K", report.inputs.K},
                   {"m", report.inputs.m},
                   {"T", report.inputs.T}};
    return j.dump(2) + "\n";
}

}  // namespace sparsetask
