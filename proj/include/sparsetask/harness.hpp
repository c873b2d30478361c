#pragma once

#include "sparsetask/core.hpp"
#include "sparsetask/diagnostics.hpp"
#include "sparsetask/io.hpp"
#include "sparsetask/solver.hpp"
#include "sparsetask/synth_env.hpp"
#include "sparsetask/transfer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsetask {

enum class Method { sc_mtl, gomtl_variant, subspace, ridge, mtfl };

[[nodiscard]] std::string_view to_string(Method method) noexcept;
/// Throws std::invalid_argument listing the valid names.
[[nodiscard]] Method method_from_string(std::string_view name);
[[nodiscard]] bool uses_dictionary(Method method) noexcept;
[[nodiscard]] ConstraintScheme scheme_for(Method method);

/// A fitted model as stored in a model file.
struct Model {
    Method method = Method::sc_mtl;
    LossKind loss = LossKind::square;
    double regularization = 1.0;  ///< alpha for dictionary methods, lambda otherwise
    std::optional<Dictionary> dictionary;
    std::optional<CodeMatrix> codes;
    std::vector<TaskVector> task_vectors;  ///< per training task predictors
    SolverConfig solver;
};

[[nodiscard]] std::string model_to_json(const Model& model);
[[nodiscard]] Model model_from_json(std::string_view text);

struct CrossValidationScore {
    double value = 0.0;
    double error = 0.0;
};

struct FitOutcome {
    Model model;
    double selected = 0.0;
    std::vector<CrossValidationScore> cv_scores;  ///< empty when the grid has one value
    std::vector<double> objective_trace;
    double final_objective = 0.0;
};

struct FitRequest {
    Method method = Method::sc_mtl;
    int num_atoms = 10;
    std::vector<double> grid{1.0};  ///< alpha (dictionary methods) or lambda values
    int cv_folds = 3;
    LossSpec loss;
    SolverConfig solver;
};

/// Per-task fold labels: task t's rows are shuffled by stream t of `seed`
/// and dealt round-robin into `folds` folds.
[[nodiscard]] std::vector<std::vector<int>> fold_assignment(const MultitaskDataset& data, int folds,
                                                            std::uint64_t seed);

/// Fits a method for one hyperparameter value.
[[nodiscard]] FitOutcome fit_method(const MultitaskDataset& data, const FitRequest& request,
                                    double value);

/// Selects the grid value with the lowest k-fold validation squared error
/// (folds split within each task, first minimum wins) and refits on all
/// data. A single-value grid skips cross-validation.
[[nodiscard]] FitOutcome fit_with_selection(const MultitaskDataset& data,
                                            const FitRequest& request);

/// Selects the grid value whose model transfers best to `validation`
/// (transfer-mode evaluate_model: estimation error when `truth` is given,
/// otherwise held-out empirical risk past `split`). Fits on all of `data`.
[[nodiscard]] FitOutcome fit_with_validation(const MultitaskDataset& data,
                                             const FitRequest& request,
                                             const MultitaskDataset& validation,
                                             const std::optional<std::vector<TaskVector>>& truth,
                                             Eigen::Index split);

/// Predictors on a new dataset. Dictionary methods run lasso_predict, ridge
/// refits per task, MTFL uses its learned feature metric. `split` > 0 fits
/// on the first `split` rows only.
[[nodiscard]] std::vector<TaskVector> transfer_task_vectors(const Model& model,
                                                            const MultitaskDataset& data,
                                                            Eigen::Index split = 0,
                                                            std::size_t workers = 1);

struct EvalResult {
    Metric metric = Metric::estimation_error;
    EvaluationReport report;
};

enum class EvalMode { mtl, transfer };

/// Multitask mode scores the model's own task vectors (training empirical
/// risk without truth); transfer mode refits codes on each task of `data`.
[[nodiscard]] EvalResult evaluate_model(const Model& model, const MultitaskDataset& data,
                                        EvalMode mode,
                                        const std::optional<std::vector<TaskVector>>& truth,
                                        Eigen::Index split, std::size_t workers = 1);

/// CSV with header `task,metric,error`, one row per task and a final mean row.
[[nodiscard]] std::string eval_csv(const EvalResult& result);

enum class SweepAxis { tasks, atoms, sparsity };

struct SweepConfig {
    SweepAxis axis = SweepAxis::tasks;
    std::vector<double> grid;
    int reps = 10;
    std::vector<Method> methods{Method::sc_mtl, Method::ridge};
    EnvironmentSpec env;
    int num_tasks = 100;
    int num_atoms = 0;  ///< 0: use env.k_star
    int new_tasks = 100;
    int cv_folds = 3;
    std::vector<double> alpha_grid;  ///< empty: {env.alpha_star}
    std::vector<double> ridge_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::vector<double> mtfl_grid{1e-3, 1e-2, 1e-1};
    SolverConfig solver;
};

[[nodiscard]] SweepConfig sweep_config_from(const KeyValueConfig& cfg);

struct SweepRow {
    double axis_value = 0.0;
    std::uint64_t seed = 0;
    Method method = Method::sc_mtl;
    double mtl_error = 0.0;
    double transfer_error = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;        ///< grid-major, then repetition, then method
    std::vector<SweepRow> aggregates;  ///< per grid value and method, mean over reps
};

/// Runs every (grid value, repetition) job on up to `workers` threads.
/// Repetition r draws its environment from derive_seed(env.seed, r), shared
/// across grid values; the output does not depend on `workers`.
[[nodiscard]] SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers);

/// CSV header `axis,axis_value,seed,method,mtl_error,transfer_error`;
/// aggregate rows carry `mean` in the seed column.
[[nodiscard]] std::string sweep_csv(const SweepConfig& cfg, const SweepResult& result);

struct PixelRequest {
    int m = 160;
    int num_atoms = 10;
    double alpha = 1.0;
    int eval_count = 0;      ///< trailing images held out for transfer evaluation
    double ridge_lambda = 1e-3;
    std::uint64_t seed = 0;
    SolverConfig solver;
};

struct PixelResult {
    FitResult fit;
    double heldout_mse = 0.0;        ///< dictionary predictor on unobserved pixels
    double ridge_heldout_mse = 0.0;  ///< per-image ridge on the same pixels
    bool evaluated_on_training_pixels = false;  ///< every pixel was observed
    bool transfer = false;           ///< scored on held-out images rather than training ones
    std::vector<Image> atoms;        ///< atoms reshaped and rescaled to [0, 1]
};

/// Missing-pixel experiment: each image is a task over pixel indicators;
/// the learned dictionary predicts unobserved pixels.
[[nodiscard]] PixelResult run_pixels(const std::vector<Image>& images, const PixelRequest& request);

[[nodiscard]] std::string bound_report_json(const BoundReport& report);

}  // namespace sparsetask
