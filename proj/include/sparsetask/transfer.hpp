#pragma once

#include "sparsetask/core.hpp"
#include "sparsetask/solver.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sparsetask {

enum class Metric { estimation_error, empirical_risk };

[[nodiscard]] std::string_view to_string(Metric metric) noexcept;

struct EvaluationReport {
    std::vector<double> per_task_errors;
    double mean_error = 0.0;
    Metric metric = Metric::estimation_error;
};

/// The transfer predictor: D times the constrained empirical-risk minimizer
/// over codes, started from zero. `constraint` selects the code ball; the
/// aggregate l1 scheme reduces to the l1 ball of radius alpha for one task.
[[nodiscard]] TaskVector lasso_predict(const Dictionary& dict, const TaskData& task, double alpha,
                                       const LossSpec& loss, const SolverConfig& cfg,
                                       CodeConstraint constraint = CodeConstraint::per_task_l1);

/// Per-task squared distances ||w_t - w_hat_t||^2 and their mean.
[[nodiscard]] EvaluationReport estimation_error(const std::vector<TaskVector>& truth,
                                                const std::vector<TaskVector>& estimated);

/// Applies lasso_predict to every task of `new_tasks`.
///
/// With `truth`, each predictor is fit on all of its task's examples and
/// scored by estimation error. Without it, the first `split` rows of each
/// task are used for fitting and the remainder for a held-out square-loss
/// empirical risk; an empty remainder is an error.
[[nodiscard]] EvaluationReport transfer_evaluate(
    const Dictionary& dict, const MultitaskDataset& new_tasks,
    const std::optional<std::vector<TaskVector>>& truth, double alpha, const LossSpec& loss,
    const SolverConfig& cfg, Eigen::Index split = 0,
    CodeConstraint constraint = CodeConstraint::per_task_l1);

/// Fitted predictors used by transfer_evaluate (fit on all rows, or the
/// first `split` rows when split > 0).
[[nodiscard]] std::vector<TaskVector> transfer_predictors(
    const Dictionary& dict, const MultitaskDataset& new_tasks, double alpha,
    const LossSpec& loss, const SolverConfig& cfg, Eigen::Index split = 0,
    CodeConstraint constraint = CodeConstraint::per_task_l1);

/// Mean over a task's held-out rows (index >= split) of (<w, x> - y)^2.
[[nodiscard]] double held_out_error(const TaskData& task, const Vector& w, Eigen::Index split);

/// Rows [begin, end) of a task.
[[nodiscard]] TaskData task_rows(const TaskData& task, Eigen::Index begin, Eigen::Index end);

}  // namespace sparsetask
