#include "sparsetask/transfer.hpp"

#include "sparsetask/parallel.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace sparsetask {

std::string_view to_string(Metric metric) noexcept {
    return metric == Metric::estimation_error ? "estimation-error" : "empirical-risk";
}

namespace {

EvaluationReport make_report(std::vector<double> errors, Metric metric) {
    // fixed left-to-right reduction
    double sum = 0.0;
    for (double e : errors) sum += e;
    const double mean = errors.empty() ? 0.0 : sum / static_cast<double>(errors.size());
    return EvaluationReport{std::move(errors), mean, metric};
}

}  // namespace

TaskVector lasso_predict(const Dictionary& dict, const TaskData& task, double alpha,
                         const LossSpec& loss, const SolverConfig& cfg,
                         CodeConstraint constraint) {
    if (constraint == CodeConstraint::aggregate_l1) constraint = CodeConstraint::per_task_l1;
    const Vector code =
        code_step(dict, task, alpha, loss, cfg, Vector::Zero(dict.num_atoms()), constraint);
    return TaskVector{dict.atoms() * code};
}

EvaluationReport estimation_error(const std::vector<TaskVector>& truth,
                                  const std::vector<TaskVector>& estimated) {
    if (truth.size() != estimated.size()) {
        throw std::invalid_argument("estimation_error: " + std::to_string(truth.size()) +
                                    " true vectors vs " + std::to_string(estimated.size()) +
                                    " estimates");
    }
    std::vector<double> errors;
    errors.reserve(truth.size());
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (truth[t].w.size() != estimated[t].w.size()) {
            throw std::invalid_argument("estimation_error: dimension mismatch at task " +
                                        std::to_string(t));
        }
        errors.push_back((truth[t].w - estimated[t].w).squaredNorm());
    }
    return make_report(std::move(errors), Metric::estimation_error);
}

TaskData task_rows(const TaskData& task, Eigen::Index begin, Eigen::Index end) {
    return TaskData(task.inputs.middleRows(begin, end - begin),
                    task.labels.segment(begin, end - begin));
}

double held_out_error(const TaskData& task, const Vector& w, Eigen::Index split) {
    const Eigen::Index n = task.size() - split;
    if (n <= 0) throw std::invalid_argument("held-out split is empty");
    const Vector r = task.inputs.bottomRows(n) * w - task.labels.tail(n);
    return r.squaredNorm() / static_cast<double>(n);
}

std::vector<TaskVector> transfer_predictors(const Dictionary& dict,
                                            const MultitaskDataset& new_tasks, double alpha,
                                            const LossSpec& loss, const SolverConfig& cfg,
                                            Eigen::Index split, CodeConstraint constraint) {
    std::vector<TaskVector> out(new_tasks.num_tasks());
    parallel_for(new_tasks.num_tasks(), cfg.workers, [&](std::size_t t) {
        const auto& task = new_tasks.task(t);
        if (split > 0) {
            if (split >= task.size()) {
                throw std::invalid_argument("held-out split is empty for task " +
                                            std::to_string(t));
            }
            out[t] = lasso_predict(dict, task_rows(task, 0, split), alpha, loss, cfg, constraint);
        } else {
            out[t] = lasso_predict(dict, task, alpha, loss, cfg, constraint);
        }
    });
    return out;
}

EvaluationReport transfer_evaluate(const Dictionary& dict, const MultitaskDataset& new_tasks,
                                   const std::optional<std::vector<TaskVector>>& truth,
                                   double alpha, const LossSpec& loss, const SolverConfig& cfg,
                                   Eigen::Index split, CodeConstraint constraint) {
    if (truth) {
        if (truth->size() != new_tasks.num_tasks()) {
            throw std::invalid_argument("transfer_evaluate: truth has " +
                                        std::to_string(truth->size()) + " vectors for " +
                                        std::to_string(new_tasks.num_tasks()) + " tasks");
        }
        return estimation_error(
            *truth, transfer_predictors(dict, new_tasks, alpha, loss, cfg, 0, constraint));
    }
    if (split <= 0) throw std::invalid_argument("held-out split is empty");
    const auto predictors = transfer_predictors(dict, new_tasks, alpha, loss, cfg, split, constraint);
    std::vector<double> errors;
    errors.reserve(predictors.size());
    for (std::size_t t = 0; t < predictors.size(); ++t) {
        errors.push_back(held_out_error(new_tasks.task(t), predictors[t].w, split));
    }
    return make_report(std::move(errors), Metric::empirical_risk);
}

}  // namespace sparsetask
