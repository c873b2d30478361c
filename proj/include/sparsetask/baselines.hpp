#pragma once

#include "sparsetask/core.hpp"
#include "sparsetask/solver.hpp"

#include <vector>

namespace sparsetask {

/// Independent ridge regression:
/// argmin_w (1/m) sum_i (<w, x_i> - y_i)^2 + lambda ||w||^2.
[[nodiscard]] TaskVector ridge_fit(const TaskData& task, double lambda);

struct TraceNormResult {
    std::vector<TaskVector> task_vectors;
    std::vector<double> objective_trace;
    double final_objective = 0.0;
};

/// Objective of trace-norm multitask feature learning on the d x T stack W:
/// (1/T) sum_t (1/m_t) ||X_t w_t - y_t||^2 + lambda ||W||_*.
[[nodiscard]] double trace_norm_objective(const MultitaskDataset& data, const Matrix& stack,
                                          double lambda);

/// Proximal gradient with singular-value soft-thresholding (Jacobi SVD).
/// cfg.max_outer_iters bounds the iterations; cfg.rel_tol stops early.
[[nodiscard]] TraceNormResult trace_norm_fit_detailed(const MultitaskDataset& data,
                                                      double lambda, const SolverConfig& cfg);

[[nodiscard]] std::vector<TaskVector> trace_norm_fit(const MultitaskDataset& data, double lambda,
                                                     const SolverConfig& cfg);

/// Transfer for a trace-norm model: the learned feature metric
/// S = (W W')^{1/2} / tr (W W')^{1/2} turns a new task into ridge regression
/// on inputs X S^{1/2}, with w = S^{1/2} v.
[[nodiscard]] TaskVector trace_norm_transfer(const std::vector<TaskVector>& learned,
                                             const TaskData& task, double lambda);

/// Stacks task vectors as the columns of a d x T matrix.
[[nodiscard]] Matrix stack_columns(const std::vector<TaskVector>& vectors);

}  // namespace sparsetask
