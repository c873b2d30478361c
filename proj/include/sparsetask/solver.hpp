#pragma once

#include "sparsetask/core.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sparsetask {

struct SolverConfig {
    int max_outer_iters = 200;   ///< alternation rounds
    int max_inner_iters = 100;   ///< projected-gradient steps per sub-problem
    double rel_tol = 1e-6;       ///< stop when the relative objective change drops below
    std::uint64_t seed = 0;
    bool acceleration = true;    ///< FISTA momentum
    int restarts = 3;            ///< independent random initializations
    int power_iters = 50;        ///< steps for the Lipschitz estimates
    std::size_t workers = 1;     ///< threads for per-task code steps

    void validate() const;
};

/// Pairing of atom and code constraint sets.
enum class ConstraintScheme {
    column_l2_task_l1,       ///< the default sparse-coding problem
    frobenius_aggregate_l1,  ///< ||D||_F <= sqrt(K), sum_t ||g_t||_1 <= alpha T
    column_l2_aggregate_l1,
    column_l2_task_l2,       ///< subspace learning: ||g_t||_2 <= alpha
};

[[nodiscard]] AtomConstraint atom_constraint(ConstraintScheme scheme) noexcept;
[[nodiscard]] CodeConstraint code_constraint(ConstraintScheme scheme) noexcept;
[[nodiscard]] std::string_view to_string(ConstraintScheme scheme) noexcept;
[[nodiscard]] ConstraintScheme scheme_from_string(std::string_view name);

struct FitResult {
    Dictionary dictionary;
    CodeMatrix codes;
    std::vector<double> objective_trace;  ///< objective after each outer iteration
    double final_objective = 0.0;
    int restart_index = 0;
};

/// Average over tasks of the average loss of <D g_t, x_ti> against y_ti.
[[nodiscard]] double objective(const MultitaskDataset& data, const Dictionary& dict,
                               const CodeMatrix& codes, const LossSpec& loss);
[[nodiscard]] double objective(const MultitaskDataset& data, const Matrix& atoms,
                               const Matrix& codes, const LossSpec& loss);

/// (1/m) sum_i loss(<w, x_i>, y_i).
[[nodiscard]] double empirical_risk(const TaskData& task, const Vector& w, const LossSpec& loss);

/// Gradient in the code of (1/m) sum_i loss(<D g, x_i>, y_i).
[[nodiscard]] Vector code_gradient(const Matrix& atoms, const TaskData& task, const Vector& code,
                                   const LossSpec& loss);

/// Gradient in D of the full multitask objective.
[[nodiscard]] Matrix dictionary_gradient(const MultitaskDataset& data, const Matrix& atoms,
                                         const Matrix& codes, const LossSpec& loss);

/// Minimizes one task's empirical risk over codes in the alpha-ball (l1 by
/// default, l2 for per_task_l2) for a fixed dictionary. The warm start is
/// projected first; the result is never worse than it.
[[nodiscard]] Vector code_step(const Dictionary& dict, const TaskData& task, double alpha,
                               const LossSpec& loss, const SolverConfig& cfg,
                               const Vector& warm_start,
                               CodeConstraint constraint = CodeConstraint::per_task_l1);

/// Code update for every task. Aggregate constraints are solved jointly,
/// per-task ones independently (in parallel when cfg.workers > 1).
[[nodiscard]] CodeMatrix code_step_all(const Dictionary& dict, const MultitaskDataset& data,
                                       double alpha, const LossSpec& loss,
                                       const SolverConfig& cfg, const CodeMatrix& warm_start);

/// Minimizes the multitask objective over the dictionary with codes fixed.
[[nodiscard]] Dictionary dictionary_step(const CodeMatrix& codes, const MultitaskDataset& data,
                                         const LossSpec& loss, const SolverConfig& cfg,
                                         const Dictionary& warm_start);

/// Alternating minimization of the sparse-coding multitask objective with K
/// atoms and per-task l1 radius alpha. Keeps the best of cfg.restarts runs.
[[nodiscard]] FitResult fit(const MultitaskDataset& data, int num_atoms, double alpha,
                            const LossSpec& loss, const SolverConfig& cfg);

[[nodiscard]] FitResult fit_variant(const MultitaskDataset& data, int num_atoms, double alpha,
                                    const LossSpec& loss, const SolverConfig& cfg,
                                    ConstraintScheme scheme);

/// Same as fit_variant but starting from a given dictionary (single run).
[[nodiscard]] FitResult fit_from(const MultitaskDataset& data, const Dictionary& initial,
                                 double alpha, const LossSpec& loss, const SolverConfig& cfg,
                                 CodeConstraint code_constraint = CodeConstraint::per_task_l1);

}  // namespace sparsetask
