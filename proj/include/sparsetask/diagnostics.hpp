#pragma once

#include "sparsetask/core.hpp"

namespace sparsetask {

/// (1/m) X'X for the m x d input matrix of one task.
[[nodiscard]] Matrix empirical_covariance(const Matrix& task_inputs);

struct EigenEstimate {
    double value = 0.0;
    bool converged = true;  ///< false: power iteration stalled, value is an upper bound
};

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from the
/// normalized all-ones vector. If the iterate collapses (start orthogonal to
/// the range) it restarts once from the coordinate with the largest diagonal
/// entry. Without convergence after max_steps, returns min(Gershgorin bound,
/// trace) and flags it.
[[nodiscard]] EigenEstimate largest_eigenvalue(const Matrix& psd, int max_steps = 200,
                                               double tol = 1e-10);

struct ComplexityStats {
    double s1 = 0.0;      ///< average trace of the per-task covariance
    double s_inf = 0.0;   ///< average largest eigenvalue
    bool all_converged = true;
};

[[nodiscard]] ComplexityStats complexity_stats(const MultitaskDataset& data);

/// Right-hand side of the multitask excess-risk bound:
/// L a sqrt(2 S1 (K + 12) / (m T)) + L a sqrt(8 Sinf ln(2K) / m) + sqrt(8 ln(4/delta) / (m T)).
[[nodiscard]] double thm1_rhs(double lipschitz, double alpha, double K, double m, double T,
                              double s1, double s_inf, double delta);

/// Right-hand side of the transfer excess-risk bound:
/// L a K sqrt(2 pi S1 / T) + 4 L a sqrt(Sinf_env (2 + ln K) / m) + sqrt(8 ln(4/delta) / T).
[[nodiscard]] double thm2_rhs(double lipschitz, double alpha, double K, double m, double T,
                              double s1, double s_inf_env, double delta);

/// Infinite-sample sparse-coding bound:
/// 2 a (1 + a) K sqrt(2 pi / T) + 8 sqrt(ln(4/delta) / T).
[[nodiscard]] double sc_limit_rhs(double alpha, double K, double T, double delta);

struct BoundInputs {
    double lipschitz = 1.0;
    double alpha = 1.0;
    double K = 1.0;
    double m = 1.0;
    double T = 1.0;
};

struct BoundReport {
    double s1 = 0.0;
    double s_inf = 0.0;
    bool eigen_converged = true;
    double thm1_rhs = 0.0;
    double thm2_rhs = 0.0;  ///< uses s_inf as the estimate of the environment average
    double sc_limit_rhs = 0.0;
    double delta = 0.05;
    BoundInputs inputs;
};

/// Statistics plus all three bounds. m is the mean sample size when tasks
/// differ, T the number of tasks.
[[nodiscard]] BoundReport bound_report(const MultitaskDataset& data, double lipschitz,
                                       double alpha, int K, double delta);

}  // namespace sparsetask
