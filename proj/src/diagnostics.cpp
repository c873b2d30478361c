#include "sparsetask/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sparsetask {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be nonnegative and finite");
    }
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::domain_error("delta must lie in (0, 1), got " + std::to_string(delta));
    }
}

double confidence_term(double delta, double n) { return std::sqrt(8.0 * std::log(4.0 / delta) / n); }

}  // namespace

Matrix empirical_covariance(const Matrix& task_inputs) {
    if (task_inputs.rows() < 1) throw std::invalid_argument("empirical_covariance: m must be >= 1");
    require_finite(task_inputs, "covariance input");
    return task_inputs.transpose() * task_inputs / static_cast<double>(task_inputs.rows());
}

EigenEstimate largest_eigenvalue(const Matrix& psd, int max_steps, double tol) {
    const auto n = psd.rows();
    const double trace = psd.trace();
    if (n == 0 || trace <= 0.0) return {0.0, true};

    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    bool restarted = false;
    double estimate = v.dot(psd * v);
    for (int step = 0; step < max_steps; ++step) {
        Vector next = psd * v;
        const double norm = next.norm();
        if (norm <= 1e-14 * trace) {
            // start was orthogonal to the range
            if (restarted) break;
            Eigen::Index k = 0;
            psd.diagonal().maxCoeff(&k);
            v = Vector::Unit(n, k);
            estimate = psd(k, k);
            restarted = true;
            continue;
        }
        v = next / norm;
        const double rayleigh = v.dot(psd * v);
        if (std::abs(rayleigh - estimate) <= tol * std::max(1.0, std::abs(rayleigh))) {
            return {rayleigh, true};
        }
        estimate = rayleigh;
    }
    double gershgorin = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) gershgorin = std::max(gershgorin, psd.row(i).cwiseAbs().sum());
    return {std::min(gershgorin, trace), false};
}

ComplexityStats complexity_stats(const MultitaskDataset& data) {
    ComplexityStats out;
    double s1 = 0.0;
    double s_inf = 0.0;
    for (const auto& task : data.tasks()) {
        // cheaper m x m Gram matrix when m < d; same nonzero spectrum
        const auto m = static_cast<double>(task.size());
        const Matrix cov = task.size() < task.dim()
                               ? Matrix(task.inputs * task.inputs.transpose() / m)
                               : empirical_covariance(task.inputs);
        s1 += task.inputs.squaredNorm() / m;
        const EigenEstimate top = largest_eigenvalue(cov);
        s_inf += top.value;
        out.all_converged = out.all_converged && top.converged;
    }
    const auto T = static_cast<double>(data.num_tasks());
    out.s1 = s1 / T;
    out.s_inf = s_inf / T;
    return out;
}

double thm1_rhs(double lipschitz, double alpha, double K, double m, double T, double s1,
                double s_inf, double delta) {
    require_nonnegative(lipschitz, "L");
    require_positive(alpha, "alpha");
    if (!(K >= 1.0)) throw std::invalid_argument("K must be >= 1");
    require_positive(m, "m");
    require_positive(T, "T");
    require_nonnegative(s1, "S1");
    require_nonnegative(s_inf, "Sinf");
    require_delta(delta);
    const double la = lipschitz * alpha;
    return la * std::sqrt(2.0 * s1 * (K + 12.0) / (m * T)) +
           la * std::sqrt(8.0 * s_inf * std::log(2.0 * K) / m) + confidence_term(delta, m * T);
}

double thm2_rhs(double lipschitz, double alpha, double K, double m, double T, double s1,
                double s_inf_env, double delta) {
    require_nonnegative(lipschitz, "L");
    require_positive(alpha, "alpha");
    if (!(K >= 1.0)) throw std::invalid_argument("K must be >= 1");
    require_positive(m, "m");
    require_positive(T, "T");
    require_nonnegative(s1, "S1");
    require_nonnegative(s_inf_env, "Sinf");
    require_delta(delta);
    const double la = lipschitz * alpha;
    return la * K * std::sqrt(2.0 * std::numbers::pi * s1 / T) +
           4.0 * la * std::sqrt(s_inf_env * (2.0 + std::log(K)) / m) + confidence_term(delta, T);
}

double sc_limit_rhs(double alpha, double K, double T, double delta) {
    require_positive(alpha, "alpha");
    if (!(K >= 1.0)) throw std::invalid_argument("K must be >= 1");
    require_positive(T, "T");
    require_delta(delta);
    return 2.0 * alpha * (1.0 + alpha) * K * std::sqrt(2.0 * std::numbers::pi / T) +
           8.0 * std::sqrt(std::log(4.0 / delta) / T);
}

BoundReport bound_report(const MultitaskDataset& data, double lipschitz, double alpha, int K,
                         double delta) {
    require_delta(delta);
    const ComplexityStats stats = complexity_stats(data);
    double total = 0.0;
    for (const auto& task : data.tasks()) total += static_cast<double>(task.size());
    const auto T = static_cast<double>(data.num_tasks());
    BoundReport r;
    r.s1 = stats.s1;
    r.s_inf = stats.s_inf;
    r.eigen_converged = stats.all_converged;
    r.delta = delta;
    r.inputs = BoundInputs{lipschitz, alpha, static_cast<double>(K), total / T, T};
    r.thm1_rhs = thm1_rhs(lipschitz, alpha, K, r.inputs.m, T, r.s1, r.s_inf, delta);
    r.thm2_rhs = thm2_rhs(lipschitz, alpha, K, r.inputs.m, T, r.s1, r.s_inf, delta);
    r.sc_limit_rhs = sc_limit_rhs(alpha, K, T, delta);
    return r;
}

}  // namespace sparsetask
