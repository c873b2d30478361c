#include "sparsetask/baselines.hpp"

#include "prox_gradient.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace sparsetask {

namespace {

void require_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("regularization lambda must be positive and finite");
    }
}

double nuclear_norm(const Matrix& w) {
    return Eigen::JacobiSVD<Matrix>(w).singularValues().sum();
}

Matrix shrink_singular_values(const Matrix& w, double threshold) {
    Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector s = (svd.singularValues().array() - threshold).max(0.0).matrix();
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace

Matrix stack_columns(const std::vector<TaskVector>& vectors) {
    if (vectors.empty()) return Matrix();
    Matrix out(vectors.front().w.size(), static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t t = 0; t < vectors.size(); ++t) out.col(static_cast<Eigen::Index>(t)) = vectors[t].w;
    return out;
}

TaskVector ridge_fit(const TaskData& task, double lambda) {
    require_lambda(lambda);
    const auto m = static_cast<double>(task.size());
    Matrix lhs = task.inputs.transpose() * task.inputs / m;
    lhs.diagonal().array() += lambda;
    const Vector rhs = task.inputs.transpose() * task.labels / m;
    return TaskVector{lhs.ldlt().solve(rhs)};
}

namespace {

double data_fit(const MultitaskDataset& data, const Matrix& stack) {
    double fit = 0.0;
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const auto& task = data.task(t);
        fit += (task.inputs * stack.col(static_cast<Eigen::Index>(t)) - task.labels).squaredNorm() /
               static_cast<double>(task.size());
    }
    return fit / static_cast<double>(data.num_tasks());
}

}  // namespace

double trace_norm_objective(const MultitaskDataset& data, const Matrix& stack, double lambda) {
    if (stack.rows() != data.dim() ||
        stack.cols() != static_cast<Eigen::Index>(data.num_tasks())) {
        throw std::invalid_argument("trace-norm stack has the wrong shape");
    }
    return data_fit(data, stack) + lambda * nuclear_norm(stack);
}

TraceNormResult trace_norm_fit_detailed(const MultitaskDataset& data, double lambda,
                                        const SolverConfig& cfg) {
    require_lambda(lambda);
    cfg.validate();
    const auto T = static_cast<double>(data.num_tasks());
    const auto d = data.dim();

    // block-diagonal Hessian: L = max_t 2 lambda_max(X_t' X_t) / (m_t T)
    double lip = 0.0;
    for (const auto& task : data.tasks()) {
        const Matrix gram = task.inputs.transpose() * task.inputs;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        lip = std::max(lip, 2.0 * eig.eigenvalues().maxCoeff() / (static_cast<double>(task.size()) * T));
    }

    auto smooth = [&](const Matrix& w) { return data_fit(data, w); };
    auto value_grad = [&](const Matrix& w, Matrix* grad) {
        grad->resize(w.rows(), w.cols());
        double fit = 0.0;
        for (std::size_t t = 0; t < data.num_tasks(); ++t) {
            const auto& task = data.task(t);
            const auto col = static_cast<Eigen::Index>(t);
            const Vector r = task.inputs * w.col(col) - task.labels;
            const auto m = static_cast<double>(task.size());
            fit += r.squaredNorm() / m;
            grad->col(col) = 2.0 * task.inputs.transpose() * r / (m * T);
        }
        return fit / T;
    };
    auto prox = [&](const Matrix& z, double step) { return shrink_singular_values(z, step * lambda); };
    auto penalty = [&](const Matrix& w) { return lambda * nuclear_norm(w); };

    detail::ProxGradientOptions opts;
    opts.max_iters = cfg.max_outer_iters;
    opts.acceleration = cfg.acceleration;
    opts.step_tol = cfg.rel_tol * 1e-3;

    TraceNormResult result;
    double final_objective = 0.0;
    Matrix stack = detail::accelerated_prox_gradient(
        Matrix(Matrix::Zero(d, static_cast<Eigen::Index>(data.num_tasks()))), lip, opts,
        value_grad, smooth, prox, penalty, &final_objective, &result.objective_trace);
    result.final_objective = final_objective;
    for (Eigen::Index t = 0; t < stack.cols(); ++t) result.task_vectors.push_back(TaskVector{stack.col(t)});
    return result;
}

std::vector<TaskVector> trace_norm_fit(const MultitaskDataset& data, double lambda,
                                       const SolverConfig& cfg) {
    return trace_norm_fit_detailed(data, lambda, cfg).task_vectors;
}

TaskVector trace_norm_transfer(const std::vector<TaskVector>& learned, const TaskData& task,
                               double lambda) {
    require_lambda(lambda);
    const Matrix w = stack_columns(learned);
    if (w.rows() != task.dim()) throw std::invalid_argument("trace_norm_transfer: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(w * w.transpose());
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const double trace = root.sum();
    if (!(trace > 0.0)) return TaskVector{Vector::Zero(task.dim())};
    // S^{1/2} = U diag(sqrt(root / trace)) U'
    const Matrix half = eig.eigenvectors() * (root / trace).cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().transpose();
    const TaskVector v = ridge_fit(TaskData(task.inputs * half, task.labels), lambda);
    return TaskVector{half * v.w};
}

}  // namespace sparsetask
