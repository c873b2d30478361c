#include "sparsetask/solver.hpp"

#include "prox_gradient.hpp"
#include "sparsetask/parallel.hpp"
#include "sparsetask/projections.hpp"
#include "sparsetask/rng.hpp"
#include "sparsetask/synth_env.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace sparsetask {

namespace {

double max_abs_label(const TaskData& task) { return task.labels.cwiseAbs().maxCoeff(); }

double max_abs_label(const MultitaskDataset& data) {
    double out = 0.0;
    for (const auto& task : data.tasks()) out = std::max(out, max_abs_label(task));
    return out;
}

/// Mean loss of predictions against labels; writes d(mean loss)/d(pred).
double mean_loss(const LossSpec& loss, const Vector& pred, const Vector& labels,
                 Vector* dpred) {
    const auto m = static_cast<double>(pred.size());
    double sum = 0.0;
    if (dpred) dpred->resize(pred.size());
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        sum += loss_value(loss, pred[i], labels[i]);
        if (dpred) (*dpred)[i] = loss_grad(loss, pred[i], labels[i]) / m;
    }
    return sum / m;
}

void check_shapes(const MultitaskDataset& data, const Matrix& atoms, const Matrix& codes) {
    if (atoms.rows() != data.dim()) {
        throw std::invalid_argument("dictionary has " + std::to_string(atoms.rows()) +
                                    " rows but data has dimension " + std::to_string(data.dim()));
    }
    if (codes.rows() != atoms.cols()) {
        throw std::invalid_argument("codes have " + std::to_string(codes.rows()) +
                                    " rows but dictionary has " + std::to_string(atoms.cols()) +
                                    " atoms");
    }
    if (codes.cols() != static_cast<Eigen::Index>(data.num_tasks())) {
        throw std::invalid_argument("codes have " + std::to_string(codes.cols()) +
                                    " columns but data has " + std::to_string(data.num_tasks()) +
                                    " tasks");
    }
}

Vector project_code(const Vector& v, double alpha, CodeConstraint constraint) {
    return constraint == CodeConstraint::per_task_l2 ? project_l2_ball(v, alpha)
                                                     : project_l1_ball(v, alpha);
}

detail::ProxGradientOptions inner_options(const SolverConfig& cfg) {
    detail::ProxGradientOptions opts;
    opts.max_iters = cfg.max_inner_iters;
    opts.acceleration = cfg.acceleration;
    return opts;
}

constexpr auto no_penalty = [](const auto&) { return 0.0; };

/// Code step against a precomputed design matrix phi = X D.
Vector code_step_design(const Matrix& phi, const TaskData& task, double alpha,
                        const LossSpec& loss, const SolverConfig& cfg, const Vector& warm_start,
                        CodeConstraint constraint) {
    const auto m = static_cast<double>(task.size());
    Vector start = project_code(warm_start, alpha, constraint);
    const double lip =
        loss.curvature(max_abs_label(task)) / m *
        detail::power_iteration(Vector(Vector::Ones(phi.cols())), cfg.power_iters,
                                [&](const Vector& v) { return Vector(phi.transpose() * (phi * v)); });

    auto smooth = [&](const Vector& g) { return mean_loss(loss, phi * g, task.labels, nullptr); };
    auto value_grad = [&](const Vector& g, Vector* grad) {
        Vector dpred;
        const double f = mean_loss(loss, phi * g, task.labels, &dpred);
        *grad = phi.transpose() * dpred;
        return f;
    };
    auto prox = [&](const Vector& z, double) { return project_code(z, alpha, constraint); };
    return detail::accelerated_prox_gradient(std::move(start), lip, inner_options(cfg),
                                             value_grad, smooth, prox, no_penalty, nullptr);
}

/// Joint code step for the aggregate l1 budget.
Matrix code_step_aggregate(const Matrix& atoms, const MultitaskDataset& data, double alpha,
                           const LossSpec& loss, const SolverConfig& cfg, const Matrix& warm) {
    const auto T = static_cast<Eigen::Index>(data.num_tasks());
    const double budget = alpha * static_cast<double>(T);
    std::vector<Matrix> designs;
    designs.reserve(data.num_tasks());
    double lip = 0.0;
    for (const auto& task : data.tasks()) {
        designs.push_back(task.inputs * atoms);
        const Matrix& phi = designs.back();
        const double l = loss.curvature(max_abs_label(task)) / static_cast<double>(task.size()) *
                         detail::power_iteration(
                             Vector(Vector::Ones(phi.cols())), cfg.power_iters,
                             [&](const Vector& v) { return Vector(phi.transpose() * (phi * v)); });
        lip = std::max(lip, l / static_cast<double>(T));
    }
    auto value_grad = [&](const Matrix& g, Matrix* grad) {
        grad->resize(g.rows(), g.cols());
        double total = 0.0;
        for (Eigen::Index t = 0; t < T; ++t) {
            const auto& task = data.task(static_cast<std::size_t>(t));
            Vector dpred;
            total += mean_loss(loss, designs[static_cast<std::size_t>(t)] * g.col(t), task.labels,
                               &dpred);
            grad->col(t) = designs[static_cast<std::size_t>(t)].transpose() * dpred /
                           static_cast<double>(T);
        }
        return total / static_cast<double>(T);
    };
    auto smooth = [&](const Matrix& g) {
        double total = 0.0;
        for (Eigen::Index t = 0; t < T; ++t) {
            total += mean_loss(loss, designs[static_cast<std::size_t>(t)] * g.col(t),
                               data.task(static_cast<std::size_t>(t)).labels, nullptr);
        }
        return total / static_cast<double>(T);
    };
    auto prox = [&](const Matrix& z, double) { return project_aggregate_l1(z, budget); };
    return detail::accelerated_prox_gradient(project_aggregate_l1(warm, budget), lip,
                                             inner_options(cfg), value_grad, smooth, prox,
                                             no_penalty, nullptr);
}

Dictionary random_dictionary(Eigen::Index d, int K, Rng& rng, AtomConstraint constraint) {
    Matrix atoms(d, K);
    for (int k = 0; k < K; ++k) atoms.col(k) = sample_sphere(static_cast<int>(d), rng);
    return Dictionary(project_atoms(atoms, constraint), constraint);
}

bool converged(double prev, double current, double rel_tol) {
    if (current == 0.0) return true;
    return std::abs(prev - current) <= rel_tol * std::max(std::abs(prev), 1e-300);
}

}  // namespace

void SolverConfig::validate() const {
    if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
    if (max_inner_iters < 1) throw std::invalid_argument("max_inner_iters must be >= 1");
    if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
        throw std::invalid_argument("rel_tol must lie in (0, 1)");
    }
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (power_iters < 1) throw std::invalid_argument("power_iters must be >= 1");
}

AtomConstraint atom_constraint(ConstraintScheme scheme) noexcept {
    return scheme == ConstraintScheme::frobenius_aggregate_l1 ? AtomConstraint::frobenius
                                                              : AtomConstraint::unit_columns;
}

CodeConstraint code_constraint(ConstraintScheme scheme) noexcept {
    switch (scheme) {
        case ConstraintScheme::column_l2_task_l1: return CodeConstraint::per_task_l1;
        case ConstraintScheme::frobenius_aggregate_l1:
        case ConstraintScheme::column_l2_aggregate_l1: return CodeConstraint::aggregate_l1;
        case ConstraintScheme::column_l2_task_l2: return CodeConstraint::per_task_l2;
    }
    return CodeConstraint::per_task_l1;
}

std::string_view to_string(ConstraintScheme scheme) noexcept {
    switch (scheme) {
        case ConstraintScheme::column_l2_task_l1: return "per-column-l2+per-task-l1";
        case ConstraintScheme::frobenius_aggregate_l1: return "frobenius+aggregate-l1";
        case ConstraintScheme::column_l2_aggregate_l1: return "per-column-l2+aggregate-l1";
        case ConstraintScheme::column_l2_task_l2: return "per-column-l2+per-task-l2";
    }
    return "per-column-l2+per-task-l1";
}

ConstraintScheme scheme_from_string(std::string_view name) {
    for (auto s : {ConstraintScheme::column_l2_task_l1, ConstraintScheme::frobenius_aggregate_l1,
                   ConstraintScheme::column_l2_aggregate_l1, ConstraintScheme::column_l2_task_l2}) {
        if (name == to_string(s)) return s;
    }
    throw std::invalid_argument("unknown constraint scheme '" + std::string(name) + "'");
}

double empirical_risk(const TaskData& task, const Vector& w, const LossSpec& loss) {
    if (w.size() != task.dim()) {
        throw std::invalid_argument("task vector has dimension " + std::to_string(w.size()) +
                                    " but task inputs have dimension " +
                                    std::to_string(task.dim()));
    }
    return mean_loss(loss, task.inputs * w, task.labels, nullptr);
}

double objective(const MultitaskDataset& data, const Matrix& atoms, const Matrix& codes,
                 const LossSpec& loss) {
    check_shapes(data, atoms, codes);
    double total = 0.0;
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const Vector w = atoms * codes.col(static_cast<Eigen::Index>(t));
        total += mean_loss(loss, data.task(t).inputs * w, data.task(t).labels, nullptr);
    }
    return total / static_cast<double>(data.num_tasks());
}

double objective(const MultitaskDataset& data, const Dictionary& dict, const CodeMatrix& codes,
                 const LossSpec& loss) {
    return objective(data, dict.atoms(), codes.codes(), loss);
}

Vector code_gradient(const Matrix& atoms, const TaskData& task, const Vector& code,
                     const LossSpec& loss) {
    if (atoms.rows() != task.dim() || atoms.cols() != code.size()) {
        throw std::invalid_argument("code_gradient: dimension mismatch");
    }
    const Matrix phi = task.inputs * atoms;
    Vector dpred;
    mean_loss(loss, phi * code, task.labels, &dpred);
    return phi.transpose() * dpred;
}

Matrix dictionary_gradient(const MultitaskDataset& data, const Matrix& atoms, const Matrix& codes,
                           const LossSpec& loss) {
    check_shapes(data, atoms, codes);
    Matrix grad = Matrix::Zero(atoms.rows(), atoms.cols());
    const auto T = static_cast<double>(data.num_tasks());
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const auto& task = data.task(t);
        const auto g = codes.col(static_cast<Eigen::Index>(t));
        Vector dpred;
        mean_loss(loss, task.inputs * (atoms * g), task.labels, &dpred);
        grad.noalias() += (task.inputs.transpose() * dpred) * g.transpose() / T;
    }
    return grad;
}

Vector code_step(const Dictionary& dict, const TaskData& task, double alpha, const LossSpec& loss,
                 const SolverConfig& cfg, const Vector& warm_start, CodeConstraint constraint) {
    if (dict.dim() != task.dim()) {
        throw std::invalid_argument("code_step: dictionary dimension " +
                                    std::to_string(dict.dim()) + " vs task dimension " +
                                    std::to_string(task.dim()));
    }
    if (warm_start.size() != dict.num_atoms()) {
        throw std::invalid_argument("code_step: warm start has wrong length");
    }
    if (!(alpha > 0.0)) throw std::invalid_argument("code_step: alpha must be positive");
    const Matrix phi = task.inputs * dict.atoms();
    return code_step_design(phi, task, alpha, loss, cfg, warm_start, constraint);
}

CodeMatrix code_step_all(const Dictionary& dict, const MultitaskDataset& data, double alpha,
                         const LossSpec& loss, const SolverConfig& cfg,
                         const CodeMatrix& warm_start) {
    check_shapes(data, dict.atoms(), warm_start.codes());
    const auto constraint = warm_start.constraint();
    if (constraint == CodeConstraint::aggregate_l1) {
        return CodeMatrix(
            code_step_aggregate(dict.atoms(), data, alpha, loss, cfg, warm_start.codes()), alpha,
            constraint);
    }
    Matrix codes(dict.num_atoms(), static_cast<Eigen::Index>(data.num_tasks()));
    parallel_for(data.num_tasks(), cfg.workers, [&](std::size_t t) {
        const auto col = static_cast<Eigen::Index>(t);
        const Matrix phi = data.task(t).inputs * dict.atoms();
        codes.col(col) = code_step_design(phi, data.task(t), alpha, loss, cfg,
                                          warm_start.codes().col(col), constraint);
    });
    return CodeMatrix(std::move(codes), alpha, constraint);
}

Dictionary dictionary_step(const CodeMatrix& codes, const MultitaskDataset& data,
                           const LossSpec& loss, const SolverConfig& cfg,
                           const Dictionary& warm_start) {
    const Matrix& G = codes.codes();
    check_shapes(data, warm_start.atoms(), G);
    const auto T = static_cast<double>(data.num_tasks());
    const auto constraint = warm_start.constraint();

    // Hessian of the square-loss objective in D, scaled by the loss curvature:
    // V -> (c/T) sum_t (1/m_t) X_t' X_t V g_t g_t'
    const double curvature = loss.curvature(max_abs_label(data));
    const double lip = detail::power_iteration(
        Matrix(Matrix::Ones(warm_start.dim(), warm_start.num_atoms())), cfg.power_iters,
        [&](const Matrix& v) {
            Matrix out = Matrix::Zero(v.rows(), v.cols());
            for (std::size_t t = 0; t < data.num_tasks(); ++t) {
                const auto& x = data.task(t).inputs;
                const auto g = G.col(static_cast<Eigen::Index>(t));
                const Vector xv = x * (v * g);
                out.noalias() += (x.transpose() * xv) * g.transpose() /
                                 static_cast<double>(x.rows());
            }
            return Matrix(out * (curvature / T));
        });

    auto smooth = [&](const Matrix& atoms) { return objective(data, atoms, G, loss); };
    auto value_grad = [&](const Matrix& atoms, Matrix* grad) {
        *grad = dictionary_gradient(data, atoms, G, loss);
        return objective(data, atoms, G, loss);
    };
    auto prox = [&](const Matrix& z, double) { return project_atoms(z, constraint); };
    Matrix atoms = detail::accelerated_prox_gradient(Matrix(warm_start.atoms()), lip,
                                                     inner_options(cfg), value_grad, smooth, prox,
                                                     no_penalty, nullptr);
    return Dictionary(std::move(atoms), constraint);
}

FitResult fit_from(const MultitaskDataset& data, const Dictionary& initial, double alpha,
                   const LossSpec& loss, const SolverConfig& cfg, CodeConstraint code_constraint) {
    cfg.validate();
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be positive and finite");
    }
    Dictionary dict = initial;
    CodeMatrix codes(Matrix::Zero(dict.num_atoms(), static_cast<Eigen::Index>(data.num_tasks())),
                     alpha, code_constraint);
    std::vector<double> trace;
    double prev = objective(data, dict, codes, loss);
    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        codes = code_step_all(dict, data, alpha, loss, cfg, codes);
        dict = dictionary_step(codes, data, loss, cfg, dict);
        const double current = objective(data, dict, codes, loss);
        trace.push_back(current);
        if (converged(prev, current, cfg.rel_tol)) break;
        prev = current;
    }
    const double final_objective = trace.back();
    return FitResult{std::move(dict), std::move(codes), std::move(trace), final_objective, 0};
}

FitResult fit_variant(const MultitaskDataset& data, int num_atoms, double alpha,
                      const LossSpec& loss, const SolverConfig& cfg, ConstraintScheme scheme) {
    cfg.validate();
    if (num_atoms < 1) throw std::invalid_argument("number of atoms K must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be positive and finite");
    }
    const Rng root(cfg.seed);
    std::optional<FitResult> best;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng = root.child(static_cast<std::uint64_t>(r));
        const Dictionary init =
            random_dictionary(data.dim(), num_atoms, rng, atom_constraint(scheme));
        FitResult result = fit_from(data, init, alpha, loss, cfg, code_constraint(scheme));
        result.restart_index = r;
        if (!best || result.final_objective < best->final_objective) best = std::move(result);
    }
    return std::move(*best);
}

FitResult fit(const MultitaskDataset& data, int num_atoms, double alpha, const LossSpec& loss,
              const SolverConfig& cfg) {
    return fit_variant(data, num_atoms, alpha, loss, cfg, ConstraintScheme::column_l2_task_l1);
}

}  // namespace sparsetask
