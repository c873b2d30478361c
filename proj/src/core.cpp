#include "sparsetask/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsetask {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

void require_finite(const Eigen::Ref<const Matrix>& m, std::string_view what) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + " contains non-finite entries");
    }
}

Dictionary::Dictionary(Matrix atoms, AtomConstraint constraint)
    : atoms_(std::move(atoms)), constraint_(constraint) {
    if (atoms_.rows() < 1 || atoms_.cols() < 1) {
        throw std::invalid_argument("dictionary must be at least 1x1, got " +
                                    dims(atoms_.rows(), atoms_.cols()));
    }
    require_finite(atoms_, "dictionary");
    if (constraint_ == AtomConstraint::unit_columns) {
        for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
            const double norm = atoms_.col(k).norm();
            if (norm > 1.0 + kConstraintTol) {
                throw std::invalid_argument("dictionary atom " + std::to_string(k) +
                                            " has norm " + std::to_string(norm) + " > 1");
            }
        }
    } else {
        const double radius = std::sqrt(static_cast<double>(atoms_.cols()));
        if (atoms_.norm() > radius + kConstraintTol) {
            throw std::invalid_argument("dictionary Frobenius norm exceeds sqrt(K)");
        }
    }
}

CodeMatrix::CodeMatrix(Matrix codes, double alpha, CodeConstraint constraint)
    : codes_(std::move(codes)), alpha_(alpha), constraint_(constraint) {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
        throw std::invalid_argument("code radius alpha must be positive and finite");
    }
    require_finite(codes_, "code matrix");
    switch (constraint_) {
        case CodeConstraint::per_task_l1:
            for (Eigen::Index t = 0; t < codes_.cols(); ++t) {
                if (codes_.col(t).lpNorm<1>() > alpha_ + kConstraintTol) {
                    throw std::invalid_argument("code " + std::to_string(t) +
                                                " violates the l1 constraint");
                }
            }
            break;
        case CodeConstraint::aggregate_l1:
            if (codes_.lpNorm<1>() >
                alpha_ * static_cast<double>(codes_.cols()) + kConstraintTol) {
                throw std::invalid_argument("codes violate the aggregate l1 budget");
            }
            break;
        case CodeConstraint::per_task_l2:
            for (Eigen::Index t = 0; t < codes_.cols(); ++t) {
                if (codes_.col(t).norm() > alpha_ + kConstraintTol) {
                    throw std::invalid_argument("code " + std::to_string(t) +
                                                " violates the l2 constraint");
                }
            }
            break;
    }
}

TaskData::TaskData(Matrix x, Vector y) : inputs(std::move(x)), labels(std::move(y)) {
    if (inputs.rows() < 1 || inputs.cols() < 1) {
        throw std::invalid_argument("task needs at least one example and one input dimension");
    }
    if (inputs.rows() != labels.size()) {
        throw std::invalid_argument("task has " + std::to_string(inputs.rows()) +
                                    " input rows but " + std::to_string(labels.size()) +
                                    " labels");
    }
    require_finite(inputs, "task inputs");
    require_finite(labels, "task labels");
}

MultitaskDataset::MultitaskDataset(std::vector<TaskData> tasks) : tasks_(std::move(tasks)) {
    if (tasks_.empty()) {
        throw std::invalid_argument("dataset must contain at least one task");
    }
    const auto d = tasks_.front().dim();
    for (std::size_t t = 1; t < tasks_.size(); ++t) {
        if (tasks_[t].dim() != d) {
            throw std::invalid_argument("task " + std::to_string(t) + " has dimension " +
                                        std::to_string(tasks_[t].dim()) + ", expected " +
                                        std::to_string(d));
        }
    }
}

LossSpec::LossSpec(LossKind k, double l) : kind(k), lipschitz(l) {
    if (!std::isfinite(l) || l < 0.0) {
        throw std::invalid_argument("Lipschitz constant must be finite and nonnegative");
    }
}

double LossSpec::curvature(double max_abs_label) const noexcept {
    const double y2 = max_abs_label * max_abs_label;
    switch (kind) {
        case LossKind::square: return 2.0;
        case LossKind::squared_hinge: return 2.0 * y2;
        case LossKind::logistic: return 0.25 * y2;
    }
    return 2.0;
}

std::string_view to_string(LossKind kind) noexcept {
    switch (kind) {
        case LossKind::square: return "square";
        case LossKind::squared_hinge: return "squared-hinge";
        case LossKind::logistic: return "logistic";
    }
    return "square";
}

LossKind loss_kind_from_string(std::string_view name) {
    if (name == "square") return LossKind::square;
    if (name == "squared-hinge") return LossKind::squared_hinge;
    if (name == "logistic") return LossKind::logistic;
    throw std::invalid_argument("unknown loss '" + std::string(name) +
                                "' (expected square, squared-hinge or logistic)");
}

double predict(const TaskVector& w, const Vector& x) {
    if (w.w.size() != x.size()) {
        throw std::invalid_argument("predict: task vector has dimension " +
                                    std::to_string(w.w.size()) + " but input has dimension " +
                                    std::to_string(x.size()));
    }
    return w.w.dot(x);
}

double loss_value(const LossSpec& spec, double prediction, double label) {
    if (!std::isfinite(prediction) || !std::isfinite(label)) {
        throw std::invalid_argument("loss_value: non-finite input");
    }
    switch (spec.kind) {
        case LossKind::square: {
            const double r = prediction - label;
            return r * r;
        }
        case LossKind::squared_hinge: {
            const double h = std::max(0.0, 1.0 - prediction * label);
            return h * h;
        }
        case LossKind::logistic: {
            // ln(1 + exp(-z)) without overflow for large |z|
            const double z = prediction * label;
            return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
        }
    }
    return 0.0;
}

double loss_grad(const LossSpec& spec, double prediction, double label) {
    if (!std::isfinite(prediction) || !std::isfinite(label)) {
        throw std::invalid_argument("loss_grad: non-finite input");
    }
    switch (spec.kind) {
        case LossKind::square: return 2.0 * (prediction - label);
        case LossKind::squared_hinge: {
            const double h = std::max(0.0, 1.0 - prediction * label);
            return -2.0 * label * h;
        }
        case LossKind::logistic: {
            const double z = prediction * label;
            // -label * sigmoid(-z)
            const double s = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                                      : 1.0 / (1.0 + std::exp(z));
            return -label * s;
        }
    }
    return 0.0;
}

}  // namespace sparsetask
