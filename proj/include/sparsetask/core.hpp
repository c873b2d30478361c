#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sparsetask {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Slack allowed on every norm constraint after repeated projections.
inline constexpr double kConstraintTol = 1e-12;

/// How the atoms of a dictionary are constrained.
enum class AtomConstraint {
    unit_columns,  ///< every column in the closed unit Euclidean ball
    frobenius,     ///< whole matrix in the Frobenius ball of radius sqrt(K)
};

/// How the code vectors are constrained.
enum class CodeConstraint {
    per_task_l1,   ///< each column in the l1 ball of radius alpha
    aggregate_l1,  ///< all columns jointly in the l1 ball of radius alpha * T
    per_task_l2,   ///< each column in the l2 ball of radius alpha
};

/// d x K matrix whose columns (atoms) map codes into input space.
///
/// The atom constraint is checked on construction; a Dictionary value is
/// always feasible.
class Dictionary {
public:
    explicit Dictionary(Matrix atoms, AtomConstraint constraint = AtomConstraint::unit_columns);

    [[nodiscard]] const Matrix& atoms() const noexcept { return atoms_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return atoms_.rows(); }
    [[nodiscard]] Eigen::Index num_atoms() const noexcept { return atoms_.cols(); }
    [[nodiscard]] AtomConstraint constraint() const noexcept { return constraint_; }

private:
    Matrix atoms_;
    AtomConstraint constraint_;
};

/// K x T matrix of code vectors, one column per task.
class CodeMatrix {
public:
    CodeMatrix(Matrix codes, double alpha, CodeConstraint constraint = CodeConstraint::per_task_l1);

    [[nodiscard]] const Matrix& codes() const noexcept { return codes_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] CodeConstraint constraint() const noexcept { return constraint_; }
    [[nodiscard]] Eigen::Index num_atoms() const noexcept { return codes_.rows(); }
    [[nodiscard]] Eigen::Index num_tasks() const noexcept { return codes_.cols(); }

private:
    Matrix codes_;
    double alpha_;
    CodeConstraint constraint_;
};

/// One task's training sample: m input rows and m labels.
struct TaskData {
    TaskData(Matrix inputs, Vector labels);

    Matrix inputs;  // m x d
    Vector labels;  // m

    [[nodiscard]] Eigen::Index size() const noexcept { return inputs.rows(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return inputs.cols(); }
};

/// T tasks over a common input dimension. Sample sizes may differ per task.
class MultitaskDataset {
public:
    explicit MultitaskDataset(std::vector<TaskData> tasks);

    [[nodiscard]] const std::vector<TaskData>& tasks() const noexcept { return tasks_; }
    [[nodiscard]] const TaskData& task(std::size_t t) const { return tasks_.at(t); }
    [[nodiscard]] std::size_t num_tasks() const noexcept { return tasks_.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return tasks_.front().dim(); }

private:
    std::vector<TaskData> tasks_;
};

enum class LossKind { square, squared_hinge, logistic };

/// Loss function plus the Lipschitz constant used when evaluating bounds.
/// Losses are not clipped to [0, 1]; the caller owns that assumption.
struct LossSpec {
    LossKind kind = LossKind::square;
    double lipschitz = 1.0;

    LossSpec() = default;
    LossSpec(LossKind k, double l);

    /// Upper bound on the second derivative in the prediction argument,
    /// given the largest label magnitude in the data.
    [[nodiscard]] double curvature(double max_abs_label) const noexcept;
};

[[nodiscard]] std::string_view to_string(LossKind kind) noexcept;
[[nodiscard]] LossKind loss_kind_from_string(std::string_view name);

/// A linear predictor x -> <w, x>.
struct TaskVector {
    Vector w;
};

[[nodiscard]] double predict(const TaskVector& w, const Vector& x);

[[nodiscard]] double loss_value(const LossSpec& spec, double prediction, double label);

/// Derivative of loss_value with respect to the prediction.
[[nodiscard]] double loss_grad(const LossSpec& spec, double prediction, double label);

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& m, std::string_view what);

}  // namespace sparsetask
