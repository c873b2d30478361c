#include "oracles.hpp"
#include "sparsetask/core.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sparsetask;

TEST_SUITE("core_model") {

TEST_CASE("predict is an inner product") {
    CHECK(predict(TaskVector{Vector::Constant(1, 0.0)}, Vector::Constant(1, 4.0)) == 0.0);
    Vector w(2), x(2);
    w << 1, 2;
    x << 3, 4;
    CHECK(predict(TaskVector{w}, x) == 11.0);
    CHECK(predict(TaskVector{Vector::Zero(3)}, Vector::Constant(3, 7.0)) == 0.0);
    Vector x3(3);
    x3 << 5, 7, 9;
    CHECK(predict(TaskVector{Vector::Unit(3, 0)}, x3) == 5.0);
    CHECK_THROWS_AS((void)predict(TaskVector{w}, x3), std::invalid_argument);
}

TEST_CASE("predict is linear in the input") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 100; ++trial) {
        const TaskVector w{oracle::random_vector(gen, 6)};
        const Vector x = oracle::random_vector(gen, 6);
        const Vector y = oracle::random_vector(gen, 6);
        const double a = n(gen), b = n(gen);
        CHECK(std::abs(predict(w, a * x + b * y) - (a * predict(w, x) + b * predict(w, y))) <= 1e-12);
    }
}

TEST_CASE("loss values") {
    const LossSpec sq;
    const LossSpec logi(LossKind::logistic, 1.0);
    const LossSpec hinge(LossKind::squared_hinge, 1.0);
    CHECK(loss_value(sq, 2.0, 3.0) == 1.0);
    CHECK(loss_value(sq, 1.5, 1.5) == 0.0);
    CHECK(loss_value(logi, 0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(loss_value(hinge, 2.0, 1.0) == 0.0);
    CHECK(loss_value(hinge, 0.5, 1.0) == doctest::Approx(0.25));
    // stable for large margins
    CHECK(std::isfinite(loss_value(logi, -800.0, 1.0)));
    CHECK(loss_value(logi, -800.0, 1.0) == doctest::Approx(800.0));
    CHECK(loss_value(logi, 800.0, 1.0) >= 0.0);
}

TEST_CASE("loss gradients") {
    const LossSpec sq;
    const LossSpec logi(LossKind::logistic, 1.0);
    CHECK(loss_grad(sq, 2.0, 3.0) == -2.0);
    CHECK(loss_grad(sq, 3.0, 3.0) == 0.0);
    CHECK(loss_grad(logi, 0.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("loss_grad matches central differences") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> n(0.0, 2.0);
    const double h = 1e-5;
    for (auto kind : {LossKind::square, LossKind::squared_hinge, LossKind::logistic}) {
        const LossSpec spec(kind, 1.0);
        int checked = 0;
        while (checked < 100) {
            const double p = n(gen);
            const double y = kind == LossKind::square ? n(gen) : (n(gen) > 0 ? 1.0 : -1.0);
            // skip the squared hinge kink at p*y = 1
            if (kind == LossKind::squared_hinge && std::abs(1.0 - p * y) < 10 * h) continue;
            const double fd = (loss_value(spec, p + h, y) - loss_value(spec, p - h, y)) / (2 * h);
            const double g = loss_grad(spec, p, y);
            CHECK(std::abs(g - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            ++checked;
        }
    }
}

TEST_CASE("square loss is symmetric") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n;
    for (int i = 0; i < 100; ++i) {
        const double a = n(gen), b = n(gen);
        CHECK(loss_value(LossSpec{}, a, b) == loss_value(LossSpec{}, b, a));
    }
}

TEST_CASE("loss names round-trip") {
    for (auto kind : {LossKind::square, LossKind::squared_hinge, LossKind::logistic}) {
        CHECK(loss_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS((void)loss_kind_from_string("hinge"), std::invalid_argument);
}

TEST_CASE("dictionary and codes validate their constraints") {
    Matrix d(2, 2);
    d << 0, 0.5, 1, 0;
    CHECK_NOTHROW(Dictionary{d});
    d(0, 0) = 0.1;
    CHECK_THROWS_AS(Dictionary{d}, std::invalid_argument);
    CHECK_NOTHROW(Dictionary(d, AtomConstraint::frobenius));
    CHECK_THROWS_AS(Dictionary(Matrix::Constant(2, 2, 2.0), AtomConstraint::frobenius),
                    std::invalid_argument);
    Matrix nan = Matrix::Zero(2, 2);
    nan(1, 1) = std::nan("");
    CHECK_THROWS_AS(Dictionary{nan}, std::invalid_argument);

    Matrix g(2, 2);
    g << 1, 0.2, -0.5, 0.2;
    CHECK_NOTHROW(CodeMatrix(g, 1.5));
    CHECK_THROWS_AS(CodeMatrix(g, 1.0), std::invalid_argument);
    CHECK_NOTHROW(CodeMatrix(g, 1.0, CodeConstraint::aggregate_l1));
    CHECK_NOTHROW(CodeMatrix(g, 1.2, CodeConstraint::per_task_l2));
    CHECK_THROWS_AS(CodeMatrix(g, 0.0), std::invalid_argument);
}

TEST_CASE("datasets reject inconsistent shapes") {
    CHECK_THROWS_AS(TaskData(Matrix::Zero(3, 2), Vector::Zero(2)), std::invalid_argument);
    std::vector<TaskData> tasks;
    tasks.emplace_back(Matrix::Zero(3, 2), Vector::Zero(3));
    tasks.emplace_back(Matrix::Zero(3, 4), Vector::Zero(3));
    CHECK_THROWS_AS(MultitaskDataset(std::move(tasks)), std::invalid_argument);
    CHECK_THROWS_AS(MultitaskDataset(std::vector<TaskData>{}), std::invalid_argument);
}

}
