#include "oracles.hpp"
#include "sparsetask/projections.hpp"

#include <doctest.h>

#include <random>

using namespace sparsetask;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace

TEST_SUITE("projections") {

TEST_CASE("l1 ball examples") {
    CHECK(bitwise_equal(project_l1_ball(vec({0.5, -0.3}), 1.0), vec({0.5, -0.3})));
    CHECK((project_l1_ball(vec({3, 1}), 2.0) - vec({2, 0})).norm() <= 1e-12);
    CHECK((project_l1_ball(vec({2, 2}), 2.0) - vec({1, 1})).norm() <= 1e-12);
    // and the grid oracle agrees
    CHECK((oracle::grid_project_l1(vec({3, 1}), 2.0) - vec({2, 0})).norm() <= 1e-3);
    CHECK((oracle::grid_project_l1(vec({2, 2}), 2.0) - vec({1, 1})).norm() <= 1e-3);
    CHECK_THROWS_AS((void)project_l1_ball(vec({1}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)project_l1_ball(vec({std::nan("")}), 1.0), std::invalid_argument);
}

TEST_CASE("l1 projection satisfies the soft-threshold characterization") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector v = oracle::random_vector(gen, 8, 2.0);
        const double alpha = 0.5 + trial % 5;
        const Vector u = project_l1_ball(v, alpha);
        if (v.lpNorm<1>() <= alpha) {
            CHECK(bitwise_equal(u, v));
            continue;
        }
        CHECK(u.lpNorm<1>() == doctest::Approx(alpha).epsilon(1e-12));
        // a common threshold theta removed from every surviving coordinate
        double theta = -1.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (u[i] != 0.0) {
                CHECK(u[i] * v[i] > 0.0);
                const double t = std::abs(v[i]) - std::abs(u[i]);
                if (theta < 0) theta = t;
                CHECK(t == doctest::Approx(theta).epsilon(1e-9));
            }
        }
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (u[i] == 0.0) CHECK(std::abs(v[i]) <= theta + 1e-9);
        }
    }
}

TEST_CASE("l1 projection commutes with permutations and sign flips") {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector v = oracle::random_vector(gen, 6, 3.0);
        Eigen::PermutationMatrix<Eigen::Dynamic> p(6);
        p.setIdentity();
        std::shuffle(p.indices().data(), p.indices().data() + 6, gen);
        Vector signs(6);
        for (int i = 0; i < 6; ++i) signs[i] = (gen() & 1) ? 1.0 : -1.0;
        const Vector lhs = project_l1_ball((p * v).cwiseProduct(signs), 2.0);
        const Vector rhs = (p * project_l1_ball(v, 2.0)).cwiseProduct(signs);
        CHECK((lhs - rhs).norm() <= 1e-12);
    }
}

TEST_CASE("l2 ball examples") {
    CHECK((project_l2_ball(vec({0, 2}), 1.0) - vec({0, 1})).norm() == 0.0);
    CHECK(bitwise_equal(project_l2_ball(vec({0.3, 0.4}), 1.0), vec({0.3, 0.4})));
    CHECK((project_l2_ball(vec({3, 4}), 1.0) - vec({0.6, 0.8})).norm() <= 1e-15);
}

TEST_CASE("dictionary projection examples") {
    Matrix d(2, 2);
    d << 0, 0.5, 2, 0;
    Matrix expect(2, 2);
    expect << 0, 0.5, 1, 0;
    CHECK(project_dictionary(d).atoms() == expect);
    CHECK(bitwise_equal(project_dictionary(expect).atoms(), expect));
    CHECK(project_dictionary(Matrix::Zero(3, 2)).atoms() == Matrix::Zero(3, 2));
}

TEST_CASE("Frobenius ball examples") {
    const Matrix id = Matrix::Identity(2, 2);
    CHECK(bitwise_equal(project_frobenius_ball(id, std::sqrt(2.0)), id));
    CHECK((project_frobenius_ball(id, 1.0) - id / std::sqrt(2.0)).norm() <= 1e-15);
    CHECK(project_frobenius_ball(Matrix::Zero(2, 3), 0.7) == Matrix::Zero(2, 3));
}

TEST_CASE("aggregate l1 examples") {
    Matrix g(2, 2);
    g << 0.5, -0.2, 0.1, 0.3;
    CHECK(bitwise_equal(project_aggregate_l1(g, 2.0), g));
    Matrix g1(2, 1);
    g1 << 3, 1;
    Matrix e1(2, 1);
    e1 << 2, 0;
    CHECK((project_aggregate_l1(g1, 2.0) - e1).norm() <= 1e-12);
    CHECK(project_aggregate_l1(Matrix::Zero(3, 4), 1.0) == Matrix::Zero(3, 4));
}

TEST_CASE("feasibility, idempotence and non-expansiveness of every projection") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> radius(0.2, 3.0);
    using Proj = std::function<Matrix(const Matrix&, double)>;
    using Norm = std::function<double(const Matrix&)>;
    struct Case {
        const char* name;
        Proj proj;
        Norm norm;
        bool radius_is_fixed;
    };
    const std::vector<Case> cases = {
        {"l1", [](const Matrix& m, double r) { return Matrix(project_l1_ball(m.col(0), r)); },
         [](const Matrix& m) { return m.col(0).lpNorm<1>(); }, false},
        {"l2", [](const Matrix& m, double r) { return Matrix(project_l2_ball(m.col(0), r)); },
         [](const Matrix& m) { return m.col(0).norm(); }, false},
        {"dictionary", [](const Matrix& m, double) { return project_dictionary(m).atoms(); },
         [](const Matrix& m) { return m.colwise().norm().maxCoeff(); }, true},
        {"frobenius", [](const Matrix& m, double r) { return project_frobenius_ball(m, r); },
         [](const Matrix& m) { return m.norm(); }, false},
        {"aggregate", [](const Matrix& m, double r) { return project_aggregate_l1(m, r); },
         [](const Matrix& m) { return m.cwiseAbs().sum(); }, false},
    };
    for (const auto& c : cases) {
        INFO(c.name);
        for (int trial = 0; trial < 1000; ++trial) {
            const double r = c.radius_is_fixed ? 1.0 : radius(gen);
            const bool vector_case = std::string(c.name) == "l1" || std::string(c.name) == "l2";
            const Eigen::Index cols = vector_case ? 1 : 3;
            const Matrix u = oracle::random_matrix(gen, 4, cols, 1.5);
            const Matrix v = oracle::random_matrix(gen, 4, cols, 1.5);
            const Matrix pu = c.proj(u, r);
            const Matrix pv = c.proj(v, r);
            CHECK(c.norm(pu) <= r + 1e-12);
            CHECK((c.proj(pu, r) - pu).cwiseAbs().maxCoeff() <= 1e-14);
            CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
        }
    }
}

TEST_CASE("l1 projection matches the grid-search minimizer") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> radius(0.3, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector v = oracle::random_vector(gen, dim(gen), 2.0);
        const double a = radius(gen);
        CHECK((project_l1_ball(v, a) - oracle::grid_project_l1(v, a)).norm() <= 1e-3);
    }
}

TEST_CASE("project_codes and project_atoms dispatch on the constraint") {
    Matrix g(2, 2);
    g << 3, 0.1, 1, 0.1;
    const Matrix per_task = project_codes(g, 2.0, CodeConstraint::per_task_l1);
    CHECK(per_task.col(0).lpNorm<1>() == doctest::Approx(2.0));
    CHECK(per_task.col(1) == g.col(1));
    const Matrix aggregate = project_codes(g, 1.0, CodeConstraint::aggregate_l1);
    CHECK(aggregate.cwiseAbs().sum() == doctest::Approx(2.0));
    const Matrix l2 = project_codes(g, 1.0, CodeConstraint::per_task_l2);
    CHECK(l2.col(0).norm() == doctest::Approx(1.0));
    const Matrix d = Matrix::Constant(2, 2, 1.0);
    CHECK(project_atoms(d, AtomConstraint::unit_columns).colwise().norm().maxCoeff() ==
          doctest::Approx(1.0));
    CHECK(project_atoms(d, AtomConstraint::frobenius).norm() == doctest::Approx(std::sqrt(2.0)));
    // columns longer than one are allowed under the Frobenius constraint
    Matrix lopsided(2, 2);
    lopsided << 1.2, 0, 0, 0.1;
    CHECK(bitwise_equal(project_atoms(lopsided, AtomConstraint::frobenius), lopsided));
}

}
