#pragma once
// Reference computations used only by the tests. None of these call into the
// library's solvers or projections.

#include "sparsetask/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using sparsetask::Matrix;
using sparsetask::Vector;

/// Minimizes f over {u : ||u||_1 <= radius} in K <= 3 dimensions by grid
/// search on the lattice u = n * radius / N, sum |n_i| <= N. The lattice
/// has points exactly on every face of the ball. After a full search at
/// N = 40, each level multiplies N by 4 and searches a window around the
/// incumbent until the spacing is at most `resolution`.
inline Vector grid_minimize_l1(const std::function<double(const Vector&)>& f, int K,
                               double radius, double resolution) {
    long N = 40;
    std::vector<long> best(static_cast<std::size_t>(K), 0);
    double best_val = std::numeric_limits<double>::infinity();
    Vector best_u = Vector::Zero(K);
    long window = N;
    while (true) {
        const double h = radius / static_cast<double>(N);
        const std::vector<long> centre = best;
        std::vector<long> n(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) n[static_cast<std::size_t>(k)] = centre[static_cast<std::size_t>(k)] - window;
        Vector u(K);
        while (true) {
            long l1 = 0;
            for (long v : n) l1 += std::labs(v);
            if (l1 <= N) {
                for (int k = 0; k < K; ++k) u[k] = static_cast<double>(n[static_cast<std::size_t>(k)]) * h;
                const double val = f(u);
                if (val < best_val) {
                    best_val = val;
                    best = n;
                    best_u = u;
                }
            }
            int k = 0;
            while (k < K) {
                auto& v = n[static_cast<std::size_t>(k)];
                if (++v <= centre[static_cast<std::size_t>(k)] + window) break;
                v = centre[static_cast<std::size_t>(k)] - window;
                ++k;
            }
            if (k == K) break;
        }
        if (h <= resolution) break;
        N *= 4;
        for (auto& v : best) v *= 4;
        best_val = f(best_u);
        window = 16;
    }
    return best_u;
}

/// Euclidean projection onto the l1 ball by grid search.
inline Vector grid_project_l1(const Vector& v, double radius, double resolution = 1e-4) {
    return grid_minimize_l1([&](const Vector& u) { return (u - v).squaredNorm(); },
                            static_cast<int>(v.size()), radius, resolution);
}

/// Coefficients c_0..c_n of det(xI - A), c_n = 1, by Faddeev-LeVerrier.
inline std::vector<long double> characteristic_polynomial(const Matrix& a) {
    const auto n = static_cast<int>(a.rows());
    using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const LMatrix A = a.cast<long double>();
    std::vector<long double> c(static_cast<std::size_t>(n) + 1, 0.0L);
    c[static_cast<std::size_t>(n)] = 1.0L;
    LMatrix M = LMatrix::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        M = A * M + c[static_cast<std::size_t>(n - k + 1)] * LMatrix::Identity(n, n);
        c[static_cast<std::size_t>(n - k)] = -(A * M).trace() / k;
    }
    return c;
}

/// Largest root of the characteristic polynomial of a symmetric PSD matrix.
/// Newton's method started above every root decreases monotonically onto the
/// largest one when all roots are real.
inline double largest_eigenvalue(const Matrix& a) {
    const auto c = characteristic_polynomial(a);
    long double x = 1.0L + static_cast<long double>(a.cwiseAbs().sum());
    for (int it = 0; it < 10000; ++it) {
        long double p = 0.0L;
        long double dp = 0.0L;
        for (auto k = c.size(); k-- > 0;) {
            dp = dp * x + p;
            p = p * x + c[k];
        }
        if (dp == 0.0L) break;
        const long double next = x - p / dp;
        if (!(next < x)) break;
        x = next;
    }
    return static_cast<double>(x);
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(gen);
    return m;
}

inline Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
    return random_matrix(gen, n, 1, scale);
}

}  // namespace oracle
