#include "sparsetask/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sparsetask {

namespace {

void require_radius(double r, const char* what) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

Vector project_l1_ball(const Vector& v, double alpha) {
    require_radius(alpha, "l1 radius");
    require_finite(v, "l1 projection input");
    if (v.lpNorm<1>() <= alpha) {
        return v;
    }
    // Magnitudes sorted descending; rho is the last index where the
    // soft-threshold keeps the coordinate positive.
    std::vector<double> mag(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        mag[static_cast<std::size_t>(i)] = std::abs(v[i]);
    }
    std::sort(mag.begin(), mag.end(), std::greater<>());

    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < mag.size(); ++j) {
        cumsum += mag[j];
        const double candidate = (cumsum - alpha) / static_cast<double>(j + 1);
        if (mag[j] > candidate) {
            theta = candidate;
        } else {
            break;
        }
    }

    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double shrunk = std::abs(v[i]) - theta;
        out[i] = shrunk > 0.0 ? std::copysign(shrunk, v[i]) : 0.0;
    }
    // Round-off in the cumulative sum can leave the result a few ulps
    // outside the ball.
    const double norm = out.lpNorm<1>();
    if (norm > alpha) {
        out *= alpha / norm;
    }
    return out;
}

Vector project_l2_ball(const Vector& v, double radius) {
    require_radius(radius, "l2 radius");
    require_finite(v, "l2 projection input");
    const double norm = v.norm();
    if (norm <= radius) {
        return v;
    }
    Vector out = v * (radius / norm);
    // keep the result inside the ball after division round-off
    if (out.norm() > radius) {
        out *= std::nextafter(1.0, 0.0);
    }
    return out;
}

Dictionary project_dictionary(const Matrix& atoms) {
    require_finite(atoms, "dictionary");
    Matrix out = atoms;
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        out.col(k) = project_l2_ball(atoms.col(k), 1.0);
    }
    return Dictionary(std::move(out), AtomConstraint::unit_columns);
}

Matrix project_frobenius_ball(const Matrix& atoms, double radius) {
    require_radius(radius, "Frobenius radius");
    require_finite(atoms, "Frobenius projection input");
    const double norm = atoms.norm();
    if (norm <= radius) {
        return atoms;
    }
    Matrix out = atoms * (radius / norm);
    if (out.norm() > radius) {
        out *= std::nextafter(1.0, 0.0);
    }
    return out;
}

Matrix project_aggregate_l1(const Matrix& codes, double budget) {
    require_radius(budget, "aggregate l1 budget");
    const Vector flat = codes.reshaped();
    const Vector projected = project_l1_ball(flat, budget);
    return projected.reshaped(codes.rows(), codes.cols());
}

Matrix project_atoms(const Matrix& atoms, AtomConstraint constraint) {
    if (constraint == AtomConstraint::unit_columns) {
        return project_dictionary(atoms).atoms();
    }
    return project_frobenius_ball(atoms, std::sqrt(static_cast<double>(atoms.cols())));
}

Matrix project_codes(const Matrix& codes, double alpha, CodeConstraint constraint) {
    switch (constraint) {
        case CodeConstraint::per_task_l1: {
            Matrix out(codes.rows(), codes.cols());
            for (Eigen::Index t = 0; t < codes.cols(); ++t) {
                out.col(t) = project_l1_ball(codes.col(t), alpha);
            }
            return out;
        }
        case CodeConstraint::aggregate_l1:
            return project_aggregate_l1(codes, alpha * static_cast<double>(codes.cols()));
        case CodeConstraint::per_task_l2: {
            Matrix out(codes.rows(), codes.cols());
            for (Eigen::Index t = 0; t < codes.cols(); ++t) {
                out.col(t) = project_l2_ball(codes.col(t), alpha);
            }
            return out;
        }
    }
    return codes;
}

}  // namespace sparsetask
