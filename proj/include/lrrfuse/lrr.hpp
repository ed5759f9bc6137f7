#pragma once

// Low-rank representation with the data as its own dictionary:
//
//     min ||Z||_* + lambda ||E||_{2,1}   s.t.  X = X Z + E
//
// solved by the inexact augmented Lagrange multiplier method with the usual
// splitting Z = J, so that J has a singular-value-thresholding update and E a
// column-shrinkage update.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "image.hpp"

namespace lrrfuse {

using Matrix = Eigen::MatrixXd;

namespace detail {

inline void require_finite(const Matrix& m, const char* where) {
    if (!m.allFinite()) throw Error(std::string(where) + ": matrix has non-finite entries");
}

}  // namespace detail

/// Proximal operator of tau * ||.||_*: soft-threshold the singular values.
inline Matrix svt(const Matrix& m, double tau) {
    if (!(tau >= 0.0)) throw Error("svt: threshold must be non-negative");
    detail::require_finite(m, "svt");
    if (m.size() == 0) return m;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd shrunk = (svd.singularValues().array() - tau).max(0.0).matrix();
    Eigen::Index keep = 0;
    while (keep < shrunk.size() && shrunk[keep] > 0.0) ++keep;
    if (keep == 0) return Matrix::Zero(m.rows(), m.cols());
    return svd.matrixU().leftCols(keep) * shrunk.head(keep).asDiagonal() *
           svd.matrixV().leftCols(keep).transpose();
}

/// Proximal operator of tau * ||.||_{2,1}: shrink each column's Euclidean norm.
inline Matrix l21_shrink(const Matrix& m, double tau) {
    if (!(tau >= 0.0)) throw Error("l21_shrink: threshold must be non-negative");
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double c = m.col(j).norm();
        if (c > tau) out.col(j) = m.col(j) * ((c - tau) / c);
    }
    return out;
}

inline double nuclear_norm(const Matrix& m) {
    detail::require_finite(m, "nuclear_norm");
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

inline double l21_norm(const Matrix& m) { return m.colwise().norm().sum(); }

struct AlmParams {
    double lambda = 1.0;
    double mu0 = 1e-1;
    double mu_max = 1e8;
    double rho = 1.1;
    double tol = 1e-6;
    std::size_t max_iter = 200;

    void validate() const {
        if (!(lambda > 0.0)) throw Error("ALM lambda must be positive");
        if (!(mu0 > 0.0)) throw Error("ALM mu0 must be positive");
        if (!(mu_max >= mu0)) throw Error("ALM mu_max must be at least mu0");
        if (!(rho > 1.0)) throw Error("ALM rho must exceed 1");
        if (!(tol > 0.0)) throw Error("ALM tol must be positive");
        if (max_iter < 1) throw Error("ALM max_iter must be at least 1");
    }
};

struct LrrSolution {
    Matrix z;  // cols x cols coefficients
    Matrix e;  // rows x cols column-sparse noise
    std::size_t iterations = 0;
    bool converged = false;
    double final_residual = 0.0;  // ||X - XZ - E||_inf
};

inline double lrr_objective(const Matrix& z, const Matrix& e, double lambda) {
    return nuclear_norm(z) + lambda * l21_norm(e);
}

inline LrrSolution lrr_solve(const Matrix& x, const AlmParams& params) {
    params.validate();
    if (x.size() == 0) throw Error("lrr_solve: empty data matrix");
    detail::require_finite(x, "lrr_solve");

    const Eigen::Index m = x.rows();
    const Eigen::Index n = x.cols();
    LrrSolution sol;
    sol.z = Matrix::Zero(n, n);
    sol.e = Matrix::Zero(m, n);
    if (x.cwiseAbs().maxCoeff() < 1e-12) {
        sol.converged = true;
        return sol;
    }

    const Matrix xt = x.transpose();
    const Eigen::LLT<Matrix> gram((xt * x + Matrix::Identity(n, n)).eval());

    Matrix& z = sol.z;
    Matrix& e = sol.e;
    Matrix j = Matrix::Zero(n, n);
    Matrix y1 = Matrix::Zero(m, n);
    Matrix y2 = Matrix::Zero(n, n);
    Matrix xz(m, n);
    double mu = params.mu0;

    for (std::size_t iter = 1; iter <= params.max_iter; ++iter) {
        sol.iterations = iter;
        j = svt(z + y2 / mu, 1.0 / mu);
        z = gram.solve(xt * (x - e) + j + (xt * y1 - y2) / mu);
        xz.noalias() = x * z;
        e = l21_shrink(x - xz + y1 / mu, params.lambda / mu);

        const Matrix feasibility = x - xz - e;
        const Matrix coupling = z - j;
        sol.final_residual = feasibility.cwiseAbs().maxCoeff();
        const double stop = std::max(sol.final_residual, coupling.cwiseAbs().maxCoeff());
        if (stop <= params.tol) {
            sol.converged = true;
            break;
        }
        y1 += mu * feasibility;
        y2 += mu * coupling;
        mu = std::min(params.rho * mu, params.mu_max);
    }

    // A fast-growing penalty can settle on a feasible point that is worse than
    // the trivial one (Z = 0, E = X); keep whichever has the lower objective.
    if (sol.converged) {
        const double trivial = params.lambda * l21_norm(x);
        if (trivial <= lrr_objective(z, e, params.lambda)) {
            z.setZero();
            e = x;
            sol.final_residual = 0.0;
        }
    }
    return sol;
}

}  // namespace lrrfuse
