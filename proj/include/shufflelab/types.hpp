#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shufflelab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dimensions above this are out of scope; dense symmetric eigensolves stay exact
// and cheap at desk scale.
inline constexpr int kMaxDimension = 16;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generator / configuration errors (CLI exit code 2).
struct BadDimension : Error { using Error::Error; };
struct BadCount : Error { using Error::Error; };
struct BadAlpha : Error { using Error::Error; };
struct BadArgs : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };
struct InfeasibleSpec : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct NonPositiveMean : Error { using Error::Error; };
struct AssumptionUnmet : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Numerical failure (exit code 3).
struct NonFinite : Error { using Error::Error; };

// A verified inequality failed (exit code 4).
struct BoundViolated : Error { using Error::Error; };

// Spectral norm as sqrt(lambda_max(M^T M)); works for nonsymmetric M (epoch
// matrices are products of symmetric factors and need not be symmetric).
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() > kMaxDimension || m.cols() > kMaxDimension)
        throw TooLarge("spectral_norm: dimension exceeds " + std::to_string(kMaxDimension));
    Matrix gram = m.transpose() * m;
    // Symmetrize to keep the self-adjoint solver honest against rounding.
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()).eval(),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

template <typename Derived>
double max_eigenvalue(const Eigen::MatrixBase<Derived>& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()).eval(),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace shufflelab
