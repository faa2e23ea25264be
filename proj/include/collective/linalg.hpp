// linalg.hpp - dense symmetric eigen-decomposition with a reproducible sign
// convention, plus the standing-wave basis used by the chain models.

#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace collective {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // orthonormal columns, first nonzero component >= 0
};

// Flips each column so that its first component of non-negligible magnitude
// (relative 1e-8 of the column's largest) is positive.
void normalize_column_signs(Matrix& vectors);

// Throws NumericalError (mentioning `what`) if the solver does not converge.
SymmetricEigen symmetric_eigen(const Matrix& a, std::string_view what);

// Orthonormal N x N basis, columns indexed by mode: column 0 is the uniform
// vector 1/sqrt(N), column m >= 1 is sqrt(2/N) cos(pi m (j + 1/2) / N).
// These are the eigenvectors of the free-end next-neighbor chain.
Matrix standing_wave_basis(int n);

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

} // namespace collective
