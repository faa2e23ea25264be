#include "collective/linalg.hpp"

#include "collective/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace collective {

void normalize_column_signs(Matrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        auto col = vectors.col(c);
        const double scale = col.cwiseAbs().maxCoeff();
        if (scale == 0.0) continue;
        for (Eigen::Index r = 0; r < col.size(); ++r) {
            if (std::abs(col(r)) > 1e-8 * scale) {
                if (col(r) < 0.0) col = -col;
                break;
            }
        }
    }
}

SymmetricEigen symmetric_eigen(const Matrix& a, std::string_view what) {
    if (a.rows() != a.cols()) {
        throw InvalidInput(std::string(what) + ": matrix is not square");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": symmetric eigensolve did not converge");
    }
    SymmetricEigen out{solver.eigenvalues(), solver.eigenvectors()};
    normalize_column_signs(out.vectors);
    return out;
}

Matrix standing_wave_basis(int n) {
    if (n < 1) throw InvalidInput("standing_wave_basis: n must be positive");
    Matrix a(n, n);
    const double uniform = 1.0 / std::sqrt(static_cast<double>(n));
    const double amp = std::sqrt(2.0 / n);
    for (int j = 0; j < n; ++j) {
        a(j, 0) = uniform;
        for (int m = 1; m < n; ++m) {
            a(j, m) = amp * std::cos(std::numbers::pi * m * (j + 0.5) / n);
        }
    }
    return a;
}

} // namespace collective
