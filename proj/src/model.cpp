#include "collective/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace collective {

namespace {

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os << what << " = " << value;
    return os.str();
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidInput(std::string(name) + " must be positive and finite");
    }
}

void check_w(const Matrix& w, bool shift_invariant, std::vector<ViolationRecord>& out) {
    const Eigen::Index n = w.rows();
    const double scale = max_abs(w);
    if (w != w.transpose()) {
        out.push_back({Violation::w_not_symmetric, "W differs from its transpose"});
    }
    if (shift_invariant) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                worst = std::max(worst, std::abs(w(i, j) - w((i + 1) % n, (j + 1) % n)));
            }
        }
        if (worst > 1e-12 * scale) {
            out.push_back({Violation::w_not_shift_invariant, describe("max |W_ij - W_(i+1)(j+1)|", worst)});
        }
    }
    const double row_sum = w.rowwise().sum().cwiseAbs().maxCoeff();
    if (row_sum > 1e-12 * scale) {
        out.push_back({Violation::w_row_sum_nonzero, describe("max |row sum|", row_sum)});
    }
}

void check_k(const Matrix& k, std::vector<ViolationRecord>& out) {
    const double asym = max_abs(k - k.transpose());
    if (asym > 1e-12 * max_abs(k)) {
        out.push_back({Violation::k_not_symmetric, describe("max |K - K^T|", asym)});
    }
    const double lowest = k.minCoeff();
    if (lowest < 0.0) {
        out.push_back({Violation::k_negative_entry, describe("min K_ij", lowest)});
    }
}

SystemModel finish(SystemModel model) {
    auto violations = validate(model);
    if (!violations.empty()) throw ModelValidationError(std::move(violations));
    return model;
}

} // namespace

std::vector<ViolationRecord> validate(const SystemModel& model) {
    std::vector<ViolationRecord> out;
    const int n = model.n_particles;
    if (n < 2) out.push_back({Violation::too_few_particles, describe("N", n)});
    if (!(model.mass > 0.0)) out.push_back({Violation::nonpositive_mass, describe("mass", model.mass)});
    if (!(model.hbar > 0.0)) out.push_back({Violation::nonpositive_hbar, describe("hbar", model.hbar)});
    if (model.w.rows() != n || model.w.cols() != n || model.k.rows() != n || model.k.cols() != n) {
        out.push_back({Violation::dimension_mismatch, "W and K must both be N x N"});
        return out;
    }
    if (n < 1) return out;
    if (!model.w.allFinite() || !model.k.allFinite()) {
        out.push_back({Violation::dimension_mismatch, "W and K must be finite"});
        return out;
    }
    check_w(model.w, model.kind == ModelKind::general, out);
    check_k(model.k, out);
    if (!out.empty()) return out;

    const Matrix q = full_potential_matrix(model);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(q, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        out.push_back({Violation::hamiltonian_not_psd, "eigensolve of the potential did not converge"});
        return out;
    }
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (lo < -1e-10 * hi) {
        out.push_back({Violation::hamiltonian_not_psd, describe("min eigenvalue", lo)});
    }
    return out;
}

Matrix free_chain_w(int n, double mass, double omega0) {
    if (n < 2) throw InvalidInput("chain needs N >= 2");
    const double c = 0.5 * mass * omega0 * omega0;
    Matrix w = Matrix::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
        w(j, j) += c;
        w(j + 1, j + 1) += c;
        w(j, j + 1) -= c;
        w(j + 1, j) -= c;
    }
    return w;
}

Matrix ring_w(int n, double mass, double omega0) {
    if (n < 2) throw InvalidInput("chain needs N >= 2");
    const double c = 0.5 * mass * omega0 * omega0;
    Matrix w = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const int k = (j + 1) % n;
        w(j, j) += c;
        w(k, k) += c;
        w(j, k) -= c;
        w(k, j) -= c;
    }
    return w;
}

Vector chain_frequencies(int n, double omega0) {
    if (n < 1) throw InvalidInput("chain needs N >= 1");
    Vector out(n);
    for (int k = 0; k < n; ++k) {
        out(k) = 2.0 * omega0 * std::abs(std::sin(std::numbers::pi * k / (2.0 * n)));
    }
    return out;
}

SystemModel build_chain_model(int n, double mass, double omega0, Matrix k, double hbar) {
    if (n < 2) throw InvalidInput("N must be at least 2 (no bath exists otherwise)");
    require_positive(mass, "mass");
    require_positive(omega0, "omega0");
    require_positive(hbar, "hbar");
    SystemModel model;
    model.n_particles = n;
    model.mass = mass;
    model.w = free_chain_w(n, mass, omega0);
    model.k = std::move(k);
    model.hbar = hbar;
    model.omega0 = omega0;
    model.kind = ModelKind::next_neighbor_chain;
    return finish(std::move(model));
}

SystemModel build_next_neighbor_model(int n, double mass, double omega0, double alpha, double hbar) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be nonnegative");
    if (n < 2) throw InvalidInput("N must be at least 2 (no bath exists otherwise)");
    Matrix k = Matrix::Zero(n, n);
    k(0, 0) = 0.5 * alpha;
    return build_chain_model(n, mass, omega0, std::move(k), hbar);
}

SystemModel build_general_model(Matrix w, Matrix k, double mass, double hbar) {
    SystemModel model;
    model.n_particles = static_cast<int>(w.rows());
    model.mass = mass;
    model.w = std::move(w);
    model.k = std::move(k);
    model.hbar = hbar;
    model.kind = ModelKind::general;
    return finish(std::move(model));
}

PhononSpectrum phonon_spectrum(const SystemModel& model) {
    const int n = model.n_particles;
    const Matrix basis = standing_wave_basis(n);
    PhononSpectrum out;
    if (model.kind == ModelKind::next_neighbor_chain && model.omega0) {
        out.basis = basis;
        out.frequencies = chain_frequencies(n, *model.omega0);
        out.omega_sq = out.frequencies.cwiseAbs2();
        return out;
    }
    const Matrix q = basis.rightCols(n - 1);
    const Matrix reduced = q.transpose() * ((2.0 / model.mass) * model.w) * q;
    const auto eig = symmetric_eigen(0.5 * (reduced + reduced.transpose()), "phonon spectrum");
    out.basis.resize(n, n);
    out.basis.col(0) = basis.col(0);
    out.basis.rightCols(n - 1) = q * eig.vectors;
    normalize_column_signs(out.basis);
    out.omega_sq.resize(n);
    out.omega_sq(0) = 0.0;
    out.omega_sq.tail(n - 1) = eig.values;
    out.frequencies = out.omega_sq.cwiseMax(0.0).cwiseSqrt();
    return out;
}

Matrix full_potential_matrix(const SystemModel& model) {
    const Eigen::Index n = model.n_particles;
    const Vector k_hat = model.k.rowwise().sum();
    Matrix q(2 * n, 2 * n);
    const Matrix diag_block = model.w + Matrix(k_hat.asDiagonal());
    q.topLeftCorner(n, n) = diag_block;
    q.bottomRightCorner(n, n) = diag_block;
    q.topRightCorner(n, n) = -model.k;
    q.bottomLeftCorner(n, n) = -model.k.transpose();
    return q;
}

double potential_energy(const SystemModel& model, const Vector& z) {
    const Eigen::Index n = model.n_particles;
    if (z.size() != 2 * n) throw InvalidInput("potential_energy: state has the wrong dimension");
    const auto x = z.head(n);
    const auto xb = z.tail(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double row = model.w.row(i).sum();
        sum += row * (x(i) * x(i) + xb(i) * xb(i));
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = model.w(i, j);
            if (w == 0.0) continue;
            const double d = x(i) - x(j);
            const double db = xb(i) - xb(j);
            sum -= w * (d * d + db * db);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = x(i) - xb(j);
            sum += model.k(i, j) * d * d;
        }
    }
    return sum;
}

SystemModel with_collective_stiffness(const SystemModel& model, double k0) {
    const int n = model.n_particles;
    SystemModel out = model;
    out.k.array() += k0 / (2.0 * n);
    const Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    out.w -= 0.5 * k0 * centering;
    out.omega0.reset();
    return finish(std::move(out));
}

SystemModel with_constant_coupling(const SystemModel& model, double c) {
    SystemModel out = model;
    out.k.array() += c;
    return finish(std::move(out));
}

} // namespace collective
