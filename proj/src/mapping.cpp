#include "collective/mapping.hpp"

#include "collective/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace collective {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

} // namespace

InteractionTransforms interaction_in_phonon_basis(const SystemModel& model,
                                                  const PhononSpectrum& phonons) {
    const Eigen::Index n = model.n_particles;
    const Matrix& a = phonons.basis;
    if (a.rows() != n || a.cols() != n || model.k.rows() != n || model.k.cols() != n) {
        throw InvalidInput("interaction_in_phonon_basis: dimension mismatch");
    }
    InteractionTransforms out;
    out.k_hat = model.k.rowwise().sum();
    const Matrix alpha_part = a.transpose() * out.k_hat.asDiagonal() * a;
    const Matrix beta_part = a.transpose() * model.k * a;
    out.k_tilde = symmetrized(alpha_part + beta_part);
    out.k_bar = symmetrized(alpha_part - beta_part);
    return out;
}

CollectiveForm caldeira_leggett_form(const SystemModel& model) {
    return caldeira_leggett_form(model, phonon_spectrum(model));
}

CollectiveForm caldeira_leggett_form(const SystemModel& model, const PhononSpectrum& phonons) {
    const int n = model.n_particles;
    if (n < 2) throw InvalidInput("caldeira_leggett_form: N must be at least 2");
    const auto transforms = interaction_in_phonon_basis(model, phonons);
    const int r = n - 1;
    const double m = model.mass;

    CollectiveForm form;
    form.mass = m;
    form.hbar = model.hbar;
    form.k_tilde_11 = transforms.k_tilde(0, 0);
    form.bath_matrix = transforms.k_tilde.bottomRightCorner(r, r);
    form.bath_matrix.diagonal() += 0.5 * m * phonons.omega_sq.tail(r);

    const auto eig = symmetric_eigen(form.bath_matrix, "bath matrix");
    const double top = eig.values.cwiseAbs().maxCoeff();
    if (!(eig.values(0) > 1e-12 * top)) {
        std::ostringstream os;
        os << "unstable bath: bath matrix eigenvalue " << eig.values(0) << " is not positive";
        throw NumericalError(os.str());
    }
    form.bath_freqs = ((2.0 / m) * eig.values).cwiseSqrt();
    form.bath_transform = eig.vectors;
    form.coupling_k = transforms.k_tilde.row(0).tail(r).transpose();
    form.couplings_l = eig.vectors.transpose() * form.coupling_k;
    return form;
}

CollectiveForm collective_form_from_bath(double k_tilde_11, Vector bath_freqs, Vector couplings,
                                         double mass, double hbar) {
    if (bath_freqs.size() == 0 || bath_freqs.size() != couplings.size()) {
        throw InvalidInput("collective_form_from_bath: need matching, nonempty frequency and coupling lists");
    }
    if (!(mass > 0.0) || !(hbar > 0.0)) {
        throw InvalidInput("collective_form_from_bath: mass and hbar must be positive");
    }
    if (!(bath_freqs.minCoeff() > 0.0) || !bath_freqs.allFinite() || !couplings.allFinite()) {
        throw InvalidInput("collective_form_from_bath: bath frequencies must be positive and finite");
    }
    const Eigen::Index r = bath_freqs.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return bath_freqs(a) < bath_freqs(b); });

    CollectiveForm form;
    form.mass = mass;
    form.hbar = hbar;
    form.k_tilde_11 = k_tilde_11;
    form.bath_freqs.resize(r);
    form.couplings_l.resize(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        form.bath_freqs(i) = bath_freqs(order[static_cast<std::size_t>(i)]);
        form.couplings_l(i) = couplings(order[static_cast<std::size_t>(i)]);
    }
    form.coupling_k = form.couplings_l;
    form.bath_matrix = (0.5 * mass * form.bath_freqs.cwiseAbs2()).asDiagonal();
    form.bath_transform = Matrix::Identity(r, r);
    return form;
}

DecouplingReport decoupling_indicator(const SystemModel& model) {
    const int n = model.n_particles;
    const auto phonons = phonon_spectrum(model);
    const Vector k_hat = model.k.rowwise().sum();
    const auto form = caldeira_leggett_form(model, phonons);

    DecouplingReport out;
    out.k_closed_form = (2.0 / std::sqrt(static_cast<double>(n))) *
                        (phonons.basis.rightCols(n - 1).transpose() * k_hat);
    out.k_mapped = form.coupling_k;
    out.max_discrepancy = (out.k_closed_form - out.k_mapped).cwiseAbs().maxCoeff();
    const double scale = k_hat.cwiseAbs().maxCoeff();
    out.is_decoupled = out.k_mapped.cwiseAbs().maxCoeff() <= 1e-12 * scale;
    return out;
}

namespace {

struct Pole {
    double position;
    double weight;
    int multiplicity;
};

// g(lambda) - 1 with lambda = poles[anchor].position + offset; the anchor term
// uses the offset directly so that roots hugging a pole keep full precision.
double secular_residual(const std::vector<Pole>& poles, std::size_t anchor, double offset) {
    double g = 0.0;
    const double base = poles[anchor].position;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const double d = (i == anchor) ? offset : (base - poles[i].position) + offset;
        g += poles[i].weight / d;
    }
    return g - 1.0;
}

// Bisection for the offset from `anchor` in the open interval between 0 and
// `limit` (same sign as the root offset). The residual is decreasing in
// lambda, so the sign convention flips with the direction of `limit`.
double bisect_offset(const std::vector<Pole>& poles, std::size_t anchor, double limit) {
    double lo = 0.0;
    double hi = limit;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f = secular_residual(poles, anchor, mid);
        // Moving towards larger lambda lowers the residual.
        const bool root_beyond_mid = (limit > 0.0) ? (f > 0.0) : (f < 0.0);
        if (root_beyond_mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (std::abs(hi - lo) <= 1e-13 * std::abs(0.5 * (lo + hi))) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

SecularSolution point_coupling_secular(int n, double omega0, double alpha, double mass) {
    if (n < 2) throw InvalidInput("point_coupling_secular: N must be at least 2");
    if (!(alpha > 0.0)) throw InvalidInput("point_coupling_secular: alpha must be positive");
    if (!(omega0 > 0.0) || !(mass > 0.0)) {
        throw InvalidInput("point_coupling_secular: omega0 and mass must be positive");
    }
    const double pi = std::numbers::pi;
    const double prefactor = 4.0 * alpha / (n * mass);

    std::vector<Pole> poles;
    for (int k = 2; k <= n; ++k) {
        const double s = std::sin(pi * (k - 1) / (2.0 * n));
        const double c = std::cos(pi * (k - 1) / (2.0 * n));
        const double p = 4.0 * omega0 * omega0 * s * s;
        const double z = prefactor * c * c;
        if (!poles.empty() && std::abs(p - poles.back().position) <= 1e-14 * std::abs(p)) {
            poles.back().weight += z;
            poles.back().multiplicity += 1;
        } else {
            poles.push_back({p, z, 1});
        }
    }

    struct Root {
        double anchor_position;
        std::size_t anchor;
        double offset;
        bool at_pole;
    };
    std::vector<Root> roots;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (int extra = 1; extra < poles[i].multiplicity; ++extra) {
            roots.push_back({poles[i].position, i, 0.0, true});
        }
        if (i + 1 < poles.size()) {
            const double gap = poles[i + 1].position - poles[i].position;
            const double mid_residual = secular_residual(poles, i, 0.5 * gap);
            if (!std::isfinite(mid_residual)) {
                std::ostringstream os;
                os << "secular equation: no root bracket in (" << poles[i].position << ", "
                   << poles[i + 1].position << ")";
                throw NumericalError(os.str());
            }
            if (mid_residual > 0.0) {
                const double off = bisect_offset(poles, i + 1, -0.5 * gap);
                roots.push_back({poles[i + 1].position, i + 1, off, false});
            } else {
                const double off = bisect_offset(poles, i, 0.5 * gap);
                roots.push_back({poles[i].position, i, off, false});
            }
        } else {
            double total = 0.0;
            for (const auto& p : poles) total += p.weight;
            const double off = bisect_offset(poles, i, total);
            roots.push_back({poles[i].position, i, off, false});
        }
    }
    std::stable_sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        return a.anchor_position + a.offset < b.anchor_position + b.offset;
    });

    SecularSolution out;
    const auto count = static_cast<Eigen::Index>(roots.size());
    out.bath_freqs.resize(count);
    out.couplings.resize(count);
    for (Eigen::Index j = 0; j < count; ++j) {
        const Root& root = roots[static_cast<std::size_t>(j)];
        const double lambda = root.anchor_position + root.offset;
        out.bath_freqs(j) = std::sqrt(lambda);
        if (root.at_pole) {
            out.couplings(j) = 0.0;
            continue;
        }
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const double d = (i == root.anchor) ? root.offset
                                                : (root.anchor_position - poles[i].position) + root.offset;
            const double cos_sq = poles[i].weight / prefactor;
            s1 += cos_sq / d;
            s2 += cos_sq / (d * d);
        }
        out.couplings(j) = std::sqrt(2.0) * alpha / n * s1 / std::sqrt(s2);
    }
    return out;
}

QuantumModes collective_sector_modes(const CollectiveForm& form) {
    const Eigen::Index r = form.bath_freqs.size();
    const double m = form.mass;
    Matrix mat = Matrix::Zero(r + 1, r + 1);
    mat(0, 0) = 2.0 * form.k_tilde_11 / m;
    const Vector g = force_couplings(form) / m;
    mat.row(0).tail(r) = g.transpose();
    mat.col(0).tail(r) = g;
    mat.diagonal().tail(r) = form.bath_freqs.cwiseAbs2();

    const auto eig = symmetric_eigen(mat, "collective sector");
    const double top = eig.values.cwiseAbs().maxCoeff();
    if (!(eig.values(0) > 1e-14 * top)) {
        std::ostringstream os;
        os << "unstable collective sector: squared frequency " << eig.values(0) << " is not positive";
        throw NumericalError(os.str());
    }
    QuantumModes modes;
    modes.frequencies = eig.values.cwiseSqrt();
    modes.x_coefficients = eig.vectors.row(0).transpose();
    modes.mass = m;
    modes.hbar = form.hbar;
    return modes;
}

Vector symmetric_sector_omega_sq(const SystemModel& model) {
    const auto phonons = phonon_spectrum(model);
    const auto transforms = interaction_in_phonon_basis(model, phonons);
    Matrix mat = (2.0 / model.mass) * transforms.k_bar;
    mat.diagonal() += phonons.omega_sq;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(mat), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric sector: eigensolve did not converge");
    }
    return solver.eigenvalues();
}

} // namespace collective
