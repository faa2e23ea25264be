#include "collective/dynamics.hpp"

#include "collective/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace collective {

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = at(i);
    return out;
}

TimeGrid TimeGrid::covering(double t_max, std::size_t steps) {
    if (!(t_max > 0.0) || !std::isfinite(t_max) || steps == 0) {
        throw InvalidInput("time grid needs t_max > 0 and at least one step");
    }
    return TimeGrid{t_max / static_cast<double>(steps), steps + 1};
}

std::string_view to_string(DampingRegime r) noexcept {
    switch (r) {
        case DampingRegime::underdamped: return "underdamped";
        case DampingRegime::critical: return "critical";
        case DampingRegime::overdamped: return "overdamped";
    }
    return "unknown";
}

OscillatorParams OscillatorParams::from_damping(double omega0_sq, double gamma0) {
    OscillatorParams p;
    p.omega0_sq = omega0_sq;
    p.gamma0 = gamma0;
    p.gamma_bar = 0.5 * gamma0;
    p.stable = omega0_sq > 0.0;
    const double quarter = p.gamma_bar * p.gamma_bar;
    const double disc = omega0_sq - quarter;
    const double scale = std::max(std::abs(omega0_sq), quarter);
    if (disc > 1e-14 * scale) {
        p.regime = DampingRegime::underdamped;
        p.omega_bar = std::sqrt(disc);
    } else if (disc >= -1e-14 * scale) {
        p.regime = DampingRegime::critical;
    } else {
        p.regime = DampingRegime::overdamped;
    }
    return p;
}

OscillatorParams OscillatorParams::from_underdamped(double omega_bar, double gamma_bar) {
    if (!(omega_bar > 0.0) || !(gamma_bar >= 0.0)) {
        throw InvalidInput("underdamped oscillator needs omega_bar > 0 and gamma_bar >= 0");
    }
    OscillatorParams p;
    p.omega_bar = omega_bar;
    p.gamma_bar = gamma_bar;
    p.gamma0 = 2.0 * gamma_bar;
    p.omega0_sq = omega_bar * omega_bar + gamma_bar * gamma_bar;
    p.regime = DampingRegime::underdamped;
    p.stable = true;
    return p;
}

OscillatorParams OscillatorParams::broadened(double eps) const {
    if (regime != DampingRegime::underdamped) {
        throw InvalidInput("broadened: oscillator is not underdamped");
    }
    if (!(eps >= 0.0)) throw InvalidInput("broadened: eps must be nonnegative");
    auto out = from_underdamped(omega_bar, gamma_bar + eps);
    out.epsilon = eps;
    return out;
}

namespace {

Vector kernel_weights(const CollectiveForm& form) {
    const double m2 = form.mass * form.mass;
    return force_couplings(form).cwiseAbs2().cwiseQuotient(m2 * form.bath_freqs.cwiseAbs2());
}

} // namespace

double damping_kernel(const CollectiveForm& form, double t) {
    const Vector g = kernel_weights(form);
    double sum = 0.0;
    for (Eigen::Index n = 0; n < g.size(); ++n) sum += g(n) * std::cos(form.bath_freqs(n) * t);
    return sum;
}

std::vector<double> damping_kernel(const CollectiveForm& form, const TimeGrid& grid) {
    const Vector g = kernel_weights(form);
    std::vector<double> out(grid.count, 0.0);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = grid.at(i);
        double sum = 0.0;
        for (Eigen::Index n = 0; n < g.size(); ++n) sum += g(n) * std::cos(form.bath_freqs(n) * t);
        out[i] = sum;
    }
    return out;
}

std::complex<double> gamma_transform(const CollectiveForm& form, double omega, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("gamma_transform: epsilon must be positive");
    const Vector g = kernel_weights(form);
    const std::complex<double> s(epsilon, -omega);
    std::complex<double> sum = 0.0;
    for (Eigen::Index n = 0; n < g.size(); ++n) {
        const double w = form.bath_freqs(n);
        sum += g(n) * s / (s * s + w * w);
    }
    return sum;
}

double bath_mean_spacing(const CollectiveForm& form) {
    const Eigen::Index n = form.bath_freqs.size();
    if (n == 0) throw InvalidInput("bath_mean_spacing: empty bath");
    if (n == 1) return form.bath_freqs(0);
    return (form.bath_freqs.maxCoeff() - form.bath_freqs.minCoeff()) / static_cast<double>(n - 1);
}

double recurrence_time(const CollectiveForm& form) {
    return 2.0 * std::numbers::pi / bath_mean_spacing(form);
}

OscillatorParams collective_frequency(const CollectiveForm& form) {
    return collective_frequency(form, 5.0 * bath_mean_spacing(form));
}

OscillatorParams collective_frequency(const CollectiveForm& form, double epsilon) {
    const double omega0_sq = 2.0 * form.k_tilde_11 / form.mass - damping_kernel(form, 0.0);
    const double omega0 = std::sqrt(std::max(omega0_sq, 0.0));
    const double gamma0 = gamma_transform(form, omega0, epsilon).real();
    auto p = OscillatorParams::from_damping(omega0_sq, gamma0);
    p.epsilon = epsilon;
    return p;
}

NormalModePropagator::NormalModePropagator(const SystemModel& model, double p0)
    : mass_(model.mass) {
    const Eigen::Index n = model.n_particles;
    potential_ = full_potential_matrix(model);
    const auto eig = symmetric_eigen((2.0 / mass_) * potential_, "full system");
    modes_ = eig.vectors;
    omega_sq_ = eig.values;
    // The dense solver fixes each eigenvalue only to eps * |Q| in absolute
    // terms, which is poor for the slow modes. A Rayleigh quotient built from
    // the difference form restores their relative accuracy.
    for (Eigen::Index k = 0; k < omega_sq_.size(); ++k) {
        const Vector v = modes_.col(k);
        omega_sq_(k) = (2.0 / mass_) * potential_energy(model, v) / v.squaredNorm();
    }
    x_dir_.resize(2 * n);
    const double unit = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    x_dir_.head(n).setConstant(unit);
    x_dir_.tail(n).setConstant(-unit);
    x_projection_ = modes_.transpose() * x_dir_;
    initial_amplitude_ = (p0 / mass_) * x_projection_;
}

namespace {

// sin(w t)/w and cos(w t) for w^2 of any sign, with the zero mode as the limit.
struct ModeFactors {
    double sine_over_freq;
    double cosine;
};

ModeFactors mode_factors(double omega_sq, double zero_tol, double t) {
    if (std::abs(omega_sq) <= zero_tol) return {t, 1.0};
    if (omega_sq > 0.0) {
        const double w = std::sqrt(omega_sq);
        return {std::sin(w * t) / w, std::cos(w * t)};
    }
    const double k = std::sqrt(-omega_sq);
    return {std::sinh(k * t) / k, std::cosh(k * t)};
}

} // namespace

Vector NormalModePropagator::position(double t) const {
    const double tol = 1e-12 * omega_sq_.cwiseAbs().maxCoeff();
    Vector coeff(omega_sq_.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
        coeff(k) = initial_amplitude_(k) * mode_factors(omega_sq_(k), tol, t).sine_over_freq;
    }
    return modes_ * coeff;
}

Vector NormalModePropagator::velocity(double t) const {
    const double tol = 1e-12 * omega_sq_.cwiseAbs().maxCoeff();
    Vector coeff(omega_sq_.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
        coeff(k) = initial_amplitude_(k) * mode_factors(omega_sq_(k), tol, t).cosine;
    }
    return modes_ * coeff;
}

double NormalModePropagator::collective_position(double t) const {
    const double tol = 1e-12 * omega_sq_.cwiseAbs().maxCoeff();
    const Vector& proj = x_projection_;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < omega_sq_.size(); ++k) {
        sum += proj(k) * initial_amplitude_(k) * mode_factors(omega_sq_(k), tol, t).sine_over_freq;
    }
    return sum;
}

double NormalModePropagator::collective_velocity(double t) const {
    const double tol = 1e-12 * omega_sq_.cwiseAbs().maxCoeff();
    const Vector& proj = x_projection_;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < omega_sq_.size(); ++k) {
        sum += proj(k) * initial_amplitude_(k) * mode_factors(omega_sq_(k), tol, t).cosine;
    }
    return sum;
}

double NormalModePropagator::energy(double t) const {
    const Vector z = position(t);
    const Vector v = velocity(t);
    return 0.5 * mass_ * v.squaredNorm() + z.dot(potential_ * z);
}

TrajectoryTable evolve_exact(const SystemModel& model, double p0, const TimeGrid& grid) {
    const NormalModePropagator prop(model, p0);
    TrajectoryTable out;
    out.times = grid.times();
    out.positions.resize(grid.count);
    out.momenta.resize(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        out.positions[i] = prop.collective_position(grid.at(i));
        out.momenta[i] = model.mass * prop.collective_velocity(grid.at(i));
    }
    return out;
}

double max_volterra_step(const CollectiveForm& form) {
    const auto p = collective_frequency(form);
    double top = std::sqrt(std::max(p.omega0_sq, 0.0));
    if (form.bath_freqs.size() > 0) top = std::max(top, form.bath_freqs.maxCoeff());
    if (!(top > 0.0)) throw InvalidInput("max_volterra_step: no frequency scale");
    return 0.1 / top;
}

namespace {

struct Propagator2 {
    double r00, r01, r10, r11;  // exact harmonic flow over one step
    double f0, f1;              // integral of the flow applied to a unit force
};

Propagator2 harmonic_step(double omega0_sq, double h) {
    if (std::abs(omega0_sq) * h * h <= 1e-16) {
        return {1.0, h, 0.0, 1.0, 0.5 * h * h, h};
    }
    if (omega0_sq > 0.0) {
        const double w = std::sqrt(omega0_sq);
        const double c = std::cos(w * h);
        const double s = std::sin(w * h);
        // (1 - cos)/w^2 written as 2 sin^2(wh/2)/w^2 to avoid cancellation.
        const double half = std::sin(0.5 * w * h);
        return {c, s / w, -w * s, c, 2.0 * half * half / omega0_sq, s / w};
    }
    const double k = std::sqrt(-omega0_sq);
    const double c = std::cosh(k * h);
    const double s = std::sinh(k * h);
    const double half = std::sinh(0.5 * k * h);
    return {c, s / k, k * s, c, 2.0 * half * half / (k * k), s / k};
}

TrajectoryTable integrate_memory_equation(const CollectiveForm& form, double v0,
                                          std::span<const double> force, const TimeGrid& grid,
                                          const VolterraOptions& options) {
    if (grid.count == 0 || !(grid.step > 0.0)) throw InvalidInput("volterra: empty time grid");
    const double h = grid.step;
    if (options.enforce_step_limit) {
        const double limit = max_volterra_step(form);
        if (h > limit * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "volterra: step " << h << " exceeds the stability limit; use h <= " << limit;
            throw InvalidInput(os.str());
        }
    }
    const double m = form.mass;
    const double omega0_sq = 2.0 * form.k_tilde_11 / m - damping_kernel(form, 0.0);
    const auto gamma = damping_kernel(form, grid);
    const bool memoryless = form.couplings_l.size() == 0 || form.couplings_l.cwiseAbs().maxCoeff() == 0.0;
    const Propagator2 r = harmonic_step(omega0_sq, h);
    const double g0 = gamma[0];
    const double denom = 1.0 + 0.25 * h * h * g0;

    const std::size_t count = grid.count;
    std::vector<double> x(count, 0.0);
    std::vector<double> v(count, 0.0);
    v[0] = v0;
    double memory = 0.0;  // M_n = int_0^{t_n} gamma(t_n - s) v(s) ds
    for (std::size_t n = 0; n + 1 < count; ++n) {
        const double accel = -memory;
        double yx = r.r00 * x[n] + r.r01 * v[n] + 0.5 * h * r.r01 * accel;
        double yv = r.r10 * x[n] + r.r11 * v[n] + 0.5 * h * r.r11 * accel;
        if (!force.empty()) {
            const double f = force[n] / m;
            yx += r.f0 * f;
            yv += r.f1 * f;
        }
        if (memoryless) {
            x[n + 1] = yx;
            v[n + 1] = yv;
            continue;
        }
        // Trapezoidal history up to t_{n+1}, excluding the unknown endpoint v_{n+1}.
        double hist = 0.5 * gamma[n + 1] * v[0];
        for (std::size_t j = 1; j <= n; ++j) hist += gamma[n + 1 - j] * v[j];
        hist *= h;
        v[n + 1] = (yv - 0.5 * h * hist) / denom;
        x[n + 1] = yx;
        memory = hist + 0.5 * h * g0 * v[n + 1];
    }

    TrajectoryTable out;
    out.times = grid.times();
    out.positions = std::move(x);
    out.momenta.resize(count);
    for (std::size_t i = 0; i < count; ++i) out.momenta[i] = m * v[i];
    return out;
}

} // namespace

TrajectoryTable solve_volterra(const CollectiveForm& form, double p0, const TimeGrid& grid,
                               VolterraOptions options) {
    return integrate_memory_equation(form, p0 / form.mass, {}, grid, options);
}

TrajectoryTable solve_volterra_forced(const CollectiveForm& form, std::span<const double> force,
                                      const TimeGrid& grid, VolterraOptions options) {
    if (force.size() != grid.count) {
        throw InvalidInput("solve_volterra_forced: force samples do not match the time grid");
    }
    if (grid.count == 0) throw InvalidInput("volterra: empty time grid");
    // A zero-length span would read as "unforced"; an all-zero force is the same thing.
    return integrate_memory_equation(form, 0.0, force, grid, options);
}

std::vector<std::complex<double>> fourier_solution(const CollectiveForm& form, double p0,
                                                   std::span<const double> omegas,
                                                   double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("fourier_solution: epsilon must be positive");
    const double m = form.mass;
    const double omega0_sq = 2.0 * form.k_tilde_11 / m - damping_kernel(form, 0.0);
    const std::complex<double> i(0.0, 1.0);
    std::vector<std::complex<double>> out(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double w = omegas[k];
        const std::complex<double> z(w, epsilon);
        const auto g = gamma_transform(form, w, epsilon);
        out[k] = p0 / (2.0 * std::numbers::pi * m * (omega0_sq - z * z - i * z * g));
    }
    return out;
}

TrajectoryTable underdamped_closed_form(const OscillatorParams& params, double p0, double mass,
                                        const TimeGrid& grid) {
    if (params.regime != DampingRegime::underdamped) {
        throw InvalidInput("underdamped_closed_form: oscillator is " +
                           std::string(to_string(params.regime)));
    }
    return damped_closed_form(params, p0, mass, grid);
}

TrajectoryTable damped_closed_form(const OscillatorParams& params, double p0, double mass,
                                   const TimeGrid& grid) {
    if (!(mass > 0.0)) throw InvalidInput("damped_closed_form: mass must be positive");
    TrajectoryTable out;
    out.times = grid.times();
    out.positions.resize(grid.count);
    out.momenta.resize(grid.count);
    const double g = params.gamma_bar;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = grid.at(i);
        const double decay = std::exp(-g * t);
        double x = 0.0;
        double v = 0.0;
        switch (params.regime) {
            case DampingRegime::underdamped: {
                const double w = params.omega_bar;
                x = decay * std::sin(w * t) / w;
                v = decay * (std::cos(w * t) - g * std::sin(w * t) / w);
                break;
            }
            case DampingRegime::critical:
                x = t * decay;
                v = decay * (1.0 - g * t);
                break;
            case DampingRegime::overdamped: {
                const double k = std::sqrt(g * g - params.omega0_sq);
                x = decay * std::sinh(k * t) / k;
                v = decay * (std::cosh(k * t) - g * std::sinh(k * t) / k);
                break;
            }
        }
        out.positions[i] = p0 / mass * x;
        out.momenta[i] = p0 * v;
    }
    return out;
}

LinearResponse linear_response(const CollectiveForm& form, std::span<const double> force,
                               const TimeGrid& grid) {
    if (force.size() != grid.count) {
        throw InvalidInput("linear_response: force samples do not match the time grid");
    }
    LinearResponse out;
    out.volterra = solve_volterra_forced(form, force, grid);

    // chi(t) = -(2/hbar) Im S(t) = (1/m) sum c^2 sin(wbar t) / wbar
    const auto modes = collective_sector_modes(form);
    std::vector<double> chi(grid.count, 0.0);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = grid.at(i);
        double sum = 0.0;
        for (Eigen::Index n = 0; n < modes.frequencies.size(); ++n) {
            const double w = modes.frequencies(n);
            const double c = modes.x_coefficients(n);
            sum += c * c * std::sin(w * t) / w;
        }
        chi[i] = sum / form.mass;
    }
    const double h = grid.step;
    out.convolution.assign(grid.count, 0.0);
    for (std::size_t i = 1; i < grid.count; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < i; ++k) {
            sum += force[k] * 0.5 * (chi[i - k] + chi[i - k - 1]);
        }
        out.convolution[i] = h * sum;
    }
    return out;
}

} // namespace collective
