// dynamics.hpp - damping kernel, collective frequency and three routes to
// the kicked trajectory X(t) (initial X = 0, P = P0, bath at rest):
//
//   evolve_exact            normal modes of the full 2N-coordinate system
//   solve_volterra          Xdd + Omega0^2 X + int_0^t gamma(t-s) Xd(s) ds = F/m
//   underdamped_closed_form P0/(m Omega_bar) exp(-gamma_bar t) sin(Omega_bar t)

#pragma once

#include "collective/linalg.hpp"
#include "collective/mapping.hpp"
#include "collective/model.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace collective {

// Uniform grid t_i = i * step, i = 0..count-1.
struct TimeGrid {
    double step = 0.0;
    std::size_t count = 0;

    double at(std::size_t i) const noexcept { return static_cast<double>(i) * step; }
    double end() const noexcept { return count == 0 ? 0.0 : at(count - 1); }
    std::vector<double> times() const;

    // count = steps + 1 points covering [0, t_max].
    static TimeGrid covering(double t_max, std::size_t steps);
};

struct TrajectoryTable {
    std::vector<double> times;
    std::vector<double> positions;  // X(t)
    std::vector<double> momenta;    // m Xd(t); empty when not computed
};

enum class DampingRegime { underdamped, critical, overdamped };

std::string_view to_string(DampingRegime r) noexcept;

struct OscillatorParams {
    double omega0_sq = 0.0;
    double gamma0 = 0.0;
    double omega_bar = 0.0;   // sqrt(Omega0^2 - gamma0^2/4); 0 unless underdamped
    double gamma_bar = 0.0;   // gamma0 / 2
    DampingRegime regime = DampingRegime::critical;
    bool stable = true;       // Omega0^2 > 0
    double epsilon = 0.0;     // smoothing used to extract gamma0 (0 if given)

    static OscillatorParams from_damping(double omega0_sq, double gamma0);
    static OscillatorParams from_underdamped(double omega_bar, double gamma_bar);

    // Same poles shifted by -i eps: gamma_bar -> gamma_bar + eps, Omega_bar kept.
    // This is what a Lorentzian smoothing of width eps does to a flat-damping
    // spectrum.
    OscillatorParams broadened(double eps) const;
};

// gamma(t) = sum_n g_n^2 / (m^2 wt_n^2) cos(wt_n t), g = force_couplings(form)
double damping_kernel(const CollectiveForm& form, double t);
std::vector<double> damping_kernel(const CollectiveForm& form, const TimeGrid& grid);

// int_0^inf exp((i w - eps) t) gamma(t) dt, termwise in closed form.
std::complex<double> gamma_transform(const CollectiveForm& form, double omega, double epsilon);

// (max - min) / (n - 1) over the bath frequencies; the frequency itself for a
// single bath mode.
double bath_mean_spacing(const CollectiveForm& form);

// 2 pi / bath_mean_spacing.
double recurrence_time(const CollectiveForm& form);

// Omega0^2 = 2 K11/m - gamma(0); gamma0 = Re gamma_transform(Omega0, eps) with
// eps = 5 * bath_mean_spacing unless given.
OscillatorParams collective_frequency(const CollectiveForm& form);
OscillatorParams collective_frequency(const CollectiveForm& form, double epsilon);

// Exact solution of the full 2N-coordinate system started from X = 0,
// P = P0 and every other coordinate and momentum zero.
class NormalModePropagator {
public:
    NormalModePropagator(const SystemModel& model, double p0);

    Vector position(double t) const;  // z = (x, xbar)
    Vector velocity(double t) const;
    double collective_position(double t) const;
    double collective_velocity(double t) const;
    double energy(double t) const;    // full H at time t

    const Vector& omega_sq() const noexcept { return omega_sq_; }
    const Vector& x_direction() const noexcept { return x_dir_; }

private:
    Matrix modes_;
    Vector omega_sq_;
    Vector initial_amplitude_;  // mode projections of the initial velocity
    Vector x_dir_;              // X = x_dir . z
    Vector x_projection_;       // mode projections of x_dir
    Matrix potential_;
    double mass_;
};

TrajectoryTable evolve_exact(const SystemModel& model, double p0, const TimeGrid& grid);

// Largest step accepted by solve_volterra: 0.1 / max(max bath freq, Omega0).
double max_volterra_step(const CollectiveForm& form);

struct VolterraOptions {
    bool enforce_step_limit = true;
};

// The harmonic part is propagated exactly over each step; the memory integral
// uses the trapezoidal rule. Second order in the step. Cost O(T^2) unless the
// kernel vanishes identically.
TrajectoryTable solve_volterra(const CollectiveForm& form, double p0, const TimeGrid& grid,
                               VolterraOptions options = {});

// Same stepper, initially at rest, driven by a force that is constant on each
// bin [t_k, t_{k+1}) with value force[k].
TrajectoryTable solve_volterra_forced(const CollectiveForm& form, std::span<const double> force,
                                      const TimeGrid& grid, VolterraOptions options = {});

// Xt(w) = P0 / (2 pi m (Omega0^2 - z^2 - i z gamma_eps(w))), z = w + i eps.
// Inverse transforming gives exp(-eps t) X(t).
std::vector<std::complex<double>> fourier_solution(const CollectiveForm& form, double p0,
                                                   std::span<const double> omegas,
                                                   double epsilon);

// Throws InvalidInput unless params.regime is underdamped.
TrajectoryTable underdamped_closed_form(const OscillatorParams& params, double p0, double mass,
                                        const TimeGrid& grid);

// Kicked damped oscillator in any regime (critical and overdamped included).
TrajectoryTable damped_closed_form(const OscillatorParams& params, double p0, double mass,
                                   const TimeGrid& grid);

struct LinearResponse {
    TrajectoryTable volterra;         // forced memory equation
    std::vector<double> convolution;  // int chi(t - t') F(t') dt', hbar chi = -2 theta(t) Im S(t)
};

LinearResponse linear_response(const CollectiveForm& form, std::span<const double> force,
                               const TimeGrid& grid);

} // namespace collective
