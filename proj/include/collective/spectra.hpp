// spectra.hpp - transition strengths, correlators and spectral functions of
// the collective coordinate.
//
// Frequency-domain conventions: Ft(w) = (1/2pi) int F(t) exp(i w t) dt, and a
// Lorentzian smoothing of width eps replaces each delta line by
// (eps/pi) / ((w - w_n)^2 + eps^2).

#pragma once

#include "collective/dynamics.hpp"
#include "collective/mapping.hpp"
#include "collective/model.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace collective {

// Uniform grid w_i = start + i * step.
struct FrequencyGrid {
    double start = 0.0;
    double step = 0.0;
    std::size_t count = 0;

    double at(std::size_t i) const noexcept { return start + static_cast<double>(i) * step; }
    std::vector<double> values() const;

    // count points from lo to hi inclusive.
    static FrequencyGrid linspace(double lo, double hi, std::size_t count);
};

struct SpectralLine {
    double frequency;
    double weight;
};

// Sum of weighted delta functions; lines sorted by frequency, weights >= 0.
struct DeltaComb {
    std::vector<SpectralLine> lines;

    double total_weight() const noexcept;
    // (max - min) / (n - 1); the single frequency for one line.
    double mean_spacing() const;
};

struct SpectrumTable {
    std::vector<double> omegas;
    std::vector<double> values;
};

// sigma(w): lines (wt_n, g_n^2 / (2 m wt_n)) with g = force_couplings(form).
DeltaComb sigma_comb(const CollectiveForm& form);

// -(1/(2 pi m w)) Im (2k, [w - (Omega_r^2 + (2/m) K~_r)^{1/2} + i eps]^{-1} 2k),
// via eigendecomposition of the bath matrix. Rejects w == 0 and eps <= 0.
double sigma_resolvent(const SystemModel& model, double omega, double epsilon);

// Approximate sigma for small fluctuations around the mean coupling Kc:
// weights (2 k_n)^2 / (2 m w_n') at w_n' = sqrt(w_{n+1}^2 + 2 N Kc / m).
// Diagnostic only.
DeltaComb sigma_phonon_approximation(const SystemModel& model);

// |<0|X|n>|^2 = (hbar / 2m) c_n^2 / wbar_n at wbar_n.
DeltaComb strength_comb(const QuantumModes& modes);

// S(t) = <0| X(t) X(0) |0> = (hbar/2m) sum c_n^2 / wbar_n exp(-i wbar_n t).
std::complex<double> correlator_S(const QuantumModes& modes, double t);

// Termwise Lorentzian smoothing of the comb. Rejects eps <= 0.
SpectrumTable smoothed_spectrum(const DeltaComb& comb, double epsilon, const FrequencyGrid& grid);

// 5 * comb.mean_spacing().
double default_epsilon(const DeltaComb& comb);

// Warns when eps is not well inside (mean spacing, Omega0): we ask for
// eps >= 2 * spacing and eps <= Omega0 / 2.
std::optional<std::string> smoothing_window_warning(const DeltaComb& comb, double epsilon,
                                                    double omega0);

struct OhmicSpectrum {
    SpectrumTable omega_form;       // (hbar/m pi) w g0 / ((W0^2 - w^2)^2 + (w g0)^2)
    SpectrumTable lorentzian_form;  // hbar gb / (2 pi m Wb) (L(w - Wb) - L(w + Wb))
};

// Constant-damping spectrum in both algebraic forms; zero for w <= 0.
// Throws InvalidInput unless params.regime is underdamped.
OhmicSpectrum ohmic_spectrum(const OscillatorParams& params, const FrequencyGrid& grid,
                             double hbar, double mass);

// n-fold self-convolution times n! (the Wick prefactor of A = X^n), evaluated
// on the input grid. The grid must be uniform with w = 0 on its lattice, and
// the estimated base weight outside the grid that feeds on-grid values must
// stay below 1e-3 of the total (for a grid starting at w >= 0 only the lower
// edge counts). n == 1 returns the base unchanged.
SpectrumTable convolution_power_spectrum(const SpectrumTable& base, int n);

// sum_{n>=1} betas[n] * (base * base * ... * base) (n-fold, no prefactor).
// betas[0] multiplies the constant part of S_A and must be zero.
SpectrumTable observable_spectrum(const SpectrumTable& base, std::span<const double> betas);

// (hbar / m pi) theta(w) Im 1 / (Omega0^2 - z^2 - i z gamma_eps(w)), z = w + i eps.
SpectrumTable fdt_spectrum(const CollectiveForm& form, const FrequencyGrid& grid, double epsilon);

// One normal mode of the full 2N-coordinate system.
struct FullMode {
    double omega_sq;
    double x_coefficient;   // projection of X onto the mode
    bool symmetric_sector;  // lives in the dbar (x + xbar) sector
    double strength;        // (hbar / 2m) c^2 / omega; 0 for zero modes
};

std::vector<FullMode> full_system_modes(const SystemModel& model);

} // namespace collective
