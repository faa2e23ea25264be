#include "collective/spectra.hpp"

#include "collective/errors.hpp"
#include "collective/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace collective {

namespace {

constexpr double pi = std::numbers::pi;

double lorentzian(double x, double eps) { return eps / (pi * (x * x + eps * eps)); }

void require_positive_epsilon(double eps, const char* where) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidInput(std::string(where) + ": epsilon must be positive");
    }
}

DeltaComb sorted_comb(std::vector<SpectralLine> lines) {
    std::stable_sort(lines.begin(), lines.end(),
                     [](const SpectralLine& a, const SpectralLine& b) { return a.frequency < b.frequency; });
    return DeltaComb{std::move(lines)};
}

} // namespace

std::vector<double> FrequencyGrid::values() const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = at(i);
    return out;
}

FrequencyGrid FrequencyGrid::linspace(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) throw InvalidInput("frequency grid needs hi > lo and at least 2 points");
    return FrequencyGrid{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

double DeltaComb::total_weight() const noexcept {
    double sum = 0.0;
    for (const auto& l : lines) sum += l.weight;
    return sum;
}

double DeltaComb::mean_spacing() const {
    if (lines.empty()) throw InvalidInput("mean_spacing: empty comb");
    if (lines.size() == 1) return lines.front().frequency;
    return (lines.back().frequency - lines.front().frequency) / static_cast<double>(lines.size() - 1);
}

DeltaComb sigma_comb(const CollectiveForm& form) {
    const Vector g = force_couplings(form);
    std::vector<SpectralLine> lines;
    for (Eigen::Index n = 0; n < form.bath_freqs.size(); ++n) {
        const double w = form.bath_freqs(n);
        lines.push_back({w, g(n) * g(n) / (2.0 * form.mass * w)});
    }
    return sorted_comb(std::move(lines));
}

double sigma_resolvent(const SystemModel& model, double omega, double epsilon) {
    require_positive_epsilon(epsilon, "sigma_resolvent");
    if (omega == 0.0 || !std::isfinite(omega)) {
        throw InvalidInput("sigma_resolvent: omega must be nonzero (singular prefactor)");
    }
    const auto form = caldeira_leggett_form(model);
    // (2k, [w - sqrt(M) + i eps]^{-1} 2k) with M = U diag(wt^2) U^T is a sum
    // over the bath eigenbasis with weights (2 l_n)^2.
    const Vector g = force_couplings(form);
    std::complex<double> inner = 0.0;
    for (Eigen::Index n = 0; n < form.bath_freqs.size(); ++n) {
        inner += g(n) * g(n) / std::complex<double>(omega - form.bath_freqs(n), epsilon);
    }
    return -inner.imag() / (2.0 * pi * model.mass * omega);
}

DeltaComb sigma_phonon_approximation(const SystemModel& model) {
    const int n = model.n_particles;
    const auto phonons = phonon_spectrum(model);
    const auto form = caldeira_leggett_form(model, phonons);
    const double mean_k = model.k.mean();
    const double shift = 2.0 * n * mean_k / model.mass;
    std::vector<SpectralLine> lines;
    for (int i = 0; i + 1 < n; ++i) {
        const double w = std::sqrt(std::max(phonons.omega_sq(i + 1) + shift, 0.0));
        const double k = 2.0 * form.coupling_k(i);
        lines.push_back({w, w > 0.0 ? k * k / (2.0 * model.mass * w) : 0.0});
    }
    return sorted_comb(std::move(lines));
}

DeltaComb strength_comb(const QuantumModes& modes) {
    std::vector<SpectralLine> lines;
    const double scale = modes.hbar / (2.0 * modes.mass);
    for (Eigen::Index n = 0; n < modes.frequencies.size(); ++n) {
        const double w = modes.frequencies(n);
        const double c = modes.x_coefficients(n);
        lines.push_back({w, scale * c * c / w});
    }
    return sorted_comb(std::move(lines));
}

std::complex<double> correlator_S(const QuantumModes& modes, double t) {
    const double scale = modes.hbar / (2.0 * modes.mass);
    double re = 0.0;
    double im = 0.0;
    for (Eigen::Index n = 0; n < modes.frequencies.size(); ++n) {
        const double w = modes.frequencies(n);
        const double c = modes.x_coefficients(n);
        const double weight = scale * c * c / w;
        re += weight * std::cos(w * t);
        im -= weight * std::sin(w * t);
    }
    return {re, im};
}

SpectrumTable smoothed_spectrum(const DeltaComb& comb, double epsilon, const FrequencyGrid& grid) {
    require_positive_epsilon(epsilon, "smoothed_spectrum");
    SpectrumTable out{grid.values(), std::vector<double>(grid.count, 0.0)};
    parallel_for(grid.count, [&](std::size_t i) {
        double sum = 0.0;
        for (const auto& line : comb.lines) sum += line.weight * lorentzian(out.omegas[i] - line.frequency, epsilon);
        out.values[i] = sum;
    });
    return out;
}

double default_epsilon(const DeltaComb& comb) { return 5.0 * comb.mean_spacing(); }

std::optional<std::string> smoothing_window_warning(const DeltaComb& comb, double epsilon,
                                                    double omega0) {
    const double spacing = comb.mean_spacing();
    std::ostringstream os;
    if (epsilon < 2.0 * spacing) {
        os << "epsilon " << epsilon << " is below twice the mean level spacing " << spacing
           << "; the smoothed spectrum will still show individual lines";
        return os.str();
    }
    if (epsilon > 0.5 * omega0) {
        os << "epsilon " << epsilon << " exceeds half the collective frequency " << omega0
           << "; the smoothing will wash out the collective peak";
        return os.str();
    }
    return std::nullopt;
}

OhmicSpectrum ohmic_spectrum(const OscillatorParams& params, const FrequencyGrid& grid, double hbar,
                             double mass) {
    if (params.regime != DampingRegime::underdamped) {
        throw InvalidInput("ohmic_spectrum: oscillator is " + std::string(to_string(params.regime)));
    }
    if (!(hbar > 0.0) || !(mass > 0.0)) throw InvalidInput("ohmic_spectrum: hbar and mass must be positive");
    const double w0sq = params.omega0_sq;
    const double g0 = params.gamma0;
    const double wb = params.omega_bar;
    const double gb = params.gamma_bar;
    OhmicSpectrum out;
    out.omega_form = {grid.values(), std::vector<double>(grid.count, 0.0)};
    out.lorentzian_form = {grid.values(), std::vector<double>(grid.count, 0.0)};
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double w = out.omega_form.omegas[i];
        if (w <= 0.0) continue;
        const double d = w0sq - w * w;
        out.omega_form.values[i] = hbar / (mass * pi) * w * g0 / (d * d + w * w * g0 * g0);
        const double lo = w - wb;
        const double hi = w + wb;
        out.lorentzian_form.values[i] =
            hbar * gb / (2.0 * pi * mass * wb) * (1.0 / (lo * lo + gb * gb) - 1.0 / (hi * hi + gb * gb));
    }
    return out;
}

namespace {

struct Lattice {
    double step;
    long offset;  // omegas[i] = (offset + i) * step
};

Lattice check_lattice(const SpectrumTable& base) {
    const std::size_t g = base.omegas.size();
    if (g < 3 || base.values.size() != g) {
        throw InvalidInput("convolution: need at least 3 samples with matching values");
    }
    const double step = (base.omegas.back() - base.omegas.front()) / static_cast<double>(g - 1);
    if (!(step > 0.0)) throw InvalidInput("convolution: grid must be increasing");
    for (std::size_t i = 0; i < g; ++i) {
        const double expected = base.omegas.front() + static_cast<double>(i) * step;
        if (std::abs(base.omegas[i] - expected) > 1e-9 * step) {
            throw InvalidInput("convolution: grid is not uniform");
        }
    }
    const double shift = base.omegas.front() / step;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) > 1e-6) {
        throw InvalidInput("convolution: w = 0 does not lie on the grid lattice");
    }
    return {step, static_cast<long>(rounded)};
}

void check_tails(const SpectrumTable& base, double step) {
    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < base.values.size(); ++i) {
        mass += base.values[i];
        moment += base.values[i] * base.omegas[i];
    }
    mass *= step;
    moment *= step;
    if (!(std::abs(mass) > 0.0)) throw InvalidInput("convolution: base spectrum has no weight");
    const double centroid = moment / mass;
    const double lo_edge = base.omegas.front();
    const double hi_edge = base.omegas.back();
    // Weight above the grid can only reach on-grid results through partners at
    // negative frequency, so a grid starting at w >= 0 ignores the upper tail.
    const double lo_tail = std::abs(base.values.front()) * std::abs(lo_edge - centroid);
    const double hi_tail =
        lo_edge < 0.0 ? std::abs(base.values.back()) * std::abs(hi_edge - centroid) : 0.0;
    const double ratio = (lo_tail + hi_tail) / std::abs(mass);
    constexpr double limit = 1e-3;
    if (ratio > limit) {
        // A 1/w^2 tail loses mass as 1/distance, so the span has to grow by ratio/limit.
        const double grow = ratio / limit;
        std::ostringstream os;
        os << "convolution: estimated tail mass outside the grid is " << ratio
           << " of the total (limit " << limit << "); required span is about ["
           << centroid - grow * std::abs(lo_edge - centroid) << ", "
           << centroid + grow * std::abs(hi_edge - centroid) << "]";
        throw InvalidInput(os.str());
    }
}

std::vector<double> convolve_on_grid(const std::vector<double>& a, const std::vector<double>& b,
                                     const Lattice& lattice) {
    const long g = static_cast<long>(a.size());
    std::vector<double> out(a.size(), 0.0);
    parallel_for(a.size(), [&](std::size_t iu) {
        const long i = static_cast<long>(iu);
        // b evaluated at w_i - w_j has lattice index (i - j) - offset.
        double sum = 0.0;
        for (long j = 0; j < g; ++j) {
            const long idx = i - j - lattice.offset;
            if (idx < 0 || idx >= g) continue;
            sum += a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(idx)];
        }
        out[iu] = lattice.step * sum;
    });
    return out;
}

} // namespace

SpectrumTable convolution_power_spectrum(const SpectrumTable& base, int n) {
    if (n < 1) throw InvalidInput("convolution_power_spectrum: n must be at least 1");
    if (n == 1) return base;
    const Lattice lattice = check_lattice(base);
    check_tails(base, lattice.step);
    std::vector<double> acc = base.values;
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) {
        acc = convolve_on_grid(acc, base.values, lattice);
        factorial *= k;
    }
    for (double& v : acc) v *= factorial;
    return SpectrumTable{base.omegas, std::move(acc)};
}

SpectrumTable observable_spectrum(const SpectrumTable& base, std::span<const double> betas) {
    if (betas.empty()) throw InvalidInput("observable_spectrum: no coefficients");
    if (betas[0] != 0.0) {
        throw InvalidInput("observable_spectrum: betas[0] multiplies the constant part and must be zero");
    }
    SpectrumTable out{base.omegas, std::vector<double>(base.omegas.size(), 0.0)};
    if (betas.size() == 1) return out;
    Lattice lattice{1.0, 0};
    if (betas.size() > 2) {
        lattice = check_lattice(base);
        check_tails(base, lattice.step);
    }
    std::vector<double> power = base.values;
    for (std::size_t n = 1; n < betas.size(); ++n) {
        if (n > 1) power = convolve_on_grid(power, base.values, lattice);
        for (std::size_t i = 0; i < power.size(); ++i) out.values[i] += betas[n] * power[i];
    }
    return out;
}

SpectrumTable fdt_spectrum(const CollectiveForm& form, const FrequencyGrid& grid, double epsilon) {
    require_positive_epsilon(epsilon, "fdt_spectrum");
    const double m = form.mass;
    const double omega0_sq = 2.0 * form.k_tilde_11 / m - damping_kernel(form, 0.0);
    const double prefactor = form.hbar / (m * pi);
    const std::complex<double> i_unit(0.0, 1.0);
    SpectrumTable out{grid.values(), std::vector<double>(grid.count, 0.0)};
    parallel_for(grid.count, [&](std::size_t k) {
        const double w = out.omegas[k];
        if (w <= 0.0) return;
        const std::complex<double> z(w, epsilon);
        const auto g = gamma_transform(form, w, epsilon);
        out.values[k] = prefactor * (1.0 / (omega0_sq - z * z - i_unit * z * g)).imag();
    });
    return out;
}

std::vector<FullMode> full_system_modes(const SystemModel& model) {
    const Eigen::Index n = model.n_particles;
    const auto eig = symmetric_eigen((2.0 / model.mass) * full_potential_matrix(model), "full system");
    Vector x_dir(2 * n);
    const double unit = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    x_dir.head(n).setConstant(unit);
    x_dir.tail(n).setConstant(-unit);
    const double tol = 1e-12 * eig.values.cwiseAbs().maxCoeff();
    const double scale = model.hbar / (2.0 * model.mass);

    std::vector<FullMode> out;
    out.reserve(static_cast<std::size_t>(2 * n));
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
        const auto v = eig.vectors.col(k);
        FullMode mode;
        mode.omega_sq = eig.values(k);
        mode.x_coefficient = v.dot(x_dir);
        mode.symmetric_sector = (v.head(n) - v.tail(n)).norm() < (v.head(n) + v.tail(n)).norm();
        mode.strength = mode.omega_sq > tol
                            ? scale * mode.x_coefficient * mode.x_coefficient / std::sqrt(mode.omega_sq)
                            : 0.0;
        out.push_back(mode);
    }
    return out;
}

} // namespace collective
