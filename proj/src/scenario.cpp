#include "collective/scenario.hpp"

#include "collective/dynamics.hpp"
#include "collective/mapping.hpp"
#include "collective/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace collective {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string where(std::size_t line, std::string_view field) {
    std::ostringstream os;
    os << "line " << line << ": " << field;
    return os.str();
}

double parse_double(std::string_view text, std::size_t line, std::string_view field) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError(where(line, field) + " expects a finite number, got '" + std::string(text) + "'");
    }
    return value;
}

long parse_integer(std::string_view text, std::size_t line, std::string_view field) {
    long value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(where(line, field) + " expects an integer, got '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void check_ranges(const ScenarioConfig& c, bool saw_n) {
    const auto& m = c.model;
    require(saw_n, "model.N is required");
    require(m.kind == "next_neighbor" || m.kind == "general",
            "model.kind must be next_neighbor or general, got '" + m.kind + "'");
    require(m.n_particles >= 2, "model.N must be at least 2");
    require(m.mass > 0.0, "model.mass must be positive");
    require(m.hbar > 0.0, "model.hbar must be positive");
    require(m.omega0 > 0.0, "model.omega0 must be positive");
    require(m.alpha >= 0.0, "model.alpha must be nonnegative");
    require(m.constant_k >= 0.0, "model.constant_k must be nonnegative");
    if (m.kind == "general") {
        require(!m.w_file.empty(), "model.w_file is required for kind = general");
        require(!m.k_file.empty(), "model.k_file is required for kind = general");
        require(m.alpha == 0.0, "model.alpha applies only to kind = next_neighbor");
    } else {
        require(m.w_file.empty(), "model.w_file applies only to kind = general");
        require(m.k_file.empty() || m.alpha == 0.0, "model.alpha and model.k_file cannot both be set");
    }
    for (const auto* file : {&m.w_file, &m.k_file}) {
        if (!file->empty()) {
            const char* field = file == &m.w_file ? "model.w_file" : "model.k_file";
            require(fs::is_regular_file(*file), std::string(field) + ": file not found: " + file->string());
        }
    }
    const auto& d = c.dynamics;
    require(d.p0 != 0.0, "dynamics.P0 must be nonzero");
    require(!d.t_max || *d.t_max > 0.0, "dynamics.t_max must be positive");
    require(!d.steps || *d.steps >= 1, "dynamics.steps must be at least 1");
    const auto& s = c.spectra;
    require(!s.epsilon || *s.epsilon > 0.0, "spectra.epsilon must be positive");
    require(!s.omega_max || *s.omega_max > 0.0, "spectra.omega_max must be positive");
    require(s.points >= 3, "spectra.points must be at least 3");
    require(!s.powers.empty(), "spectra.powers must list at least one power");
    for (int p : s.powers) require(p >= 1 && p <= 8, "spectra.powers entries must lie in 1..8");
    require(c.output.csv || c.output.json, "output.formats must include csv or json");
}

struct TimeSetup {
    TimeGrid grid;
    double t_max;
};

TimeSetup time_setup(const DynamicsConfig& d, const CollectiveForm& form, const OscillatorParams& p) {
    double t_max = 0.0;
    if (d.t_max) {
        t_max = *d.t_max;
    } else {
        t_max = 0.5 * recurrence_time(form);
        if (p.gamma0 > 0.0) t_max = std::min(t_max, 20.0 / p.gamma0);
    }
    std::size_t steps = 0;
    if (d.steps) {
        steps = *d.steps;
    } else {
        const double top = std::max(form.bath_freqs.maxCoeff(), std::sqrt(std::max(p.omega0_sq, 0.0)));
        steps = static_cast<std::size_t>(std::ceil(t_max / (0.02 / top)));
    }
    return {TimeGrid::covering(t_max, steps), t_max};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

double max_abs(const std::vector<double>& a) {
    double out = 0.0;
    for (double v : a) out = std::max(out, std::abs(v));
    return out;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_number((*columns[j])[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_comb(const fs::path& path, const DeltaComb& comb) {
    std::vector<double> w, v;
    for (const auto& line : comb.lines) {
        w.push_back(line.frequency);
        v.push_back(line.weight);
    }
    write_csv(path, {"omega", "weight"}, {&w, &v});
}

double trapezoid(const std::vector<double>& y, double step) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) s += 0.5 * (y[i] + y[i + 1]);
    return s * step;
}

std::vector<double> mirrored_smoothing(const DeltaComb& comb, double eps, const FrequencyGrid& grid) {
    std::vector<double> out(grid.count, 0.0);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double w = grid.at(i);
        if (w <= 0.0) continue;
        double s = 0.0;
        for (const auto& line : comb.lines) {
            const double a = w - line.frequency;
            const double b = w + line.frequency;
            s += line.weight * (eps / pi) * (1.0 / (a * a + eps * eps) - 1.0 / (b * b + eps * eps));
        }
        out[i] = s;
    }
    return out;
}

struct SpectraSetup {
    double epsilon;
    FrequencyGrid grid;
};

SpectraSetup spectra_setup(const SpectraConfig& s, const DeltaComb& comb) {
    const double eps = s.epsilon ? *s.epsilon : default_epsilon(comb);
    const double top = s.omega_max ? *s.omega_max : 1.5 * comb.lines.back().frequency;
    return {eps, FrequencyGrid::linspace(0.0, top, s.points)};
}

bool is_constant(const Matrix& k) {
    const double ref = k(0, 0);
    return ((k.array() - ref).abs() <= 1e-15 * std::max(1.0, std::abs(ref))).all();
}

Matrix collective_matrix(const CollectiveForm& form) {
    const Eigen::Index n = form.bath_freqs.size();
    const Vector g = force_couplings(form);
    Matrix m = Matrix::Zero(n + 1, n + 1);
    m(0, 0) = 2.0 * form.k_tilde_11 / form.mass;
    m.block(1, 0, n, 1) = g / form.mass;
    m.block(0, 1, 1, n) = g.transpose() / form.mass;
    m.diagonal().tail(n) = form.bath_freqs.array().square().matrix();
    return m;
}

} // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

ScenarioConfig parse_config(std::string_view text, const fs::path& base_dir) {
    ScenarioConfig c;
    std::string section;
    std::set<std::string> seen;
    bool saw_n = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    auto resolve = [&](const std::string& v) {
        fs::path p(v);
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(std::string_view(raw).substr(0, hash));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']') throw ConfigError(where(line, "malformed section header '" + content + "'"));
            section = trim(std::string_view(content).substr(1, content.size() - 2));
            if (section != "model" && section != "dynamics" && section != "spectra" && section != "output") {
                throw ConfigError(where(line, "unknown section [" + section + "]"));
            }
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError(where(line, "expected key = value, got '" + content + "'"));
        if (section.empty()) throw ConfigError(where(line, "key outside of any section"));
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        const std::string field = section + "." + key;
        if (value.empty()) throw ConfigError(where(line, field) + " has no value");
        if (!seen.insert(field).second) throw ConfigError(where(line, field) + " is given twice");

        if (section == "model") {
            auto& m = c.model;
            if (key == "kind") m.kind = value;
            else if (key == "N") {
                const long n = parse_integer(value, line, field);
                if (n < 2 || n > 100000) throw ConfigError(where(line, field) + " must lie in 2..100000");
                m.n_particles = static_cast<int>(n);
                saw_n = true;
            }
            else if (key == "mass") m.mass = parse_double(value, line, field);
            else if (key == "omega0") m.omega0 = parse_double(value, line, field);
            else if (key == "alpha") m.alpha = parse_double(value, line, field);
            else if (key == "hbar") m.hbar = parse_double(value, line, field);
            else if (key == "constant_k") m.constant_k = parse_double(value, line, field);
            else if (key == "w_file") m.w_file = resolve(value);
            else if (key == "k_file") m.k_file = resolve(value);
            else throw ConfigError(where(line, "unknown key " + field));
        } else if (section == "dynamics") {
            auto& d = c.dynamics;
            if (key == "P0") d.p0 = parse_double(value, line, field);
            else if (key == "t_max") { if (value != "auto") d.t_max = parse_double(value, line, field); }
            else if (key == "steps") {
                if (value != "auto") {
                    const long n = parse_integer(value, line, field);
                    if (n < 1) throw ConfigError(where(line, field) + " must be at least 1");
                    d.steps = static_cast<std::size_t>(n);
                }
            }
            else throw ConfigError(where(line, "unknown key " + field));
        } else if (section == "spectra") {
            auto& s = c.spectra;
            if (key == "epsilon") { if (value != "auto") s.epsilon = parse_double(value, line, field); }
            else if (key == "omega_max") { if (value != "auto") s.omega_max = parse_double(value, line, field); }
            else if (key == "points") {
                const long n = parse_integer(value, line, field);
                if (n < 3 || n > 100000) throw ConfigError(where(line, field) + " must lie in 3..100000");
                s.points = static_cast<std::size_t>(n);
            }
            else if (key == "powers") {
                s.powers.clear();
                for (const auto& item : split_list(value)) s.powers.push_back(static_cast<int>(parse_integer(item, line, field)));
            }
            else throw ConfigError(where(line, "unknown key " + field));
        } else {
            auto& o = c.output;
            if (key == "directory") o.directory = resolve(value);
            else if (key == "formats") {
                o.csv = o.json = false;
                for (const auto& item : split_list(value)) {
                    if (item == "csv") o.csv = true;
                    else if (item == "json") o.json = true;
                    else throw ConfigError(where(line, field) + " accepts csv and json, got '" + item + "'");
                }
            }
            else throw ConfigError(where(line, "unknown key " + field));
        }
    }
    check_ranges(c, saw_n);
    return c;
}

ScenarioConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

Matrix read_matrix_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file " + path.string());
    std::vector<std::vector<double>> rows;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string content = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (content.empty()) continue;
        std::istringstream fields(content);
        std::vector<double> row;
        std::string token;
        while (fields >> token) row.push_back(parse_double(token, line, path.filename().string()));
        rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw ConfigError(path.string() + ": empty matrix");
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw ConfigError(path.string() + ": row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) out(i, j) = rows[i][j];
    }
    return out;
}

SystemModel build_scenario_model(const ModelConfig& c) {
    const int n = c.n_particles;
    auto sized = [&](const fs::path& file, const char* field) {
        Matrix m = read_matrix_file(file);
        if (m.rows() != n) {
            throw ConfigError(std::string(field) + ": matrix is " + std::to_string(m.rows()) + " x " +
                              std::to_string(m.rows()) + " but model.N = " + std::to_string(n));
        }
        return m;
    };
    SystemModel model;
    if (c.kind == "general") {
        Matrix k = sized(c.k_file, "model.k_file");
        k.array() += c.constant_k;
        return build_general_model(sized(c.w_file, "model.w_file"), std::move(k), c.mass, c.hbar);
    }
    if (!c.k_file.empty()) {
        model = build_chain_model(n, c.mass, c.omega0, sized(c.k_file, "model.k_file"), c.hbar);
    } else {
        model = build_next_neighbor_model(n, c.mass, c.omega0, c.alpha, c.hbar);
    }
    return c.constant_k > 0.0 ? with_constant_coupling(model, c.constant_k) : model;
}

json run_scenario(const ScenarioConfig& config, const fs::path& directory) {
    const SystemModel model = build_scenario_model(config.model);
    const CollectiveForm form = caldeira_leggett_form(model);
    const OscillatorParams params = collective_frequency(form);
    const TimeSetup time = time_setup(config.dynamics, form, params);
    const double p0 = config.dynamics.p0;

    const auto exact = evolve_exact(model, p0, time.grid);
    const auto memory = solve_volterra(form, p0, time.grid);
    const auto closed = damped_closed_form(params, p0, model.mass, time.grid);

    fs::create_directories(directory);
    const bool csv = config.output.csv;
    if (csv) {
        write_csv(directory / "trajectory.csv", {"t", "X_exact", "X_volterra", "X_closed_form"},
                  {&exact.times, &exact.positions, &memory.positions, &closed.positions});
        write_comb(directory / "sigma.csv", sigma_comb(form));
    }

    json warnings = json::array();
    json summary;
    summary["model"] = {{"kind", config.model.kind},
                        {"N", model.n_particles},
                        {"mass", model.mass},
                        {"omega0", config.model.omega0},
                        {"alpha", config.model.alpha},
                        {"constant_k", config.model.constant_k},
                        {"hbar", model.hbar}};
    summary["k_tilde_11"] = form.k_tilde_11;
    summary["omega0_sq"] = params.omega0_sq;
    summary["gamma0"] = params.gamma0;
    summary["omega_bar"] = params.omega_bar;
    summary["gamma_bar"] = params.gamma_bar;
    summary["regime"] = std::string(to_string(params.regime));
    summary["stable"] = params.stable;
    summary["gamma_epsilon"] = params.epsilon;
    summary["bath_mean_spacing"] = bath_mean_spacing(form);
    summary["recurrence_time"] = recurrence_time(form);
    summary["time_grid"] = {{"t_max", time.grid.end()}, {"step", time.grid.step}, {"points", time.grid.count}};
    const double scale = params.stable ? std::abs(p0) / (model.mass * std::sqrt(params.omega0_sq))
                                       : std::max(max_abs(exact.positions), 1e-300);
    summary["errors"] = {{"volterra_vs_exact_linf", max_abs_diff(memory.positions, exact.positions)},
                         {"closed_form_vs_exact_linf", max_abs_diff(closed.positions, exact.positions)},
                         {"volterra_vs_exact_relative", max_abs_diff(memory.positions, exact.positions) / scale}};

    summary["spectra_available"] = params.stable;
    if (!params.stable) {
        warnings.push_back("collective frequency squared is not positive; spectra skipped");
    } else {
        const QuantumModes modes = collective_sector_modes(form);
        const DeltaComb comb = strength_comb(modes);
        const SpectraSetup sp = spectra_setup(config.spectra, comb);
        const auto smoothed = smoothed_spectrum(comb, sp.epsilon, sp.grid);
        const auto fdt = fdt_spectrum(form, sp.grid, sp.epsilon);
        if (auto w = smoothing_window_warning(comb, sp.epsilon, std::sqrt(params.omega0_sq))) warnings.push_back(*w);

        std::vector<std::string> header{"omega", "smoothed_comb", "fdt"};
        std::vector<std::vector<double>> extra;
        extra.reserve(2 + config.spectra.powers.size());
        if (params.regime == DampingRegime::underdamped) {
            extra.push_back(ohmic_spectrum(params, sp.grid, model.hbar, model.mass).omega_form.values);
            header.push_back("ohmic");
            extra.push_back(ohmic_spectrum(params.broadened(sp.epsilon), sp.grid, model.hbar, model.mass).omega_form.values);
            header.push_back("ohmic_broadened");
        }
        for (int n : config.spectra.powers) {
            extra.push_back(convolution_power_spectrum(fdt, n).values);
            header.push_back("S_" + std::to_string(n));
        }
        if (csv) {
            write_comb(directory / "strengths.csv", comb);
            std::vector<const std::vector<double>*> cols{&smoothed.omegas, &smoothed.values, &fdt.values};
            for (const auto& e : extra) cols.push_back(&e);
            write_csv(directory / "spectrum.csv", header, cols);
        }

        double f_sum = 0.0;
        for (const auto& line : comb.lines) f_sum += line.weight * line.frequency;
        const double top = max_abs(smoothed.values);
        summary["spectra"] = {
            {"epsilon", sp.epsilon},
            {"omega_max", sp.grid.at(sp.grid.count - 1)},
            {"points", sp.grid.count},
            {"sum_rules",
             {{"x_weight_norm", modes.x_coefficients.squaredNorm()},
              {"strength_total", comb.total_weight()},
              {"S0", correlator_S(modes, 0.0).real()},
              {"f_sum", f_sum},
              {"f_sum_expected", model.hbar / (2.0 * model.mass)},
              {"fdt_integral_on_grid", trapezoid(fdt.values, sp.grid.step)}}},
            {"fdt_vs_smoothed_relative_linf", top > 0.0 ? max_abs_diff(fdt.values, smoothed.values) / top : 0.0}};
    }
    summary["warnings"] = warnings;

    if (config.output.json) {
        std::ofstream out(directory / "summary.json", std::ios::binary);
        out << summary.dump(2) << '\n';
        if (!out) throw std::runtime_error("failed writing summary.json");
    }
    return summary;
}

bool VerifyReport::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

json VerifyReport::to_json() const {
    json list = json::array();
    for (const auto& c : checks) {
        list.push_back({{"group", c.group}, {"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
                        {"passed", c.passed}});
    }
    return {{"checks", list}, {"all_passed", all_passed()}};
}

VerifyReport verify_scenario(const ScenarioConfig& config) {
    VerifyReport report;
    auto add = [&](std::string group, std::string name, double value, double tol) {
        report.checks.push_back({std::move(group), std::move(name), value, tol, std::isfinite(value) && value <= tol});
    };

    const SystemModel model = build_scenario_model(config.model);
    add("model", "validation_violations", static_cast<double>(validate(model).size()), 0.0);
    if (model.kind == ModelKind::next_neighbor_chain && model.omega0) {
        const Vector dense = symmetric_eigen((2.0 / model.mass) * model.w, "chain check").values;
        const Vector closed = chain_frequencies(model.n_particles, *model.omega0).array().square().matrix();
        add("model", "chain_frequencies_closed_form", (dense - closed).cwiseAbs().maxCoeff() / closed.maxCoeff(), 1e-12);
    }

    const CollectiveForm form = caldeira_leggett_form(model);
    const OscillatorParams params = collective_frequency(form);
    {
        const Vector full = symmetric_eigen((2.0 / model.mass) * full_potential_matrix(model), "full system").values;
        const Vector a = symmetric_eigen(collective_matrix(form), "collective sector").values;
        const Vector b = symmetric_sector_omega_sq(model);
        std::vector<double> mapped(a.data(), a.data() + a.size());
        mapped.insert(mapped.end(), b.data(), b.data() + b.size());
        std::sort(mapped.begin(), mapped.end());
        double worst = 0.0;
        for (Eigen::Index i = 0; i < full.size(); ++i) worst = std::max(worst, std::abs(full(i) - mapped[i]));
        add("mapping", "spectrum_preservation", worst / full.cwiseAbs().maxCoeff(), 1e-8);
        const Matrix diag = form.bath_transform.transpose() * form.bath_matrix * form.bath_transform;
        const Matrix target = (0.5 * form.mass) * form.bath_freqs.array().square().matrix().asDiagonal();
        add("mapping", "bath_diagonalization", max_abs(diag - target) / max_abs(form.bath_matrix), 1e-12);
        add("mapping", "coupling_norm_invariance",
            std::abs(form.couplings_l.norm() - form.coupling_k.norm()) / std::max(form.coupling_k.norm(), 1e-300), 1e-12);
    }

    const auto dec = decoupling_indicator(model);
    const double k_hat_max = model.k.rowwise().sum().cwiseAbs().maxCoeff();
    add("decoupling", "closed_form_vs_mapped_k", dec.max_discrepancy / std::max(k_hat_max, 1e-300), 1e-12);
    if (is_constant(model.k)) {
        add("decoupling", "coupling_vanishes", dec.k_mapped.cwiseAbs().maxCoeff() / std::max(k_hat_max, 1e-300), 1e-12);
        add("decoupling", "damping_kernel_vanishes",
            std::abs(damping_kernel(form, 0.0)) / std::max(2.0 * form.k_tilde_11 / model.mass, 1e-300), 1e-20);
    }

    const bool point_coupled = config.model.kind == "next_neighbor" && config.model.k_file.empty() &&
                               config.model.constant_k == 0.0 && config.model.alpha > 0.0;
    if (point_coupled) {
        const auto sec = point_coupling_secular(model.n_particles, config.model.omega0, config.model.alpha, model.mass);
        if (sec.bath_freqs.size() == form.bath_freqs.size()) {
            add("secular", "frequencies",
                (sec.bath_freqs - form.bath_freqs).cwiseAbs().maxCoeff() / form.bath_freqs.maxCoeff(), 1e-8);
            add("secular", "couplings",
                (sec.couplings.cwiseAbs() - form.couplings_l.cwiseAbs()).cwiseAbs().maxCoeff() /
                    std::max(form.couplings_l.cwiseAbs().maxCoeff(), 1e-300),
                1e-8);
        } else {
            add("secular", "root_count_mismatch", 1.0, 0.0);
        }
    }

    const TimeSetup time = time_setup(config.dynamics, form, params);
    const double p0 = config.dynamics.p0;
    const NormalModePropagator prop(model, p0);
    const auto exact = evolve_exact(model, p0, time.grid);
    {
        const double e0 = p0 * p0 / (2.0 * model.mass);
        double worst = 0.0;
        const std::size_t stride = std::max<std::size_t>(1, time.grid.count / 200);
        for (std::size_t i = 0; i < time.grid.count; i += stride) {
            worst = std::max(worst, std::abs(prop.energy(time.grid.at(i)) - e0) / e0);
        }
        add("dynamics", "energy_conservation", worst, 1e-10);
        const auto memory = solve_volterra(form, p0, time.grid, VolterraOptions{false});
        const double scale = params.stable ? std::abs(p0) / (model.mass * std::sqrt(params.omega0_sq))
                                           : std::max(max_abs(exact.positions), 1e-300);
        add("dynamics", "volterra_vs_exact", max_abs_diff(memory.positions, exact.positions) / scale, 1e-4);
        const double g0 = damping_kernel(form, 0.0);
        if (g0 > 0.0) {
            const auto kernel = damping_kernel(form, time.grid);
            add("dynamics", "kernel_bounded_by_origin", max_abs(kernel) / g0 - 1.0, 1e-12);
        }
    }

    if (params.stable) {
        const QuantumModes modes = collective_sector_modes(form);
        const DeltaComb comb = strength_comb(modes);
        add("spectra", "x_weight_normalization", std::abs(modes.x_coefficients.squaredNorm() - 1.0), 1e-12);
        double f_sum = 0.0;
        for (const auto& line : comb.lines) f_sum += line.weight * line.frequency;
        const double f_expected = model.hbar / (2.0 * model.mass);
        add("spectra", "f_sum_rule", std::abs(f_sum - f_expected) / f_expected, 1e-12);

        double link = 0.0;
        const double factor = model.hbar / (2.0 * p0);
        for (std::size_t i = 0; i < time.grid.count; ++i) {
            link = std::max(link, std::abs(correlator_S(modes, time.grid.at(i)).imag() + factor * exact.positions[i]));
        }
        add("spectra", "classical_quantum_link",
            link / std::max(std::abs(factor) * max_abs(exact.positions), 1e-300), 1e-12);

        const SpectraSetup sp = spectra_setup(config.spectra, comb);
        const auto smoothed = smoothed_spectrum(comb, sp.epsilon, sp.grid);
        const auto fdt = fdt_spectrum(form, sp.grid, sp.epsilon);
        const double top = std::max(max_abs(smoothed.values), 1e-300);
        add("spectra", "fdt_mirror_identity", max_abs_diff(fdt.values, mirrored_smoothing(comb, sp.epsilon, sp.grid)) / top, 1e-9);
        const double lowest = *std::min_element(smoothed.values.begin(), smoothed.values.end());
        add("spectra", "smoothed_positivity", std::max(-lowest, 0.0) / top, 1e-12);
        if (params.regime == DampingRegime::underdamped) {
            const auto ohm = ohmic_spectrum(params, sp.grid, model.hbar, model.mass);
            add("spectra", "ohmic_form_identity",
                max_abs_diff(ohm.omega_form.values, ohm.lorentzian_form.values) /
                    std::max(max_abs(ohm.omega_form.values), 1e-300),
                1e-10);
        }
        double hidden = 0.0;
        for (const auto& mode : full_system_modes(model)) {
            if (mode.symmetric_sector) hidden = std::max(hidden, mode.strength);
        }
        add("spectra", "symmetric_sector_sparsity", hidden, 1e-20);
    }
    return report;
}

Figure1Result write_figure1(const fs::path& directory) {
    const double omega_bar = 1.0;
    const double hbar = 1.0;
    const double mass = 1.0;
    const auto params = OscillatorParams::from_underdamped(omega_bar, 0.1);
    const auto grid = FrequencyGrid::linspace(0.0, 4.0, 2000);
    const auto s1 = ohmic_spectrum(params, grid, hbar, mass).omega_form;
    const auto s2 = convolution_power_spectrum(s1, 2);

    std::vector<double> a(grid.count), b(grid.count);
    const double scale1 = pi * mass * omega_bar * omega_bar / hbar;
    const double scale2 = pi * pi * mass * mass * omega_bar * omega_bar * omega_bar / (2.0 * hbar * hbar);
    for (std::size_t i = 0; i < grid.count; ++i) {
        a[i] = scale1 * s1.values[i];
        b[i] = scale2 * s2.values[i];
    }
    fs::create_directories(directory);
    Figure1Result r;
    r.s1_file = directory / "figure1_S.csv";
    r.s2_file = directory / "figure1_S2.csv";
    write_csv(r.s1_file, {"omega", "scaled_S"}, {&s1.omegas, &a});
    write_csv(r.s2_file, {"omega", "scaled_S2"}, {&s2.omegas, &b});
    r.s1_peak = grid.at(static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin()));
    r.s2_peak = grid.at(static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin()));
    return r;
}

} // namespace collective
