#include "doctest.h"
#include "oracles.hpp"

#include "collective/mapping.hpp"

#include <algorithm>
#include <random>

using namespace collective;

TEST_CASE("point coupling in the phonon basis is a rank-one outer product") {
    for (int n : {2, 4, 9}) {
        const double alpha = 1.0;
        const auto m = build_next_neighbor_model(n, 1.0, 1.0, alpha);
        const auto tr = interaction_in_phonon_basis(m, phonon_spectrum(m));
        const Matrix a = oracle::cosine_basis(n);
        const Vector first_row = a.row(0).transpose();
        const Matrix expected = alpha * first_row * first_row.transpose();
        CHECK((tr.k_tilde - expected).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(tr.k_bar.cwiseAbs().maxCoeff() < 1e-14);
        CHECK(tr.k_tilde(0, 0) == doctest::Approx(alpha / n));
    }
    const auto m4 = build_next_neighbor_model(4, 1.0, 1.0, 1.0);
    CHECK(interaction_in_phonon_basis(m4, phonon_spectrum(m4)).k_tilde(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("zero and constant couplings") {
    const auto zero = build_next_neighbor_model(5, 1.0, 1.0, 0.0);
    const auto tz = interaction_in_phonon_basis(zero, phonon_spectrum(zero));
    CHECK(tz.k_tilde.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tz.k_bar.cwiseAbs().maxCoeff() == 0.0);

    const int n = 6;
    const double c = 0.3;
    const auto m = with_constant_coupling(zero.n_particles == n ? zero : build_next_neighbor_model(n, 1.0, 1.0, 0.0), c);
    const auto tr = interaction_in_phonon_basis(m, phonon_spectrum(m));
    // A^T K A from the difference of the two sums.
    const Matrix beta = 0.5 * (tr.k_tilde - tr.k_bar);
    CHECK(beta(0, 0) == doctest::Approx(c * n));
    Matrix rest = beta;
    rest(0, 0) = 0.0;
    CHECK(rest.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-particle point coupling by hand") {
    const auto form = caldeira_leggett_form(build_next_neighbor_model(2, 1.0, 1.0, 1.0));
    REQUIRE(form.bath_freqs.size() == 1);
    CHECK(form.bath_matrix(0, 0) == doctest::Approx(1.5));
    CHECK(form.bath_freqs(0) == doctest::Approx(std::sqrt(3.0)));
    CHECK(std::abs(form.coupling_k(0)) == doctest::Approx(0.5));
    CHECK(std::abs(form.couplings_l(0)) == doctest::Approx(0.5));
    CHECK(form.k_tilde_11 == doctest::Approx(0.5));
}

TEST_CASE("no coupling leaves a free phonon bath") {
    const int n = 7;
    const auto form = caldeira_leggett_form(build_next_neighbor_model(n, 1.0, 1.0, 0.0));
    const Vector w = chain_frequencies(n, 1.0);
    CHECK(form.coupling_k.cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i + 1 < n; ++i) CHECK(form.bath_freqs(i) == doctest::Approx(w(i + 1)).epsilon(1e-12));
}

namespace {

void check_form_invariants(const CollectiveForm& form) {
    const Eigen::Index r = form.bath_freqs.size();
    const Matrix& u = form.bath_transform;
    CHECK((u.transpose() * u - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix diag = u.transpose() * form.bath_matrix * u;
    const Matrix expected = (0.5 * form.mass * form.bath_freqs.cwiseAbs2()).asDiagonal();
    CHECK((diag - expected).cwiseAbs().maxCoeff() < 1e-10 * max_abs(form.bath_matrix));
    CHECK((form.couplings_l - u.transpose() * form.coupling_k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(form.couplings_l.norm() - form.coupling_k.norm()) < 1e-12);
    CHECK(form.bath_freqs.minCoeff() > 0.0);
    for (Eigen::Index i = 0; i + 1 < r; ++i) CHECK(form.bath_freqs(i) <= form.bath_freqs(i + 1));
}

} // namespace

TEST_CASE("collective form invariants") {
    std::mt19937 rng(3);
    for (int n : {2, 3, 8, 16, 33}) {
        check_form_invariants(caldeira_leggett_form(build_next_neighbor_model(n, 1.0, 1.0, 0.6)));
        check_form_invariants(caldeira_leggett_form(
            build_chain_model(n, 1.0, 1.0, oracle::quasi_random_coupling(n, 1.0 / 64, 0.5))));
        check_form_invariants(caldeira_leggett_form(
            build_general_model(oracle::random_circulant_w(n, rng), oracle::quasi_random_coupling(n, 0.05, 0.3), 1.0)));
    }
}

TEST_CASE("constant coupling decouples the collective coordinate") {
    const auto m = with_constant_coupling(build_next_neighbor_model(8, 1.0, 1.0, 0.0), 0.25);
    const auto form = caldeira_leggett_form(m);
    const auto report = decoupling_indicator(m);
    CHECK(report.is_decoupled);
    CHECK(form.coupling_k.cwiseAbs().maxCoeff() <= 1e-12 * m.k.rowwise().sum().maxCoeff());
}

TEST_CASE("decoupling indicator") {
    SUBCASE("point coupling is not decoupled") {
        const auto r = decoupling_indicator(build_next_neighbor_model(4, 1.0, 1.0, 1.0));
        CHECK_FALSE(r.is_decoupled);
        CHECK(r.k_mapped.cwiseAbs().maxCoeff() > 0.1);
    }
    SUBCASE("closed form and mapped couplings agree") {
        std::mt19937 rng(5);
        for (int n : {2, 5, 16, 40}) {
            const auto m1 = build_chain_model(n, 1.0, 1.0, oracle::quasi_random_coupling(n, 0.02, 0.4));
            const auto r1 = decoupling_indicator(m1);
            CHECK(r1.max_discrepancy < 1e-12);
            const auto m2 = build_general_model(oracle::random_circulant_w(n, rng),
                                                oracle::quasi_random_coupling(n, 0.1, 1.0), 1.0);
            CHECK(decoupling_indicator(m2).max_discrepancy < 1e-12);
        }
    }
    SUBCASE("only the fluctuating part of K enters k") {
        const int n = 12;
        const auto m = build_chain_model(n, 1.0, 1.0, oracle::quasi_random_coupling(n, 0.0, 0.4));
        const auto shifted = with_constant_coupling(m, 0.37);
        const Vector k1 = caldeira_leggett_form(m).coupling_k;
        const Vector k2 = caldeira_leggett_form(shifted).coupling_k;
        CHECK((k1 - k2).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("secular equation for two particles") {
    const auto s = point_coupling_secular(2, 1.0, 1.0, 1.0);
    REQUIRE(s.bath_freqs.size() == 1);
    CHECK(s.bath_freqs(0) * s.bath_freqs(0) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(std::abs(s.couplings(0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("secular roots collapse onto phonons for vanishing coupling") {
    const int n = 10;
    const auto s = point_coupling_secular(n, 1.0, 1e-9, 1.0);
    const Vector w = chain_frequencies(n, 1.0);
    for (int j = 0; j + 1 < n; ++j) CHECK(s.bath_freqs(j) == doctest::Approx(w(j + 1)).epsilon(1e-8));
}

TEST_CASE("secular roots interlace the phonon frequencies") {
    for (int n : {3, 8, 20}) {
        const auto s = point_coupling_secular(n, 1.0, 0.5, 1.0);
        const Vector w = chain_frequencies(n, 1.0);
        for (int j = 0; j + 1 < n; ++j) {
            CHECK(s.bath_freqs(j) > w(j + 1));
            if (j + 2 < n) CHECK(s.bath_freqs(j) < w(j + 2));
        }
        // Dense eigensolve of B as the oracle.
        const auto form = caldeira_leggett_form(build_next_neighbor_model(n, 1.0, 1.0, 0.5));
        CHECK((s.bath_freqs - form.bath_freqs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("analytic and generic paths agree") {
    for (int n = 2; n <= 64; n += (n < 8 ? 1 : 7)) {
        for (double alpha : {0.1, 1.0, 10.0}) {
            const auto form = caldeira_leggett_form(build_next_neighbor_model(n, 1.0, 1.0, alpha));
            const auto s = point_coupling_secular(n, 1.0, alpha, 1.0);
            CAPTURE(n);
            CAPTURE(alpha);
            CHECK((s.bath_freqs - form.bath_freqs).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((s.couplings.cwiseAbs() - form.couplings_l.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-8);
            CHECK(form.k_tilde_11 == doctest::Approx(alpha / n).epsilon(1e-12));
        }
    }
}

TEST_CASE("secular solver rejects bad input") {
    CHECK_THROWS_AS(point_coupling_secular(1, 1.0, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(point_coupling_secular(4, 1.0, 0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(point_coupling_secular(4, 1.0, 1.0, 0.0), InvalidInput);
}

TEST_CASE("collective sector of the two-particle chain") {
    const auto modes = collective_sector_modes(caldeira_leggett_form(build_next_neighbor_model(2, 1.0, 1.0, 1.0)));
    REQUIRE(modes.frequencies.size() == 2);
    // Frequency matrix [[2 K11/m, 2 l/m], [2 l/m, wt^2]] = [[1, 1], [1, 3]]:
    // trace 4, determinant 2, so wbar^2 = 2 -/+ sqrt(2).
    const double w1 = modes.frequencies(0) * modes.frequencies(0);
    const double w2 = modes.frequencies(1) * modes.frequencies(1);
    CHECK(w1 + w2 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(w1 * w2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w1 == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(w2 == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
    // Same numbers from the four-coordinate potential directly.
    Matrix q = Matrix::Zero(4, 4);
    q << 1.0, -0.5, -0.5, 0.0,
        -0.5, 0.5, 0.0, 0.0,
        -0.5, 0.0, 1.0, -0.5,
        0.0, 0.0, -0.5, 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> es(2.0 * q);
    CHECK(es.eigenvalues()(1) == doctest::Approx(w1).epsilon(1e-12));
    CHECK(es.eigenvalues()(3) == doctest::Approx(w2).epsilon(1e-12));
    CHECK(modes.x_coefficients.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decoupled collective coordinate is a normal mode") {
    const auto m = with_constant_coupling(build_next_neighbor_model(6, 1.0, 1.0, 0.0), 0.1);
    const auto form = caldeira_leggett_form(m);
    const auto modes = collective_sector_modes(form);
    Eigen::Index at = 0;
    modes.x_coefficients.cwiseAbs().maxCoeff(&at);
    CHECK(std::abs(modes.x_coefficients(at)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(modes.frequencies(at) * modes.frequencies(at) ==
          doctest::Approx(2.0 * form.k_tilde_11 / m.mass).epsilon(1e-12));
}

namespace {

void check_spectrum_preserved(const SystemModel& m) {
    const auto modes = collective_sector_modes(caldeira_leggett_form(m));
    const Vector sym = symmetric_sector_omega_sq(m);
    std::vector<double> mapped(sym.data(), sym.data() + sym.size());
    for (Eigen::Index i = 0; i < modes.frequencies.size(); ++i) {
        mapped.push_back(modes.frequencies(i) * modes.frequencies(i));
    }
    std::sort(mapped.begin(), mapped.end());
    Eigen::SelfAdjointEigenSolver<Matrix> es((2.0 / m.mass) * full_potential_matrix(m), Eigen::EigenvaluesOnly);
    REQUIRE(mapped.size() == static_cast<std::size_t>(es.eigenvalues().size()));
    for (std::size_t i = 0; i < mapped.size(); ++i) {
        CHECK(std::abs(mapped[i] - es.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-8);
    }
}

} // namespace

TEST_CASE("the mapping preserves the spectrum") {
    std::mt19937 rng(9);
    for (int n : {2, 5, 16, 32}) {
        check_spectrum_preserved(build_next_neighbor_model(n, 1.0, 1.0, 1.0));
        check_spectrum_preserved(build_chain_model(n, 1.0, 1.0, oracle::quasi_random_coupling(n, 1.0 / 64, 0.5)));
        check_spectrum_preserved(build_general_model(oracle::random_circulant_w(n, rng),
                                                     oracle::quasi_random_coupling(n, 0.05, 0.2), 1.3));
    }
}

TEST_CASE("collective stiffness leaves the bath untouched") {
    const auto base = build_next_neighbor_model(9, 1.0, 1.0, 0.8);
    const double k0 = 0.4;
    const auto stiff = with_collective_stiffness(base, k0);
    const auto f0 = caldeira_leggett_form(base);
    const auto f1 = caldeira_leggett_form(stiff);
    CHECK((f0.bath_matrix - f1.bath_matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f0.coupling_k - f1.coupling_k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f1.k_tilde_11 == doctest::Approx(f0.k_tilde_11 + k0).epsilon(1e-12));
    const Vector s0 = symmetric_sector_omega_sq(base);
    const Vector s1 = symmetric_sector_omega_sq(stiff);
    CHECK((s0 - s1).cwiseAbs().maxCoeff() < 1e-12);
    // The collective sector moves up.
    const auto m0 = collective_sector_modes(f0);
    const auto m1 = collective_sector_modes(f1);
    CHECK(m1.frequencies(0) > m0.frequencies(0));
}

TEST_CASE("a bath without restoring force is reported unstable") {
    const int n = 4;
    Matrix k = Matrix::Zero(n, n);
    k(0, 0) = 0.5;
    const auto m = build_general_model(Matrix::Zero(n, n), k, 1.0);
    CHECK_THROWS_AS(caldeira_leggett_form(m), NumericalError);
}

TEST_CASE("zero coupling has an unstable collective sector") {
    const auto form = caldeira_leggett_form(build_next_neighbor_model(4, 1.0, 1.0, 0.0));
    CHECK_THROWS_AS(collective_sector_modes(form), NumericalError);
}

TEST_CASE("bath built from explicit lines") {
    Vector w(3), l(3);
    w << 2.0, 0.5, 1.0;
    l << 0.1, 0.2, 0.3;
    const auto form = collective_form_from_bath(0.4, w, l, 2.0);
    CHECK(form.bath_freqs(0) == 0.5);
    CHECK(form.couplings_l(0) == 0.2);
    CHECK(form.bath_freqs(2) == 2.0);
    CHECK(form.couplings_l(2) == 0.1);
    check_form_invariants(form);
    CHECK_THROWS_AS(collective_form_from_bath(0.4, w, Vector::Zero(2), 1.0), InvalidInput);
}
