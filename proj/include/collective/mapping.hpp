// mapping.hpp - change of variables from the two-chain model to the
// Caldeira-Leggett-like form
//
//   H' = P^2/2m + K11 X^2 + 2 X sum_n l_n xi_n + sum_n (nu_n^2/2m + m wt_n^2 xi_n^2 / 2)
//
// where X is the scaled difference of the chains' centres of mass and the
// xi_n are the normal modes of the antisymmetric ("internal bath") sector.
// The factor 2 on the cross term comes from the symmetric quadratic form
// sum_nm K~_nm d_n d_m with d_1 = X; force_couplings() returns 2 l.

#pragma once

#include "collective/linalg.hpp"
#include "collective/model.hpp"

namespace collective {

struct InteractionTransforms {
    Vector k_hat;   // row sums of K
    Matrix k_tilde; // A^T diag(k_hat) A + A^T K A (antisymmetric sector)
    Matrix k_bar;   // A^T diag(k_hat) A - A^T K A (symmetric sector)
};

struct CollectiveForm {
    double k_tilde_11 = 0.0;
    Vector bath_freqs;      // ascending, > 0
    Vector couplings_l;     // l = U^T k
    Vector coupling_k;      // k_n = K~_{1,n+1}
    Matrix bath_matrix;     // B
    Matrix bath_transform;  // U, U^T B U = (m/2) diag(bath_freqs^2)
    double mass = 1.0;
    double hbar = 1.0;
};

// Coefficients of X xi_n in H', i.e. 2 l.
inline Vector force_couplings(const CollectiveForm& form) { return 2.0 * form.couplings_l; }

// Normal modes of the N-coordinate (X, xi) sector.
struct QuantumModes {
    Vector frequencies;     // ascending, > 0
    Vector x_coefficients;  // X = sum_n c_n q_n; sum c_n^2 = 1
    double mass = 1.0;
    double hbar = 1.0;
};

struct DecouplingReport {
    Vector k_closed_form;    // (2/sqrt N) sum_j k_hat_j A_{j,n+1}
    Vector k_mapped;         // K~_{1,n+1} from the full transform
    double max_discrepancy;  // max |k_closed_form - k_mapped|
    bool is_decoupled;       // max|k| <= 1e-12 max(k_hat)
};

struct SecularSolution {
    Vector bath_freqs;  // ascending
    Vector couplings;   // C_n(alpha), signed as evaluated
};

InteractionTransforms interaction_in_phonon_basis(const SystemModel& model,
                                                  const PhononSpectrum& phonons);

// Throws NumericalError("unstable bath") if B has a non-positive eigenvalue.
CollectiveForm caldeira_leggett_form(const SystemModel& model);
CollectiveForm caldeira_leggett_form(const SystemModel& model, const PhononSpectrum& phonons);

// Builds a form directly from a diagonal bath (U = I, k = l). Useful for
// synthetic baths that do not come from a chain model.
CollectiveForm collective_form_from_bath(double k_tilde_11, Vector bath_freqs, Vector couplings,
                                         double mass, double hbar = 1.0);

DecouplingReport decoupling_indicator(const SystemModel& model);

// Solves (4 alpha / N m) sum_{k=2}^N cos^2(pi(k-1)/2N) / (wt^2 - w_k^2) = 1 by
// bisection between consecutive poles and above the largest pole, then
// evaluates the couplings C_n(alpha). Requires alpha > 0, N >= 2.
SecularSolution point_coupling_secular(int n, double omega0, double alpha, double mass);

// Squared frequencies are the eigenvalues of
// [[2 K11/m, 2 l^T/m], [2 l/m, diag(wt^2)]].
// Throws NumericalError("unstable collective sector") on a non-positive mode.
QuantumModes collective_sector_modes(const CollectiveForm& form);

// Squared frequencies of the symmetric (dbar) sector: eig(Omega^2 + (2/m) Kbar).
// Always contains the zero centre-of-mass mode.
Vector symmetric_sector_omega_sq(const SystemModel& model);

} // namespace collective
