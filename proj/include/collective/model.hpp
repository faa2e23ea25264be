// model.hpp - the two-chain coupled oscillator Hamiltonian
//
//   H = (p,p)/2m + (x, W x) + (pbar,pbar)/2m + (xbar, W xbar)
//       + sum_ij K_ij (x_i - xbar_j)^2
//
// The potential is stored as a quadratic form without a factor 1/2, so all
// squared frequencies are eigenvalues of (2/m) times a stored matrix.

#pragma once

#include "collective/errors.hpp"
#include "collective/linalg.hpp"

#include <optional>
#include <vector>

namespace collective {

enum class ModelKind {
    // Free-end next-neighbor chain: W comes from sum_j (x_j - x_{j+1})^2 over
    // the N-1 bonds. Its standing-wave eigenvectors and the frequencies
    // 2 w0 |sin(pi (k-1) / 2N)| are known in closed form. Not shift invariant.
    next_neighbor_chain,
    // Arbitrary W, validated for shift invariance.
    general,
};

struct SystemModel {
    int n_particles = 0;
    double mass = 1.0;
    Matrix w;  // intra-chain, N x N
    Matrix k;  // inter-chain couplings K_ij, N x N
    double hbar = 1.0;
    std::optional<double> omega0;  // only for chain factories
    ModelKind kind = ModelKind::general;
};

struct PhononSpectrum {
    Vector omega_sq;     // ascending, omega_sq[0] == 0 (uniform mode)
    Vector frequencies;  // sqrt(max(omega_sq, 0))
    Matrix basis;        // A[site, mode]; A^T W A = (m/2) diag(omega_sq)
};

// All invariant violations of `model`; empty when valid.
std::vector<ViolationRecord> validate(const SystemModel& model);

// W for the free-end chain (m w0^2 / 2) sum_{j<N} (x_j - x_{j+1})^2.
Matrix free_chain_w(int n, double mass, double omega0);

// W for the cyclic chain (m w0^2 / 2) sum_j (x_j - x_{(j+1) mod N})^2.
// Shift invariant; used with build_general_model.
Matrix ring_w(int n, double mass, double omega0);

// 2 w0 |sin(pi (k-1) / 2N)|, k = 1..N.
Vector chain_frequencies(int n, double omega0);

// Free-end chain with the single point coupling K_11 = alpha / 2.
SystemModel build_next_neighbor_model(int n, double mass, double omega0, double alpha,
                                      double hbar = 1.0);

// Free-end chain with an arbitrary coupling matrix.
SystemModel build_chain_model(int n, double mass, double omega0, Matrix k, double hbar = 1.0);

// Throws ModelValidationError listing every violated invariant.
SystemModel build_general_model(Matrix w, Matrix k, double mass, double hbar = 1.0);

// Dense eigensolve of (2/m) W on the complement of the uniform vector.
PhononSpectrum phonon_spectrum(const SystemModel& model);

// 2N x 2N form Q with potential = z^T Q z, z = (x, xbar).
Matrix full_potential_matrix(const SystemModel& model);

// z^T Q z evaluated as sums of squared differences,
//   -sum_{i<j} W_ij ((x_i - x_j)^2 + (xbar_i - xbar_j)^2) + sum_ij K_ij (x_i - xbar_j)^2
// plus the (tiny) W row-sum terms. Keeps full relative accuracy for
// low-frequency configurations where the plain quadratic form cancels.
double potential_energy(const SystemModel& model, const Vector& z);

// Adds K0 X^2 to H while leaving the bath untouched: K gains the constant
// K0 / 2N, and W is shifted by -K0/2 (I - J/N) to cancel its effect on the
// non-uniform phonons.
SystemModel with_collective_stiffness(const SystemModel& model, double k0);

// K_ij -> K_ij + c for all i, j.
SystemModel with_constant_coupling(const SystemModel& model, double c);

} // namespace collective
