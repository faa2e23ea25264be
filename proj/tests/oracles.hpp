// Independent reference computations used by the tests. Nothing here calls
// into the library's mapping or dynamics code.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Potential energy evaluated term by term from its defining sums.
inline double potential(const Matrix& w, const Matrix& k, const Vector& x, const Vector& xbar) {
    double v = x.dot(w * x) + xbar.dot(w * xbar);
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const double d = x(i) - xbar(j);
            v += k(i, j) * d * d;
        }
    }
    return v;
}

// Central finite-difference Hessian of f at z.
inline Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& z, double h) {
    const Eigen::Index n = z.size();
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            Vector pp = z, pm = z, mp = z, mm = z;
            pp(i) += h; pp(j) += h;
            pm(i) += h; pm(j) -= h;
            mp(i) -= h; mp(j) += h;
            mm(i) -= h; mm(j) -= h;
            out(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    }
    return out;
}

// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
auto simpson(F f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    auto sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * (h / 3.0);
}

// Random symmetric circulant matrix with vanishing row sums.
inline Matrix random_circulant_w(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector c = Vector::Zero(n);
    for (int d = 1; d <= n / 2; ++d) {
        const double v = -u(rng);
        c(d) = v;
        c((n - d) % n) = v;
    }
    c(0) = -(c.sum() - c(0));
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) w(i, j) = c(((j - i) % n + n) % n);
    }
    return w;
}

// (x, W x) for the open next-neighbor chain written bond by bond.
inline Matrix open_chain_w(int n, double m, double w0) {
    Matrix w = Matrix::Zero(n, n);
    const double c = 0.5 * m * w0 * w0;
    for (int b = 0; b + 1 < n; ++b) {
        w(b, b) += c;
        w(b + 1, b + 1) += c;
        w(b, b + 1) -= c;
        w(b + 1, b) -= c;
    }
    return w;
}

// Standing-wave vectors sqrt(2/N) cos(pi (k-1)(j-1/2)/N), k, j = 1..N, with
// the first column uniform.
inline Matrix cosine_basis(int n) {
    Matrix a(n, n);
    for (int j = 1; j <= n; ++j) {
        a(j - 1, 0) = 1.0 / std::sqrt(double(n));
        for (int k = 2; k <= n; ++k) {
            a(j - 1, k - 1) = std::sqrt(2.0 / n) * std::cos(std::numbers::pi * (k - 1) * (j - 0.5) / n);
        }
    }
    return a;
}

// Model with a constant background coupling plus a quasi-random diagonal:
// K_ij = c + delta_ij * amp * frac(j * phi), phi the golden-ratio conjugate.
inline Matrix quasi_random_coupling(int n, double background, double amp) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    Matrix k = Matrix::Constant(n, n, background);
    for (int j = 1; j <= n; ++j) {
        const double f = j * phi - std::floor(j * phi);
        k(j - 1, j - 1) += amp * f;
    }
    return k;
}

} // namespace oracle
