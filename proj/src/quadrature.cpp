#include "xdisk/quadrature.hpp"

#include <cmath>

#include "xdisk/angles.hpp"
#include "xdisk/error.hpp"

namespace xdisk {

GaussRule gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw DomainError("gauss_jacobi: need n >= 1");
    if (a <= -1.0 || b <= -1.0) throw DomainError("gauss_jacobi: exponents must exceed -1");

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        double diag;
        if (a == b) {
            diag = 0.0;
        } else if (k == 0) {
            diag = (b - a) / (ab + 2.0);
        } else {
            diag = (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
        }
        J(k, k) = diag;
        if (k >= 1) {
            double beta_k;
            if (k == 1) {
                beta_k = 4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
            } else {
                const double s = 2.0 * k + ab;
                beta_k = 4.0 * k * (k + a) * (k + b) * (k + ab) /
                         (s * s * (s + 1.0) * (s - 1.0));
            }
            const double off = std::sqrt(beta_k);
            J(k, k - 1) = off;
            J(k - 1, k) = off;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success) throw Error("gauss_jacobi: eigensolver failed");

    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                                std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
    GaussRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = mu0 * es.eigenvectors().row(0).array().square();
    return rule;
}

DeRule de_rule(int level, double decay) {
    if (level < 0) throw DomainError("de_rule: level must be >= 0");
    if (decay <= 0.0) throw DomainError("de_rule: decay must be positive");

    // t = sinh(u) turns exp(-decay*|t|) decay into double-exponential decay
    // in u. Truncate where decay*sinh(U) ~ 45 (integrand below 1e-19),
    // keeping cosh within safe range.
    const double U = std::asinh(45.0 / std::min(std::max(decay, 0.25), 45.0));
    const int n_side = 12 << level;
    const double h = U / n_side;

    DeRule r;
    r.n_side = n_side;
    r.nodes.resize(2 * n_side + 1);
    r.weights.resize(2 * n_side + 1);
    for (int j = -n_side; j <= n_side; ++j) {
        const double u = j * h;
        r.nodes[j + n_side] = std::sinh(u);
        r.weights[j + n_side] = h * std::cosh(u);
    }
    return r;
}

Eigen::VectorXd periodic_nodes(int n, double offset) {
    if (n < 1) throw DomainError("periodic_nodes: need n >= 1");
    Eigen::VectorXd t(n);
    for (int j = 0; j < n; ++j) t[j] = offset + kTwoPi * j / n;
    return t;
}

void fft_pow2(std::vector<Complex>& v, int sign) {
    const std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0) throw DomainError("fft_pow2: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex u = v[i + k];
                Complex t = v[i + k + len / 2] * w;
                v[i + k] = u + t;
                v[i + k + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

} // namespace xdisk
