#ifndef XDISK_QUADRATURE_HPP
#define XDISK_QUADRATURE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace xdisk {

using Complex = std::complex<double>;

/// Result of an adaptive/paired integration. `err` is the disagreement
/// between the two refinement levels; `converged` compares it against the
/// caller's absolute tolerance.
template <typename T>
struct Flagged {
    T value{};
    double err = 0.0;
    bool converged = true;
};

/// Nodes and weights of a Gaussian rule on (-1, 1).
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on (-1,1), computed by
/// the Golub-Welsch eigendecomposition of the Jacobi matrix. Requires
/// a, b > -1 and n >= 1. Exact for polynomial integrands of degree 2n-1.
GaussRule gauss_jacobi(int n, double a, double b);

inline GaussRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Double-exponential rule for integrals over the whole real line whose
/// integrand decays at least like exp(-decay*|t|). Nodes are symmetric about
/// zero; the caller recenters as needed. Refining `level` by one doubles the
/// node density, and the level-(l-1) rule is the even-index subset of the
/// level-l rule, which makes two-level error estimation cheap.
struct DeRule {
    Eigen::VectorXd nodes;   // 2*n_side+1 points, nodes[n_side] == 0
    Eigen::VectorXd weights;
    int n_side = 0;
    int size() const { return static_cast<int>(nodes.size()); }

    /// Integrate f over the real line, comparing against the nested coarser
    /// rule for an error estimate.
    template <typename F>
    Flagged<Complex> integrate(F&& f, double abs_tol) const {
        Complex fine{}, coarse{};
        const int n = size();
        std::vector<Complex> vals(n);
        for (int i = 0; i < n; ++i) {
            vals[i] = f(nodes[i]);
            fine += weights[i] * vals[i];
        }
        for (int i = 0; i < n; i += 2) coarse += 2.0 * weights[i] * vals[i];
        double err = std::abs(fine - coarse);
        return {fine, err, err <= abs_tol * std::max(1.0, std::abs(fine))};
    }
};

DeRule de_rule(int level, double decay);

/// Uniform nodes t_j = offset + j*(2*pi/n) for periodic trapezoid sums.
Eigen::VectorXd periodic_nodes(int n, double offset = 0.0);

/// In-place radix-2 FFT; sign=-1 forward, sign=+1 inverse (unscaled).
/// The length must be a power of two.
void fft_pow2(std::vector<Complex>& v, int sign);

} // namespace xdisk

#endif
