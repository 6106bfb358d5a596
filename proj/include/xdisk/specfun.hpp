#ifndef XDISK_SPECFUN_HPP
#define XDISK_SPECFUN_HPP

#include <Eigen/Dense>
#include <complex>

#include "xdisk/geometry.hpp"
#include "xdisk/quadrature.hpp"

namespace xdisk {

/// Weight exponent gamma > -1 shared by the whole basis machinery.
struct GammaWeight {
    double value;
    explicit GammaWeight(double g);
};

struct BasisIndex {
    int n = 0;
    int k = 0;
};

inline bool k_in_band(int n, int k) { return k >= 0 && k <= n; }

double log_beta(double x, double y);
inline double beta_fn(double x, double y) { return std::exp(log_beta(x, y)); }

/// Classical Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.
double jacobi_classic(int n, double a, double b, double x);

/// All orders 0..n_max at once.
void jacobi_classic_all(int n_max, double a, double b, double x, Eigen::VectorXd& out);

/// Symmetric Jacobi polynomials p_n^gamma: orthogonal for (1-x^2)^{gamma+1/2}
/// on (-1,1), scaled so the squared norm is 1/(2*pi), sign fixed by
/// p_n^gamma(1) > 0. The family object caches the normalization constants.
class JacobiFamily {
public:
    JacobiFamily(GammaWeight gamma, int n_max);
    int n_max() const { return n_max_; }
    double operator()(int n, double x) const;
    void eval_all(double x, Eigen::VectorXd& out) const; // out[0..n_max]

private:
    double exponent_; // gamma + 1/2
    int n_max_;
    Eigen::VectorXd inv_norm_;
};

double jacobi_p(int n, GammaWeight gamma, double x);

/// Singular values of the weighted transforms (Beta-function form, evaluated
/// through log-Gamma).
double sigma_nk_sq(int n, int k, GammaWeight gamma);
double sigma_nk(int n, int k, GammaWeight gamma);

/// Eigenvalue of the normal operator predicted by its functional-calculus
/// form, evaluated at the integer spectral pair (n, n-2k). Algebraically a
/// second route to sigma_nk_sq.
double normal_eigenvalue(int n, int k, GammaWeight gamma);

/// Fan-beam data basis psi_{n,k}^gamma(beta, alpha).
Complex psi_nk_gamma(int n, int k, GammaWeight gamma, double beta, double alpha);

/// mu_h-weighted pullback basis on the geodesic space.
Complex psi_nk_gamma_H(int n, int k, GammaWeight gamma, double beta, double a);

enum class ZeroBasisKind { psi, phi };

/// gamma = 0 unit-norm boundary pair (psi even / phi odd under the
/// orientation-reversing involution).
Complex psi_phi_zero(int n, int k, ZeroBasisKind which, double beta, double alpha);
Complex psi_phi_zero_H(int n, int k, ZeroBasisKind which, double beta, double a);

/// Generalized Zernike polynomials on the Euclidean disk, normalized as the
/// backprojection of mu^{-2gamma-1} psi_{n,k}^gamma, so that the weighted L2
/// norm of Z_{n,k} equals sigma_{n,k}. The per-(n,k) constants multiply a
/// closed-form radial polynomial; their magnitude is analytic and the sign is
/// pinned once against a quadrature backprojection.
class ZernikeBasis {
public:
    ZernikeBasis(GammaWeight gamma, int n_max);

    GammaWeight gamma() const { return gamma_; }
    int n_max() const { return n_max_; }

    Complex eval(int n, int k, DiskPoint w) const;
    Complex eval_hat(int n, int k, DiskPoint w) const { return eval(n, k, w) / sigma_nk(n, k, gamma_); }

    /// Fill out(n, k) for all 0 <= k <= n <= n_max at one point.
    void eval_all(DiskPoint w, Eigen::MatrixXcd& out) const;
    void eval_all_hat(DiskPoint w, Eigen::MatrixXcd& out) const;

    double constant(int n, int k) const;

private:
    GammaWeight gamma_;
    int n_max_;
    Eigen::MatrixXd c_;      // pinned constants
    Eigen::MatrixXd sigma_;  // cached singular values
};

/// Shared immutable basis cache (built single-threaded on first use, safe for
/// concurrent reads afterwards).
const ZernikeBasis& zernike_basis(GammaWeight gamma, int n_max);

/// Single evaluation in the backprojection normalization.
Complex zernike(int n, int k, GammaWeight gamma, DiskPoint w);

} // namespace xdisk

#endif
