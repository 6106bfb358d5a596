#ifndef XDISK_SPECTRAL_HPP
#define XDISK_SPECTRAL_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "xdisk/transforms.hpp"

namespace xdisk {

enum class CoeffSpace { disk, data };

/// Banded table of expansion coefficients. Disk tables hold the triangle
/// 0 <= k <= n; data tables hold the window |k| <= k_max for each n, which is
/// wide enough to see components outside the band [0, n].
class CoeffTable {
public:
    static CoeffTable disk(GammaWeight gamma, int n_max);
    static CoeffTable data(GammaWeight gamma, int n_max, int k_max = -1); // default n_max + 8

    CoeffSpace space() const { return space_; }
    GammaWeight gamma() const { return gamma_; }
    int n_max() const { return n_max_; }
    int k_max() const { return k_max_; }

    bool holds(int n, int k) const;
    Complex at(int n, int k) const;
    Complex& at(int n, int k);

    /// Visit all stored entries as (n, k, value).
    template <typename F>
    void for_each(F&& fn) const {
        for (int n = 0; n <= n_max_; ++n) {
            const int klo = (space_ == CoeffSpace::disk) ? 0 : -k_max_;
            const int khi = (space_ == CoeffSpace::disk) ? n : k_max_;
            for (int k = klo; k <= khi; ++k) fn(n, k, at(n, k));
        }
    }

    /// Norm of the coefficient sequence weighted by (n+1+gamma)^{2s}.
    double sobolev_norm(double s) const;
    double l2_norm() const { return sobolev_norm(0.0); }

    /// Euclidean distance to another table over the common index set.
    double distance(const CoeffTable& other) const;

    /// Restriction to k in [0, n] / to k outside [0, n] (data tables).
    CoeffTable in_band_part() const;
    CoeffTable out_of_band_part() const;

private:
    CoeffTable(GammaWeight g, CoeffSpace s, int n_max, int k_max);
    GammaWeight gamma_;
    CoeffSpace space_;
    int n_max_, k_max_;
    Eigen::MatrixXcd c_;
};

/// Samples of a data-space function on the fan-beam pullback tensor grid:
/// uniform beta nodes times a-nodes a_i = tan(asin(x_i)) with x_i the
/// Gauss-Jacobi nodes for the weight (1-x^2)^{gamma+1/2}. Inner products in
/// L^2(mu_h^{-2 gamma} dbeta da) are exact for band-limited integrands.
struct DataGrid {
    GammaWeight gamma;           // records the measure convention
    Eigen::VectorXd beta;        // n_beta uniform nodes
    Eigen::VectorXd x;           // Gauss-Jacobi nodes, x = sin(alpha)
    Eigen::VectorXd alpha, a;    // mapped nodes
    Eigen::VectorXd w_meas;      // weights of the measure in the a-direction
    Eigen::MatrixXcd samples;    // n_beta x n_alpha

    static DataGrid make(GammaWeight gamma, int n_beta, int n_alpha);
    int n_beta() const { return static_cast<int>(beta.size()); }
    int n_alpha() const { return static_cast<int>(a.size()); }
    Complex inner(const DataGrid& v) const;
    double norm() const;
};

/// Samples of a disk function on the polar tensor grid: uniform angles times
/// radii rho_i = sqrt((1+xi_i)/2) with xi_i the Gauss-Jacobi nodes for
/// (1-xi)^gamma. Samples always store the Euclidean-model representative;
/// the Poincare-model function is its composition with Phi.
struct DiskGrid {
    GammaWeight gamma;
    Eigen::VectorXd omega;     // n_omega uniform nodes
    Eigen::VectorXd xi, rho;   // radial nodes
    Eigen::VectorXd w_meas;    // weights of d^gamma dV_E in the radial slot
    Eigen::MatrixXcd samples;  // n_omega x n_rho

    static DiskGrid make(GammaWeight gamma, int n_omega, int n_rho);
    int n_omega() const { return static_cast<int>(omega.size()); }
    int n_rho() const { return static_cast<int>(rho.size()); }
    Complex inner(const DiskGrid& v) const;
    double norm() const;
};

/// Grid sizes that keep analysis alias-free for band limit n_max with a
/// kernel window of k_extra.
int recommended_n_beta(int n_max, int k_extra = 8);
int recommended_n_alpha(int n_max);
DataGrid make_data_grid_for_band(GammaWeight gamma, int n_max, int k_extra = 8);
DiskGrid make_disk_grid_for_band(GammaWeight gamma, int n_max);

/// Expansion of grid data in the pullback singular basis. Enforces the
/// anti-aliasing bound n_beta >= 4 (n_max + 1).
CoeffTable analyze_data(const DataGrid& u, int n_max, int k_max = -1);
void synthesize_data(const CoeffTable& c, DataGrid& grid);

/// Expansion of disk data in the normalized Zernike pullbacks.
CoeffTable analyze_disk(const DiskGrid& f, int n_max);
void synthesize_disk(const CoeffTable& c, DiskGrid& grid);

/// Pointwise synthesis as callables.
DataFn synth_data_fn(const CoeffTable& c);
/// Euclidean-model representative of a disk table.
std::function<Complex(DiskPoint)> synth_disk_fn_euclid(const CoeffTable& c);
/// Poincare-model field (pullback through Phi).
ScalarField synth_disk_field(const CoeffTable& c);

/// Forward transform of a Poincare-disk field onto a data grid.
struct BatchStats {
    int flagged = 0;
    double max_err = 0.0;
};
BatchStats forward_grid(const ScalarField& f, DataGrid& out, const QuadSpec& q);

/// SVD inversion of data coefficients, with optional Tikhonov-style filter
/// sigma^2/(sigma^2 + lambda^2). Components outside the band are reported,
/// never inverted.
struct ReconstructReport {
    CoeffTable disk_coeffs;
    CoeffTable out_of_band;
    double in_band_norm = 0.0;
    double out_of_band_norm = 0.0;
};
ReconstructReport svd_reconstruct(const DataGrid& u, int n_max, double filter_lambda = 0.0);

/// Centered finite-difference stencils for the distinguished operators.
struct FdSpec {
    double h = 1e-3;
    bool scale_near_boundary = true;
};

/// Wedge operator on the Poincare disk applied to a Poincare-model field.
Complex apply_L_gamma_H(const ScalarField& f, GammaWeight gamma, DiskPoint z, const FdSpec& fd);
/// Euclidean companion operator applied to a Euclidean-model function.
Complex apply_L_gamma_E(const std::function<Complex(DiskPoint)>& f, GammaWeight gamma,
                        DiskPoint w, const FdSpec& fd);
/// Data-space operator -T^2 + 2(gamma+1) a T + (gamma^2 - 2(gamma+1)a^2 - 1).
Complex apply_T_gamma_H(const DataFn& u, GammaWeight gamma, double beta, double a,
                        const FdSpec& fd);

/// Normal operator x^{-1} (I^H)# mu_h^{-2 gamma} I^H x^{2+2 gamma} at a point.
Flagged<Complex> normal_operator_point(const ScalarField& f, GammaWeight gamma, DiskPoint z,
                                       const QuadSpec& q);

/// Empirical two-sided stability constants of the normal operator between
/// the coefficient-weighted Sobolev scales, over random band-limited probes.
struct StabilityReport {
    double s = 0.0;
    double gamma = 0.0;
    double lower_exponent = 0.0; // s + min(1, 1+gamma)
    double upper_exponent = 0.0; // s + max(1, 1+gamma)
    double c1 = 0.0;             // min over probes of ||f||_s / ||N f||_{lower}
    double c2 = 0.0;             // max over probes of ||f||_s / ||N f||_{upper}
    int n_probes = 0;
};
StabilityReport stability_probe(GammaWeight gamma, double s, int band, int n_probes,
                                std::uint64_t seed);

} // namespace xdisk

#endif
