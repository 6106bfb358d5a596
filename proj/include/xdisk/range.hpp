#ifndef XDISK_RANGE_HPP
#define XDISK_RANGE_HPP

#include <utility>
#include <vector>

#include "xdisk/spectral.hpp"

namespace xdisk {

/// Function on the doubled geodesic boundary: (beta, a) plus the sheet sign.
using GammaFn = std::function<Complex(double beta, double a, int lambda)>;

/// Even (+1) / odd (-1) extension of incoming-sheet data across the
/// scattering relation.
GammaFn extend_A_pm(DataFn u, int sign);

/// Adjoint of the extension, restricted back to the incoming sheet:
/// v(beta,a,1) +- v(S^H(beta,a,1)).
DataFn adjoint_A_pm(GammaFn v, int sign);

/// Pullback by the sheet antipodal map: (A_H^* v)(beta,a,lambda) = v(beta,-a,-lambda).
GammaFn antipodal_pullback(GammaFn v);

enum class HilbertMode { spectral, pv };

struct HilbertSpec {
    HilbertMode mode = HilbertMode::spectral;
    int n_fiber = 256; // power of two; fiber sampling in spectral mode
    int n_pv = 200;    // Gauss-Legendre nodes of the symmetric pv rule
};

/// Fiberwise odd Hilbert transform on the doubled boundary. The spectral
/// mode conjugates to the Euclidean fiber multiplier through the fan-beam
/// chart; the pv mode integrates the principal value directly with the
/// odd-pair symmetric rule after the a' = a + tan(delta) substitution.
GammaFn hilbert_minus(GammaFn u, const HilbertSpec& spec = {});

/// Reference pv evaluation by epsilon-exclusion with one Richardson step,
/// kept as a cross-check of the symmetric rule.
Complex hilbert_pv_epsilon(const std::function<Complex(double)>& u_odd_line, double a,
                           double eps, int n_nodes);

/// Boundary operators acting on incoming-sheet data.
DataFn c_minus_H(DataFn u, const HilbertSpec& spec = {});
DataFn p_minus_H(DataFn w, const HilbertSpec& spec = {});

/// Per-degree moment coefficients of data on the geodesic space, computed in
/// vertex coordinates against the symmetric Jacobi family.
struct MomentReport {
    int max_degree = 0;
    int k_window = 0;
    Eigen::MatrixXcd coeffs; // (m, k + k_window), k in [-k_window, m + k_window]
    double tol_rel = 1e-6;
    bool homogeneous = false;
    double max_in_band = 0.0;
    double max_out_of_band = 0.0;
    std::vector<std::pair<int, int>> offenders;

    Complex at(int m, int k) const;
    bool holds(int m, int k) const;
};

MomentReport moment_coeffs(const DataFn& u, GammaWeight gamma, int max_degree,
                           int n_omega = 128, int n_s = 128, double tol_rel = 1e-6,
                           int k_window = 8);

/// Moment integral along the geodesic-distance variable (double-exponential
/// rule on the line); an independent route to the monomial vertex moment.
Complex bct_moment(const DataFn& u, int m, double omega, int level = 2);

/// Vertex-coordinate moment with the monomial family p_m(x) = (-x)^m.
Complex vertex_moment_monomial(const DataFn& u, int m, double omega, int n_s = 128);

/// Configuration of the combined range test.
struct RangeSpec {
    int max_degree = 8;
    int k_window = 8;
    int n_omega = 128;
    int n_s = 128;
    double tol = 1e-6;
    double s = 0.0;       // Sobolev index of the decay diagnostic
    int cminus_band = 8;  // analysis band for the gamma = 0 criterion
    HilbertSpec hilbert{};
};

struct RangeVerdict {
    MomentReport moments;
    bool moments_pass = false;
    std::vector<double> weighted_partial_sums; // per degree, eq-style weights
    double decay_tail_fraction = 0.0;
    bool decay_pass = false;
    bool cminus_applicable = false;
    double cminus_residual = 0.0;
    std::vector<std::pair<int, int>> cminus_offenders;
    bool cminus_pass = true;
    bool overall = false;
};

RangeVerdict range_test(const DataFn& u, GammaWeight gamma, const RangeSpec& spec = {});

} // namespace xdisk

#endif
