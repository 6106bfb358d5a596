#ifndef XDISK_TRANSFORMS_HPP
#define XDISK_TRANSFORMS_HPP

#include <functional>

#include "xdisk/geometry.hpp"
#include "xdisk/quadrature.hpp"
#include "xdisk/specfun.hpp"

namespace xdisk {

/// Shared quadrature configuration for all integral operators.
struct QuadSpec {
    int n_chord = 48;     // Gauss-Jacobi nodes on Euclidean chords
    int ts_level = 2;     // refinement level of the double-exponential line rule
    int n_angle = 128;    // trapezoid nodes for fiber/backprojection integrals
    double abs_tol = 1e-9;
    void validate() const;
};

enum class DiskModel { euclid, poincare };

/// A scalar integrand on one of the two disk models. `even_class` tags
/// functions whose expansion off the boundary in the model bdf contains only
/// even terms.
struct ScalarField {
    std::function<Complex(DiskPoint)> f;
    DiskModel model = DiskModel::poincare;
    bool even_class = false;
    Complex operator()(DiskPoint z) const { return f(z); }
};

/// Pull a Euclidean-disk function back to the Poincare model through Phi.
ScalarField pullback_phi(std::function<Complex(DiskPoint)> euclid_f);

using DataFn = std::function<Complex(double beta, double a)>;
using FanFn = std::function<Complex(double beta, double alpha)>;

/// Weighted Euclidean X-ray transform I_0^E(d^gamma f)(beta, alpha), by
/// Gauss-Jacobi quadrature along the chord (exact for polynomial f).
Flagged<Complex> xray_euclid(const ScalarField& f, GammaWeight gamma, const FanBeamCoord& c,
                             const QuadSpec& q);

/// Weighted hyperbolic X-ray transform I_0^H(x^{2+2gamma} f)(beta, a), by the
/// double-exponential rule centered at the vertex time.
Flagged<Complex> xray_hyper(const ScalarField& f, GammaWeight gamma, const GeodesicHoro& g,
                            const QuadSpec& q);

/// Euclidean backprojection: integral of u over all lines through z.
Flagged<Complex> backproject_euclid(const FanFn& u, DiskPoint z, const QuadSpec& q);

/// Hyperbolic backprojection: integral of u over the unit circle of
/// directions at an interior point z.
Flagged<Complex> backproject_hyper(const DataFn& u, DiskPoint z, const QuadSpec& q);

/// Both sides of the Santalo identity for an integrand F(z, theta) on the
/// sphere bundle supported in x >= x_min.
struct SantaloResult {
    Complex geodesic_side;  // iterated integral over (beta, a, t)
    Complex liouville_side; // integral against dV_H wedge dtheta
};
SantaloResult santalo_check(const std::function<Complex(DiskPoint, double)>& F, double x_min,
                            const QuadSpec& q);

/// Cached Gaussian rules (thread-safe lookup, immutable entries).
const GaussRule& gauss_jacobi_cached(int n, double a, double b);
const DeRule& de_rule_cached(int level, double decay);

} // namespace xdisk

#endif
