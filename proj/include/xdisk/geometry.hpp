#ifndef XDISK_GEOMETRY_HPP
#define XDISK_GEOMETRY_HPP

#include <complex>
#include <optional>
#include <utility>

#include "xdisk/angles.hpp"

namespace xdisk {

using DiskPoint = std::complex<double>;

/// Points with |z| above this bound are treated as boundary points; maps that
/// need interior points reject them.
inline constexpr double kInteriorRim = 1.0 - 1e-13;

inline bool is_interior(DiskPoint z) { return std::abs(z) <= kInteriorRim; }

/// A real number extended by the two endpoints of the compactified line.
/// Kept as an explicit tag so that maps requiring finite values can reject
/// the endpoints instead of propagating IEEE infinities.
class ExtendedReal {
public:
    ExtendedReal() = default;
    ExtendedReal(double v) : v_(v) {}  // NOLINT: implicit by design
    static ExtendedReal pos_inf() { ExtendedReal e; e.inf_ = +1; return e; }
    static ExtendedReal neg_inf() { ExtendedReal e; e.inf_ = -1; return e; }

    bool is_finite() const { return inf_ == 0; }
    int inf_sign() const { return inf_; }
    /// Finite value; throws DomainError at the endpoints.
    double finite() const;
    /// tan^{-1} extended by tan^{-1}(+-inf) = +-pi/2.
    double atan() const;

    ExtendedReal operator-() const {
        if (inf_ == 0) return ExtendedReal(-v_);
        return inf_ > 0 ? neg_inf() : pos_inf();
    }

private:
    double v_ = 0.0;
    int inf_ = 0; // 0 finite, +1 = +infinity, -1 = -infinity
};

/// Oriented hyperbolic geodesic in horocyclic coordinates (beta, a).
struct GeodesicHoro {
    double beta = 0.0;
    ExtendedReal a;
    GeodesicHoro() = default;
    GeodesicHoro(double b, ExtendedReal aa) : beta(wrap_angle(b)), a(aa) {}
    double finite_a() const { return a.finite(); }
};

/// Oriented hyperbolic geodesic by its vertex: closest point s*e^{i*omega},
/// |s| < 1, traversed in direction omega + pi/2 at the vertex.
struct GeodesicVertex {
    double omega = 0.0;
    double s = 0.0;
    GeodesicVertex() = default;
    GeodesicVertex(double w, double ss);
};

/// Euclidean fan-beam coordinates: entry point e^{i*beta}, entry angle alpha.
/// alpha in [-pi/2, pi/2] labels inward vectors; the chart extends over
/// (pi/2, 3*pi/2) to the outward half minus the glancing set.
struct FanBeamCoord {
    double beta = 0.0;
    double alpha = 0.0;
    bool is_inward() const { return std::abs(alpha) <= kPi / 2.0; }
};

/// Unit tangent vector (z, theta) on the open hyperbolic disk.
struct UnitTangent {
    DiskPoint z;
    double theta = 0.0;
};

/// Point of the doubled geodesic boundary: (beta, a) plus a sheet sign.
struct BoundaryPointGamma {
    double beta = 0.0;
    ExtendedReal a;
    int lambda = +1; // +1 incoming sheet, -1 outgoing sheet
};

// --- boundary defining functions ------------------------------------------

/// x(z) = (1-|z|^2)/(1+|z|^2) on the closed disk.
double bdf_x(DiskPoint z);

/// mu_h(a) = (1+a^2)^{-1/2}, extended by zero at the endpoints.
double mu_h(const ExtendedReal& a);
inline double mu_h(double a) { return 1.0 / std::sqrt(1.0 + a * a); }

// --- geodesics --------------------------------------------------------------

/// Point and unit-speed direction angle of the horocyclic geodesic at time t.
UnitTangent geodesic_horo(const GeodesicHoro& g, double t);

/// x(gamma_{beta,a}(t)), evaluated in a cancellation-free form that stays
/// accurate deep into the tails.
double geodesic_horo_x(const GeodesicHoro& g, double t);

/// Time of the vertex: t0 = -log(sqrt(1+a^2)) = log(mu_h(a)).
double horo_vertex_time(const GeodesicHoro& g);

DiskPoint geodesic_vertex(const GeodesicVertex& g, double t);

/// Vertex description of a horocyclic geodesic together with the time shift
/// t0 such that gamma_{beta,a}(t + t0) equals the vertex parameterization
/// at time t.
std::pair<GeodesicVertex, double> horo_to_vertex(const GeodesicHoro& g);

GeodesicHoro vertex_to_horo(const GeodesicVertex& g);

/// Horocyclic coordinates of the unique oriented geodesic through (z, theta).
GeodesicHoro footprint(const UnitTangent& v);

// --- scattering and sheet maps ----------------------------------------------

BoundaryPointGamma scattering(const BoundaryPointGamma& p);
BoundaryPointGamma antipodal(const BoundaryPointGamma& p);
GeodesicHoro scattering_antipodal(const GeodesicHoro& g);

/// Euclidean counterparts on fan-beam coordinates.
FanBeamCoord scattering_euclid(const FanBeamCoord& c);
FanBeamCoord scattering_antipodal_euclid(const FanBeamCoord& c);

// --- projective equivalence ---------------------------------------------------

/// Phi(z) = 2z/(1+|z|^2), Poincare model onto the Beltrami-Klein model.
DiskPoint phi_map(DiskPoint z);

/// Radial inverse of Phi on the closed disk.
DiskPoint phi_inv(DiskPoint w);

/// Sheet-aware horocycle-to-fan-beam map and its inverse.
FanBeamCoord psi_hf(const BoundaryPointGamma& p);
BoundaryPointGamma psi_hf_inv(const FanBeamCoord& c);

/// Fan-beam chart restricted to the incoming sheet.
inline FanBeamCoord psi_hf(const GeodesicHoro& g) {
    return FanBeamCoord{g.beta, g.a.atan()};
}

/// Euclidean chord point gamma^E_{beta,alpha}(u).
DiskPoint fan_geodesic(const FanBeamCoord& c, double u);

/// Fan-beam coordinates of the Euclidean line through z with direction
/// angle theta, plus the chord parameter of z on that line.
std::pair<FanBeamCoord, double> fan_footprint(DiskPoint z, double theta);

/// Fan-beam coordinates of the straightened geodesic (Prop. of the
/// projective equivalence): sin(alpha) = -2s/(1+s^2), beta = omega - pi/2 - alpha.
FanBeamCoord vertex_to_fan(const GeodesicVertex& g);

/// Chord parameter u(t) and du/dt straightening the vertex geodesic:
/// Phi(gamma^v_{omega,s}(t)) = gamma^E_{beta,alpha}(u(t)).
std::pair<double, double> reparam_u(const GeodesicVertex& g, double t);

/// Same for absolute horocyclic time: Phi(gamma_{beta,a}(t)) =
/// gamma^E_{beta,atan a}(u(t)) with u measured from the vertex time t0.
std::pair<double, double> reparam_u(const GeodesicHoro& g, double t);

// --- cosphere-bundle quantities ---------------------------------------------

/// Conserved angular momentum ((C^2-x~^2)/2C)^2 * omega_dot / x~^2 along the
/// horocyclic geodesic, for the geodesic bdf x~ = C(1-|z|)/(1+|z|).
double cosphere_momentum(const GeodesicHoro& g, double t, double C = 1.0);

/// d/dt log x~ along the geodesic (independent of C).
double cosphere_xdot_over_x(const GeodesicHoro& g, double t);

} // namespace xdisk

#endif
