#include "xdisk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xdisk/error.hpp"

namespace xdisk {

namespace {

using Complex = std::complex<double>;

const Complex kI(0.0, 1.0);

Complex polar1(double ang) { return {std::cos(ang), std::sin(ang)}; }

// Shared pieces of the horocyclic Moebius form gamma = e^{i beta} P/Q with
// P = 2X + i a (1+X), Q = -2 + i a (1+X), X = tanh(t/2). The identity
// |Q|^2 - |P|^2 = 4 (1 - X^2) keeps 1-|gamma|^2 exact in the tails.
struct HoroFrame {
    double a, X, u;   // u = 1 - X^2 = sech^2(t/2)
    double q2, p2;    // |Q|^2, |P|^2
    Complex P, Q;
    HoroFrame(const GeodesicHoro& g, double t) {
        a = g.finite_a();
        X = std::tanh(0.5 * t);
        const double sech = 1.0 / std::cosh(0.5 * t);
        u = sech * sech;
        const double w = a * (1.0 + X);
        P = Complex(2.0 * X, w);
        Q = Complex(-2.0, w);
        q2 = 4.0 + w * w;
        p2 = 4.0 * X * X + w * w;
    }
    double one_minus_r2() const { return 4.0 * u / q2; }
    double d_one_minus_r2() const {
        // d/dt of 4u/q2 with u' = -X u and (q2)' = a^2 (1+X) u.
        const double w = a * (1.0 + X);
        return 4.0 * (-X * u * q2 - u * a * w * u) / (q2 * q2);
    }
    double omega_dot() const { return -4.0 * a * u * u / (p2 * q2); }
};

} // namespace

double ExtendedReal::finite() const {
    if (inf_ != 0) throw DomainError("ExtendedReal: finite value required at a compactified endpoint");
    return v_;
}

double ExtendedReal::atan() const {
    if (inf_ == 0) return std::atan(v_);
    return inf_ > 0 ? kPi / 2.0 : -kPi / 2.0;
}

GeodesicVertex::GeodesicVertex(double w, double ss) : omega(wrap_angle(w)), s(ss) {
    if (!(std::abs(ss) < 1.0)) throw DomainError("GeodesicVertex: |s| < 1 required");
}

double bdf_x(DiskPoint z) {
    const double r2 = std::norm(z);
    if (r2 > 1.0 + 64.0 * std::numeric_limits<double>::epsilon())
        throw DomainError("bdf_x: point outside the closed disk");
    return std::max(0.0, (1.0 - r2)) / (1.0 + r2);
}

double mu_h(const ExtendedReal& a) {
    if (!a.is_finite()) return 0.0;
    return mu_h(a.finite());
}

UnitTangent geodesic_horo(const GeodesicHoro& g, double t) {
    const HoroFrame f(g, t);
    const Complex eb = polar1(g.beta);
    const DiskPoint z = eb * f.P / f.Q;
    const Complex vel = -2.0 * eb * f.u / (f.Q * f.Q);
    return UnitTangent{z, std::arg(vel)};
}

double geodesic_horo_x(const GeodesicHoro& g, double t) {
    const HoroFrame f(g, t);
    return 4.0 * f.u / (f.q2 + f.p2);
}

double horo_vertex_time(const GeodesicHoro& g) {
    const double a = g.finite_a();
    return -std::log(std::sqrt(1.0 + a * a));
}

DiskPoint geodesic_vertex(const GeodesicVertex& g, double t) {
    const double X = std::tanh(0.5 * t);
    return polar1(g.omega) * (g.s + kI * X) / (1.0 + kI * (g.s * X));
}

std::pair<GeodesicVertex, double> horo_to_vertex(const GeodesicHoro& g) {
    const double a = g.finite_a();
    const double s = -a / (std::sqrt(1.0 + a * a) + 1.0);
    const double omega = g.beta + kPi / 2.0 - 2.0 * std::atan(s);
    return {GeodesicVertex(omega, s), horo_vertex_time(g)};
}

GeodesicHoro vertex_to_horo(const GeodesicVertex& g) {
    const double a = -2.0 * g.s / (1.0 - g.s * g.s);
    return GeodesicHoro(g.omega + 1.5 * kPi + 2.0 * std::atan(g.s), a);
}

GeodesicHoro footprint(const UnitTangent& v) {
    if (!is_interior(v.z)) throw DomainError("footprint: interior base point required");
    const Complex zeta = v.z * polar1(-v.theta);
    const double beta = v.theta + kPi + 2.0 * std::arg(1.0 - zeta);
    const double a = 2.0 * zeta.imag() / (1.0 - std::norm(v.z));
    return GeodesicHoro(beta, a);
}

BoundaryPointGamma scattering(const BoundaryPointGamma& p) {
    const double shift = 2.0 * static_cast<double>(p.lambda) * p.a.atan();
    return BoundaryPointGamma{wrap_angle(p.beta + kPi + shift), p.a, -p.lambda};
}

BoundaryPointGamma antipodal(const BoundaryPointGamma& p) {
    return BoundaryPointGamma{p.beta, -p.a, -p.lambda};
}

GeodesicHoro scattering_antipodal(const GeodesicHoro& g) {
    return GeodesicHoro(g.beta + kPi + 2.0 * g.a.atan(), -g.a);
}

FanBeamCoord scattering_euclid(const FanBeamCoord& c) {
    return FanBeamCoord{wrap_angle(c.beta + kPi + 2.0 * c.alpha), kPi - c.alpha};
}

FanBeamCoord scattering_antipodal_euclid(const FanBeamCoord& c) {
    return FanBeamCoord{wrap_angle(c.beta + kPi + 2.0 * c.alpha), -c.alpha};
}

DiskPoint phi_map(DiskPoint z) {
    const double r2 = std::norm(z);
    if (r2 > 1.0 + 64.0 * std::numeric_limits<double>::epsilon())
        throw DomainError("phi_map: point outside the closed disk");
    return 2.0 * z / (1.0 + r2);
}

DiskPoint phi_inv(DiskPoint w) {
    const double rho2 = std::norm(w);
    if (rho2 > 1.0 + 64.0 * std::numeric_limits<double>::epsilon())
        throw DomainError("phi_inv: point outside the closed disk");
    return w / (1.0 + std::sqrt(std::max(0.0, 1.0 - rho2)));
}

FanBeamCoord psi_hf(const BoundaryPointGamma& p) {
    const double at = p.a.atan();
    return p.lambda > 0 ? FanBeamCoord{p.beta, at} : FanBeamCoord{p.beta, kPi - at};
}

BoundaryPointGamma psi_hf_inv(const FanBeamCoord& c) {
    const double half = kPi / 2.0;
    if (std::abs(c.alpha) <= half) {
        ExtendedReal a = (c.alpha == half)    ? ExtendedReal::pos_inf()
                         : (c.alpha == -half) ? ExtendedReal::neg_inf()
                                              : ExtendedReal(std::tan(c.alpha));
        return BoundaryPointGamma{wrap_angle(c.beta), a, +1};
    }
    return BoundaryPointGamma{wrap_angle(c.beta), -std::tan(c.alpha), -1};
}

DiskPoint fan_geodesic(const FanBeamCoord& c, double u) {
    return polar1(c.beta + c.alpha + kPi) * Complex(u, std::sin(c.alpha));
}

std::pair<FanBeamCoord, double> fan_footprint(DiskPoint z, double theta) {
    const Complex zeta = z * polar1(-theta);
    const double s = std::clamp(zeta.imag(), -1.0, 1.0);
    const double alpha = std::asin(s);
    return {FanBeamCoord{wrap_angle(theta - alpha - kPi), alpha}, zeta.real()};
}

FanBeamCoord vertex_to_fan(const GeodesicVertex& g) {
    const double den = 1.0 + g.s * g.s;
    const double alpha = std::atan2(-2.0 * g.s / den, (1.0 - g.s * g.s) / den);
    return FanBeamCoord{wrap_angle(g.omega - kPi / 2.0 - alpha), alpha};
}

std::pair<double, double> reparam_u(const GeodesicVertex& g, double t) {
    const double cos_alpha = (1.0 - g.s * g.s) / (1.0 + g.s * g.s);
    const double c = std::cosh(t);
    return {cos_alpha * std::tanh(t), cos_alpha / (c * c)};
}

std::pair<double, double> reparam_u(const GeodesicHoro& g, double t) {
    const double mu = mu_h(g.finite_a());
    const double tau = t - horo_vertex_time(g);
    const double c = std::cosh(tau);
    return {mu * std::tanh(tau), mu / (c * c)};
}

double cosphere_momentum(const GeodesicHoro& g, double t, double C) {
    if (C <= 0.0) throw DomainError("cosphere_momentum: C must be positive");
    if (g.finite_a() == 0.0) return 0.0; // diameter: omega is constant along the flow
    const HoroFrame f(g, t);
    const double omr2 = f.one_minus_r2();
    const double r = std::sqrt(std::max(0.0, 1.0 - omr2));
    const double xt = C * (omr2 / (1.0 + r)) / (1.0 + r); // C (1-r)/(1+r)
    const double lever = (C * C - xt * xt) / (2.0 * C);
    return lever * lever * f.omega_dot() / (xt * xt);
}

double cosphere_xdot_over_x(const GeodesicHoro& g, double t) {
    const HoroFrame f(g, t);
    const double omr2 = f.one_minus_r2();
    const double r = std::sqrt(std::max(0.0, 1.0 - omr2));
    if (r == 0.0) throw DomainError("cosphere_xdot_over_x: undefined at the origin");
    return f.d_one_minus_r2() / (r * omr2);
}

} // namespace xdisk
