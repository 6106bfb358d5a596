#ifndef XDISK_ANGLES_HPP
#define XDISK_ANGLES_HPP

#include <cmath>
#include <numbers>

namespace xdisk {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Normalize an angle to [0, 2*pi).
inline double wrap_angle(double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r == kTwoPi) r = 0.0;
    return r;
}

/// Signed angular difference of a and b, reduced to (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -kPi) d += kTwoPi;
    if (d > kPi) d -= kTwoPi;
    return d;
}

/// |a - b| modulo 2*pi.
inline double angle_dist(double a, double b) { return std::abs(angle_diff(a, b)); }

inline bool angles_equal(double a, double b, double tol = 1e-12) {
    return angle_dist(a, b) <= tol;
}

} // namespace xdisk

#endif
