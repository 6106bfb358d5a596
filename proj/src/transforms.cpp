#include "xdisk/transforms.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "xdisk/error.hpp"

namespace xdisk {

namespace {

long long bits_of(double x) {
    long long b;
    std::memcpy(&b, &x, sizeof(double));
    return b;
}

} // namespace

void QuadSpec::validate() const {
    if (n_chord < 4 || n_angle < 4 || ts_level < 0)
        throw DomainError("QuadSpec: node counts too small");
    if (!(abs_tol > 0.0)) throw DomainError("QuadSpec: abs_tol must be positive");
}

ScalarField pullback_phi(std::function<Complex(DiskPoint)> euclid_f) {
    return ScalarField{[f = std::move(euclid_f)](DiskPoint z) { return f(phi_map(z)); },
                       DiskModel::poincare, /*even_class=*/true};
}

const GaussRule& gauss_jacobi_cached(int n, double a, double b) {
    static std::mutex mtx;
    static std::map<std::tuple<int, long long, long long>, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(n, bits_of(a), bits_of(b));
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<GaussRule>(gauss_jacobi(n, a, b))).first;
    return *it->second;
}

const DeRule& de_rule_cached(int level, double decay) {
    static std::mutex mtx;
    static std::map<std::pair<int, long long>, std::unique_ptr<DeRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(level, bits_of(decay));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<DeRule>(de_rule(level, decay))).first;
    return *it->second;
}

Flagged<Complex> xray_euclid(const ScalarField& f, GammaWeight gamma, const FanBeamCoord& c,
                             const QuadSpec& q) {
    q.validate();
    if (f.model != DiskModel::euclid)
        throw DomainError("xray_euclid: integrand must live on the Euclidean disk");
    const double mu = std::cos(c.alpha);
    const double amp = std::pow(mu, 2.0 * gamma.value + 1.0);

    auto chord_sum = [&](const GaussRule& rule) {
        Complex acc(0.0, 0.0);
        for (int i = 0; i < rule.size(); ++i)
            acc += rule.weights[i] * f(fan_geodesic(c, rule.nodes[i] * mu));
        return amp * acc;
    };
    const Complex fine = chord_sum(gauss_jacobi_cached(q.n_chord, gamma.value, gamma.value));
    const Complex coarse =
        chord_sum(gauss_jacobi_cached(std::max(4, q.n_chord - q.n_chord / 3), gamma.value, gamma.value));
    const double err = std::abs(fine - coarse);
    return {fine, err, err <= q.abs_tol * std::max(1.0, std::abs(fine))};
}

Flagged<Complex> xray_hyper(const ScalarField& f, GammaWeight gamma, const GeodesicHoro& g,
                            const QuadSpec& q) {
    q.validate();
    if (f.model != DiskModel::poincare)
        throw DomainError("xray_hyper: integrand must live on the Poincare disk");
    const double t0 = horo_vertex_time(g);
    const double decay = 2.0 + 2.0 * gamma.value;
    const DeRule& rule = de_rule_cached(q.ts_level, decay);
    return rule.integrate(
        [&](double tau) {
            const double t = t0 + tau;
            const double x = geodesic_horo_x(g, t);
            return std::pow(x, decay) * f(geodesic_horo(g, t).z);
        },
        q.abs_tol);
}

namespace {

template <typename Sample>
Flagged<Complex> fiber_trapezoid(int n_angle, double abs_tol, Sample&& sample) {
    Complex fine(0.0, 0.0), coarse(0.0, 0.0);
    const int n = n_angle + (n_angle % 2); // even count so the half rule nests
    for (int j = 0; j < n; ++j) {
        const Complex v = sample(kTwoPi * j / n);
        fine += v;
        if (j % 2 == 0) coarse += v;
    }
    fine *= kTwoPi / n;
    coarse *= kTwoPi / (n / 2);
    const double err = std::abs(fine - coarse);
    return {fine, err, err <= abs_tol * std::max(1.0, std::abs(fine))};
}

} // namespace

Flagged<Complex> backproject_euclid(const FanFn& u, DiskPoint z, const QuadSpec& q) {
    q.validate();
    if (std::abs(z) > 1.0) throw DomainError("backproject_euclid: point outside the closed disk");
    return fiber_trapezoid(q.n_angle, q.abs_tol, [&](double theta) {
        const auto fan = fan_footprint(z, theta).first;
        return u(fan.beta, fan.alpha);
    });
}

Flagged<Complex> backproject_hyper(const DataFn& u, DiskPoint z, const QuadSpec& q) {
    q.validate();
    if (!is_interior(z)) throw DomainError("backproject_hyper: interior point required");
    return fiber_trapezoid(q.n_angle, q.abs_tol, [&](double theta) {
        const GeodesicHoro g = footprint(UnitTangent{z, theta});
        return u(g.beta, g.finite_a());
    });
}

SantaloResult santalo_check(const std::function<Complex(DiskPoint, double)>& F, double x_min,
                            const QuadSpec& q) {
    q.validate();
    if (!(x_min > 0.0 && x_min < 1.0)) throw DomainError("santalo_check: need 0 < x_min < 1");
    SantaloResult res;

    // Geodesic side: integrate F along each geodesic, then over (beta, a).
    // The support bound x >= x_min confines a and t to explicit windows.
    const double a_max = std::sqrt(1.0 / (x_min * x_min) - 1.0);
    const GaussRule& gl = gauss_jacobi_cached(2 * q.n_chord, 0.0, 0.0);
    const GaussRule& gl_t = gauss_jacobi_cached(2 * q.n_chord, 0.0, 0.0);
    Complex acc(0.0, 0.0);
    for (int jb = 0; jb < q.n_angle; ++jb) {
        const double beta = kTwoPi * jb / q.n_angle;
        for (int ia = 0; ia < gl.size(); ++ia) {
            const double a = a_max * gl.nodes[ia];
            const GeodesicHoro g(beta, a);
            const double mu = mu_h(a);
            if (mu <= x_min) continue;
            const double t0 = horo_vertex_time(g);
            const double half_w = std::acosh(mu / x_min);
            Complex line(0.0, 0.0);
            for (int it = 0; it < gl_t.size(); ++it) {
                const double t = t0 + half_w * gl_t.nodes[it];
                const UnitTangent v = geodesic_horo(g, t);
                line += gl_t.weights[it] * F(v.z, v.theta);
            }
            acc += gl.weights[ia] * half_w * line;
        }
    }
    res.geodesic_side = acc * (a_max * kTwoPi / q.n_angle);

    // Liouville side in (x, omega, theta): dV_H wedge dtheta = x^{-2} dx domega dtheta.
    Complex acc2(0.0, 0.0);
    for (int ix = 0; ix < gl.size(); ++ix) {
        const double x = x_min + (1.0 - x_min) * 0.5 * (gl.nodes[ix] + 1.0);
        const double r = std::sqrt((1.0 - x) / (1.0 + x));
        Complex shell(0.0, 0.0);
        for (int jo = 0; jo < q.n_angle; ++jo) {
            const double omega = kTwoPi * jo / q.n_angle;
            const DiskPoint z = std::polar(r, omega);
            for (int jt = 0; jt < q.n_angle; ++jt) shell += F(z, kTwoPi * jt / q.n_angle);
        }
        acc2 += gl.weights[ix] * shell / (x * x);
    }
    res.liouville_side =
        acc2 * ((1.0 - x_min) * 0.5) * (kTwoPi / q.n_angle) * (kTwoPi / q.n_angle);
    return res;
}

} // namespace xdisk
