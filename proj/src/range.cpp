#include "xdisk/range.hpp"

#include <cmath>
#include <memory>

#include "xdisk/error.hpp"

namespace xdisk {

namespace {

const Complex kI(0.0, 1.0);

// Scattering relation on the doubled boundary, finite branch.
std::pair<double, double> scatter(double beta, double a, int lambda) {
    return {wrap_angle(beta + kPi + 2.0 * lambda * std::atan(a)), a};
}

// Fan-beam fiber coordinate of a doubled-boundary point over e^{i beta}:
// alpha in (-pi/2, pi/2) on the incoming sheet, (pi/2, 3pi/2) on the other.
double fiber_alpha(double a, int lambda) {
    return lambda > 0 ? std::atan(a) : kPi - std::atan(a);
}

// Inverse of fiber_alpha for alpha in (-pi/2, 3pi/2).
std::pair<double, int> fiber_param(double alpha) {
    if (std::abs(alpha) < kPi / 2.0) return {std::tan(alpha), +1};
    return {-std::tan(alpha), -1};
}

} // namespace

GammaFn extend_A_pm(DataFn u, int sign) {
    if (sign != +1 && sign != -1) throw DomainError("extend_A_pm: sign must be +1 or -1");
    return [u = std::move(u), sign](double beta, double a, int lambda) {
        if (lambda > 0) return u(beta, a);
        const auto [b2, a2] = scatter(beta, a, -1);
        return static_cast<double>(sign) * u(b2, a2);
    };
}

DataFn adjoint_A_pm(GammaFn v, int sign) {
    if (sign != +1 && sign != -1) throw DomainError("adjoint_A_pm: sign must be +1 or -1");
    return [v = std::move(v), sign](double beta, double a) {
        const auto [b2, a2] = scatter(beta, a, +1);
        return v(beta, a, +1) + static_cast<double>(sign) * v(b2, a2, -1);
    };
}

GammaFn antipodal_pullback(GammaFn v) {
    return [v = std::move(v)](double beta, double a, int lambda) {
        return v(beta, -a, -lambda);
    };
}

namespace {

GammaFn hilbert_minus_spectral(GammaFn u, int n_fiber) {
    if (n_fiber < 8 || (n_fiber & (n_fiber - 1)) != 0)
        throw DomainError("hilbert_minus: n_fiber must be a power of two >= 8");
    auto fn = std::make_shared<GammaFn>(std::move(u));
    return [fn, n_fiber](double beta, double a, int lambda) {
        // Conjugate to the Euclidean fiber over e^{i beta}: sample the fiber
        // uniformly in alpha (offset to avoid the glancing points), apply the
        // odd-frequency multiplier -i sgn, and evaluate the series back at
        // the requested point.
        const double h = kTwoPi / n_fiber;
        const double alpha0 = -kPi / 2.0 + 0.5 * h;
        std::vector<Complex> fiber(n_fiber);
        for (int j = 0; j < n_fiber; ++j) {
            const double alpha = alpha0 + j * h;
            const auto [aj, lj] = fiber_param(alpha);
            fiber[j] = (*fn)(beta, aj, lj) * std::sqrt(1.0 + aj * aj); // |mu_h|^{-1}
        }
        fft_pow2(fiber, -1);
        // frequency k at bin b: k = b for b < n/2, b - n otherwise
        const double alpha_star = fiber_alpha(a, lambda);
        Complex acc(0.0, 0.0);
        for (int b = 0; b < n_fiber; ++b) {
            int k = (b <= n_fiber / 2) ? b : b - n_fiber;
            if (k == n_fiber / 2) continue; // ambiguous Nyquist bin
            if ((k % 2 + 2) % 2 == 0) continue;   // even fiber harmonics are dropped
            const Complex mult = (k > 0) ? -kI : kI;
            // undo the grid offset phase and evaluate at alpha_star
            const Complex coef = fiber[b] * std::polar(1.0, -k * alpha0) / static_cast<double>(n_fiber);
            acc += mult * coef * std::polar(1.0, k * alpha_star);
        }
        return mu_h(a) * acc;
    };
}

GammaFn hilbert_minus_pv(GammaFn u, int n_pv) {
    auto fn = std::make_shared<GammaFn>(std::move(u));
    return [fn, n_pv](double beta, double a, int lambda) {
        auto u_odd = [&](double ap) {
            return 0.5 * ((*fn)(beta, ap, lambda) - (*fn)(beta, -ap, -lambda));
        };
        // a' = a + tan(delta) straightens the compactified line; the odd pair
        // around delta = 0 cancels the singularity.
        const GaussRule& gl = gauss_jacobi_cached(n_pv, 0.0, 0.0);
        Complex acc(0.0, 0.0);
        for (int i = 0; i < gl.size(); ++i) {
            const double delta = (gl.nodes[i] + 1.0) * kPi / 4.0; // (0, pi/2)
            const double w = gl.weights[i] * kPi / 4.0;
            const double t = std::tan(delta);
            acc += w * (u_odd(a + t) - u_odd(a - t)) / (std::sin(delta) * std::cos(delta));
        }
        return static_cast<double>(lambda) * (-1.0 / kPi) * acc;
    };
}

} // namespace

GammaFn hilbert_minus(GammaFn u, const HilbertSpec& spec) {
    return spec.mode == HilbertMode::spectral ? hilbert_minus_spectral(std::move(u), spec.n_fiber)
                                              : hilbert_minus_pv(std::move(u), spec.n_pv);
}

Complex hilbert_pv_epsilon(const std::function<Complex(double)>& u_odd_line, double a,
                           double eps, int n_nodes) {
    // One-sided tan-substituted integrals excluding |delta| < eps, with a
    // single Richardson step to cancel the leading exclusion error.
    auto excluded = [&](double cut) {
        const GaussRule& gl = gauss_jacobi_cached(n_nodes, 0.0, 0.0);
        Complex acc(0.0, 0.0);
        for (int i = 0; i < gl.size(); ++i) {
            const double delta = cut + (gl.nodes[i] + 1.0) * (kPi / 2.0 - cut) / 2.0;
            const double w = gl.weights[i] * (kPi / 2.0 - cut) / 2.0;
            const double t = std::tan(delta);
            acc += w * (u_odd_line(a + t) - u_odd_line(a - t)) /
                   (std::sin(delta) * std::cos(delta));
        }
        return Complex(-1.0 / kPi) * acc;
    };
    return 2.0 * excluded(eps / 2.0) - excluded(eps);
}

DataFn c_minus_H(DataFn u, const HilbertSpec& spec) {
    GammaFn w = hilbert_minus(extend_A_pm(std::move(u), -1), spec);
    DataFn adj = adjoint_A_pm(std::move(w), -1);
    return [adj = std::move(adj)](double beta, double a) { return 0.5 * adj(beta, a); };
}

DataFn p_minus_H(DataFn w, const HilbertSpec& spec) {
    GammaFn h = hilbert_minus(extend_A_pm(std::move(w), +1), spec);
    return adjoint_A_pm(std::move(h), -1);
}

// --- moments ---------------------------------------------------------------------

Complex MomentReport::at(int m, int k) const {
    if (!holds(m, k)) throw DomainError("MomentReport: index outside the window");
    return coeffs(m, k + k_window);
}

bool MomentReport::holds(int m, int k) const {
    return m >= 0 && m <= max_degree && k >= -k_window && k <= m + k_window;
}

MomentReport moment_coeffs(const DataFn& u, GammaWeight gamma, int max_degree, int n_omega,
                           int n_s, double tol_rel, int k_window) {
    if (max_degree < 0) throw DomainError("moment_coeffs: max_degree >= 0 required");
    if (n_omega < 2 * (max_degree + 2 * k_window) + 2)
        throw GridError("moment_coeffs: omega grid too coarse for the requested window");
    if (n_s < max_degree + 2)
        throw GridError("moment_coeffs: s grid too coarse for the requested degree");

    MomentReport rep;
    rep.max_degree = max_degree;
    rep.k_window = k_window;
    rep.tol_rel = tol_rel;
    rep.coeffs = Eigen::MatrixXcd::Zero(max_degree + 1, max_degree + 2 * k_window + 1);

    const JacobiFamily fam(gamma, max_degree);
    const GaussRule& gl = gauss_jacobi_cached(n_s, 0.0, 0.0);
    Eigen::VectorXd p;
    Eigen::MatrixXcd m_of_omega(max_degree + 1, n_omega);
    for (int jo = 0; jo < n_omega; ++jo) {
        const double omega = kTwoPi * jo / n_omega;
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(max_degree + 1);
        for (int i = 0; i < gl.size(); ++i) {
            const double s = gl.nodes[i];
            const double den = 1.0 + s * s;
            fam.eval_all(-2.0 * s / den, p);
            const double beta = wrap_angle(omega + 1.5 * kPi + 2.0 * std::atan(s));
            const double a = -2.0 * s / (1.0 - s * s);
            const Complex uv = u(beta, a) * (2.0 / den) * gl.weights[i];
            for (int m = 0; m <= max_degree; ++m) acc[m] += uv * p[m];
        }
        m_of_omega.col(jo) = acc;
    }
    for (int m = 0; m <= max_degree; ++m) {
        for (int k = -k_window; k <= m + k_window; ++k) {
            Complex c(0.0, 0.0);
            const double freq = m - 2.0 * k;
            for (int jo = 0; jo < n_omega; ++jo)
                c += m_of_omega(m, jo) * std::polar(1.0, -freq * (kTwoPi * jo / n_omega));
            // (1/2pi) times the trapezoid rule with weight 2pi/n_omega
            rep.coeffs(m, k + k_window) = c / static_cast<double>(n_omega);
        }
    }
    for (int m = 0; m <= max_degree; ++m) {
        for (int k = -k_window; k <= m + k_window; ++k) {
            const double mag = std::abs(rep.coeffs(m, k + k_window));
            if (k_in_band(m, k))
                rep.max_in_band = std::max(rep.max_in_band, mag);
            else
                rep.max_out_of_band = std::max(rep.max_out_of_band, mag);
        }
    }
    const double threshold =
        std::max(tol_rel * rep.max_in_band, 1e-14 * std::max(1.0, rep.max_in_band));
    for (int m = 0; m <= max_degree; ++m)
        for (int k = -k_window; k <= m + k_window; ++k)
            if (!k_in_band(m, k) && std::abs(rep.coeffs(m, k + k_window)) > threshold)
                rep.offenders.emplace_back(m, k);
    rep.homogeneous = rep.offenders.empty();
    return rep;
}

Complex bct_moment(const DataFn& u, int m, double omega, int level) {
    if (m < 0) throw DomainError("bct_moment: m >= 0 required");
    const DeRule& rule = de_rule_cached(level, 1.0);
    auto integrand = [&](double r) {
        const double s = std::tanh(0.5 * r);
        const double beta = wrap_angle(omega + 1.5 * kPi + 2.0 * std::atan(s));
        const double a = -2.0 * s / (1.0 - s * s);
        return std::pow(std::tanh(r), m) / std::cosh(r) * u(beta, a);
    };
    return rule.integrate(integrand, 1e-12).value;
}

Complex vertex_moment_monomial(const DataFn& u, int m, double omega, int n_s) {
    const GaussRule& gl = gauss_jacobi_cached(n_s, 0.0, 0.0);
    Complex acc(0.0, 0.0);
    for (int i = 0; i < gl.size(); ++i) {
        const double s = gl.nodes[i];
        const double den = 1.0 + s * s;
        const double beta = wrap_angle(omega + 1.5 * kPi + 2.0 * std::atan(s));
        const double a = -2.0 * s / (1.0 - s * s);
        acc += gl.weights[i] * std::pow(2.0 * s / den, m) * u(beta, a) * (2.0 / den);
    }
    return acc;
}

RangeVerdict range_test(const DataFn& u, GammaWeight gamma, const RangeSpec& spec) {
    RangeVerdict v;
    v.moments = moment_coeffs(u, gamma, spec.max_degree, spec.n_omega, spec.n_s, spec.tol,
                              spec.k_window);
    v.moments_pass = v.moments.homogeneous;

    // Weighted partial sums of the in-band moment coefficients; bounded
    // growth of the tail is the numerical stand-in for the Sobolev condition.
    double running = 0.0;
    v.weighted_partial_sums.resize(spec.max_degree + 1);
    for (int m = 0; m <= spec.max_degree; ++m) {
        for (int k = 0; k <= m; ++k) {
            const double w = std::pow(m + 1.0 + gamma.value, 2.0 * spec.s) /
                             sigma_nk_sq(m, k, gamma);
            running += w * std::norm(v.moments.at(m, k));
        }
        v.weighted_partial_sums[m] = running;
    }
    // Convergence diagnostic: the last two degrees must contribute little to
    // the weighted sum, otherwise mass is still arriving at the cutoff.
    const double total = v.weighted_partial_sums.back();
    const int anchor = std::max(0, spec.max_degree - 2);
    const double head = v.weighted_partial_sums[anchor];
    v.decay_tail_fraction = total > 0.0 ? (total - head) / total : 0.0;
    v.decay_pass = v.decay_tail_fraction <= 0.5;

    if (gamma.value == 0.0) {
        v.cminus_applicable = true;
        DataFn cu = c_minus_H(u, spec.hilbert);
        DataGrid grid = make_data_grid_for_band(gamma, spec.cminus_band);
        DataGrid orig = make_data_grid_for_band(gamma, spec.cminus_band);
        for (int j = 0; j < grid.n_beta(); ++j)
            for (int i = 0; i < grid.n_alpha(); ++i) {
                grid.samples(j, i) = cu(grid.beta[j], grid.a[i]);
                orig.samples(j, i) = u(grid.beta[j], grid.a[i]);
            }
        const double un = orig.norm();
        v.cminus_residual = un > 0.0 ? grid.norm() / un : grid.norm();
        v.cminus_pass = v.cminus_residual <= spec.tol;
        if (!v.cminus_pass) {
            CoeffTable c = analyze_data(grid, spec.cminus_band);
            double peak = 0.0;
            c.for_each([&](int, int, Complex val) { peak = std::max(peak, std::abs(val)); });
            c.for_each([&](int n, int k, Complex val) {
                if (std::abs(val) > 0.5 * peak) v.cminus_offenders.emplace_back(n, k);
            });
        }
    }
    v.overall = v.moments_pass && v.decay_pass && (!v.cminus_applicable || v.cminus_pass);
    return v;
}

} // namespace xdisk
