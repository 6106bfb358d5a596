#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "xdisk/error.hpp"
#include "xdisk/specfun.hpp"
#include "xdisk/transforms.hpp"

using namespace xdisk;

namespace {

std::mt19937_64 rng(7);
double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Weighted inner product of two real callables under (1-x^2)^{gamma+1/2} dx.
template <typename F, typename G>
double weighted_inner(F&& f, G&& g, double gamma, int n_nodes = 64) {
    const GaussRule r = gauss_jacobi(n_nodes, gamma + 0.5, gamma + 0.5);
    double acc = 0.0;
    for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * f(r.nodes[i]) * g(r.nodes[i]);
    return acc;
}

// Independent oracle: Gram-Schmidt on monomials under the same weight, with
// the same normalization and sign convention.
std::vector<std::vector<double>> gram_schmidt_polys(int n_max, double gamma) {
    std::vector<std::vector<double>> basis;
    auto eval = [](const std::vector<double>& c, double x) {
        double v = 0.0;
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * x + c[i];
        return v;
    };
    for (int n = 0; n <= n_max; ++n) {
        std::vector<double> c(n + 1, 0.0);
        c[n] = 1.0;
        for (const auto& b : basis) {
            const double proj = weighted_inner([&](double x) { return eval(c, x); },
                                               [&](double x) { return eval(b, x); }, gamma) /
                                weighted_inner([&](double x) { return eval(b, x); },
                                               [&](double x) { return eval(b, x); }, gamma);
            for (std::size_t i = 0; i < b.size(); ++i) c[i] -= proj * b[i];
        }
        const double norm2 = weighted_inner([&](double x) { return eval(c, x); },
                                            [&](double x) { return eval(c, x); }, gamma);
        double scale = 1.0 / std::sqrt(2.0 * kPi * norm2);
        if (eval(c, 1.0) * scale < 0.0) scale = -scale;
        for (auto& ci : c) ci *= scale;
        basis.push_back(c);
    }
    return basis;
}

// <psi_{n,k}, psi_{np,kp}> in L^2(mu^{-2 gamma} dbeta dalpha).
Complex gram_psi(int n, int k, int np, int kp, double gamma_val, int n_beta = 128) {
    const GammaWeight g(gamma_val);
    const GaussRule r = gauss_jacobi(40, gamma_val + 0.5, gamma_val + 0.5);
    Complex acc(0.0, 0.0);
    for (int j = 0; j < n_beta; ++j) {
        const double beta = kTwoPi * j / n_beta;
        for (int i = 0; i < r.size(); ++i) {
            const double x = r.nodes[i];
            const double alpha = std::asin(x);
            // mu^{-2 gamma} dalpha relative to the Jacobi weight in x
            const double corr = std::pow(1.0 - x * x, -2.0 * gamma_val - 1.0);
            acc += r.weights[i] * corr * psi_nk_gamma(n, k, g, beta, alpha) *
                   std::conj(psi_nk_gamma(np, kp, g, beta, alpha));
        }
    }
    return acc * kTwoPi / static_cast<double>(n_beta);
}

// Squared L^2(d^gamma dV_E) norm of a disk callable, by tensor quadrature.
template <typename F>
double disk_norm_sq(F&& f, double gamma, int n_omega = 64, int n_rho = 48) {
    const GaussRule r = gauss_jacobi(n_rho, gamma, 0.0);
    double acc = 0.0;
    for (int i = 0; i < r.size(); ++i) {
        const double rho = std::sqrt(0.5 * (1.0 + r.nodes[i]));
        double ring = 0.0;
        for (int j = 0; j < n_omega; ++j)
            ring += std::norm(f(std::polar(rho, kTwoPi * j / n_omega)));
        acc += std::pow(2.0, -gamma - 2.0) * r.weights[i] * ring;
    }
    return acc * kTwoPi / n_omega;
}

} // namespace

TEST_CASE("normalized Jacobi polynomials") {
    SUBCASE("p_0 matches the analytic normalization integral") {
        for (double g : {-0.5, 0.0, 1.0, 2.3}) {
            const double mass =
                std::sqrt(kPi) * std::exp(std::lgamma(g + 1.5) - std::lgamma(g + 2.0));
            const double expected = 1.0 / std::sqrt(2.0 * kPi * mass);
            CHECK(jacobi_p(0, GammaWeight(g), 0.37) == doctest::Approx(expected).epsilon(1e-14));
        }
    }
    SUBCASE("parity") {
        for (int n = 0; n <= 9; ++n) {
            const double x = uniform(-1, 1);
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            CHECK(jacobi_p(n, GammaWeight(0.7), -x) ==
                  doctest::Approx(sign * jacobi_p(n, GammaWeight(0.7), x)).epsilon(1e-12));
        }
    }
    SUBCASE("orthogonality against the quadrature oracle") {
        for (double g : {-0.5, 0.0, 1.0}) {
            for (int n = 0; n <= 12; ++n) {
                for (int m = n; m <= 12; ++m) {
                    const double ip =
                        weighted_inner([&](double x) { return jacobi_p(n, GammaWeight(g), x); },
                                       [&](double x) { return jacobi_p(m, GammaWeight(g), x); },
                                       g);
                    const double expected = (n == m) ? 1.0 / (2.0 * kPi) : 0.0;
                    CHECK(std::abs(ip - expected) < 1e-10);
                }
            }
        }
    }
    SUBCASE("values match Gram-Schmidt on monomials") {
        for (double g : {-0.5, 0.0, 1.0}) {
            const auto basis = gram_schmidt_polys(8, g);
            for (int n = 0; n <= 8; ++n) {
                for (double x : {-0.9, -0.3, 0.11, 0.62, 0.97}) {
                    double v = 0.0;
                    for (int i = n; i >= 0; --i) v = v * x + basis[n][i];
                    const double p = jacobi_p(n, GammaWeight(g), x);
                    CHECK(std::abs(p - v) < 1e-8 * std::max(1.0, std::abs(v)));
                }
            }
        }
    }
    SUBCASE("family object agrees with single evaluations") {
        JacobiFamily fam(GammaWeight(0.4), 10);
        Eigen::VectorXd all;
        fam.eval_all(0.3, all);
        for (int n = 0; n <= 10; ++n)
            CHECK(all[n] == doctest::Approx(jacobi_p(n, GammaWeight(0.4), 0.3)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(jacobi_p(-1, GammaWeight(0.0), 0.0), DomainError);
    CHECK_THROWS_AS(GammaWeight(-1.0), DomainError);
}

TEST_CASE("singular values") {
    SUBCASE("gamma = 0 closed form") {
        for (int n = 0; n <= 10; ++n)
            for (int k = 0; k <= n; ++k)
                CHECK(sigma_nk(n, k, GammaWeight(0.0)) ==
                      doctest::Approx(std::sqrt(4.0 * kPi / (n + 1.0))).epsilon(1e-14));
        CHECK(sigma_nk(0, 0, GammaWeight(0.0)) == doctest::Approx(3.5449077018110318));
    }
    SUBCASE("Beta symmetry in k") {
        for (double g : {-0.5, 0.3, 1.0})
            for (int n = 0; n <= 12; ++n)
                for (int k = 0; k <= n; ++k)
                    CHECK(sigma_nk(n, k, GammaWeight(g)) ==
                          doctest::Approx(sigma_nk(n, n - k, GammaWeight(g))).epsilon(1e-13));
    }
    SUBCASE("functional-calculus route equals sigma^2") {
        for (double g : {-0.5, 0.0, 1.0, 2.7})
            for (int n = 0; n <= 30; ++n)
                for (int k = 0; k <= n; ++k)
                    CHECK(normal_eigenvalue(n, k, GammaWeight(g)) ==
                          doctest::Approx(sigma_nk_sq(n, k, GammaWeight(g))).epsilon(1e-12));
    }
    SUBCASE("gamma = 0 scalar identity sigma^2 (n+1) = 4 pi") {
        for (int n = 0; n <= 40; ++n)
            CHECK(sigma_nk_sq(n, 0, GammaWeight(0.0)) * (n + 1.0) ==
                  doctest::Approx(4.0 * kPi).epsilon(1e-14));
    }
    CHECK_THROWS_AS(sigma_nk(3, 4, GammaWeight(0.0)), DomainError);
}

TEST_CASE("psi_nk^gamma basis") {
    SUBCASE("orthonormal Gram block") {
        for (double g : {-0.5, 1.0}) {
            for (int n = 0; n <= 8; n += 4) {
                for (int np = 0; np <= 8; np += 2) {
                    for (int k : {-3, 0, 1}) {
                        for (int kp : {-3, 0, 1}) {
                            const Complex ip = gram_psi(n, k, np, kp, g);
                            const double expected = (n == np && k == kp) ? 1.0 : 0.0;
                            CHECK(std::abs(ip - expected) < 1e-8);
                        }
                    }
                }
            }
        }
    }
    SUBCASE("invariance under the orientation-reversing involution") {
        const GammaWeight g(0.6);
        for (int i = 0; i < 20; ++i) {
            const int n = i % 5, k = (i % 7) - 3;
            const double beta = uniform(0, kTwoPi), alpha = uniform(-kPi / 2, kPi / 2);
            const FanBeamCoord sa = scattering_antipodal_euclid(FanBeamCoord{beta, alpha});
            CHECK(std::abs(psi_nk_gamma(n, k, g, sa.beta, sa.alpha) -
                           psi_nk_gamma(n, k, g, beta, alpha)) < 1e-12);
        }
    }
    SUBCASE("gamma = 0 member is proportional to the explicit pair") {
        for (int n = 0; n <= 4; ++n) {
            for (int k : {-1, 0, n}) {
                Complex ratio(0.0, 0.0);
                bool first = true;
                for (int i = 0; i < 12; ++i) {
                    const double beta = uniform(0, kTwoPi), alpha = uniform(-1.4, 1.4);
                    const Complex a = psi_nk_gamma(n, k, GammaWeight(0.0), beta, alpha);
                    const Complex b = psi_phi_zero(n, k, ZeroBasisKind::psi, beta, alpha);
                    if (first) {
                        ratio = a / b;
                        first = false;
                    } else {
                        CHECK(std::abs(a / b - ratio) < 1e-10);
                    }
                }
                CHECK(std::abs(ratio) == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
    SUBCASE("pullback basis is mu_h times the fan-beam values") {
        const GammaWeight g(0.5);
        for (int i = 0; i < 10; ++i) {
            const double beta = uniform(0, kTwoPi), a = uniform(-4, 4);
            CHECK(std::abs(psi_nk_gamma_H(3, 1, g, beta, a) -
                           mu_h(a) * psi_nk_gamma(3, 1, g, beta, std::atan(a))) < 1e-15);
        }
    }
    SUBCASE("S_A^H invariance of the pullback basis") {
        const GammaWeight g(1.0);
        for (int i = 0; i < 20; ++i) {
            const double beta = uniform(0, kTwoPi), a = uniform(-4, 4);
            const GeodesicHoro sa = scattering_antipodal(GeodesicHoro(beta, a));
            CHECK(std::abs(psi_nk_gamma_H(4, 1, g, sa.beta, sa.finite_a()) -
                           psi_nk_gamma_H(4, 1, g, beta, a)) < 1e-12);
        }
    }
}

TEST_CASE("gamma = 0 psi/phi pair") {
    SUBCASE("unit norm under the plain measure") {
        const GaussRule r = gauss_legendre(48);
        for (int n : {0, 1, 3, 6}) {
            for (int k : {-2, 0, 2}) {
                double acc = 0.0;
                const int n_beta = 64;
                for (int j = 0; j < n_beta; ++j)
                    for (int i = 0; i < r.size(); ++i)
                        acc += r.weights[i] * kPi / 2.0 *
                               std::norm(psi_phi_zero(n, k, ZeroBasisKind::psi,
                                                      kTwoPi * j / n_beta,
                                                      r.nodes[i] * kPi / 2.0));
                acc *= kTwoPi / n_beta;
                CHECK(acc == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
    SUBCASE("phi is odd under the involution") {
        for (int i = 0; i < 20; ++i) {
            const int n = i % 5, k = (i % 7) - 3;
            const double beta = uniform(0, kTwoPi), alpha = uniform(-kPi / 2, kPi / 2);
            const FanBeamCoord sa = scattering_antipodal_euclid(FanBeamCoord{beta, alpha});
            CHECK(std::abs(psi_phi_zero(n, k, ZeroBasisKind::phi, sa.beta, sa.alpha) +
                           psi_phi_zero(n, k, ZeroBasisKind::phi, beta, alpha)) < 1e-12);
        }
    }
    SUBCASE("-T^2 eigenvalue by finite differences") {
        const double h = 1e-3;
        for (int n : {0, 2, 5}) {
            const int k = 1;
            const double beta = 0.9, alpha = 0.3;
            auto u = [&](double b, double al) {
                return psi_phi_zero(n, k, ZeroBasisKind::psi, b, al);
            };
            auto d2 = [&](auto&& f) {
                return (-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) /
                       (12.0 * h * h);
            };
            const Complex u_bb = d2([&](double s) { return u(beta + s * h, alpha); });
            const Complex u_aa = d2([&](double s) { return u(beta, alpha + s * h); });
            auto d1b = [&](double al) {
                return (-u(beta + 2 * h, al) + 8.0 * u(beta + h, al) - 8.0 * u(beta - h, al) +
                        u(beta - 2 * h, al)) /
                       (12.0 * h);
            };
            const Complex u_ba = (-d1b(alpha + 2 * h) + 8.0 * d1b(alpha + h) -
                                  8.0 * d1b(alpha - h) + d1b(alpha - 2 * h)) /
                                 (12.0 * h);
            const Complex minus_T2 = -(u_bb - 2.0 * u_ba + u_aa);
            const double eig = (n + 1.0) * (n + 1.0);
            CHECK(std::abs(minus_T2 - eig * u(beta, alpha)) / std::abs(eig * u(beta, alpha)) <
                  1e-6);
        }
    }
}

TEST_CASE("generalized Zernike polynomials") {
    const QuadSpec q{.n_chord = 48, .ts_level = 2, .n_angle = 256, .abs_tol = 1e-9};
    SUBCASE("Z_00 is constant") {
        const GammaWeight g(0.8);
        const Complex v0 = zernike(0, 0, g, DiskPoint(0.0, 0.0));
        const Complex v1 = zernike(0, 0, g, DiskPoint(0.3, 0.4));
        CHECK(std::abs(v0 - v1) < 1e-13);
    }
    SUBCASE("closed form matches the defining backprojection on the disk") {
        for (double gv : {-0.5, 0.0, 1.0}) {
            const GammaWeight g(gv);
            for (int n = 0; n <= 6; ++n) {
                for (int k = 0; k <= n; ++k) {
                    FanFn u = [&](double beta, double alpha) {
                        return std::pow(std::cos(alpha), -2.0 * gv - 1.0) *
                               psi_nk_gamma(n, k, g, beta, alpha);
                    };
                    for (int i = 0; i < 4; ++i) {
                        const DiskPoint w = std::polar(0.15 + 0.2 * i, uniform(0, kTwoPi));
                        const Complex bp = backproject_euclid(u, w, q).value;
                        const Complex cf = zernike(n, k, g, w);
                        CHECK(std::abs(bp - cf) <=
                              1e-6 * std::max(1.0, std::abs(cf)));
                    }
                }
            }
        }
    }
    SUBCASE("weighted norm equals the singular value") {
        for (double gv : {-0.5, 0.0, 1.0}) {
            const GammaWeight g(gv);
            for (int n : {0, 1, 3, 5}) {
                for (int k = 0; k <= n; ++k) {
                    const double nrm = std::sqrt(
                        disk_norm_sq([&](DiskPoint w) { return zernike(n, k, g, w); }, gv));
                    CHECK(nrm == doctest::Approx(sigma_nk(n, k, g)).epsilon(1e-10));
                }
            }
        }
    }
    SUBCASE("eigenfunction of the weighted disk operator by finite differences") {
        // L_gamma Z = (n+1+gamma)^2 Z, checked at interior points
        for (double gv : {0.0, 1.0}) {
            const GammaWeight g(gv);
            for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 2}}) {
                const double rho = 0.55, om = 1.1, h = 1e-3;
                auto f = [&](double r, double w) { return zernike(n, k, g, std::polar(r, w)); };
                auto d2 = [&](auto&& fn) {
                    return (-fn(2.0) + 16.0 * fn(1.0) - 30.0 * fn(0.0) + 16.0 * fn(-1.0) -
                            fn(-2.0)) /
                           (12.0 * h * h);
                };
                auto d1 = [&](auto&& fn) {
                    return (-fn(2.0) + 8.0 * fn(1.0) - 8.0 * fn(-1.0) + fn(-2.0)) / (12.0 * h);
                };
                const Complex f_rr = d2([&](double s) { return f(rho + s * h, om); });
                const Complex f_r = d1([&](double s) { return f(rho + s * h, om); });
                const Complex f_ww = d2([&](double s) { return f(rho, om + s * h); });
                const double A = 1.0 - rho * rho;
                const Complex val = f(rho, om);
                const Complex L = -A * f_rr - (A / rho - 2.0 * (gv + 1.0) * rho) * f_r -
                                  f_ww / (rho * rho) + (1.0 + gv) * (1.0 + gv) * val;
                const double eig = (n + 1.0 + gv) * (n + 1.0 + gv);
                CHECK(std::abs(L - eig * val) / std::abs(eig * val) < 1e-4);
            }
        }
    }
    SUBCASE("angular momentum sectors") {
        const GammaWeight g(0.3);
        const int n = 5;
        const int n_omega = 32;
        for (int k = 0; k <= n; ++k) {
            for (int m = -n; m <= n; ++m) {
                Complex acc(0.0, 0.0);
                for (int j = 0; j < n_omega; ++j) {
                    const double om = kTwoPi * j / n_omega;
                    acc += zernike(n, k, g, std::polar(0.7, om)) * std::polar(1.0, -m * om);
                }
                acc /= static_cast<double>(n_omega);
                if (m != n - 2 * k) CHECK(std::abs(acc) < 1e-12);
            }
        }
    }
    SUBCASE("batch evaluation agrees with single evaluation") {
        const GammaWeight g(-0.5);
        const ZernikeBasis& basis = zernike_basis(g, 8);
        Eigen::MatrixXcd all;
        const DiskPoint w = std::polar(0.62, 2.4);
        basis.eval_all(w, all);
        for (int n = 0; n <= 8; ++n)
            for (int k = 0; k <= n; ++k)
                CHECK(std::abs(all(n, k) - basis.eval(n, k, w)) < 1e-13);
    }
    CHECK_THROWS_AS(zernike(2, 3, GammaWeight(0.0), DiskPoint(0.0, 0.0)), DomainError);
}
