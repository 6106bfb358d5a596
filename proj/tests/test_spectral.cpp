#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "xdisk/error.hpp"
#include "xdisk/spectral.hpp"

using namespace xdisk;

namespace {

std::mt19937_64 rng(99);
double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

const QuadSpec q{};

CoeffTable random_data_table(GammaWeight g, int n_max, int k_max) {
    CoeffTable t = CoeffTable::data(g, n_max, k_max);
    for (int n = 0; n <= n_max; ++n)
        for (int k = -k_max; k <= k_max; ++k)
            t.at(n, k) = Complex(uniform(-1, 1), uniform(-1, 1));
    return t;
}

} // namespace

TEST_CASE("coefficient tables") {
    CoeffTable t = CoeffTable::data(GammaWeight(0.0), 4);
    CHECK(t.k_max() == 12); // default n_max + 8
    CHECK(t.holds(4, -12));
    CHECK_FALSE(t.holds(5, 0));
    CHECK_THROWS_AS(t.at(0, 13), DomainError);

    SUBCASE("sobolev norm of a single entry") {
        CoeffTable d = CoeffTable::disk(GammaWeight(0.0), 5);
        d.at(3, 1) = Complex(1.0, 0.0);
        CHECK(d.sobolev_norm(1.0) == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(d.l2_norm() == doctest::Approx(1.0).epsilon(1e-15));
        CoeffTable r = random_data_table(GammaWeight(0.5), 3, 4);
        CHECK(r.sobolev_norm(0.0) == doctest::Approx(r.l2_norm()).epsilon(1e-15));
    }
    SUBCASE("band split") {
        CoeffTable r = random_data_table(GammaWeight(0.0), 3, 5);
        const double whole = r.l2_norm();
        const double in = r.in_band_part().l2_norm();
        const double out = r.out_of_band_part().l2_norm();
        CHECK(in * in + out * out == doctest::Approx(whole * whole).epsilon(1e-12));
    }
}

TEST_CASE("data grid analysis") {
    for (double gv : {-0.5, 0.0, 1.0}) {
        const GammaWeight g(gv);
        const int N = 6;
        DataGrid grid = make_data_grid_for_band(g, N);

        SUBCASE("basis functions give delta tables") {
            for (auto [n0, k0] :
                 std::vector<std::pair<int, int>>{{0, 0}, {3, 1}, {5, -2}, {4, 6}}) {
                for (int j = 0; j < grid.n_beta(); ++j)
                    for (int i = 0; i < grid.n_alpha(); ++i)
                        grid.samples(j, i) =
                            psi_nk_gamma_H(n0, k0, g, grid.beta[j], grid.a[i]);
                CoeffTable c = analyze_data(grid, N);
                c.for_each([&, n0 = n0, k0 = k0](int n, int k, Complex v) {
                    const double expected = (n == n0 && k == k0) ? 1.0 : 0.0;
                    CHECK(std::abs(v - expected) < 1e-10);
                });
            }
        }
        SUBCASE("parseval and synthesis round trip") {
            CoeffTable c0 = random_data_table(g, N, N + 8);
            synthesize_data(c0, grid);
            CHECK(grid.norm() == doctest::Approx(c0.l2_norm()).epsilon(1e-8));
            CoeffTable c1 = analyze_data(grid, N);
            CHECK(c1.distance(c0) < 1e-10 * c0.l2_norm());
        }
    }
    SUBCASE("anti-aliasing bound is enforced") {
        DataGrid tiny = DataGrid::make(GammaWeight(0.0), 16, 8);
        CHECK_THROWS_AS(analyze_data(tiny, 6), GridError);
    }
}

TEST_CASE("disk grid analysis") {
    for (double gv : {-0.5, 1.0}) {
        const GammaWeight g(gv);
        const int N = 6;
        DiskGrid grid = make_disk_grid_for_band(g, N);
        CoeffTable c0 = CoeffTable::disk(g, N);
        for (int n = 0; n <= N; ++n)
            for (int k = 0; k <= n; ++k) c0.at(n, k) = Complex(uniform(-1, 1), uniform(-1, 1));
        synthesize_disk(c0, grid);
        CHECK(grid.norm() == doctest::Approx(c0.l2_norm()).epsilon(1e-8));
        CoeffTable c1 = analyze_disk(grid, N);
        CHECK(c1.distance(c0) < 1e-10 * c0.l2_norm());
    }
}

TEST_CASE("forward data lands on the singular basis") {
    for (double gv : {-0.5, 0.0, 1.0}) {
        const GammaWeight g(gv);
        const int N = 5;
        DataGrid grid = make_data_grid_for_band(g, N);
        for (auto [n0, k0] : std::vector<std::pair<int, int>>{{2, 0}, {4, 2}}) {
            ScalarField f = pullback_phi([&, n0 = n0, k0 = k0](DiskPoint w) {
                return zernike(n0, k0, g, w) / sigma_nk(n0, k0, g);
            });
            const BatchStats st = forward_grid(f, grid, q);
            CHECK(st.flagged == 0);
            CoeffTable c = analyze_data(grid, N);
            const double sig = sigma_nk(n0, k0, g);
            c.for_each([&, n0 = n0, k0 = k0](int n, int k, Complex v) {
                if (n == n0 && k == k0)
                    CHECK(std::abs(v - sig) < 1e-7 * sig);
                else
                    CHECK(std::abs(v) < 1e-7 * sig);
            });
        }
    }
}

TEST_CASE("kernel indices of the adjoint") {
    // Synthesizing data on k < 0 or k > n and applying the weighted adjoint
    // x^{-1} (I)# mu_h^{-2 gamma} gives nothing on the disk side.
    for (double gv : {0.0, 1.0}) {
        const GammaWeight g(gv);
        const int N = 4;
        CoeffTable kern = CoeffTable::data(g, N, N + 4);
        kern.at(2, -1) = Complex(1.0, 0.0);
        kern.at(3, 4) = Complex(0.0, 1.0);
        DataFn u0 = synth_data_fn(kern);
        DataFn u = [u0, gv](double beta, double a) {
            return std::pow(mu_h(a), -2.0 * gv) * u0(beta, a);
        };
        DiskGrid out = DiskGrid::make(g, 24, 8);
        QuadSpec qb = q;
        qb.n_angle = 256;
        for (int i = 0; i < out.n_rho(); ++i)
            for (int j = 0; j < out.n_omega(); ++j) {
                const DiskPoint z = phi_inv(std::polar(out.rho[i], out.omega[j]));
                out.samples(j, i) = backproject_hyper(u, z, qb).value / bdf_x(z);
            }
        CoeffTable c = analyze_disk(out, N);
        CHECK(c.l2_norm() < 1e-6);
    }
}

TEST_CASE("svd reconstruction") {
    SUBCASE("band-limited round trip at gamma = 0") {
        const GammaWeight g(0.0);
        const int N = 6;
        CoeffTable truth = CoeffTable::disk(g, N);
        truth.at(3, 1) = Complex(1.0, 0.0);
        truth.at(5, 2) = Complex(2.0, 0.0);
        ScalarField f = synth_disk_field(truth);
        DataGrid grid = make_data_grid_for_band(g, N);
        forward_grid(f, grid, q);
        const ReconstructReport rep = svd_reconstruct(grid, N);
        CHECK(rep.disk_coeffs.distance(truth) < 1e-6 * truth.l2_norm());
        CHECK(rep.out_of_band_norm < 1e-7 * rep.in_band_norm);
    }
    SUBCASE("round trip at gamma = 1") {
        const GammaWeight g(1.0);
        const int N = 5;
        CoeffTable truth = CoeffTable::disk(g, N);
        truth.at(2, 2) = Complex(0.5, -1.0);
        truth.at(4, 1) = Complex(-0.3, 0.2);
        ScalarField f = synth_disk_field(truth);
        DataGrid grid = make_data_grid_for_band(g, N);
        forward_grid(f, grid, q);
        const ReconstructReport rep = svd_reconstruct(grid, N);
        CHECK(rep.disk_coeffs.distance(truth) < 1e-6 * truth.l2_norm());
    }
    SUBCASE("pure kernel data is reported, not inverted") {
        const GammaWeight g(0.0);
        const int N = 4;
        CoeffTable kern = CoeffTable::data(g, N, N + 8);
        kern.at(2, -2) = Complex(1.0, 0.0);
        DataGrid grid = make_data_grid_for_band(g, N);
        synthesize_data(kern, grid);
        const ReconstructReport rep = svd_reconstruct(grid, N);
        CHECK(rep.disk_coeffs.l2_norm() < 1e-10);
        CHECK(rep.out_of_band_norm == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(rep.out_of_band.at(2, -2) - Complex(1.0, 0.0)) < 1e-8);
    }
    SUBCASE("tikhonov filter damps the inversion") {
        const GammaWeight g(0.0);
        const int N = 3;
        CoeffTable truth = CoeffTable::disk(g, N);
        truth.at(2, 1) = Complex(1.0, 0.0);
        DataGrid grid = make_data_grid_for_band(g, N);
        ScalarField f = synth_disk_field(truth);
        forward_grid(f, grid, q);
        const double lam = 0.7;
        const ReconstructReport rep = svd_reconstruct(grid, N, lam);
        const double sig = sigma_nk(2, 1, g);
        const double expected = sig * sig / (sig * sig + lam * lam);
        CHECK(std::abs(rep.disk_coeffs.at(2, 1)) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("distinguished operators") {
    SUBCASE("constant field at gamma = 0") {
        ScalarField one{[](DiskPoint) { return Complex(1.0, 0.0); }, DiskModel::poincare, true};
        const Complex v = apply_L_gamma_H(one, GammaWeight(0.0), DiskPoint(0.4, 0.2), FdSpec{});
        CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-9);
    }
    SUBCASE("pullback Zernike eigenfunctions of L_gamma^H") {
        for (double gv : {0.0, 1.0}) {
            const GammaWeight g(gv);
            for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {2, 2}}) {
                ScalarField f = pullback_phi(
                    [&, n = n, k = k](DiskPoint w) { return zernike(n, k, g, w); });
                const double eig = (n + 1.0 + gv) * (n + 1.0 + gv);
                for (int i = 0; i < 3; ++i) {
                    const DiskPoint z = std::polar(uniform(0.15, 0.8), uniform(0, kTwoPi));
                    const Complex lhs = apply_L_gamma_H(f, g, z, FdSpec{});
                    const Complex val = f(z);
                    CHECK(std::abs(lhs - eig * val) < 1e-4 * std::abs(eig * val));
                }
            }
        }
    }
    SUBCASE("data basis eigenfunctions of T_gamma^H") {
        for (double gv : {-0.5, 0.0, 1.0}) {
            const GammaWeight g(gv);
            for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {2, -1}, {4, 5}}) {
                DataFn u = [&, n = n, k = k](double beta, double a) {
                    return psi_nk_gamma_H(n, k, g, beta, a);
                };
                const double eig = (n + 1.0 + gv) * (n + 1.0 + gv);
                for (int i = 0; i < 3; ++i) {
                    const double beta = uniform(0, kTwoPi), a = uniform(-1.5, 1.5);
                    const Complex lhs = apply_T_gamma_H(u, g, beta, a, FdSpec{});
                    const Complex val = u(beta, a);
                    CHECK(std::abs(lhs - eig * val) <
                          1e-4 * std::max(0.05, std::abs(eig * val)));
                }
            }
        }
    }
    SUBCASE("forward intertwining of L and T") {
        const GammaWeight g(0.0);
        ScalarField f = pullback_phi([](DiskPoint w) {
            return std::exp(-1.5 * std::norm(w - DiskPoint(0.25, 0.1)));
        });
        const FdSpec fd{0.02, true};
        for (int i = 0; i < 4; ++i) {
            // keep the geodesic clear of the chart degeneracies at x in {0,1}
            const double beta = uniform(0, kTwoPi);
            const double a = (i % 2 ? 1.0 : -1.0) * uniform(0.5, 1.2);
            ScalarField Lf{[&](DiskPoint z) { return apply_L_gamma_H(f, g, z, fd); },
                           DiskModel::poincare, true};
            const Complex lhs = xray_hyper(Lf, g, GeodesicHoro(beta, a), q).value;
            DataFn If = [&](double b, double aa) {
                return xray_hyper(f, g, GeodesicHoro(b, aa), q).value;
            };
            const Complex rhs = apply_T_gamma_H(If, g, beta, a, fd);
            CHECK(std::abs(lhs - rhs) < 1e-4 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("normal operator") {
    const GammaWeight g(0.0);
    SUBCASE("lowest eigenvalue is 4 pi") {
        ScalarField f = pullback_phi(
            [&](DiskPoint w) { return zernike(0, 0, g, w) / sigma_nk(0, 0, g); });
        const DiskPoint z(0.35, -0.2);
        const auto r = normal_operator_point(f, g, z, q);
        CHECK(std::abs(r.value - 4.0 * kPi * f(z)) < 1e-6 * std::abs(4.0 * kPi * f(z)));
    }
    SUBCASE("linearity on a two-term combination") {
        ScalarField f1 = pullback_phi([&](DiskPoint w) { return zernike(2, 1, g, w); });
        ScalarField f2 = pullback_phi([&](DiskPoint w) { return zernike(3, 0, g, w); });
        ScalarField mix{[&](DiskPoint z) { return f1(z) + 2.0 * f2(z); }, DiskModel::poincare,
                        true};
        const DiskPoint z(0.1, 0.45);
        const Complex lhs = normal_operator_point(mix, g, z, q).value;
        const Complex rhs = normal_operator_point(f1, g, z, q).value +
                            2.0 * normal_operator_point(f2, g, z, q).value;
        CHECK(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, std::abs(rhs)));
    }
    SUBCASE("angular sectors are preserved") {
        const int N = 4;
        ScalarField f = pullback_phi(
            [&](DiskPoint w) { return zernike(3, 1, g, w) / sigma_nk(3, 1, g); });
        DiskGrid out = DiskGrid::make(g, 4 * (N + 1), N + 2);
        QuadSpec qn = q;
        qn.n_angle = 256;
        for (int i = 0; i < out.n_rho(); ++i)
            for (int j = 0; j < out.n_omega(); ++j) {
                const DiskPoint z = phi_inv(std::polar(out.rho[i], out.omega[j]));
                out.samples(j, i) = normal_operator_point(f, g, z, qn).value;
            }
        CoeffTable c = analyze_disk(out, N);
        double leak = 0.0, keep = 0.0;
        c.for_each([&](int n, int k, Complex v) {
            if (n - 2 * k == 1)
                keep += std::norm(v);
            else
                leak += std::norm(v);
        });
        CHECK(std::sqrt(leak) < 1e-8 * std::sqrt(keep));
        // the kept sector realizes the predicted eigenvalue sigma^2 at (3,1)
        CHECK(std::abs(c.at(3, 1) - sigma_nk_sq(3, 1, g)) < 1e-6 * sigma_nk_sq(3, 1, g));
    }
}

TEST_CASE("backprojection surjectivity demo") {
    // For f = x * (pullback of a band-limited polynomial), the data function
    // built by solving the spectral system satisfies (I^H)# u = f.
    const GammaWeight g(0.0);
    const int N = 4;
    CoeffTable gcoef = CoeffTable::disk(g, N);
    gcoef.at(0, 0) = Complex(0.8, 0.0);
    gcoef.at(3, 1) = Complex(0.5, 0.3);
    gcoef.at(4, 4) = Complex(-0.2, 0.1);
    auto g_eucl = synth_disk_fn_euclid(gcoef);
    CoeffTable ucoef = CoeffTable::data(g, N, N);
    gcoef.for_each([&](int n, int k, Complex v) { ucoef.at(n, k) = v / sigma_nk(n, k, g); });
    DataFn u = synth_data_fn(ucoef);
    QuadSpec qb = q;
    qb.n_angle = 384;
    for (int i = 0; i < 20; ++i) {
        const DiskPoint z = std::polar(uniform(0.02, 0.9), uniform(0, kTwoPi));
        const Complex lhs = backproject_hyper(u, z, qb).value;
        const Complex rhs = bdf_x(z) * g_eucl(phi_map(z));
        CHECK(std::abs(lhs - rhs) < 1e-5 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("sharp data norm at gamma = 0") {
    // ||f||_s = (4 pi)^{-1/2} ||I f||_{s+1/2} in the paired coefficient norms
    const GammaWeight g(0.0);
    const int N = 5;
    CoeffTable truth = CoeffTable::disk(g, N);
    for (int n = 0; n <= N; ++n)
        for (int k = 0; k <= n; ++k) truth.at(n, k) = Complex(uniform(-1, 1), uniform(-1, 1));
    ScalarField f = synth_disk_field(truth);
    DataGrid grid = make_data_grid_for_band(g, N);
    forward_grid(f, grid, q);
    CoeffTable data = analyze_data(grid, N);
    for (double s : {0.0, 1.0}) {
        const double lhs = truth.sobolev_norm(s);
        const double rhs = data.sobolev_norm(s + 0.5) / std::sqrt(4.0 * kPi);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("stability probe reports finite two-sided constants") {
    for (double gv : {-0.5, 0.0, 1.0}) {
        for (double s : {0.0, 1.0}) {
            const StabilityReport rep = stability_probe(GammaWeight(gv), s, 20, 50, 12345);
            CHECK(rep.c1 > 0.0);
            CHECK(std::isfinite(rep.c1));
            CHECK(rep.c2 > 0.0);
            CHECK(std::isfinite(rep.c2));
            // per-probe two-sidedness holds by construction of the constants:
            // c1 ||Nf||_lower <= ||f||_s <= c2 ||Nf||_upper
            if (gv == 0.0) {
                // sigma^2 (n+1) = 4 pi collapses both ratios to 1/(4 pi)
                CHECK(rep.c1 == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-12));
                CHECK(rep.c2 == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-12));
            }
        }
    }
}
