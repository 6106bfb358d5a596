#include "xdisk/selftest.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "xdisk/gridfile.hpp"
#include "xdisk/parallel.hpp"
#include "xdisk/range.hpp"
#include "xdisk/spectral.hpp"

namespace xdisk::selftest {

namespace {

using Clock = std::chrono::steady_clock;

int tri(int n, int k) { return n * (n + 1) / 2 + k; }

double rel(double err, double scale) { return err / std::max(1.0, scale); }

// Forward transform of every normalized basis element at once: one pass over
// quadrature nodes per geodesic serves the whole (n,k) triangle.
std::vector<Eigen::MatrixXcd> forward_all_hat(GammaWeight g, int N, const DataGrid& grid,
                                              const QuadSpec& q) {
    const ZernikeBasis& basis = zernike_basis(g, N);
    const int n_pairs = tri(N, N) + 1;
    std::vector<Eigen::MatrixXcd> out(
        n_pairs, Eigen::MatrixXcd::Zero(grid.n_beta(), grid.n_alpha()));
    const double decay = 2.0 + 2.0 * g.value;
    const DeRule& rule = de_rule_cached(q.ts_level, decay);
    parallel_for(grid.n_beta(), [&](long j) {
        Eigen::MatrixXcd zv;
        std::vector<Complex> acc(n_pairs);
        for (int i = 0; i < grid.n_alpha(); ++i) {
            const GeodesicHoro geo(grid.beta[j], grid.a[i]);
            const double t0 = horo_vertex_time(geo);
            std::fill(acc.begin(), acc.end(), Complex(0.0, 0.0));
            for (int l = 0; l < rule.size(); ++l) {
                const double t = t0 + rule.nodes[l];
                const double w = rule.weights[l] * std::pow(geodesic_horo_x(geo, t), decay);
                basis.eval_all_hat(phi_map(geodesic_horo(geo, t).z), zv);
                for (int n = 0; n <= N; ++n)
                    for (int k = 0; k <= n; ++k) acc[tri(n, k)] += w * zv(n, k);
            }
            for (int p = 0; p < n_pairs; ++p) out[p](j, i) = acc[p];
        }
    });
    return out;
}

// Normal operator applied to every normalized basis element at a point.
std::vector<Complex> normal_all_hat(GammaWeight g, int N, DiskPoint z, const QuadSpec& q) {
    const ZernikeBasis& basis = zernike_basis(g, N);
    const int n_pairs = tri(N, N) + 1;
    std::vector<Complex> acc(n_pairs, Complex(0.0, 0.0));
    const double decay = 2.0 + 2.0 * g.value;
    const DeRule& rule = de_rule_cached(q.ts_level, decay);
    Eigen::MatrixXcd zv;
    std::vector<Complex> line(n_pairs);
    for (int jt = 0; jt < q.n_angle; ++jt) {
        const GeodesicHoro geo = footprint(UnitTangent{z, kTwoPi * jt / q.n_angle});
        const double t0 = horo_vertex_time(geo);
        std::fill(line.begin(), line.end(), Complex(0.0, 0.0));
        for (int l = 0; l < rule.size(); ++l) {
            const double t = t0 + rule.nodes[l];
            const double w = rule.weights[l] * std::pow(geodesic_horo_x(geo, t), decay);
            basis.eval_all_hat(phi_map(geodesic_horo(geo, t).z), zv);
            for (int n = 0; n <= N; ++n)
                for (int k = 0; k <= n; ++k) line[tri(n, k)] += w * zv(n, k);
        }
        const double amp = std::pow(mu_h(geo.finite_a()), -2.0 * g.value);
        for (int p = 0; p < n_pairs; ++p) acc[p] += amp * line[p];
    }
    for (int p = 0; p < n_pairs; ++p) acc[p] *= kTwoPi / q.n_angle / bdf_x(z);
    return acc;
}

Complex smooth_phantom_euclid(DiskPoint w) {
    return Complex(std::exp(-1.8 * std::norm(w - DiskPoint(0.25, -0.1))),
                   0.3 * std::sin(2.0 * w.real()) * w.imag());
}

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

class Runner {
public:
    Runner(const Options& opt, std::ostream* progress) : opt_(opt), progress_(progress) {}

    std::vector<CheckResult> run() {
        svd_triples();
        funcrel_normal0();
        funcrel_scalar();
        intertwine_forward();
        intertwine_backproject();
        adjoint_pairing();
        santalo_identity();
        range_forward();
        range_pminus();
        range_kernel();
        boundary_spectral();
        boundary_pv();
        appendixa_moments();
        cosphere_momentum_check();
        reconstruct_roundtrip();
        reconstruct_decay();
        stability_tame();
        return results_;
    }

private:
    bool want(const std::string& name) const {
        return opt_.only.empty() || name.rfind(opt_.only, 0) == 0;
    }

    template <typename Body>
    void check(int criterion, const std::string& name, double gamma, bool gamma_specific,
               double tolerance, Body&& body) {
        if (!want(name)) return;
        CheckResult r;
        r.criterion = criterion;
        r.name = name;
        r.gamma = gamma;
        r.gamma_specific = gamma_specific;
        r.tolerance = tolerance;
        const auto start = Clock::now();
        body(r);
        r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        r.pass = r.residual <= r.tolerance;
        results_.push_back(r);
        if (progress_) (*progress_) << format_line(r) << "\n" << std::flush;
    }

    std::mt19937_64 seeded(std::uint64_t salt) const { return std::mt19937_64(opt_.seed ^ salt); }

    // 1. Singular triples of the weighted transform.
    void svd_triples() {
        for (double gv : opt_.gammas) {
            check(1, "svd.triples", gv, true, 1e-6, [&](CheckResult& r) {
                const GammaWeight g(gv);
                const int N = opt_.svd_band;
                DataGrid grid = DataGrid::make(g, 4 * (N + 1) + 4, N + 2);
                const auto fwd = forward_all_hat(g, N, grid, opt_.quad);
                DataGrid model = grid, res = grid;
                double worst = 0.0;
                for (int n = 0; n <= N; ++n) {
                    for (int k = 0; k <= n; ++k) {
                        const double sig = sigma_nk(n, k, g);
                        for (int j = 0; j < grid.n_beta(); ++j)
                            for (int i = 0; i < grid.n_alpha(); ++i)
                                model.samples(j, i) =
                                    psi_nk_gamma_H(n, k, g, grid.beta[j], grid.a[i]);
                        res.samples = fwd[tri(n, k)] - sig * model.samples;
                        const double full_residual = res.norm() / sig;
                        model.samples = fwd[tri(n, k)];
                        const double ratio_dev = std::abs(model.norm() - sig) / sig;
                        worst = std::max({worst, full_residual, ratio_dev});
                    }
                }
                r.residual = worst;
                r.note = "n <= " + std::to_string(N) + ", norm ratio and full residual";
            });
        }
    }

    // 2. gamma = 0 functional relation: eigenvalues 4 pi / (n+1).
    void funcrel_normal0() {
        check(2, "funcrel.normal0", 0.0, true, 1e-6, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            const int N = opt_.svd_band;
            const ZernikeBasis& basis = zernike_basis(g, N);
            const DiskPoint pts[] = {std::polar(0.31, 0.4), std::polar(0.52, 2.1),
                                     std::polar(0.74, 4.9)};
            QuadSpec q = opt_.quad;
            q.n_angle = 256;
            std::vector<std::vector<Complex>> nf;
            std::vector<Eigen::MatrixXcd> fv;
            for (const DiskPoint& z : pts) {
                nf.push_back(normal_all_hat(g, N, z, q));
                Eigen::MatrixXcd zv;
                basis.eval_all_hat(phi_map(z), zv); // pullback basis value at z
                fv.push_back(zv);
            }
            double worst = 0.0;
            for (int n = 0; n <= N; ++n) {
                for (int k = 0; k <= n; ++k) {
                    Complex num(0.0, 0.0);
                    double den = 0.0;
                    for (std::size_t p = 0; p < 3; ++p) {
                        const Complex f = fv[p](n, k);
                        num += nf[p][tri(n, k)] * std::conj(f);
                        den += std::norm(f);
                    }
                    const double lam = (num / den).real();
                    const double expected = 4.0 * kPi / (n + 1.0);
                    worst = std::max(worst, std::abs(lam - expected) / expected);
                }
            }
            r.residual = worst;
            r.note = "rayleigh quotient over 3 interior points";
        });
    }

    // 2b. Scalar form of the functional relation, pure arithmetic.
    void funcrel_scalar() {
        for (double gv : opt_.gammas) {
            check(2, "funcrel.scalar", gv, true, 1e-12, [&](CheckResult& r) {
                const GammaWeight g(gv);
                double worst = 0.0;
                for (int n = 0; n <= 30; ++n)
                    for (int k = 0; k <= n; ++k)
                        worst = std::max(worst,
                                         std::abs(normal_eigenvalue(n, k, g) -
                                                  sigma_nk_sq(n, k, g)) /
                                             sigma_nk_sq(n, k, g));
                r.residual = worst;
                r.note = "n <= 30";
            });
        }
    }

    // 3. Forward intertwining through the projective equivalence.
    void intertwine_forward() {
        for (double gv : opt_.gammas) {
            check(3, "intertwine.forward", gv, true, 1e-7, [&](CheckResult& r) {
                const GammaWeight g(gv);
                auto rng = seeded(0x11);
                std::uniform_real_distribution<double> ub(0.0, kTwoPi), ua(-5.0, 5.0);
                ScalarField fe{smooth_phantom_euclid, DiskModel::euclid, false};
                const ScalarField fh = pullback_phi(smooth_phantom_euclid);
                double worst = 0.0;
                for (int i = 0; i < 200; ++i) {
                    const double beta = ub(rng), a = ua(rng);
                    const Complex lhs =
                        xray_hyper(fh, g, GeodesicHoro(beta, a), opt_.quad).value;
                    const Complex rhs =
                        mu_h(a) *
                        xray_euclid(fe, g, FanBeamCoord{beta, std::atan(a)}, opt_.quad).value;
                    worst = std::max(worst, rel(std::abs(lhs - rhs), std::abs(rhs)));
                }
                r.residual = worst;
                r.note = "200 random geodesics";
            });
        }
    }

    // 4. Backprojection intertwining.
    void intertwine_backproject() {
        check(4, "intertwine.backproject", 0.0, false, 1e-6, [&](CheckResult& r) {
            auto rng = seeded(0x22);
            std::uniform_real_distribution<double> ur(0.05, 0.9), uo(0.0, kTwoPi);
            DataFn u = [](double beta, double a) {
                const double mu2 = mu_h(a) * mu_h(a);
                return mu2 * Complex(std::cos(2.0 * beta), 0.4 * std::sin(beta)) /
                       (1.0 + 0.3 * a * mu2 * mu_h(a));
            };
            FanFn conj_u = [&](double beta, double alpha) {
                const double ca = std::cos(alpha);
                return u(beta, std::tan(alpha)) / (ca * ca);
            };
            QuadSpec qb = opt_.quad;
            qb.n_angle = 384;
            double worst = 0.0;
            for (int i = 0; i < 20; ++i) {
                const DiskPoint z = std::polar(ur(rng), uo(rng));
                const Complex lhs = backproject_hyper(u, z, qb).value;
                const Complex rhs = bdf_x(z) * backproject_euclid(conj_u, phi_map(z), qb).value;
                worst = std::max(worst, rel(std::abs(lhs - rhs), std::abs(lhs)));
            }
            r.residual = worst;
            r.note = "20 random interior points";
        });
    }

    // 4b. Adjoint pairing at gamma = 0.
    void adjoint_pairing() {
        check(4, "adjoint.pairing", 0.0, true, 1e-6, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            const ScalarField f = pullback_phi(smooth_phantom_euclid);
            QuadSpec qb = opt_.quad;
            qb.n_angle = 512;
            const GaussRule& gl_alpha = gauss_jacobi_cached(64, 0.0, 0.0);
            const GaussRule& gl_xi = gauss_jacobi_cached(32, 0.0, 0.0);
            double worst = 0.0;
            const std::pair<int, int> pairs[] = {{0, 0}, {1, 1}, {2, 1}, {3, 0}, {4, 2}};
            for (auto [nn, kk] : pairs) {
                DataFn u = [&, nn = nn, kk = kk](double beta, double a) {
                    return psi_nk_gamma_H(nn, kk, g, beta, a) +
                           0.5 * psi_nk_gamma_H(nn + 2, kk + 1, g, beta, a);
                };
                const int n_beta = 48;
                Complex lhs(0.0, 0.0);
                for (int j = 0; j < n_beta; ++j) {
                    const double beta = kTwoPi * j / n_beta;
                    for (int i = 0; i < gl_alpha.size(); ++i) {
                        const double alpha = gl_alpha.nodes[i] * kPi / 2.0;
                        const double a = std::tan(alpha);
                        const double jac = (kPi / 2.0) / std::pow(std::cos(alpha), 2.0);
                        lhs += gl_alpha.weights[i] * jac *
                               xray_hyper(f, g, GeodesicHoro(beta, a), opt_.quad).value *
                               std::conj(u(beta, a));
                    }
                }
                lhs *= kTwoPi / n_beta;
                Complex rhs(0.0, 0.0);
                const int n_omega = 40;
                for (int i = 0; i < gl_xi.size(); ++i) {
                    const double rho = std::sqrt(0.5 * (1.0 + gl_xi.nodes[i]));
                    for (int j = 0; j < n_omega; ++j) {
                        const DiskPoint w = std::polar(rho, kTwoPi * j / n_omega);
                        const DiskPoint z = phi_inv(w);
                        rhs += 0.25 * gl_xi.weights[i] * smooth_phantom_euclid(w) *
                               std::conj(backproject_hyper(u, z, qb).value / bdf_x(z));
                    }
                }
                rhs *= kTwoPi / n_omega;
                worst = std::max(worst, rel(std::abs(lhs - rhs), std::abs(lhs)));
            }
            r.residual = worst;
            r.note = "5 test pairs";
        });
    }

    // 5. Santalo identity.
    void santalo_identity() {
        check(5, "santalo.identity", 0.0, false, 1e-4, [&](CheckResult& r) {
            QuadSpec q = opt_.quad;
            q.n_angle = 128;
            q.n_chord = 48;
            using F = std::function<Complex(DiskPoint, double)>;
            const F cases[] = {
                [](DiskPoint z, double) { return Complex(bump((bdf_x(z) - 0.7) / 0.25), 0.0); },
                [](DiskPoint z, double) { return Complex(bump((bdf_x(z) - 0.55) / 0.3), 0.0); },
                [](DiskPoint z, double theta) {
                    return bump((bdf_x(z) - 0.65) / 0.3) *
                           Complex(1.0 + 0.5 * std::cos(theta),
                                   0.3 * std::sin(2.0 * theta + 1.0) + 0.2 * z.real());
                },
            };
            const double x_min[] = {0.44, 0.24, 0.34};
            double worst = 0.0;
            for (int c = 0; c < 3; ++c) {
                const SantaloResult s = santalo_check(cases[c], x_min[c], q);
                worst = std::max(worst, std::abs(s.geodesic_side - s.liouville_side) /
                                            std::abs(s.liouville_side));
            }
            r.residual = worst;
            r.note = "2 radial + 1 direction-dependent integrand";
        });
    }

    DataFn materialized_band_limited(const GammaWeight& g, int band, std::uint64_t salt,
                                     CoeffTable* table_out = nullptr) {
        auto rng = seeded(salt);
        std::uniform_real_distribution<double> ur(-1.0, 1.0);
        CoeffTable truth = CoeffTable::disk(g, band);
        for (int n = 0; n <= band; ++n)
            for (int k = 0; k <= n; ++k)
                truth.at(n, k) = Complex(ur(rng), ur(rng)) / (1.0 + n);
        DataGrid grid = make_data_grid_for_band(g, band);
        forward_grid(synth_disk_field(truth), grid, opt_.quad);
        CoeffTable data = analyze_data(grid, band);
        if (table_out) *table_out = data;
        return synth_data_fn(data);
    }

    // 6. Range characterization at gamma = 0: forward data passes.
    void range_forward() {
        check(6, "range.forward", 0.0, true, 1e-6, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            DataFn u = materialized_band_limited(g, 6, 0x61);
            RangeSpec spec;
            spec.max_degree = 8;
            spec.cminus_band = 8;
            const RangeVerdict v = range_test(u, g, spec);
            const double moment_resid =
                v.moments.max_in_band > 0.0 ? v.moments.max_out_of_band / v.moments.max_in_band
                                            : v.moments.max_out_of_band;
            r.residual = std::max(moment_resid, v.cminus_residual);
            std::ostringstream note;
            note << "moment residual " << moment_resid << ", C- residual " << v.cminus_residual;
            r.note = note.str();
        });
    }

    // 6c. P_- of odd band-limited data lands in the range.
    void range_pminus() {
        check(6, "range.pminus", 0.0, true, 1e-6, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            auto rng = seeded(0x62);
            std::uniform_real_distribution<double> ur(-1.0, 1.0);
            CoeffTable wtab = CoeffTable::data(g, 3, 5);
            for (int n = 0; n <= 3; ++n)
                for (int k = -5; k <= 5; ++k) wtab.at(n, k) = Complex(ur(rng), ur(rng));
            auto wp = std::make_shared<CoeffTable>(wtab);
            DataFn w = [wp](double beta, double a) {
                Complex acc(0.0, 0.0);
                for (int n = 0; n <= wp->n_max(); ++n)
                    for (int k = -wp->k_max(); k <= wp->k_max(); ++k)
                        acc += wp->at(n, k) * psi_phi_zero_H(n, k, ZeroBasisKind::phi, beta, a);
                return acc;
            };
            DataFn pu_raw = p_minus_H(w, HilbertSpec{});
            DataGrid pg = make_data_grid_for_band(g, 3);
            for (int j = 0; j < pg.n_beta(); ++j)
                for (int i = 0; i < pg.n_alpha(); ++i)
                    pg.samples(j, i) = pu_raw(pg.beta[j], pg.a[i]);
            DataFn pu = synth_data_fn(analyze_data(pg, 3));
            RangeSpec spec;
            spec.max_degree = 5;
            spec.cminus_band = 5;
            const RangeVerdict v = range_test(pu, g, spec);
            const double moment_resid =
                v.moments.max_in_band > 0.0 ? v.moments.max_out_of_band / v.moments.max_in_band
                                            : v.moments.max_out_of_band;
            r.residual = std::max(moment_resid, v.cminus_residual);
            r.note = "image of the odd-to-even boundary operator";
        });
    }

    // 6 (negative): injected kernel components trip both detectors.
    void range_kernel() {
        check(6, "range.kernel", 0.0, true, 0.0, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            DataFn u = materialized_band_limited(g, 4, 0x63);
            DataFn bad = [&, u](double beta, double a) {
                return u(beta, a) + 0.3 * psi_nk_gamma_H(2, -1, g, beta, a) +
                       0.2 * psi_nk_gamma_H(3, 5, g, beta, a);
            };
            RangeSpec spec;
            spec.max_degree = 6;
            spec.cminus_band = 6;
            const RangeVerdict v = range_test(bad, g, spec);
            bool m1 = false, m2 = false, c1 = false, c2 = false;
            for (auto [m, k] : v.moments.offenders) {
                m1 = m1 || (m == 2 && k == -1);
                m2 = m2 || (m == 3 && k == 5);
            }
            for (auto [n, k] : v.cminus_offenders) {
                c1 = c1 || (n == 2 && k == -1);
                c2 = c2 || (n == 3 && k == 5);
            }
            const bool detected = !v.moments_pass && !v.cminus_pass && m1 && m2 && c1 && c2;
            r.residual = detected ? 0.0 : 1.0;
            r.note = detected ? "both detectors flag (2,-1) and (3,5)"
                              : "kernel injection missed";
        });
    }

    // 7. Boundary operator spectra, spectral mode.
    void boundary_spectral() {
        check(7, "boundary.spectral", 0.0, true, 1e-8, [&](CheckResult& r) {
            auto rng = seeded(0x71);
            std::uniform_real_distribution<double> ub(0.0, kTwoPi), ua(-2.5, 2.5);
            HilbertSpec sp;
            double worst = 0.0;
            for (int n = 0; n <= 8; ++n) {
                for (int k = -10; k <= 10; ++k) {
                    DataFn psiH = [n, k](double b, double a) {
                        return psi_phi_zero_H(n, k, ZeroBasisKind::psi, b, a);
                    };
                    DataFn phiH = [n, k](double b, double a) {
                        return psi_phi_zero_H(n, k, ZeroBasisKind::phi, b, a);
                    };
                    DataFn cu = c_minus_H(psiH, sp);
                    DataFn pw = p_minus_H(phiH, sp);
                    const Complex lc = (k < 0)   ? Complex(0.0, -1.0)
                                       : (k > n) ? Complex(0.0, 1.0)
                                                 : Complex(0.0, 0.0);
                    const Complex lp = k_in_band(n, k) ? Complex(0.0, -2.0) : Complex(0.0, 0.0);
                    for (int i = 0; i < 4; ++i) {
                        const double beta = ub(rng), a = ua(rng);
                        const Complex ref = psiH(beta, a);
                        worst = std::max(worst, rel(std::abs(cu(beta, a) - lc * ref), 1.0));
                        worst = std::max(worst, rel(std::abs(pw(beta, a) - lp * ref), 1.0));
                    }
                }
            }
            r.residual = worst;
            r.note = "n <= 8, |k| <= 10; multiplier -i(1_{k<0} - 1_{k>n}) for C-, -2i 1_band for P-";
        });
    }

    // 7b. pv-mode cross-check.
    void boundary_pv() {
        check(7, "boundary.pv", 0.0, true, 1e-3, [&](CheckResult& r) {
            auto rng = seeded(0x72);
            std::uniform_real_distribution<double> ub(0.0, kTwoPi), ua(-2.0, 2.0);
            HilbertSpec pv;
            pv.mode = HilbertMode::pv;
            pv.n_pv = 300;
            double worst = 0.0;
            for (int n = 0; n <= 4; ++n) {
                for (int k : {-2, 0, n, n + 1}) {
                    DataFn psiH = [n, k](double b, double a) {
                        return psi_phi_zero_H(n, k, ZeroBasisKind::psi, b, a);
                    };
                    DataFn cu = c_minus_H(psiH, pv);
                    const Complex lc = (k < 0)   ? Complex(0.0, -1.0)
                                       : (k > n) ? Complex(0.0, 1.0)
                                                 : Complex(0.0, 0.0);
                    for (int i = 0; i < 3; ++i) {
                        const double beta = ub(rng), a = ua(rng);
                        worst = std::max(
                            worst, rel(std::abs(cu(beta, a) - lc * psiH(beta, a)), 1.0));
                    }
                }
            }
            r.residual = worst;
            r.note = "n <= 4 principal-value route";
        });
    }

    // 8. Moment equality between the geodesic-distance and vertex forms.
    void appendixa_moments() {
        check(8, "appendixa.moments", 0.0, false, 1e-8, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            std::vector<DataFn> corpus;
            corpus.push_back(materialized_band_limited(g, 5, 0x81));
            corpus.push_back(materialized_band_limited(g, 3, 0x82));
            {
                DataFn base = materialized_band_limited(g, 3, 0x83);
                corpus.push_back([base, g](double beta, double a) {
                    return base(beta, a) + 0.4 * psi_nk_gamma_H(1, -1, g, beta, a);
                });
            }
            double worst = 0.0;
            for (const DataFn& u : corpus) {
                for (int m = 0; m <= 8; ++m) {
                    for (double omega : {0.4, 2.0, 5.1}) {
                        const Complex lhs = bct_moment(u, m, omega);
                        const Complex rhs = vertex_moment_monomial(u, m, omega);
                        worst = std::max(worst, std::abs(lhs - rhs) /
                                                    std::max(0.01, std::abs(rhs)));
                    }
                }
            }
            r.residual = worst;
            r.note = "3 phantoms, m <= 8";
        });
    }

    // 9. Conserved cosphere momentum along geodesics.
    void cosphere_momentum_check() {
        check(9, "cosphere.momentum", 0.0, false, 1e-6, [&](CheckResult& r) {
            double worst_value = 0.0, worst_var = 0.0, worst_limit = 0.0;
            const double ts[] = {-3.0, -1.0, 0.0, 1.5, 3.0};
            for (double a : {0.7, -1.9, 3.3, 0.0}) {
                const GeodesicHoro g(0.5, a);
                double mean = 0.0;
                for (double t : ts) mean += cosphere_momentum(g, t, 1.0 + std::abs(a));
                mean /= 5.0;
                double var = 0.0;
                for (double t : ts) {
                    const double d = cosphere_momentum(g, t, 1.0 + std::abs(a)) - mean;
                    var += d * d;
                }
                worst_var = std::max(worst_var, var / 5.0);
                worst_value = std::max(worst_value, std::abs(mean + a));
                if (a != 0.0) {
                    worst_limit = std::max(worst_limit,
                                           std::abs(cosphere_xdot_over_x(g, 30.0) + 1.0));
                    worst_limit = std::max(worst_limit,
                                           std::abs(cosphere_xdot_over_x(g, -30.0) - 1.0));
                }
            }
            // variance gate is far tighter than the value gate; fold it in by
            // rescaling against its own tolerance
            const double var_scaled = worst_var / 1e-18 * 1e-6;
            r.residual = std::max({worst_value * 1e4, worst_limit, var_scaled});
            std::ostringstream note;
            note << "value err " << worst_value << " (tol 1e-10), variance " << worst_var
                 << " (tol 1e-18), end limits err " << worst_limit << " (tol 1e-6)";
            r.note = note.str();
        });
    }

    // 10. Reconstruction closes the loop on band-limited phantoms.
    void reconstruct_roundtrip() {
        for (double gv : opt_.gammas) {
            check(10, "reconstruct.roundtrip", gv, true, 1e-6, [&](CheckResult& r) {
                const GammaWeight g(gv);
                const int N = opt_.reconstruct_band;
                auto rng = seeded(0xA1);
                std::uniform_real_distribution<double> ur(-1.0, 1.0);
                CoeffTable truth = CoeffTable::disk(g, N);
                for (int n = 0; n <= N; ++n)
                    for (int k = 0; k <= n; ++k)
                        truth.at(n, k) = Complex(ur(rng), ur(rng)) / (1.0 + n);
                DataGrid grid = make_data_grid_for_band(g, N);
                forward_grid(synth_disk_field(truth), grid, opt_.quad);
                const ReconstructReport rep = svd_reconstruct(grid, N);
                r.residual = rep.disk_coeffs.distance(truth) / truth.l2_norm();
                r.note = "band " + std::to_string(N);
            });
        }
    }

    // 10b. Monotone error decay on a generic smooth phantom.
    void reconstruct_decay() {
        check(10, "reconstruct.decay", 0.0, true, 0.0, [&](CheckResult& r) {
            const GammaWeight g(0.0);
            const ScalarField f = pullback_phi(smooth_phantom_euclid);
            const int bands[] = {4, 8, 12, 16};
            DataGrid grid = make_data_grid_for_band(g, 16);
            forward_grid(f, grid, opt_.quad);
            DiskGrid truth = make_disk_grid_for_band(g, 16);
            for (int i = 0; i < truth.n_rho(); ++i)
                for (int j = 0; j < truth.n_omega(); ++j)
                    truth.samples(j, i) =
                        smooth_phantom_euclid(std::polar(truth.rho[i], truth.omega[j]));
            const double fn = truth.norm();
            std::vector<double> errs;
            for (int N : bands) {
                const ReconstructReport rep = svd_reconstruct(grid, N);
                DiskGrid recon = truth;
                auto fe = synth_disk_fn_euclid(rep.disk_coeffs);
                for (int i = 0; i < recon.n_rho(); ++i)
                    for (int j = 0; j < recon.n_omega(); ++j)
                        recon.samples(j, i) =
                            fe(std::polar(recon.rho[i], recon.omega[j])) -
                            truth.samples(j, i);
                errs.push_back(recon.norm() / fn);
            }
            bool monotone = true;
            for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] < errs[i - 1];
            r.residual = monotone ? 0.0 : 1.0;
            std::ostringstream note;
            note << "errors at N=4,8,12,16:";
            for (double e : errs) note << " " << e;
            r.note = note.str();
        });
    }

    // 11. Two-sided stability constants, reported.
    void stability_tame() {
        for (double gv : opt_.gammas) {
            check(11, "stability.tame", gv, true, 0.0, [&](CheckResult& r) {
                std::ostringstream note;
                bool ok = true;
                for (double s : {0.0, 1.0}) {
                    const StabilityReport rep =
                        stability_probe(GammaWeight(gv), s, 20, opt_.stability_probes,
                                        opt_.seed ^ 0xB1);
                    ok = ok && rep.c1 > 0.0 && std::isfinite(rep.c1) && rep.c2 > 0.0 &&
                         std::isfinite(rep.c2);
                    note << "s=" << s << ": C1=" << rep.c1 << " C2=" << rep.c2 << "  ";
                }
                r.residual = ok ? 0.0 : 1.0;
                r.note = note.str() + "(constants reported, not asserted)";
            });
        }
    }

    Options opt_;
    std::ostream* progress_;
    std::vector<CheckResult> results_;
};

} // namespace

std::vector<CheckResult> run(const Options& opt, std::ostream* progress) {
    opt.quad.validate();
    return Runner(opt, progress).run();
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

std::string format_line(const CheckResult& r) {
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << " [" << r.criterion << "] " << r.name;
    if (r.gamma_specific) os << " gamma=" << r.gamma;
    os << " residual=" << r.residual << " tol=" << r.tolerance << " (" << r.seconds << "s)";
    if (!r.note.empty()) os << "  -- " << r.note;
    return os.str();
}

} // namespace xdisk::selftest
