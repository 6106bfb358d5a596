#include "xdisk/spectral.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "xdisk/error.hpp"
#include "xdisk/parallel.hpp"

namespace xdisk {

namespace {

// e^{i m phi} for m in [-m_max, m_max], stored at index m + m_max.
void phase_table(double phi, int m_max, std::vector<Complex>& out) {
    out.assign(2 * m_max + 1, Complex(1.0, 0.0));
    const Complex step = std::polar(1.0, phi);
    Complex cur(1.0, 0.0);
    for (int m = 1; m <= m_max; ++m) {
        cur *= step;
        out[m_max + m] = cur;
        out[m_max - m] = std::conj(cur);
    }
}

} // namespace

// --- CoeffTable ----------------------------------------------------------------

CoeffTable::CoeffTable(GammaWeight g, CoeffSpace s, int n_max, int k_max)
    : gamma_(g), space_(s), n_max_(n_max), k_max_(k_max) {
    if (n_max < 0) throw DomainError("CoeffTable: n_max >= 0 required");
    if (space_ == CoeffSpace::disk) {
        c_ = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    } else {
        if (k_max < 0) throw DomainError("CoeffTable: k_max >= 0 required");
        c_ = Eigen::MatrixXcd::Zero(n_max + 1, 2 * k_max + 1);
    }
}

CoeffTable CoeffTable::disk(GammaWeight gamma, int n_max) {
    return CoeffTable(gamma, CoeffSpace::disk, n_max, n_max);
}

CoeffTable CoeffTable::data(GammaWeight gamma, int n_max, int k_max) {
    if (k_max < 0) k_max = n_max + 8;
    return CoeffTable(gamma, CoeffSpace::data, n_max, k_max);
}

bool CoeffTable::holds(int n, int k) const {
    if (n < 0 || n > n_max_) return false;
    return space_ == CoeffSpace::disk ? (k >= 0 && k <= n) : (std::abs(k) <= k_max_);
}

Complex CoeffTable::at(int n, int k) const {
    if (!holds(n, k)) throw DomainError("CoeffTable: index outside the stored window");
    return space_ == CoeffSpace::disk ? c_(n, k) : c_(n, k + k_max_);
}

Complex& CoeffTable::at(int n, int k) {
    if (!holds(n, k)) throw DomainError("CoeffTable: index outside the stored window");
    return space_ == CoeffSpace::disk ? c_(n, k) : c_(n, k + k_max_);
}

double CoeffTable::sobolev_norm(double s) const {
    double acc = 0.0;
    for_each([&](int n, int, Complex v) {
        acc += std::pow(n + 1.0 + gamma_.value, 2.0 * s) * std::norm(v);
    });
    return std::sqrt(acc);
}

double CoeffTable::distance(const CoeffTable& other) const {
    if (space_ != other.space_ || n_max_ != other.n_max_ || k_max_ != other.k_max_)
        throw GridError("CoeffTable::distance: incompatible tables");
    return (c_ - other.c_).norm();
}

CoeffTable CoeffTable::in_band_part() const {
    CoeffTable out = *this;
    out.c_.setZero();
    for_each([&](int n, int k, Complex v) {
        if (k_in_band(n, k)) out.at(n, k) = v;
    });
    return out;
}

CoeffTable CoeffTable::out_of_band_part() const {
    CoeffTable out = *this;
    out.c_.setZero();
    for_each([&](int n, int k, Complex v) {
        if (!k_in_band(n, k)) out.at(n, k) = v;
    });
    return out;
}

// --- grids ----------------------------------------------------------------------

DataGrid DataGrid::make(GammaWeight gamma, int n_beta, int n_alpha) {
    if (n_beta < 4 || n_alpha < 1) throw GridError("DataGrid: grid too small");
    DataGrid g{gamma, {}, {}, {}, {}, {}, {}};
    g.beta = periodic_nodes(n_beta);
    const GaussRule rule = gauss_jacobi(n_alpha, gamma.value + 0.5, gamma.value + 0.5);
    g.x = rule.nodes;
    g.alpha.resize(n_alpha);
    g.a.resize(n_alpha);
    g.w_meas.resize(n_alpha);
    for (int i = 0; i < n_alpha; ++i) {
        const double x = rule.nodes[i];
        g.alpha[i] = std::asin(x);
        g.a[i] = std::tan(g.alpha[i]);
        g.w_meas[i] = rule.weights[i] * std::pow(1.0 - x * x, -2.0 * gamma.value - 2.0);
    }
    g.samples = Eigen::MatrixXcd::Zero(n_beta, n_alpha);
    return g;
}

Complex DataGrid::inner(const DataGrid& v) const {
    if (v.n_beta() != n_beta() || v.n_alpha() != n_alpha())
        throw GridError("DataGrid::inner: shape mismatch");
    Complex acc(0.0, 0.0);
    for (int i = 0; i < n_alpha(); ++i) {
        Complex col(0.0, 0.0);
        for (int j = 0; j < n_beta(); ++j) col += samples(j, i) * std::conj(v.samples(j, i));
        acc += w_meas[i] * col;
    }
    return acc * (kTwoPi / n_beta());
}

double DataGrid::norm() const { return std::sqrt(std::abs(inner(*this))); }

DiskGrid DiskGrid::make(GammaWeight gamma, int n_omega, int n_rho) {
    if (n_omega < 4 || n_rho < 1) throw GridError("DiskGrid: grid too small");
    DiskGrid g{gamma, {}, {}, {}, {}, {}};
    g.omega = periodic_nodes(n_omega);
    const GaussRule rule = gauss_jacobi(n_rho, gamma.value, 0.0);
    g.xi = rule.nodes;
    g.rho.resize(n_rho);
    g.w_meas.resize(n_rho);
    for (int i = 0; i < n_rho; ++i) {
        g.rho[i] = std::sqrt(0.5 * (1.0 + rule.nodes[i]));
        g.w_meas[i] = std::pow(2.0, -gamma.value - 2.0) * rule.weights[i];
    }
    g.samples = Eigen::MatrixXcd::Zero(n_omega, n_rho);
    return g;
}

Complex DiskGrid::inner(const DiskGrid& v) const {
    if (v.n_omega() != n_omega() || v.n_rho() != n_rho())
        throw GridError("DiskGrid::inner: shape mismatch");
    Complex acc(0.0, 0.0);
    for (int i = 0; i < n_rho(); ++i) {
        Complex col(0.0, 0.0);
        for (int j = 0; j < n_omega(); ++j) col += samples(j, i) * std::conj(v.samples(j, i));
        acc += w_meas[i] * col;
    }
    return acc * (kTwoPi / n_omega());
}

double DiskGrid::norm() const { return std::sqrt(std::abs(inner(*this))); }

int recommended_n_beta(int n_max, int k_extra) {
    const int from_alias = 4 * n_max + 4 * k_extra + 8;
    const int from_spec = 4 * (n_max + 1);
    const int n = std::max(from_alias, from_spec);
    return n + (4 - n % 4) % 4;
}

int recommended_n_alpha(int n_max) { return n_max + 2; }

DataGrid make_data_grid_for_band(GammaWeight gamma, int n_max, int k_extra) {
    return DataGrid::make(gamma, recommended_n_beta(n_max, k_extra), recommended_n_alpha(n_max));
}

DiskGrid make_disk_grid_for_band(GammaWeight gamma, int n_max) {
    return DiskGrid::make(gamma, recommended_n_beta(n_max, 0), n_max + 2);
}

// --- analysis / synthesis -------------------------------------------------------

CoeffTable analyze_data(const DataGrid& u, int n_max, int k_max) {
    if (u.n_beta() < 4 * (n_max + 1))
        throw GridError("analyze_data: anti-aliasing bound n_beta >= 4 (n_max + 1) violated");
    if (u.n_alpha() < n_max + 1)
        throw GridError("analyze_data: need at least n_max + 1 nodes in the a-direction");
    CoeffTable out = CoeffTable::data(u.gamma, n_max, k_max);
    const int K = out.k_max();
    const int M = n_max + 2 * K;
    const double gv = u.gamma.value;

    JacobiFamily fam(u.gamma, n_max);
    Eigen::VectorXd p;
    std::vector<Complex> ph;
    for (int i = 0; i < u.n_alpha(); ++i) {
        const double x = u.x[i];
        fam.eval_all(x, p);
        // w_meas carries the measure; conj(psi^H) contributes (1-x^2)^{gamma+1}
        const double wi = u.w_meas[i] * std::pow(1.0 - x * x, gv + 1.0);
        for (int j = 0; j < u.n_beta(); ++j) {
            phase_table(-(u.beta[j] + u.alpha[i] + kPi / 2.0), M, ph);
            const Complex uw = wi * u.samples(j, i);
            for (int n = 0; n <= n_max; ++n) {
                const Complex up = uw * p[n];
                for (int k = -K; k <= K; ++k) out.at(n, k) += up * ph[M + (n - 2 * k)];
            }
        }
    }
    const double beta_w = kTwoPi / u.n_beta();
    for (int n = 0; n <= n_max; ++n)
        for (int k = -K; k <= K; ++k) out.at(n, k) *= beta_w;
    return out;
}

void synthesize_data(const CoeffTable& c, DataGrid& grid) {
    if (c.space() != CoeffSpace::data) throw GridError("synthesize_data: data table required");
    const int n_max = c.n_max();
    const int K = c.k_max();
    const int M = n_max + 2 * K;
    const double gv = grid.gamma.value;
    JacobiFamily fam(grid.gamma, n_max);
    Eigen::VectorXd p;
    std::vector<Complex> ph;
    for (int i = 0; i < grid.n_alpha(); ++i) {
        const double x = grid.x[i];
        fam.eval_all(x, p);
        const double amp = std::pow(1.0 - x * x, gv + 1.0); // mu_h (cos alpha)^{2 gamma + 1}
        for (int j = 0; j < grid.n_beta(); ++j) {
            phase_table(grid.beta[j] + grid.alpha[i] + kPi / 2.0, M, ph);
            Complex acc(0.0, 0.0);
            for (int n = 0; n <= n_max; ++n) {
                Complex row(0.0, 0.0);
                for (int k = -K; k <= K; ++k) row += c.at(n, k) * ph[M + (n - 2 * k)];
                acc += row * p[n];
            }
            grid.samples(j, i) = amp * acc;
        }
    }
}

CoeffTable analyze_disk(const DiskGrid& f, int n_max) {
    if (f.n_omega() < 2 * (n_max + 1))
        throw GridError("analyze_disk: angular grid too coarse for the band limit");
    if (f.n_rho() < n_max + 1)
        throw GridError("analyze_disk: radial grid too coarse for the band limit");
    CoeffTable out = CoeffTable::disk(f.gamma, n_max);
    const ZernikeBasis& basis = zernike_basis(f.gamma, n_max);
    Eigen::MatrixXcd zv;
    for (int i = 0; i < f.n_rho(); ++i) {
        for (int j = 0; j < f.n_omega(); ++j) {
            basis.eval_all_hat(std::polar(f.rho[i], f.omega[j]), zv);
            const Complex fw = f.w_meas[i] * f.samples(j, i);
            for (int n = 0; n <= n_max; ++n)
                for (int k = 0; k <= n; ++k) out.at(n, k) += fw * std::conj(zv(n, k));
        }
    }
    for (int n = 0; n <= n_max; ++n)
        for (int k = 0; k <= n; ++k) out.at(n, k) *= kTwoPi / f.n_omega();
    return out;
}

void synthesize_disk(const CoeffTable& c, DiskGrid& grid) {
    if (c.space() != CoeffSpace::disk) throw GridError("synthesize_disk: disk table required");
    const ZernikeBasis& basis = zernike_basis(grid.gamma, c.n_max());
    Eigen::MatrixXcd zv;
    for (int i = 0; i < grid.n_rho(); ++i) {
        for (int j = 0; j < grid.n_omega(); ++j) {
            basis.eval_all_hat(std::polar(grid.rho[i], grid.omega[j]), zv);
            Complex acc(0.0, 0.0);
            for (int n = 0; n <= c.n_max(); ++n)
                for (int k = 0; k <= n; ++k) acc += c.at(n, k) * zv(n, k);
            grid.samples(j, i) = acc;
        }
    }
}

DataFn synth_data_fn(const CoeffTable& c) {
    if (c.space() != CoeffSpace::data) throw GridError("synth_data_fn: data table required");
    auto table = std::make_shared<const CoeffTable>(c);
    auto fam = std::make_shared<const JacobiFamily>(c.gamma(), c.n_max());
    return [table, fam](double beta, double a) {
        const double alpha = std::atan(a);
        const double x = std::sin(alpha);
        Eigen::VectorXd p;
        fam->eval_all(x, p);
        const double amp = std::pow(1.0 - x * x, table->gamma().value + 1.0);
        Complex acc(0.0, 0.0);
        for (int n = 0; n <= table->n_max(); ++n)
            for (int k = -table->k_max(); k <= table->k_max(); ++k)
                acc += table->at(n, k) * p[n] *
                       std::polar(1.0, (n - 2.0 * k) * (beta + alpha + kPi / 2.0));
        return amp * acc;
    };
}

std::function<Complex(DiskPoint)> synth_disk_fn_euclid(const CoeffTable& c) {
    if (c.space() != CoeffSpace::disk)
        throw GridError("synth_disk_fn_euclid: disk table required");
    auto table = std::make_shared<const CoeffTable>(c);
    const ZernikeBasis* basis = &zernike_basis(c.gamma(), c.n_max());
    return [table, basis](DiskPoint w) {
        Eigen::MatrixXcd zv;
        basis->eval_all_hat(w, zv);
        Complex acc(0.0, 0.0);
        for (int n = 0; n <= table->n_max(); ++n)
            for (int k = 0; k <= n; ++k) acc += table->at(n, k) * zv(n, k);
        return acc;
    };
}

ScalarField synth_disk_field(const CoeffTable& c) {
    return pullback_phi(synth_disk_fn_euclid(c));
}

BatchStats forward_grid(const ScalarField& f, DataGrid& out, const QuadSpec& q) {
    BatchStats stats;
    std::vector<BatchStats> per_line(out.n_beta());
    parallel_for(out.n_beta(), [&](long j) {
        for (int i = 0; i < out.n_alpha(); ++i) {
            const auto r = xray_hyper(f, out.gamma, GeodesicHoro(out.beta[j], out.a[i]), q);
            out.samples(j, i) = r.value;
            if (!r.converged) ++per_line[j].flagged;
            per_line[j].max_err = std::max(per_line[j].max_err, r.err);
        }
    });
    for (const auto& s : per_line) {
        stats.flagged += s.flagged;
        stats.max_err = std::max(stats.max_err, s.max_err);
    }
    return stats;
}

ReconstructReport svd_reconstruct(const DataGrid& u, int n_max, double filter_lambda) {
    CoeffTable data = analyze_data(u, n_max);
    ReconstructReport rep{CoeffTable::disk(u.gamma, n_max), data.out_of_band_part(), 0.0, 0.0};
    for (int n = 0; n <= n_max; ++n) {
        for (int k = 0; k <= n; ++k) {
            const double sig = sigma_nk(n, k, u.gamma);
            const double mult = sig / (sig * sig + filter_lambda * filter_lambda);
            rep.disk_coeffs.at(n, k) = data.at(n, k) * mult;
        }
    }
    rep.in_band_norm = data.in_band_part().l2_norm();
    rep.out_of_band_norm = rep.out_of_band.l2_norm();
    return rep;
}

// --- distinguished operators ----------------------------------------------------

namespace {

template <typename F>
Complex fd_d1(F&& f, double h) {
    return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}

template <typename F>
Complex fd_d2(F&& f, double h) {
    return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) /
           (12.0 * h * h);
}

} // namespace

Complex apply_L_gamma_H(const ScalarField& f, GammaWeight gamma, DiskPoint z, const FdSpec& fd) {
    if (f.model != DiskModel::poincare)
        throw DomainError("apply_L_gamma_H: Poincare-model field required");
    if (!is_interior(z)) throw DomainError("apply_L_gamma_H: interior point required");
    const double x0 = bdf_x(z);
    const double om0 = std::arg(z);
    auto F = [&](double x, double om) {
        const double r = std::sqrt((1.0 - x) / (1.0 + x));
        return f(std::polar(r, om));
    };
    double hx = fd.h;
    if (fd.scale_near_boundary) hx = std::min(fd.h, std::min(x0, 1.0 - x0) / 4.0);
    if (!(hx > 0.0)) throw DomainError("apply_L_gamma_H: stencil leaves the domain");
    const Complex F_x = fd_d1([&](double s) { return F(x0 + s, om0); }, hx);
    const Complex F_xx = fd_d2([&](double s) { return F(x0 + s, om0); }, hx);
    const Complex F_ww = fd_d2([&](double s) { return F(x0, om0 + s); }, fd.h);
    const double g = gamma.value;
    return -(1.0 - x0 * x0) * F_xx - ((2.0 * g + 1.0) / x0 - (2.0 * g + 3.0) * x0) * F_x -
           F_ww / (1.0 - x0 * x0) + (1.0 + g) * (1.0 + g) * F(x0, om0);
}

Complex apply_L_gamma_E(const std::function<Complex(DiskPoint)>& f, GammaWeight gamma,
                        DiskPoint w, const FdSpec& fd) {
    const double rho0 = std::abs(w);
    if (rho0 >= 1.0 || rho0 == 0.0)
        throw DomainError("apply_L_gamma_E: interior non-origin point required");
    const double om0 = std::arg(w);
    auto F = [&](double rho, double om) { return f(std::polar(rho, om)); };
    double hr = fd.h;
    if (fd.scale_near_boundary) hr = std::min(fd.h, std::min(rho0, 1.0 - rho0) / 4.0);
    const Complex F_r = fd_d1([&](double s) { return F(rho0 + s, om0); }, hr);
    const Complex F_rr = fd_d2([&](double s) { return F(rho0 + s, om0); }, hr);
    const Complex F_ww = fd_d2([&](double s) { return F(rho0, om0 + s); }, fd.h);
    const double g = gamma.value;
    const double A = 1.0 - rho0 * rho0;
    return -A * F_rr - (A / rho0 - 2.0 * (g + 1.0) * rho0) * F_r - F_ww / (rho0 * rho0) +
           (1.0 + g) * (1.0 + g) * F(rho0, om0);
}

Complex apply_T_gamma_H(const DataFn& u, GammaWeight gamma, double beta, double a,
                        const FdSpec& fd) {
    const double hb = fd.h;
    const double ha = fd.h * (1.0 + a * a);
    const double s = 1.0 + a * a;
    const Complex u0 = u(beta, a);
    const Complex u_b = fd_d1([&](double t) { return u(beta + t, a); }, hb);
    const Complex u_bb = fd_d2([&](double t) { return u(beta + t, a); }, hb);
    const Complex u_a = fd_d1([&](double t) { return u(beta, a + t); }, ha);
    const Complex u_aa = fd_d2([&](double t) { return u(beta, a + t); }, ha);
    auto du_b = [&](double da) { return fd_d1([&](double t) { return u(beta + t, a + da); }, hb); };
    const Complex u_ba = fd_d1(du_b, ha);
    const double g = gamma.value;
    const Complex T = u_b - s * u_a;
    const Complex T2 = u_bb - 2.0 * s * u_ba + s * s * u_aa + 2.0 * a * s * u_a;
    return -T2 + 2.0 * (g + 1.0) * a * T + (g * g - 2.0 * (g + 1.0) * a * a - 1.0) * u0;
}

Flagged<Complex> normal_operator_point(const ScalarField& f, GammaWeight gamma, DiskPoint z,
                                       const QuadSpec& q) {
    if (!is_interior(z)) throw DomainError("normal_operator_point: interior point required");
    Complex fine(0.0, 0.0), coarse(0.0, 0.0);
    double inner_err = 0.0;
    bool inner_ok = true;
    const int n = q.n_angle + (q.n_angle % 2);
    for (int j = 0; j < n; ++j) {
        const double theta = kTwoPi * j / n;
        const GeodesicHoro g = footprint(UnitTangent{z, theta});
        const auto r = xray_hyper(f, gamma, g, q);
        const Complex v = std::pow(mu_h(g.finite_a()), -2.0 * gamma.value) * r.value;
        inner_err = std::max(inner_err, r.err);
        inner_ok = inner_ok && r.converged;
        fine += v;
        if (j % 2 == 0) coarse += v;
    }
    fine *= kTwoPi / n;
    coarse *= kTwoPi / (n / 2);
    const double outer_err = std::abs(fine - coarse);
    return {fine / bdf_x(z), outer_err + inner_err,
            inner_ok && outer_err <= q.abs_tol * std::max(1.0, std::abs(fine))};
}

StabilityReport stability_probe(GammaWeight gamma, double s, int band, int n_probes,
                                std::uint64_t seed) {
    if (band < 0 || n_probes < 1) throw DomainError("stability_probe: bad probe configuration");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    StabilityReport rep;
    rep.s = s;
    rep.gamma = gamma.value;
    rep.lower_exponent = s + std::min(1.0, 1.0 + gamma.value);
    rep.upper_exponent = s + std::max(1.0, 1.0 + gamma.value);
    rep.n_probes = n_probes;
    rep.c1 = std::numeric_limits<double>::infinity();
    rep.c2 = 0.0;
    for (int p = 0; p < n_probes; ++p) {
        CoeffTable f = CoeffTable::disk(gamma, band);
        CoeffTable nf = CoeffTable::disk(gamma, band);
        for (int n = 0; n <= band; ++n) {
            for (int k = 0; k <= n; ++k) {
                const Complex c(gauss(rng), gauss(rng));
                f.at(n, k) = c;
                nf.at(n, k) = c * sigma_nk_sq(n, k, gamma);
            }
        }
        const double fs = f.sobolev_norm(s);
        rep.c1 = std::min(rep.c1, fs / nf.sobolev_norm(rep.lower_exponent));
        rep.c2 = std::max(rep.c2, fs / nf.sobolev_norm(rep.upper_exponent));
    }
    return rep;
}

} // namespace xdisk
