// Command-line driver: phantoms, forward/backprojection, SVD reconstruction,
// range tests, singular values, and the acceptance self-test.
//
// Exit codes: 0 all pass, 1 check failure, 2 input/schema error,
//             3 quadrature non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "xdisk/error.hpp"
#include "xdisk/gridfile.hpp"
#include "xdisk/range.hpp"
#include "xdisk/selftest.hpp"
#include "xdisk/spectral.hpp"

using namespace xdisk;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitQuadFailure = 3;

struct JobConfig {
    double gamma = 0.0;
    int band = 8;
    std::string grid = "auto";
    int quad_level = 2;
    double tol = 1e-6;
    std::uint64_t seed = 20240901;
    double filter = 0.0;
    std::string in_path, out_path, truth_path, summary_path;
    std::string only;
    std::string format = "csv";
    std::string phantom;
};

std::pair<int, int> parse_grid(const std::string& s, int def1, int def2) {
    if (s == "auto") return {def1, def2};
    int a = 0, b = 0;
    if (std::sscanf(s.c_str(), "%dx%d", &a, &b) != 2 || a < 1 || b < 1)
        throw DomainError("bad --grid value '" + s + "', expected like 64x12");
    return {a, b};
}

QuadSpec quad_of(const JobConfig& cfg) {
    QuadSpec q;
    q.ts_level = cfg.quad_level;
    q.abs_tol = std::min(1e-9, cfg.tol);
    return q;
}

void emit_summary(const JobConfig& cfg, const ordered_json& j) {
    if (cfg.summary_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(cfg.summary_path);
        out << j.dump(2) << "\n";
    }
}

void write_output(const JobConfig& cfg, const GridFile& f) {
    if (cfg.out_path.empty()) throw DomainError("--out is required");
    if (cfg.format == "csv") {
        write_gridfile(f, cfg.out_path);
    } else if (cfg.format == "pgm") {
        write_pgm(f.samples, cfg.out_path);
    } else {
        throw DomainError("unknown --format '" + cfg.format + "'");
    }
}

// Euclidean-model representative of a phantom descriptor. Descriptors are
// '+'-joined terms: zernike:n,k[:re[,im]] | bump:x0,w | generic
std::function<Complex(DiskPoint)> parse_phantom(const std::string& desc, GammaWeight gamma,
                                                int band) {
    std::vector<std::function<Complex(DiskPoint)>> terms;
    std::stringstream ss(desc);
    std::string part;
    while (std::getline(ss, part, '+')) {
        if (part.rfind("zernike:", 0) == 0) {
            int n = -1, k = -1;
            double re = 1.0, im = 0.0;
            const int got =
                std::sscanf(part.c_str(), "zernike:%d,%d:%lf,%lf", &n, &k, &re, &im);
            if (got < 2) throw DomainError("bad phantom term '" + part + "'");
            if (n > band) throw DomainError("phantom degree exceeds --band");
            if (!k_in_band(n, k)) throw DomainError("phantom index k outside [0,n]");
            const Complex c(re, im);
            const double sig = sigma_nk(n, k, gamma);
            terms.push_back([n, k, c, sig, gamma](DiskPoint w) {
                return c * zernike(n, k, gamma, w) / sig;
            });
        } else if (part.rfind("bump:", 0) == 0) {
            double x0 = 0.0, wd = 0.0;
            if (std::sscanf(part.c_str(), "bump:%lf,%lf", &x0, &wd) != 2 || wd <= 0.0)
                throw DomainError("bad phantom term '" + part + "'");
            terms.push_back([x0, wd](DiskPoint w) {
                // radial in the hyperbolic bdf: x o Phi^{-1} = sqrt(1 - |w|^2)
                const double x = std::sqrt(std::max(0.0, 1.0 - std::norm(w)));
                const double t = (x - x0) / wd;
                return std::abs(t) < 1.0 ? Complex(std::exp(1.0 - 1.0 / (1.0 - t * t)), 0.0)
                                         : Complex(0.0, 0.0);
            });
        } else if (part == "generic") {
            terms.push_back([](DiskPoint w) {
                return Complex(std::exp(0.9 * w.real() - 0.4 * std::norm(w)) *
                                   (1.0 + 0.3 * w.imag()),
                               0.2 * std::sin(w.real() + 2.0 * w.imag()));
            });
        } else {
            throw DomainError("unknown phantom term '" + part + "'");
        }
    }
    if (terms.empty()) throw DomainError("empty phantom descriptor");
    return [terms](DiskPoint w) {
        Complex acc(0.0, 0.0);
        for (const auto& t : terms) acc += t(w);
        return acc;
    };
}

int cmd_phantom(const JobConfig& cfg) {
    const GammaWeight g(cfg.gamma);
    auto fe = parse_phantom(cfg.phantom, g, cfg.band);
    auto [n1, n2] = parse_grid(cfg.grid, recommended_n_beta(cfg.band, 0), cfg.band + 2);
    DiskGrid grid = DiskGrid::make(g, n1, n2);
    for (int i = 0; i < grid.n_rho(); ++i)
        for (int j = 0; j < grid.n_omega(); ++j)
            grid.samples(j, i) = fe(std::polar(grid.rho[i], grid.omega[j]));
    write_output(cfg, to_gridfile(grid));
    ordered_json j;
    j["command"] = "phantom";
    j["descriptor"] = cfg.phantom;
    j["gamma"] = cfg.gamma;
    j["grid"] = {grid.n_omega(), grid.n_rho()};
    j["norm"] = grid.norm();
    j["out"] = cfg.out_path;
    emit_summary(cfg, j);
    return kExitOk;
}

int cmd_forward(const JobConfig& cfg) {
    const GridFile in = read_gridfile(cfg.in_path);
    DiskGrid fgrid = disk_from_gridfile(in);
    const GammaWeight g = fgrid.gamma;
    CoeffTable fc = analyze_disk(fgrid, cfg.band);
    ScalarField f = synth_disk_field(fc);

    auto [nb, na] =
        parse_grid(cfg.grid, recommended_n_beta(cfg.band, 8), recommended_n_alpha(cfg.band));
    DataGrid out = DataGrid::make(g, nb, na);
    const QuadSpec q = quad_of(cfg);
    const BatchStats stats = forward_grid(f, out, q);
    write_output(cfg, to_gridfile(out));

    // consistency of the computed data with the singular-value prediction
    CoeffTable predicted = CoeffTable::data(g, cfg.band);
    fc.for_each([&](int n, int k, Complex v) { predicted.at(n, k) = v * sigma_nk(n, k, g); });
    CoeffTable actual = analyze_data(out, cfg.band);
    const double pn = predicted.l2_norm();
    const double svd_consistency = pn > 0.0 ? actual.distance(predicted) / pn : 0.0;

    ordered_json j;
    j["command"] = "forward";
    j["gamma"] = g.value;
    j["band"] = cfg.band;
    j["grid"] = {out.n_beta(), out.n_alpha()};
    j["flagged"] = stats.flagged;
    j["max_quadrature_err"] = stats.max_err;
    j["svd_consistency"] = svd_consistency;
    j["out"] = cfg.out_path;
    emit_summary(cfg, j);
    if (stats.flagged > 0) return kExitQuadFailure;
    return kExitOk;
}

// Interpolating evaluator for grid data: trigonometric in beta, barycentric
// Lagrange in the x = sin(atan(a)) variable.
DataFn grid_interpolant(const DataGrid& g) {
    const int nb = g.n_beta(), na = g.n_alpha();
    // Fourier coefficients per a-column
    auto modes = std::make_shared<Eigen::MatrixXcd>(nb, na);
    for (int i = 0; i < na; ++i)
        for (int m = 0; m < nb; ++m) {
            Complex acc(0.0, 0.0);
            for (int j = 0; j < nb; ++j)
                acc += g.samples(j, i) * std::polar(1.0, -kTwoPi * m * j / nb);
            (*modes)(m, i) = acc / static_cast<double>(nb);
        }
    auto xs = std::make_shared<Eigen::VectorXd>(g.x);
    auto bw = std::make_shared<Eigen::VectorXd>(na);
    for (int i = 0; i < na; ++i) {
        double w = 1.0;
        for (int l = 0; l < na; ++l)
            if (l != i) w *= ((*xs)[i] - (*xs)[l]);
        (*bw)[i] = 1.0 / w;
    }
    const int nbc = nb;
    return [modes, xs, bw, nbc](double beta, double a) {
        const double x = std::sin(std::atan(a));
        const int na_l = static_cast<int>(xs->size());
        // barycentric weights in x per column, then trig sum in beta
        Eigen::VectorXcd col(na_l);
        double denom = 0.0;
        Eigen::VectorXd lam(na_l);
        for (int i = 0; i < na_l; ++i) {
            const double dx = x - (*xs)[i];
            if (std::abs(dx) < 1e-14) {
                lam.setZero();
                lam[i] = 1.0;
                denom = 1.0;
                break;
            }
            lam[i] = (*bw)[i] / dx;
            denom += lam[i];
        }
        Complex acc(0.0, 0.0);
        for (int m = 0; m < nbc; ++m) {
            const int freq = (m <= nbc / 2) ? m : m - nbc;
            Complex row(0.0, 0.0);
            for (int i = 0; i < na_l; ++i) row += lam[i] * (*modes)(m, i);
            acc += row * std::polar(1.0, freq * beta);
        }
        return acc / denom;
    };
}

int cmd_backproject(const JobConfig& cfg) {
    const GridFile in = read_gridfile(cfg.in_path);
    DataGrid ugrid = data_from_gridfile(in);
    const GammaWeight g = ugrid.gamma;
    DataFn u = grid_interpolant(ugrid);
    auto [nw, nr] =
        parse_grid(cfg.grid, recommended_n_beta(cfg.band, 0), recommended_n_alpha(cfg.band));
    DiskGrid out = DiskGrid::make(g, nw, nr);
    const QuadSpec q0 = quad_of(cfg);
    int flagged = 0;
    double max_err = 0.0;
    for (int i = 0; i < out.n_rho(); ++i)
        for (int j = 0; j < out.n_omega(); ++j) {
            const DiskPoint z = phi_inv(std::polar(out.rho[i], out.omega[j]));
            // fibers through points near the rim oscillate on the scale x(z)
            QuadSpec q = q0;
            q.n_angle = std::max({q.n_angle, 256,
                                  2 * static_cast<int>(std::ceil(48.0 / bdf_x(z)))});
            const auto r = backproject_hyper(u, z, q);
            out.samples(j, i) = r.value;
            if (!r.converged) ++flagged;
            max_err = std::max(max_err, r.err);
        }
    write_output(cfg, to_gridfile(out));
    ordered_json j;
    j["command"] = "backproject";
    j["gamma"] = g.value;
    j["grid"] = {out.n_omega(), out.n_rho()};
    j["flagged"] = flagged;
    j["max_quadrature_err"] = max_err;
    j["out"] = cfg.out_path;
    emit_summary(cfg, j);
    return flagged > 0 ? kExitQuadFailure : kExitOk;
}

int cmd_reconstruct(const JobConfig& cfg) {
    const GridFile in = read_gridfile(cfg.in_path);
    DataGrid ugrid = data_from_gridfile(in);
    const GammaWeight g = ugrid.gamma;
    const ReconstructReport rep = svd_reconstruct(ugrid, cfg.band, cfg.filter);
    DiskGrid out = make_disk_grid_for_band(g, cfg.band);
    synthesize_disk(rep.disk_coeffs, out);
    write_output(cfg, to_gridfile(out));

    ordered_json j;
    j["command"] = "reconstruct";
    j["gamma"] = g.value;
    j["band"] = cfg.band;
    j["filter_lambda"] = cfg.filter;
    j["in_band_norm"] = rep.in_band_norm;
    j["out_of_band_norm"] = rep.out_of_band_norm;
    j["out"] = cfg.out_path;
    std::optional<double> rel_error;
    if (!cfg.truth_path.empty()) {
        DiskGrid truth = disk_from_gridfile(read_gridfile(cfg.truth_path));
        CoeffTable tc = analyze_disk(truth, cfg.band);
        rel_error = rep.disk_coeffs.distance(tc) / std::max(1e-300, tc.l2_norm());
        j["rel_error"] = *rel_error;
        j["tol"] = cfg.tol;
    }
    emit_summary(cfg, j);
    if (rel_error && *rel_error > cfg.tol) return kExitCheckFailure;
    return kExitOk;
}

int cmd_range_check(const JobConfig& cfg) {
    const GridFile in = read_gridfile(cfg.in_path);
    DataGrid ugrid = data_from_gridfile(in);
    const GammaWeight g = ugrid.gamma;
    CoeffTable table = analyze_data(ugrid, cfg.band);
    DataFn u = synth_data_fn(table);
    RangeSpec spec;
    // probe a few degrees past the declared band so the decay diagnostic can
    // see the coefficients settle
    spec.max_degree = std::max(cfg.band, 2) + 3;
    spec.cminus_band = std::max(cfg.band, 2);
    spec.tol = cfg.tol;
    const RangeVerdict v = range_test(u, g, spec);

    ordered_json j;
    j["command"] = "range-check";
    j["gamma"] = g.value;
    j["max_degree"] = spec.max_degree;
    j["tol"] = cfg.tol;
    j["moments"] = {{"homogeneous", v.moments.homogeneous},
                    {"max_in_band", v.moments.max_in_band},
                    {"max_out_of_band", v.moments.max_out_of_band}};
    ordered_json offenders = ordered_json::array();
    for (auto [m, k] : v.moments.offenders) offenders.push_back({m, k});
    j["moments"]["offenders"] = offenders;
    ordered_json sums = ordered_json::array();
    for (double s : v.weighted_partial_sums) sums.push_back(s);
    j["decay"] = {{"weighted_partial_sums", sums},
                  {"tail_fraction", v.decay_tail_fraction},
                  {"pass", v.decay_pass}};
    if (v.cminus_applicable) {
        ordered_json coff = ordered_json::array();
        for (auto [n, k] : v.cminus_offenders) coff.push_back({n, k});
        j["cminus"] = {{"residual", v.cminus_residual},
                       {"pass", v.cminus_pass},
                       {"offenders", coff}};
    } else {
        j["cminus"] = "skipped: criterion applies only at gamma = 0";
    }
    j["overall"] = v.overall;
    emit_summary(cfg, j);
    return v.overall ? kExitOk : kExitCheckFailure;
}

int cmd_spectrum(const JobConfig& cfg) {
    const GammaWeight g(cfg.gamma);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!cfg.out_path.empty()) {
        file.open(cfg.out_path);
        if (!file) throw Error("cannot open " + cfg.out_path);
        out = &file;
    }
    (*out) << "n,k,sigma,operator_eigenvalue,normal_eigenvalue\n";
    char line[160];
    for (int n = 0; n <= cfg.band; ++n)
        for (int k = 0; k <= n; ++k) {
            const double lam = (n + 1.0 + g.value) * (n + 1.0 + g.value);
            std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,%.17g\n", n, k,
                          sigma_nk(n, k, g), lam, normal_eigenvalue(n, k, g));
            (*out) << line;
        }
    return kExitOk;
}

int cmd_selftest(const JobConfig& cfg, bool gamma_given) {
    selftest::Options opt;
    if (gamma_given) opt.gammas = {cfg.gamma};
    opt.only = cfg.only;
    opt.seed = cfg.seed;
    opt.quad = quad_of(cfg);
    const auto results = selftest::run(opt, &std::cout);

    ordered_json j;
    j["command"] = "selftest";
    ordered_json gammas = ordered_json::array();
    for (double g : opt.gammas) gammas.push_back(g);
    j["gammas"] = gammas;
    j["seed"] = opt.seed;
    j["only"] = opt.only;
    ordered_json checks = ordered_json::array();
    for (const auto& r : results) {
        ordered_json c;
        c["criterion"] = r.criterion;
        c["name"] = r.name;
        if (r.gamma_specific) c["gamma"] = r.gamma;
        c["pass"] = r.pass;
        c["residual"] = r.residual;
        c["tolerance"] = r.tolerance;
        c["seconds"] = r.seconds;
        c["note"] = r.note;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["all_pass"] = selftest::all_passed(results);
    emit_summary(cfg, j);
    return selftest::all_passed(results) ? kExitOk : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"X-ray transform on the hyperbolic disk: forward/backprojection, exact SVD "
                 "inversion, and range characterization"};
    app.require_subcommand(1);

    JobConfig cfg;
    bool gamma_given = false;

    auto add_common = [&](CLI::App* cmd, bool needs_in, bool needs_out) {
        cmd->add_option("--gamma", cfg.gamma, "weight exponent, > -1")
            ->check(CLI::Range(-0.999999, 1e9))
            ->each([&](const std::string&) { gamma_given = true; });
        cmd->add_option("--band", cfg.band, "band limit N");
        cmd->add_option("--grid", cfg.grid, "grid size like 64x12, or 'auto'");
        cmd->add_option("--quad", cfg.quad_level, "line-quadrature refinement level");
        cmd->add_option("--tol", cfg.tol, "tolerance for checks");
        cmd->add_option("--seed", cfg.seed, "seed for randomized probes");
        cmd->add_option("--filter", cfg.filter, "Tikhonov filter lambda");
        cmd->add_option("--format", cfg.format, "output format: csv or pgm");
        cmd->add_option("--summary", cfg.summary_path, "write the JSON summary here");
        if (needs_in) cmd->add_option("--in", cfg.in_path, "input grid file")->required();
        if (needs_out) cmd->add_option("--out", cfg.out_path, "output file")->required();
    };

    CLI::App* phantom = app.add_subcommand("phantom", "generate a disk phantom grid");
    add_common(phantom, false, true);
    phantom->add_option("--phantom", cfg.phantom, "descriptor, e.g. zernike:3,1 or bump:0.5,0.2")
        ->required();

    CLI::App* forward = app.add_subcommand("forward", "weighted hyperbolic X-ray transform");
    add_common(forward, true, true);

    CLI::App* backproject = app.add_subcommand("backproject", "hyperbolic backprojection");
    add_common(backproject, true, true);

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "SVD inversion of data");
    add_common(reconstruct, true, true);
    reconstruct->add_option("--truth", cfg.truth_path, "ground-truth disk grid for error report");

    CLI::App* range_check = app.add_subcommand("range-check", "range characterization report");
    add_common(range_check, true, false);

    CLI::App* spectrum = app.add_subcommand("spectrum", "singular values and eigenvalues");
    add_common(spectrum, false, false);
    spectrum->add_option("--out", cfg.out_path, "output CSV (default stdout)");

    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the acceptance matrix");
    add_common(selftest_cmd, false, false);
    selftest_cmd->add_option("--only", cfg.only, "run only checks with this name prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (phantom->parsed()) return cmd_phantom(cfg);
        if (forward->parsed()) return cmd_forward(cfg);
        if (backproject->parsed()) return cmd_backproject(cfg);
        if (reconstruct->parsed()) return cmd_reconstruct(cfg);
        if (range_check->parsed()) return cmd_range_check(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (selftest_cmd->parsed()) return cmd_selftest(cfg, gamma_given);
    } catch (const SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const GridError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
