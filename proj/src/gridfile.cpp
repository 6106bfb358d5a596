#include "xdisk/gridfile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xdisk/error.hpp"

namespace xdisk {

namespace {

const char* kDataNodes = "beta: uniform [0,2pi); a = tan(asin(x)), x: gauss-jacobi(gamma+1/2)";
const char* kDiskNodes = "omega: uniform [0,2pi); rho = sqrt((1+xi)/2), xi: gauss-jacobi(gamma,0)";
const char* kDataConvention = "L2(G, mu_h^{-2 gamma} dbeta da)";
const char* kDiskConvention = "L2(D_E, d^gamma dV_E); samples are Euclidean-model values";

std::string header_json(const GridFile& f) {
    nlohmann::ordered_json j;
    j["schema"] = f.schema;
    j["kind"] = f.kind;
    j["gamma"] = f.gamma;
    j["n1"] = f.n1;
    j["n2"] = f.n2;
    j["nodes"] = f.nodes;
    j["convention"] = f.convention;
    return j.dump();
}

} // namespace

GridFile to_gridfile(const DataGrid& g) {
    GridFile f;
    f.kind = "data";
    f.gamma = g.gamma.value;
    f.n1 = g.n_beta();
    f.n2 = g.n_alpha();
    f.nodes = kDataNodes;
    f.convention = kDataConvention;
    f.samples = g.samples;
    return f;
}

GridFile to_gridfile(const DiskGrid& g) {
    GridFile f;
    f.kind = "disk";
    f.gamma = g.gamma.value;
    f.n1 = g.n_omega();
    f.n2 = g.n_rho();
    f.nodes = kDiskNodes;
    f.convention = kDiskConvention;
    f.samples = g.samples;
    return f;
}

DataGrid data_from_gridfile(const GridFile& f) {
    if (f.kind != "data") throw SchemaError("data_from_gridfile: kind mismatch");
    DataGrid g = DataGrid::make(GammaWeight(f.gamma), f.n1, f.n2);
    g.samples = f.samples;
    return g;
}

DiskGrid disk_from_gridfile(const GridFile& f) {
    if (f.kind != "disk") throw SchemaError("disk_from_gridfile: kind mismatch");
    DiskGrid g = DiskGrid::make(GammaWeight(f.gamma), f.n1, f.n2);
    g.samples = f.samples;
    return g;
}

void write_gridfile(const GridFile& f, const std::string& path) {
    if (f.samples.rows() != f.n1 || f.samples.cols() != f.n2)
        throw SchemaError("write_gridfile: header/body shape mismatch");
    std::ofstream out(path);
    if (!out) throw Error("write_gridfile: cannot open " + path);
    out << header_json(f) << "\n";
    out << "i,j,re,im\n";
    char line[128];
    for (int i = 0; i < f.n1; ++i) {
        for (int j = 0; j < f.n2; ++j) {
            std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g\n", i, j,
                          f.samples(i, j).real(), f.samples(i, j).imag());
            out << line;
        }
    }
    if (!out) throw Error("write_gridfile: write failed for " + path);
}

GridFile read_gridfile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("read_gridfile: cannot open " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw SchemaError("read_gridfile: missing header");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("read_gridfile: bad header: ") + e.what());
    }
    GridFile f;
    try {
        f.schema = j.at("schema").get<std::string>();
        f.kind = j.at("kind").get<std::string>();
        f.gamma = j.at("gamma").get<double>();
        f.n1 = j.at("n1").get<int>();
        f.n2 = j.at("n2").get<int>();
        f.nodes = j.at("nodes").get<std::string>();
        f.convention = j.at("convention").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("read_gridfile: missing header field: ") + e.what());
    }
    if (f.schema != "1") throw SchemaError("read_gridfile: unsupported schema " + f.schema);
    if (f.kind != "data" && f.kind != "disk")
        throw SchemaError("read_gridfile: unknown kind " + f.kind);
    if (f.n1 < 1 || f.n2 < 1) throw SchemaError("read_gridfile: bad grid shape");

    f.samples = Eigen::MatrixXcd::Zero(f.n1, f.n2);
    std::string line;
    if (!std::getline(in, line) || line != "i,j,re,im")
        throw SchemaError("read_gridfile: missing column header");
    long count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int i, j_idx;
        double re, im;
        if (std::sscanf(line.c_str(), "%d,%d,%lg,%lg", &i, &j_idx, &re, &im) != 4)
            throw SchemaError("read_gridfile: bad row '" + line + "'");
        if (i < 0 || i >= f.n1 || j_idx < 0 || j_idx >= f.n2)
            throw SchemaError("read_gridfile: row index out of range");
        f.samples(i, j_idx) = Complex(re, im);
        ++count;
    }
    if (count != static_cast<long>(f.n1) * f.n2)
        throw SchemaError("read_gridfile: body row count does not match the header");
    return f;
}

void write_pgm(const Eigen::MatrixXcd& samples, const std::string& path) {
    const long rows = samples.rows(), cols = samples.cols();
    double peak = 0.0;
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) peak = std::max(peak, std::abs(samples(i, j)));
    std::ofstream out(path);
    if (!out) throw Error("write_pgm: cannot open " + path);
    out << "P2\n# peak magnitude " << peak << "\n" << cols << " " << rows << "\n255\n";
    for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
            const int v =
                peak > 0.0 ? static_cast<int>(std::lround(255.0 * std::abs(samples(i, j)) / peak))
                           : 0;
            out << v << (j + 1 < cols ? ' ' : '\n');
        }
    }
}

} // namespace xdisk
