#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "xdisk/error.hpp"
#include "xdisk/gridfile.hpp"

using namespace xdisk;

namespace {

std::string temp_path(const char* tag) {
    return std::string("gridfile_test_") + tag + ".csv";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("grid files round-trip bit-for-bit") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ur(-10.0, 10.0);
    DataGrid g = DataGrid::make(GammaWeight(0.5), 8, 5);
    for (int j = 0; j < g.n_beta(); ++j)
        for (int i = 0; i < g.n_alpha(); ++i)
            g.samples(j, i) = Complex(ur(rng) * std::pow(10.0, int(ur(rng))), ur(rng));

    const std::string p1 = temp_path("a"), p2 = temp_path("b");
    write_gridfile(to_gridfile(g), p1);
    const GridFile f = read_gridfile(p1);
    CHECK(f.kind == "data");
    CHECK(f.gamma == 0.5);
    DataGrid g2 = data_from_gridfile(f);
    // exact value round trip (17 significant digits reproduce doubles)
    for (int j = 0; j < g.n_beta(); ++j)
        for (int i = 0; i < g.n_alpha(); ++i) CHECK(g2.samples(j, i) == g.samples(j, i));
    // and a rewrite is byte-identical
    write_gridfile(to_gridfile(g2), p2);
    CHECK(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("disk grid files carry their convention") {
    DiskGrid g = DiskGrid::make(GammaWeight(-0.5), 6, 3);
    g.samples(2, 1) = Complex(1.25, -0.5);
    const std::string p = temp_path("c");
    write_gridfile(to_gridfile(g), p);
    const GridFile f = read_gridfile(p);
    CHECK(f.kind == "disk");
    CHECK(f.convention.find("d^gamma dV_E") != std::string::npos);
    DiskGrid g2 = disk_from_gridfile(f);
    CHECK(g2.samples(2, 1) == Complex(1.25, -0.5));
    CHECK(g2.rho.size() == 3);
    std::remove(p.c_str());
}

TEST_CASE("schema violations are rejected") {
    const std::string p = temp_path("d");
    {
        std::ofstream out(p);
        out << "{\"schema\":\"2\",\"kind\":\"data\",\"gamma\":0.0,\"n1\":2,\"n2\":2,"
               "\"nodes\":\"x\",\"convention\":\"y\"}\n";
        out << "i,j,re,im\n0,0,0,0\n";
    }
    CHECK_THROWS_AS(read_gridfile(p), SchemaError);
    {
        std::ofstream out(p);
        out << "not json\n";
    }
    CHECK_THROWS_AS(read_gridfile(p), SchemaError);
    {
        // row count mismatch
        std::ofstream out(p);
        out << "{\"schema\":\"1\",\"kind\":\"data\",\"gamma\":0.0,\"n1\":2,\"n2\":2,"
               "\"nodes\":\"x\",\"convention\":\"y\"}\n";
        out << "i,j,re,im\n0,0,0,0\n";
    }
    CHECK_THROWS_AS(read_gridfile(p), SchemaError);
    CHECK_THROWS_AS(read_gridfile("no_such_file_anywhere.csv"), SchemaError);
    std::remove(p.c_str());
}

TEST_CASE("pgm writer emits a plausible image") {
    Eigen::MatrixXcd m(2, 3);
    m << Complex(0, 0), Complex(0.5, 0), Complex(1, 0), Complex(0, 1), Complex(0, 0),
        Complex(0.25, 0);
    const std::string p = "gridfile_test_img.pgm";
    write_pgm(m, p);
    const std::string body = slurp(p);
    CHECK(body.rfind("P2", 0) == 0);
    CHECK(body.find("255") != std::string::npos);
    std::remove(p.c_str());
}
