#ifndef XDISK_GRIDFILE_HPP
#define XDISK_GRIDFILE_HPP

#include <string>

#include "xdisk/spectral.hpp"

namespace xdisk {

/// On-disk grid container: one JSON header line (fixed key order, byte-stable
/// under rewrite) followed by CSV rows `i,j,re,im` printed with 17 significant
/// digits, which round-trips doubles exactly.
struct GridFile {
    std::string schema = "1";
    std::string kind;       // "data" or "disk"
    double gamma = 0.0;
    int n1 = 0, n2 = 0;     // beta x a nodes, or omega x rho nodes
    std::string nodes;      // description of the node construction
    std::string convention; // measure / model convention tag
    Eigen::MatrixXcd samples;
};

GridFile to_gridfile(const DataGrid& g);
GridFile to_gridfile(const DiskGrid& g);

/// Rebuild typed grids (nodes are reconstructed from the header).
DataGrid data_from_gridfile(const GridFile& f);
DiskGrid disk_from_gridfile(const GridFile& f);

void write_gridfile(const GridFile& f, const std::string& path);
GridFile read_gridfile(const std::string& path);

/// 8-bit PGM image of |samples|, normalized to the peak magnitude.
void write_pgm(const Eigen::MatrixXcd& samples, const std::string& path);

} // namespace xdisk

#endif
