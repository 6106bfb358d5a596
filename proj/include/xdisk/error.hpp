#ifndef XDISK_ERROR_HPP
#define XDISK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace xdisk {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside its mathematical domain (non-interior point, k outside
/// the band, gamma <= -1, infinite horocycle parameter where a finite one
/// is required, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Inconsistent grid/table shapes or a violated anti-aliasing bound.
struct GridError : Error {
    explicit GridError(const std::string& what) : Error(what) {}
};

/// Malformed file header or body.
struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(what) {}
};

} // namespace xdisk

#endif
