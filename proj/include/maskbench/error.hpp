#pragma once

#include <stdexcept>
#include <string>

namespace maskbench {

// Geometry that cannot support the requested operation (collinear triangle,
// region fully outside the image, ...).
class DegenerateGeometryError : public std::runtime_error {
public:
    explicit DegenerateGeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// A masked-face generation attempt that had to be abandoned (too many
// collapsed patches, footprint too small).
class GenerationFailedError : public std::runtime_error {
public:
    explicit GenerationFailedError(const std::string& msg) : std::runtime_error(msg) {}
};

// File or manifest that failed to load, parse or validate.
class LoadError : public std::runtime_error {
public:
    explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace maskbench
