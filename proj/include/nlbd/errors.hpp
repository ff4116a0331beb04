#pragma once

#include <stdexcept>
#include <string>

namespace nlbd {

// Thrown when an iterative scheme cannot certify its target tolerance
// (truncation budget exhausted, quadrature not converged, path too short).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace nlbd
