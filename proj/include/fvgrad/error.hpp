#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fvgrad {

enum class ErrorCode {
    // numerics
    SingularSystem,
    // mesh
    DegenerateCell,
    NoNeighbour,
    InvalidTopology,
    ParseError,
    // meshgen
    FoldedMesh,
    BadPatch,
    InvalidParameter,
    // gradients
    InsufficientFaces,
    // study
    NonPositiveError,
    // cli
    UsageError,
    ConfigConflict,
    IoError,
};

/// Module-qualified code, e.g. "numerics.SingularSystem".
std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fvgrad
