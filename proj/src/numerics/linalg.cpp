#include "fvgrad/numerics/linalg.hpp"

#include <string>

namespace fvgrad {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularSystem: return "numerics.SingularSystem";
        case ErrorCode::DegenerateCell: return "mesh.DegenerateCell";
        case ErrorCode::NoNeighbour: return "mesh.NoNeighbour";
        case ErrorCode::InvalidTopology: return "mesh.InvalidTopology";
        case ErrorCode::ParseError: return "mesh.ParseError";
        case ErrorCode::FoldedMesh: return "meshgen.FoldedMesh";
        case ErrorCode::BadPatch: return "meshgen.BadPatch";
        case ErrorCode::InvalidParameter: return "meshgen.InvalidParameter";
        case ErrorCode::InsufficientFaces: return "gradients.InsufficientFaces";
        case ErrorCode::NonPositiveError: return "study.NonPositiveError";
        case ErrorCode::UsageError: return "cli.UsageError";
        case ErrorCode::ConfigConflict: return "cli.ConfigConflict";
        case ErrorCode::IoError: return "cli.IoError";
    }
    return "unknown";
}

std::string_view to_string(PrecisionMode p) { return p == PrecisionMode::Double ? "double" : "extended"; }

PrecisionMode parse_precision(std::string_view name) {
    if (name == "double") return PrecisionMode::Double;
    if (name == "extended") return PrecisionMode::Extended;
    throw Error(ErrorCode::UsageError, "unknown precision '" + std::string(name) + "' (expected double|extended)");
}

double default_singular_tolerance(PrecisionMode p) {
    return p == PrecisionMode::Double ? ScalarTraits<double>::default_singular_tol
                                      : ScalarTraits<DoubleDouble>::default_singular_tol;
}

Vec2<double> solve2(const Mat2<double>& a, const Vec2<double>& b, PrecisionMode precision) {
    if (precision == PrecisionMode::Double) return solve2<double>(a, b);
    return demote(solve2<DoubleDouble>(a.cast<DoubleDouble>(), promote<DoubleDouble>(b)));
}

}  // namespace fvgrad
