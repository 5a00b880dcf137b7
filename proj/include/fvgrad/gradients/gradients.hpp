#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fvgrad/fields/fields.hpp"
#include "fvgrad/mesh/mesh.hpp"

namespace fvgrad {

enum class SchemeFamily { GG, GGCorrected, LS, LSA, TG, iTG };

/// Auxiliary gradient of the corrected Green-Gauss variants.
enum class AuxScheme { iTG0, LS1 };

enum class BoundaryPolicy { UseBoundaryValue, ExcludeBoundaryFaces };

/// How phi(c'_f) is obtained from the two cell values. NearestCell is a
/// first-order diagnostic only.
enum class Interpolation { Linear, NearestCell };

struct SchemeSpec {
    SchemeFamily family = SchemeFamily::GG;
    double q = 0.0;
    AuxScheme aux = AuxScheme::iTG0;
    NfPolicy nf_policy = NfPolicy::FaceCentroid;
    BoundaryPolicy boundary = BoundaryPolicy::UseBoundaryValue;
    PrecisionMode precision = PrecisionMode::Double;
    Interpolation interpolation = Interpolation::Linear;
};

/// N_f policy a family uses by default.
NfPolicy default_nf_policy(SchemeFamily family);

SchemeSpec make_scheme(SchemeFamily family, double q = 0.0);
SchemeSpec make_gg_corrected(AuxScheme aux);

/// Catalog name, e.g. "GG", "GG+iTG(0)", "LS(-1)", "TG(2)".
std::string scheme_name(const SchemeSpec& spec);

/// Inverse of scheme_name; throws UsageError on unknown names.
SchemeSpec parse_scheme(std::string_view name);

/// Throws InvalidParameter if the spec mixes incompatible settings.
void validate(const SchemeSpec& spec);

/// GG, GG+iTG(0), GG+LS(1), LS(-1), LS(1), LS(2), LSA(0), LSA(1), LSA(2),
/// TG(0), TG(1), TG(2), iTG(0), iTG(1), iTG(2).
std::vector<SchemeSpec> scheme_catalog();

enum class CellStatus : std::uint8_t {
    Ok,
    Singular,          ///< sum V_f R_f^T failed the rank test
    BoundaryExcluded,  ///< ok; boundary faces were left out
    InsufficientFaces,
    Degenerate,        ///< interpolation factor zero or not finite
};

std::string_view to_string(CellStatus s);

/// True when the gradient of a cell with this status is finite and usable.
inline bool usable(CellStatus s) { return s == CellStatus::Ok || s == CellStatus::BoundaryExcluded; }

template <class T>
struct GradientResult {
    std::vector<Vec2<T>> grad;
    /// Condition number of sum V_f R_f^T (1 for the Green-Gauss family).
    std::vector<double> cond;
    std::vector<CellStatus> flags;

    Index n_failed() const;
};

/// V_f of a framework scheme for one cell-face record.
template <class T>
Vec2<T> weight_vector(const SchemeSpec& spec, const CellFaceGeom<T>& g);

template <class T>
struct CellGradient {
    Vec2<T> grad;
    double cond = 1.0;
    CellStatus status = CellStatus::Ok;
};

/**
 * grad phi(P) = [sum_f V_f R_f^T]^-1 [sum_f V_f dphi_f] for one cell.
 *
 * `vf` holds V_f for each face of the cell in Mesh::cell_faces order
 * (entries of excluded boundary faces are ignored). Interior faces use
 * N_f from `policy`; for N_f = c'_f the value is interpolated linearly
 * between P and P_f. Boundary faces use N_f = c_f and the sampled value.
 * Throws SingularSystem, InsufficientFaces or DegenerateCell.
 */
template <class T>
CellGradient<T> framework_gradient(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field, Index cell,
                                   std::span<const Vec2<T>> vf, NfPolicy policy,
                                   BoundaryPolicy boundary = BoundaryPolicy::UseBoundaryValue,
                                   Interpolation interpolation = Interpolation::Linear, double singular_tol = 0.0);

/// Per-cell gradients for any scheme; per-cell failures are reported in flags.
template <class T>
GradientResult<T> compute(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                          const SchemeSpec& spec);

/// Face values phi_f of plain Green-Gauss: phi(c'_f) on interior faces
/// (interpolated from the owner side), the sampled phi(c_f) on boundary faces.
template <class T>
std::vector<T> gg_face_values(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                              Interpolation interpolation = Interpolation::Linear);

/// Corrected face values phi(c'_f) + grad phi(c'_f) . (c_f - c'_f), both
/// interpolated from the two cells; boundary faces keep the sampled value.
template <class T>
std::vector<T> corrected_face_values(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                                     const std::vector<Vec2<T>>& aux_grad);

/// S_f s_f phi_f per face, with the owner's outward normal. The owner adds
/// this term and the neighbour subtracts it.
template <class T>
std::vector<Vec2<T>> gg_face_contributions(const Mesh& mesh, const Geometry<T>& geom, const std::vector<T>& face_values);

/// (1 / Omega_P) sum_f +-contribution_f.
template <class T>
std::vector<Vec2<T>> gg_accumulate(const Mesh& mesh, const Geometry<T>& geom,
                                   const std::vector<Vec2<T>>& contributions);

/// Two-pass corrected Green-Gauss with auxiliary gradient iTG(0) or LS(1).
template <class T>
GradientResult<T> gg_corrected(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field, AuxScheme aux,
                               BoundaryPolicy boundary = BoundaryPolicy::UseBoundaryValue);

#define FVGRAD_GRADIENT_EXTERN(T)                                                                                   \
    extern template struct GradientResult<T>;                                                                       \
    extern template Vec2<T> weight_vector<T>(const SchemeSpec&, const CellFaceGeom<T>&);                            \
    extern template CellGradient<T> framework_gradient<T>(const Mesh&, const Geometry<T>&, const CellField<T>&,     \
                                                          Index, std::span<const Vec2<T>>, NfPolicy, BoundaryPolicy, \
                                                          Interpolation, double);                                   \
    extern template GradientResult<T> compute<T>(const Mesh&, const Geometry<T>&, const CellField<T>&,              \
                                                 const SchemeSpec&);                                                \
    extern template std::vector<T> gg_face_values<T>(const Mesh&, const Geometry<T>&, const CellField<T>&,          \
                                                     Interpolation);                                                \
    extern template std::vector<T> corrected_face_values<T>(const Mesh&, const Geometry<T>&, const CellField<T>&,   \
                                                            const std::vector<Vec2<T>>&);                           \
    extern template std::vector<Vec2<T>> gg_face_contributions<T>(const Mesh&, const Geometry<T>&,                  \
                                                                  const std::vector<T>&);                           \
    extern template std::vector<Vec2<T>> gg_accumulate<T>(const Mesh&, const Geometry<T>&,                          \
                                                          const std::vector<Vec2<T>>&);                             \
    extern template GradientResult<T> gg_corrected<T>(const Mesh&, const Geometry<T>&, const CellField<T>&,         \
                                                      AuxScheme, BoundaryPolicy);

FVGRAD_GRADIENT_EXTERN(double)
FVGRAD_GRADIENT_EXTERN(DoubleDouble)

#undef FVGRAD_GRADIENT_EXTERN

}  // namespace fvgrad
