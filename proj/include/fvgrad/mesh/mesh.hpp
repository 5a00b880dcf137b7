#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fvgrad/numerics/linalg.hpp"

namespace fvgrad {

using Index = std::int32_t;
inline constexpr Index kNoCell = -1;

/// Straight edge a->b. The owner lies to the left of a->b, so the normal
/// (dy, -dx) points from owner to neighbour (outward on boundary faces).
struct Face {
    Index a = 0;
    Index b = 0;
    Index owner = kNoCell;
    Index neighbour = kNoCell;
    /// Index into Mesh::boundary_names(); -1 for interior faces.
    int boundary_tag = -1;

    bool is_boundary() const { return neighbour == kNoCell; }
};

template <class T>
struct Geometry {
    std::vector<Vec2<T>> cell_centroid;
    std::vector<T> cell_area;
    std::vector<Vec2<T>> face_centroid;
    std::vector<T> face_length;
    /// Unit normal oriented owner -> neighbour.
    std::vector<Vec2<T>> face_normal;
};

/**
 * General polygonal 2D cell complex.
 *
 * Each cell lists its faces in counter-clockwise order; consecutive faces
 * share a node. Cells may have any number of faces >= 3, which is how the
 * hanging nodes of 2:1 refinement show up (a square coarse cell next to a
 * finer patch has five faces). Nodes are stored in binary64; derived
 * geometry can be rebuilt in any supported scalar type with
 * build_geometry<T>(). The binary64 geometry is built on construction and
 * the mesh is immutable afterwards.
 */
class Mesh {
public:
    Mesh() = default;
    /// `node_residuals`, if not empty, holds per node the rounding error of
    /// the binary64 coordinates (exact node = node + residual); only the
    /// double-double geometry uses it.
    Mesh(std::vector<Vec2<double>> nodes, std::vector<Face> faces, std::vector<std::vector<Index>> cells,
         std::vector<std::string> boundary_names, std::vector<Vec2<double>> node_residuals = {});

    Index n_nodes() const { return static_cast<Index>(nodes_.size()); }
    Index n_faces() const { return static_cast<Index>(faces_.size()); }
    Index n_cells() const { return static_cast<Index>(cell_offsets_.empty() ? 0 : cell_offsets_.size() - 1); }
    Index n_boundary_faces() const { return n_boundary_faces_; }

    const std::vector<Vec2<double>>& nodes() const { return nodes_; }
    const std::vector<Vec2<double>>& node_residuals() const { return node_residuals_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }
    std::span<const Index> cell_faces(Index c) const {
        const auto b = static_cast<std::size_t>(cell_offsets_[static_cast<std::size_t>(c)]);
        const auto e = static_cast<std::size_t>(cell_offsets_[static_cast<std::size_t>(c) + 1]);
        return {cell_face_list_.data() + b, e - b};
    }
    const std::vector<std::string>& boundary_names() const { return boundary_names_; }

    /// Position of boundary face f in boundary-value arrays; -1 if interior.
    Index boundary_slot(Index f) const { return boundary_slot_[static_cast<std::size_t>(f)]; }

    /// The cell on the other side of face f as seen from `cell` (kNoCell on a boundary).
    Index other_cell(Index f, Index cell) const {
        const Face& fc = face(f);
        return fc.owner == cell ? fc.neighbour : fc.owner;
    }

    /// +1 if `cell` owns face f (stored normal is outward for it), -1 otherwise.
    int orientation(Index f, Index cell) const { return face(f).owner == cell ? 1 : -1; }

    /// Counter-clockwise vertex loop of a cell.
    std::vector<Index> cell_nodes(Index c) const;

    const Geometry<double>& geometry() const { return geometry_; }

private:
    void validate_topology() const;

    std::vector<Vec2<double>> nodes_;
    std::vector<Vec2<double>> node_residuals_;
    std::vector<Face> faces_;
    std::vector<Index> cell_offsets_;
    std::vector<Index> cell_face_list_;
    std::vector<std::string> boundary_names_;
    std::vector<Index> boundary_slot_;
    Index n_boundary_faces_ = 0;
    Geometry<double> geometry_;
};

/**
 * Derived geometry in scalar type T from the binary64 nodes (plus their
 * residuals, when present and T is double-double).
 *
 * Cell centroids and areas use the shoelace formulas written relative to
 * the first vertex of each cell, which removes the cancellation that
 * absolute coordinates would cause on thin cells far from the origin.
 * Throws DegenerateCell for non-positive areas or zero-length faces.
 */
template <class T>
Geometry<T> build_geometry(const Mesh& mesh);

extern template Geometry<double> build_geometry<double>(const Mesh&);
extern template Geometry<DoubleDouble> build_geometry<DoubleDouble>(const Mesh&);

/// Choice of the points N_f at which neighbour information is used.
enum class NfPolicy {
    NeighbourCentroid,      ///< N_f = P_f
    ProjectedFaceCentroid,  ///< N_f = c'_f, projection of c_f onto P->P_f
    Midpoint,               ///< N_f = m_f = (P + P_f)/2
    FaceCentroid,           ///< N_f = c_f; the only choice on boundary faces
};

/// Per cell-face incidence record.
template <class T>
struct CellFaceGeom {
    bool boundary = false;
    Index neighbour = kNoCell;
    Vec2<T> R;        ///< N_f - P
    Vec2<T> D;        ///< P_f - P (c_f - P on boundary faces)
    Vec2<T> d_hat;    ///< D / |D|
    Vec2<T> s_hat;    ///< unit normal, outward for this cell
    Vec2<T> S_vec;    ///< S_f * s_hat
    T S{};            ///< face length
    Vec2<T> c;        ///< face centroid c_f
    Vec2<T> c_prime;  ///< projection of c_f onto the line P -> P_f
    Vec2<T> m;        ///< (P + P_f) / 2
    /// Signed interpolation factor |c'_f - P| / |P_f - P|; NaN on boundary faces.
    T alpha{};
    /// N_f = P + weight * D for interior policies (1, alpha, or 1/2).
    T nf_weight{};
};

template <class T>
CellFaceGeom<T> cell_face_geom(const Mesh& mesh, const Geometry<T>& geom, Index cell, Index face, NfPolicy policy);

extern template CellFaceGeom<double> cell_face_geom<double>(const Mesh&, const Geometry<double>&, Index, Index,
                                                            NfPolicy);
extern template CellFaceGeom<DoubleDouble> cell_face_geom<DoubleDouble>(const Mesh&, const Geometry<DoubleDouble>&,
                                                                        Index, Index, NfPolicy);

/// Binary64 convenience overload using the mesh's cached geometry.
inline CellFaceGeom<double> cell_face_geom(const Mesh& mesh, Index cell, Index face, NfPolicy policy) {
    return cell_face_geom<double>(mesh, mesh.geometry(), cell, face, policy);
}

struct MetricSummary {
    double mean = 0.0;
    double max = 0.0;
};

struct QualityMetrics {
    /// Indexed by face; boundary faces hold NaN and are excluded from summaries.
    std::vector<double> skewness;
    std::vector<double> unevenness;
    std::vector<double> nonorthogonality;
    /// Per cell: longest face length / shortest face length.
    std::vector<double> aspect_ratio;

    MetricSummary skewness_summary;
    MetricSummary unevenness_summary;
    MetricSummary nonorthogonality_summary;
    MetricSummary aspect_ratio_summary;
};

/**
 * Grid quality on interior faces:
 *   skewness          |c_f - c'_f| / |D_f|
 *   unevenness        |c'_f - m_f| / |D_f|
 *   nonorthogonality  angle between d_f and s_f (radians)
 */
QualityMetrics quality(const Mesh& mesh);

/// Mesh with every node translated by `shift`; node residuals are dropped.
Mesh translated(const Mesh& mesh, const Vec2<double>& shift);

}  // namespace fvgrad
