#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fvgrad/mesh/mesh.hpp"

namespace fvgrad {

enum class GridFamily { Cartesian, SmoothMapped, LocallyRefined, Perturbed, HARC, HARCO };

std::string_view to_string(GridFamily f);
GridFamily parse_grid_family(std::string_view name);

struct Rect {
    double xmin = -1.0;
    double xmax = 1.0;
    double ymin = -1.0;
    double ymax = 1.0;
};

/// Family parameters; each generator reads only the fields it needs.
struct GridParams {
    Rect domain{};
    int n0 = 4;                ///< cells per side at level 0 (planar families)
    double amplitude = 0.1;    ///< smooth mapping amplitude
    std::vector<Rect> patches = {{-0.5, 0.5, -0.5, 0.5}, {-0.25, 0.25, -0.25, 0.25}};
    double beta = 0.25;        ///< perturbation fraction of h
    std::optional<std::uint64_t> seed;
    double radius = 1.0;       ///< R, inner radius of the annulus
    double aspect = 1000.0;    ///< A
    double dtheta0 = 0.256;    ///< circumferential spacing at level 0 (rad)
    double oblique_deg = 45.0;
};

struct GridFamilySpec {
    GridFamily family = GridFamily::Cartesian;
    int level = 0;
    GridParams params{};
};

Mesh gen_cartesian(int level, const Rect& domain = {}, int n0 = 4);

/// x = xi + a sin(pi xi) sin(pi eta), y = eta + a sin(pi xi) sin(pi eta) on
/// the normalized square, rescaled to `domain`.
Mesh gen_smooth_mapped(int level, const Rect& domain = {}, double amplitude = 0.1, int n0 = 4);

/// Cartesian base with nested refinement patches, each doubling resolution.
Mesh gen_locally_refined(int level, const Rect& domain = {},
                         const std::vector<Rect>& patches = GridParams{}.patches, int n0 = 4);

/// Cartesian grid with interior nodes displaced by U[-beta h, beta h] per
/// coordinate; boundary nodes slide along their side, corners stay fixed.
Mesh gen_perturbed(int level, const Rect& domain, double beta, std::uint64_t seed, int n0 = 4);

/// Annular sector: 2^(level+1) cells per direction, d_theta = dtheta0/2^l,
/// d_r = R d_theta / A, centred on theta = 0. Node coordinates are computed
/// in double-double and kept as binary64 values plus residuals.
Mesh gen_harc(int level, double radius = 1.0, double aspect = 1000.0, double dtheta0 = 0.256);

/// gen_harc with the cross-layer lines sheared: theta_ij = theta_i + (r_j - R) tan(angle) / R.
Mesh gen_harco(int level, double radius = 1.0, double aspect = 1000.0, double dtheta0 = 0.256,
               double oblique_deg = 45.0);

Mesh generate(const GridFamilySpec& spec);

/// Circumferential spacing d_theta_l of the annular families.
double annulus_dtheta(const GridFamilySpec& spec);

/// Representative spacing: sqrt(area / n_cells) for planar families,
/// R * d_theta_l for the annuli.
double spacing(const GridFamilySpec& spec, const Mesh& mesh);

/// gamma ~= A d_theta_l / 2 for annular families, NaN otherwise.
double gamma_ratio(const GridFamilySpec& spec);

bool is_annular(GridFamily f);

/**
 * Counter-based generator: SplitMix64's finalizer applied to a counter that
 * mixes (seed, stream, index). Every (seed, stream, index) triple maps to an
 * independent 64-bit value, so draws do not depend on evaluation order.
 */
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Uniform double in [-1, 1) from counter_hash.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/**
 * Builds a mesh from counter-clockwise node loops. Faces are numbered in
 * order of first appearance while walking the cells; an edge seen once is a
 * boundary face tagged by `boundary_tag(a, b)`, an index into `names`.
 * Throws FoldedMesh if any loop has non-positive signed area.
 */
Mesh assemble_mesh(std::vector<Vec2<double>> nodes, const std::vector<std::vector<Index>>& loops,
                   std::vector<std::string> names, const std::function<int(Index, Index)>& boundary_tag,
                   std::vector<Vec2<double>> node_residuals = {});

/// Structured (ni x nj) quadrilateral mesh from an (ni+1) x (nj+1) node array
/// stored i-fastest; (i, j) must be a right-handed parametrization.
/// Sides are tagged names[0..3] = {i = 0, i = ni, j = 0, j = nj}.
Mesh structured_mesh(int ni, int nj, std::vector<Vec2<double>> nodes, const std::vector<std::string>& names,
                     std::vector<Vec2<double>> node_residuals = {});

}  // namespace fvgrad
