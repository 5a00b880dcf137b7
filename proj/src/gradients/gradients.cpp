#include "fvgrad/gradients/gradients.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace fvgrad {

namespace {

/// |r|^(-q); integer exponents use repeated multiplication.
template <class T>
T inv_pow(const T& r, double q) {
    if (q == 0.0) return T(1.0);
    if (q == std::round(q) && std::abs(q) <= 16.0) {
        const int n = static_cast<int>(std::abs(q));
        T p = r;
        for (int k = 1; k < n; ++k) p = p * r;
        return q > 0.0 ? T(1.0) / p : p;
    }
    using std::pow;
    return pow(r, T(-q));
}

// Coarse HARCO layers taper enough to put c'_f beyond P_f (alpha > 1), so
// any finite nonzero alpha is accepted and the value at c'_f is linearly
// extrapolated along P -> P_f.
template <class T>
void check_alpha(const CellFaceGeom<T>& g, Index cell, Index face) {
    using std::isfinite;
    if (!isfinite(g.alpha) || g.alpha == T(0.0)) {
        throw Error(ErrorCode::DegenerateCell, "unusable interpolation factor at cell " + std::to_string(cell) +
                                                   ", face " + std::to_string(face));
    }
}

/// phi(c'_f) - phi(P) given alpha and phi(P_f) - phi(P).
template <class T>
T interpolated_increment(const T& alpha, const T& diff, Interpolation interpolation) {
    if (interpolation == Interpolation::NearestCell) return alpha < T(0.5) ? T(0.0) : diff;
    return alpha * diff;
}

std::string format_q(double q) {
    char buf[32];
    if (q == std::round(q)) {
        std::snprintf(buf, sizeof buf, "%d", static_cast<int>(q));
    } else {
        std::snprintf(buf, sizeof buf, "%g", q);
    }
    return buf;
}

std::string_view family_name(SchemeFamily f) {
    switch (f) {
        case SchemeFamily::GG: return "GG";
        case SchemeFamily::GGCorrected: return "GG+";
        case SchemeFamily::LS: return "LS";
        case SchemeFamily::LSA: return "LSA";
        case SchemeFamily::TG: return "TG";
        case SchemeFamily::iTG: return "iTG";
    }
    return "?";
}

bool is_framework(SchemeFamily f) { return f != SchemeFamily::GG && f != SchemeFamily::GGCorrected; }

/// Shared assembly of the framework gradient; vf(k, g) yields V_f for the
/// k-th face of the cell.
template <class T, class VFun>
CellGradient<T> framework_cell(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field, Index cell,
                               NfPolicy policy, BoundaryPolicy boundary, Interpolation interpolation, double tol,
                               VFun&& vf) {
    Mat2<T> A = Mat2<T>::Zero();
    Vec2<T> b = Vec2<T>::Zero();
    int used = 0;
    bool excluded = false;
    const T phi_p = field.cell(cell);
    const auto faces = mesh.cell_faces(cell);
    for (std::size_t k = 0; k < faces.size(); ++k) {
        const Index f = faces[k];
        const bool on_boundary = mesh.face(f).is_boundary();
        if (on_boundary && boundary == BoundaryPolicy::ExcludeBoundaryFaces) {
            excluded = true;
            continue;
        }
        const auto g = cell_face_geom(mesh, geom, cell, f, on_boundary ? NfPolicy::FaceCentroid : policy);
        T dphi;
        if (on_boundary) {
            dphi = field.boundary(mesh.boundary_slot(f)) - phi_p;
        } else {
            const T diff = field.cell(g.neighbour) - phi_p;
            if (policy == NfPolicy::ProjectedFaceCentroid) {
                check_alpha(g, cell, f);
                dphi = interpolated_increment(g.alpha, diff, interpolation);
            } else {
                dphi = g.nf_weight * diff;
            }
        }
        const Vec2<T> v = vf(k, g);
        A += outer(v, g.R);
        b += Vec2<T>(v.x() * dphi, v.y() * dphi);
        ++used;
    }
    if (used < 2) {
        throw Error(ErrorCode::InsufficientFaces, "cell " + std::to_string(cell) + " has fewer than 2 usable faces");
    }
    CellGradient<T> out;
    out.cond = cond2(A);
    auto x = try_solve2(A, b, tol);
    if (!x) throw Error(ErrorCode::SingularSystem, "cell " + std::to_string(cell) + ": singular gradient system");
    out.grad = *x;
    out.status = excluded ? CellStatus::BoundaryExcluded : CellStatus::Ok;
    return out;
}

CellStatus status_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::SingularSystem: return CellStatus::Singular;
        case ErrorCode::InsufficientFaces: return CellStatus::InsufficientFaces;
        case ErrorCode::DegenerateCell: return CellStatus::Degenerate;
        default: throw e;
    }
}

template <class T>
Vec2<T> nan_vec() {
    const T nan(std::numeric_limits<double>::quiet_NaN());
    return Vec2<T>(nan, nan);
}

template <class T>
GradientResult<T> empty_result(const Mesh& mesh) {
    GradientResult<T> r;
    const auto n = static_cast<std::size_t>(mesh.n_cells());
    r.grad.assign(n, Vec2<T>::Zero());
    r.cond.assign(n, 1.0);
    r.flags.assign(n, CellStatus::Ok);
    return r;
}

template <class T>
GradientResult<T> green_gauss(const Mesh& mesh, const Geometry<T>& geom, const std::vector<T>& face_values) {
    GradientResult<T> r = empty_result<T>(mesh);
    r.grad = gg_accumulate(mesh, geom, gg_face_contributions(mesh, geom, face_values));
    return r;
}

template <class T>
GradientResult<T> framework_all(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                                const SchemeSpec& spec) {
    GradientResult<T> r = empty_result<T>(mesh);
    for (Index c = 0; c < mesh.n_cells(); ++c) {
        const auto ci = static_cast<std::size_t>(c);
        try {
            auto cg = framework_cell(mesh, geom, field, c, spec.nf_policy, spec.boundary, spec.interpolation, 0.0,
                                     [&spec](std::size_t, const CellFaceGeom<T>& g) { return weight_vector(spec, g); });
            r.grad[ci] = cg.grad;
            r.cond[ci] = cg.cond;
            r.flags[ci] = cg.status;
        } catch (const Error& e) {
            r.flags[ci] = status_of(e);
            r.grad[ci] = nan_vec<T>();
            r.cond[ci] = std::numeric_limits<double>::infinity();
        }
    }
    return r;
}

}  // namespace

NfPolicy default_nf_policy(SchemeFamily family) {
    switch (family) {
        case SchemeFamily::LS:
        case SchemeFamily::LSA:
        case SchemeFamily::TG: return NfPolicy::NeighbourCentroid;
        case SchemeFamily::iTG: return NfPolicy::ProjectedFaceCentroid;
        case SchemeFamily::GG:
        case SchemeFamily::GGCorrected: return NfPolicy::FaceCentroid;
    }
    return NfPolicy::FaceCentroid;
}

SchemeSpec make_scheme(SchemeFamily family, double q) {
    SchemeSpec s;
    s.family = family;
    s.q = q;
    s.nf_policy = default_nf_policy(family);
    return s;
}

SchemeSpec make_gg_corrected(AuxScheme aux) {
    SchemeSpec s = make_scheme(SchemeFamily::GGCorrected);
    s.aux = aux;
    return s;
}

std::string scheme_name(const SchemeSpec& spec) {
    switch (spec.family) {
        case SchemeFamily::GG: return "GG";
        case SchemeFamily::GGCorrected: return spec.aux == AuxScheme::iTG0 ? "GG+iTG(0)" : "GG+LS(1)";
        default: return std::string(family_name(spec.family)) + "(" + format_q(spec.q) + ")";
    }
}

SchemeSpec parse_scheme(std::string_view name) {
    if (name == "GG") return make_scheme(SchemeFamily::GG);
    if (name == "GG+iTG(0)") return make_gg_corrected(AuxScheme::iTG0);
    if (name == "GG+LS(1)") return make_gg_corrected(AuxScheme::LS1);
    const auto open = name.find('(');
    if (open != std::string_view::npos && name.back() == ')') {
        const std::string_view fam = name.substr(0, open);
        const std::string qs(name.substr(open + 1, name.size() - open - 2));
        for (SchemeFamily f : {SchemeFamily::LS, SchemeFamily::LSA, SchemeFamily::TG, SchemeFamily::iTG}) {
            if (fam != family_name(f)) continue;
            char* end = nullptr;
            const double q = std::strtod(qs.c_str(), &end);
            if (!qs.empty() && end == qs.c_str() + qs.size() && std::isfinite(q)) return make_scheme(f, q);
        }
    }
    throw Error(ErrorCode::UsageError, "unknown scheme '" + std::string(name) + "'");
}

void validate(const SchemeSpec& spec) {
    if (!std::isfinite(spec.q) || std::abs(spec.q) > 16.0) {
        throw Error(ErrorCode::InvalidParameter, "exponent q must be finite with |q| <= 16");
    }
    if (!is_framework(spec.family)) {
        if (spec.q != 0.0) throw Error(ErrorCode::InvalidParameter, "Green-Gauss schemes take no exponent q");
        if (spec.family == SchemeFamily::GG && spec.boundary == BoundaryPolicy::ExcludeBoundaryFaces) {
            throw Error(ErrorCode::InvalidParameter, "plain GG needs every face of the closed cell surface");
        }
        return;
    }
    if (spec.nf_policy == NfPolicy::FaceCentroid) {
        throw Error(ErrorCode::InvalidParameter, "N_f = c_f is only available on boundary faces");
    }
}

std::vector<SchemeSpec> scheme_catalog() {
    using F = SchemeFamily;
    return {make_scheme(F::GG),
            make_gg_corrected(AuxScheme::iTG0),
            make_gg_corrected(AuxScheme::LS1),
            make_scheme(F::LS, -1),
            make_scheme(F::LS, 1),
            make_scheme(F::LS, 2),
            make_scheme(F::LSA, 0),
            make_scheme(F::LSA, 1),
            make_scheme(F::LSA, 2),
            make_scheme(F::TG, 0),
            make_scheme(F::TG, 1),
            make_scheme(F::TG, 2),
            make_scheme(F::iTG, 0),
            make_scheme(F::iTG, 1),
            make_scheme(F::iTG, 2)};
}

std::string_view to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::Singular: return "singular";
        case CellStatus::BoundaryExcluded: return "excluded-boundary";
        case CellStatus::InsufficientFaces: return "insufficient-faces";
        case CellStatus::Degenerate: return "degenerate";
    }
    return "unknown";
}

template <class T>
Index GradientResult<T>::n_failed() const {
    Index n = 0;
    for (CellStatus s : flags) n += usable(s) ? 0 : 1;
    return n;
}

template <class T>
Vec2<T> weight_vector(const SchemeSpec& spec, const CellFaceGeom<T>& g) {
    const T rlen = norm(g.R);
    const T w = inv_pow(rlen, spec.q);
    switch (spec.family) {
        case SchemeFamily::LS: return Vec2<T>(w * g.R.x() / rlen, w * g.R.y() / rlen);
        case SchemeFamily::LSA: {
            const T sw = g.S * w;
            return Vec2<T>(sw * g.R.x() / rlen, sw * g.R.y() / rlen);
        }
        case SchemeFamily::TG:
        case SchemeFamily::iTG: {
            const T sw = g.S * w;
            return Vec2<T>(sw * g.s_hat.x(), sw * g.s_hat.y());
        }
        default: throw Error(ErrorCode::InvalidParameter, "Green-Gauss schemes have no weight vectors");
    }
}

template <class T>
CellGradient<T> framework_gradient(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field, Index cell,
                                   std::span<const Vec2<T>> vf, NfPolicy policy, BoundaryPolicy boundary,
                                   Interpolation interpolation, double singular_tol) {
    if (vf.size() != mesh.cell_faces(cell).size()) {
        throw Error(ErrorCode::InvalidParameter, "one weight vector per cell face is required");
    }
    if (policy == NfPolicy::FaceCentroid) {
        throw Error(ErrorCode::InvalidParameter, "N_f = c_f is only available on boundary faces");
    }
    return framework_cell(mesh, geom, field, cell, policy, boundary, interpolation, singular_tol,
                          [&vf](std::size_t k, const CellFaceGeom<T>&) { return vf[k]; });
}

template <class T>
std::vector<T> gg_face_values(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                              Interpolation interpolation) {
    std::vector<T> values(static_cast<std::size_t>(mesh.n_faces()));
    for (Index f = 0; f < mesh.n_faces(); ++f) {
        const Face& fc = mesh.face(f);
        auto& v = values[static_cast<std::size_t>(f)];
        if (fc.is_boundary()) {
            v = field.boundary(mesh.boundary_slot(f));
            continue;
        }
        const auto g = cell_face_geom(mesh, geom, fc.owner, f, NfPolicy::ProjectedFaceCentroid);
        check_alpha(g, fc.owner, f);
        const T phi_p = field.cell(fc.owner);
        v = phi_p + interpolated_increment(g.alpha, field.cell(fc.neighbour) - phi_p, interpolation);
    }
    return values;
}

template <class T>
std::vector<T> corrected_face_values(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                                     const std::vector<Vec2<T>>& aux_grad) {
    std::vector<T> values(static_cast<std::size_t>(mesh.n_faces()));
    for (Index f = 0; f < mesh.n_faces(); ++f) {
        const Face& fc = mesh.face(f);
        auto& v = values[static_cast<std::size_t>(f)];
        if (fc.is_boundary()) {
            v = field.boundary(mesh.boundary_slot(f));
            continue;
        }
        const auto g = cell_face_geom(mesh, geom, fc.owner, f, NfPolicy::ProjectedFaceCentroid);
        check_alpha(g, fc.owner, f);
        const T one_minus = T(1.0) - g.alpha;
        const T phi_c = one_minus * field.cell(fc.owner) + g.alpha * field.cell(fc.neighbour);
        const Vec2<T>& gp = aux_grad[static_cast<std::size_t>(fc.owner)];
        const Vec2<T>& gn = aux_grad[static_cast<std::size_t>(fc.neighbour)];
        const Vec2<T> grad_c(one_minus * gp.x() + g.alpha * gn.x(), one_minus * gp.y() + g.alpha * gn.y());
        const Vec2<T> offset(g.c.x() - g.c_prime.x(), g.c.y() - g.c_prime.y());
        v = phi_c + dot(grad_c, offset);
    }
    return values;
}

template <class T>
std::vector<Vec2<T>> gg_face_contributions(const Mesh& mesh, const Geometry<T>& geom, const std::vector<T>& face_values) {
    std::vector<Vec2<T>> out(static_cast<std::size_t>(mesh.n_faces()));
    for (std::size_t f = 0; f < out.size(); ++f) {
        const T s = geom.face_length[f] * face_values[f];
        out[f] = Vec2<T>(s * geom.face_normal[f].x(), s * geom.face_normal[f].y());
    }
    return out;
}

template <class T>
std::vector<Vec2<T>> gg_accumulate(const Mesh& mesh, const Geometry<T>& geom,
                                   const std::vector<Vec2<T>>& contributions) {
    std::vector<Vec2<T>> grad(static_cast<std::size_t>(mesh.n_cells()));
    for (Index c = 0; c < mesh.n_cells(); ++c) {
        Vec2<T> acc = Vec2<T>::Zero();
        for (Index f : mesh.cell_faces(c)) {
            const Vec2<T>& t = contributions[static_cast<std::size_t>(f)];
            if (mesh.orientation(f, c) > 0) {
                acc += t;
            } else {
                acc -= t;
            }
        }
        const T area = geom.cell_area[static_cast<std::size_t>(c)];
        grad[static_cast<std::size_t>(c)] = Vec2<T>(acc.x() / area, acc.y() / area);
    }
    return grad;
}

template <class T>
GradientResult<T> gg_corrected(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field, AuxScheme aux,
                               BoundaryPolicy boundary) {
    SchemeSpec aux_spec = aux == AuxScheme::iTG0 ? make_scheme(SchemeFamily::iTG, 0) : make_scheme(SchemeFamily::LS, 1);
    aux_spec.boundary = boundary;
    GradientResult<T> pass1 = framework_all(mesh, geom, field, aux_spec);
    // Failed auxiliary cells contribute no correction.
    std::vector<Vec2<T>> aux_grad = pass1.grad;
    for (std::size_t c = 0; c < aux_grad.size(); ++c) {
        if (!usable(pass1.flags[c])) aux_grad[c] = Vec2<T>::Zero();
    }
    GradientResult<T> r = green_gauss(mesh, geom, corrected_face_values(mesh, geom, field, aux_grad));
    for (std::size_t c = 0; c < r.flags.size(); ++c) {
        if (!usable(pass1.flags[c])) r.flags[c] = pass1.flags[c];
    }
    return r;
}

template <class T>
GradientResult<T> compute(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& field,
                          const SchemeSpec& spec) {
    validate(spec);
    try {
        switch (spec.family) {
            case SchemeFamily::GG:
                return green_gauss(mesh, geom, gg_face_values(mesh, geom, field, spec.interpolation));
            case SchemeFamily::GGCorrected: return gg_corrected(mesh, geom, field, spec.aux, spec.boundary);
            default: return framework_all(mesh, geom, field, spec);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateCell) throw;
        // A face-based pass cannot be completed; every cell is reported.
        GradientResult<T> r = empty_result<T>(mesh);
        for (auto& g : r.grad) g = nan_vec<T>();
        for (auto& s : r.flags) s = CellStatus::Degenerate;
        return r;
    }
}

#define FVGRAD_GRADIENT_INSTANTIATE(T)                                                                               \
    template struct GradientResult<T>;                                                                               \
    template Vec2<T> weight_vector<T>(const SchemeSpec&, const CellFaceGeom<T>&);                                    \
    template CellGradient<T> framework_gradient<T>(const Mesh&, const Geometry<T>&, const CellField<T>&, Index,      \
                                                   std::span<const Vec2<T>>, NfPolicy, BoundaryPolicy, Interpolation, \
                                                   double);                                                          \
    template GradientResult<T> compute<T>(const Mesh&, const Geometry<T>&, const CellField<T>&, const SchemeSpec&);  \
    template std::vector<T> gg_face_values<T>(const Mesh&, const Geometry<T>&, const CellField<T>&, Interpolation);  \
    template std::vector<T> corrected_face_values<T>(const Mesh&, const Geometry<T>&, const CellField<T>&,           \
                                                     const std::vector<Vec2<T>>&);                                   \
    template std::vector<Vec2<T>> gg_face_contributions<T>(const Mesh&, const Geometry<T>&, const std::vector<T>&);  \
    template std::vector<Vec2<T>> gg_accumulate<T>(const Mesh&, const Geometry<T>&, const std::vector<Vec2<T>>&);    \
    template GradientResult<T> gg_corrected<T>(const Mesh&, const Geometry<T>&, const CellField<T>&, AuxScheme,      \
                                               BoundaryPolicy);

FVGRAD_GRADIENT_INSTANTIATE(double)
FVGRAD_GRADIENT_INSTANTIATE(DoubleDouble)

}  // namespace fvgrad
