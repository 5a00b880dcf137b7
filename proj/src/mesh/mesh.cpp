#include "fvgrad/mesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace fvgrad {

namespace {

std::string cell_label(Index c) { return "cell " + std::to_string(c); }

}  // namespace

Mesh::Mesh(std::vector<Vec2<double>> nodes, std::vector<Face> faces, std::vector<std::vector<Index>> cells,
           std::vector<std::string> boundary_names, std::vector<Vec2<double>> node_residuals)
    : nodes_(std::move(nodes)),
      node_residuals_(std::move(node_residuals)),
      faces_(std::move(faces)),
      boundary_names_(std::move(boundary_names)) {
    if (!node_residuals_.empty() && node_residuals_.size() != nodes_.size()) {
        throw Error(ErrorCode::InvalidTopology, "node residuals must match the node count");
    }
    cell_offsets_.reserve(cells.size() + 1);
    cell_offsets_.push_back(0);
    for (const auto& list : cells) {
        cell_face_list_.insert(cell_face_list_.end(), list.begin(), list.end());
        cell_offsets_.push_back(static_cast<Index>(cell_face_list_.size()));
    }
    boundary_slot_.assign(faces_.size(), -1);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        if (faces_[f].is_boundary()) boundary_slot_[f] = n_boundary_faces_++;
    }
    validate_topology();
    geometry_ = build_geometry<double>(*this);
}

void Mesh::validate_topology() const {
    const auto nf = faces_.size();
    const Index nc = n_cells();
    std::vector<int> refs(nf, 0);
    for (std::size_t f = 0; f < nf; ++f) {
        const Face& fc = faces_[f];
        if (fc.a < 0 || fc.b < 0 || fc.a >= n_nodes() || fc.b >= n_nodes() || fc.a == fc.b) {
            throw Error(ErrorCode::InvalidTopology, "face " + std::to_string(f) + " has invalid nodes");
        }
        if (fc.owner < 0 || fc.owner >= nc || fc.neighbour >= nc || fc.neighbour == fc.owner) {
            throw Error(ErrorCode::InvalidTopology, "face " + std::to_string(f) + " has invalid cells");
        }
        if (fc.is_boundary() &&
            (fc.boundary_tag < 0 || static_cast<std::size_t>(fc.boundary_tag) >= boundary_names_.size())) {
            throw Error(ErrorCode::InvalidTopology, "boundary face " + std::to_string(f) + " has no valid tag");
        }
    }
    for (Index c = 0; c < nc; ++c) {
        const auto list = cell_faces(c);
        if (list.size() < 3) throw Error(ErrorCode::InvalidTopology, cell_label(c) + " has fewer than 3 faces");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const Index f = list[k];
            if (f < 0 || static_cast<std::size_t>(f) >= nf) {
                throw Error(ErrorCode::InvalidTopology, cell_label(c) + " references a missing face");
            }
            const Face& fc = faces_[static_cast<std::size_t>(f)];
            if (fc.owner != c && fc.neighbour != c) {
                throw Error(ErrorCode::InvalidTopology, cell_label(c) + " lists face " + std::to_string(f) +
                                                            " which does not border it");
            }
            ++refs[static_cast<std::size_t>(f)];
            // Head of this face must be the tail of the next one.
            const Index head = fc.owner == c ? fc.b : fc.a;
            const Face& nx = faces_[static_cast<std::size_t>(list[(k + 1) % list.size()])];
            const Index tail = nx.owner == c ? nx.a : nx.b;
            if (head != tail) {
                throw Error(ErrorCode::InvalidTopology, cell_label(c) + " faces do not form a closed loop");
            }
        }
    }
    for (std::size_t f = 0; f < nf; ++f) {
        const int expected = faces_[f].is_boundary() ? 1 : 2;
        if (refs[f] != expected) {
            throw Error(ErrorCode::InvalidTopology, "face " + std::to_string(f) + " is referenced " +
                                                        std::to_string(refs[f]) + " times, expected " +
                                                        std::to_string(expected));
        }
    }
}

std::vector<Index> Mesh::cell_nodes(Index c) const {
    std::vector<Index> loop;
    for (Index f : cell_faces(c)) {
        const Face& fc = face(f);
        loop.push_back(fc.owner == c ? fc.a : fc.b);
    }
    return loop;
}

template <class T>
Geometry<T> build_geometry(const Mesh& mesh) {
    using std::sqrt;
    Geometry<T> g;
    const auto nf = static_cast<std::size_t>(mesh.n_faces());
    const auto nc = static_cast<std::size_t>(mesh.n_cells());
    g.face_centroid.resize(nf);
    g.face_length.resize(nf);
    g.face_normal.resize(nf);
    g.cell_centroid.resize(nc);
    g.cell_area.resize(nc);

    const auto& nodes = mesh.nodes();
    const auto& residuals = mesh.node_residuals();
    auto node = [&](Index i) {
        const auto k = static_cast<std::size_t>(i);
        if constexpr (std::is_same_v<T, DoubleDouble>) {
            if (!residuals.empty()) {
                return Vec2<T>(DoubleDouble::sum(nodes[k].x(), residuals[k].x()),
                               DoubleDouble::sum(nodes[k].y(), residuals[k].y()));
            }
        }
        return promote<T>(nodes[k]);
    };

    for (std::size_t f = 0; f < nf; ++f) {
        const Face& fc = mesh.faces()[f];
        const Vec2<T> a = node(fc.a);
        const Vec2<T> b = node(fc.b);
        const Vec2<T> t(b.x() - a.x(), b.y() - a.y());
        const T len = norm(t);
        if (!(to_double(len) > 0.0)) {
            throw Error(ErrorCode::DegenerateCell, "face " + std::to_string(f) + " has zero length");
        }
        g.face_length[f] = len;
        g.face_centroid[f] = Vec2<T>((a.x() + b.x()) * T(0.5), (a.y() + b.y()) * T(0.5));
        g.face_normal[f] = Vec2<T>(t.y() / len, -t.x() / len);
    }

    for (std::size_t c = 0; c < nc; ++c) {
        const auto loop = mesh.cell_nodes(static_cast<Index>(c));
        const Vec2<T> origin = node(loop[0]);
        T twice_area(0.0);
        T mx(0.0);
        T my(0.0);
        for (std::size_t k = 1; k + 1 < loop.size(); ++k) {
            const Vec2<T> p = node(loop[k]);
            const Vec2<T> q = node(loop[k + 1]);
            const Vec2<T> e0(p.x() - origin.x(), p.y() - origin.y());
            const Vec2<T> e1(q.x() - origin.x(), q.y() - origin.y());
            const T w = cross(e0, e1);
            twice_area += w;
            mx += (e0.x() + e1.x()) * w;
            my += (e0.y() + e1.y()) * w;
        }
        if (!(to_double(twice_area) > 0.0)) {
            throw Error(ErrorCode::DegenerateCell, cell_label(static_cast<Index>(c)) + " has non-positive area");
        }
        const T three_a = twice_area * T(3.0);
        g.cell_area[c] = twice_area * T(0.5);
        g.cell_centroid[c] = Vec2<T>(origin.x() + mx / three_a, origin.y() + my / three_a);
    }
    return g;
}

template Geometry<double> build_geometry<double>(const Mesh&);
template Geometry<DoubleDouble> build_geometry<DoubleDouble>(const Mesh&);

template <class T>
CellFaceGeom<T> cell_face_geom(const Mesh& mesh, const Geometry<T>& geom, Index cell, Index face, NfPolicy policy) {
    const Face& fc = mesh.face(face);
    if (fc.owner != cell && fc.neighbour != cell) {
        throw Error(ErrorCode::InvalidTopology, "face " + std::to_string(face) + " does not border " + cell_label(cell));
    }
    const auto fi = static_cast<std::size_t>(face);
    const Vec2<T>& P = geom.cell_centroid[static_cast<std::size_t>(cell)];

    CellFaceGeom<T> r;
    r.S = geom.face_length[fi];
    r.s_hat = fc.owner == cell ? geom.face_normal[fi] : Vec2<T>(-geom.face_normal[fi]);
    r.S_vec = Vec2<T>(r.S * r.s_hat.x(), r.S * r.s_hat.y());
    r.c = geom.face_centroid[fi];
    const Vec2<T> to_c(r.c.x() - P.x(), r.c.y() - P.y());

    if (fc.is_boundary()) {
        if (policy != NfPolicy::FaceCentroid) {
            throw Error(ErrorCode::NoNeighbour,
                        "boundary face " + std::to_string(face) + " has no neighbour for the requested N_f policy");
        }
        r.boundary = true;
        r.R = to_c;
        r.D = to_c;
        const T len = norm(to_c);
        r.d_hat = Vec2<T>(to_c.x() / len, to_c.y() / len);
        r.c_prime = r.c;
        r.m = r.c;
        r.alpha = T(std::numeric_limits<double>::quiet_NaN());
        r.nf_weight = T(1.0);
        return r;
    }

    r.neighbour = mesh.other_cell(face, cell);
    const Vec2<T>& Pf = geom.cell_centroid[static_cast<std::size_t>(r.neighbour)];
    r.D = Vec2<T>(Pf.x() - P.x(), Pf.y() - P.y());
    const T dd = dot(r.D, r.D);
    const T dlen = norm(r.D);
    r.d_hat = Vec2<T>(r.D.x() / dlen, r.D.y() / dlen);
    r.alpha = dot(to_c, r.D) / dd;
    r.c_prime = Vec2<T>(P.x() + r.alpha * r.D.x(), P.y() + r.alpha * r.D.y());
    r.m = Vec2<T>((P.x() + Pf.x()) * T(0.5), (P.y() + Pf.y()) * T(0.5));

    switch (policy) {
        case NfPolicy::NeighbourCentroid: r.nf_weight = T(1.0); break;
        case NfPolicy::ProjectedFaceCentroid: r.nf_weight = r.alpha; break;
        case NfPolicy::Midpoint: r.nf_weight = T(0.5); break;
        case NfPolicy::FaceCentroid: r.nf_weight = T(std::numeric_limits<double>::quiet_NaN()); break;
    }
    if (policy == NfPolicy::FaceCentroid) {
        r.R = to_c;
    } else {
        r.R = Vec2<T>(r.nf_weight * r.D.x(), r.nf_weight * r.D.y());
    }
    return r;
}

template CellFaceGeom<double> cell_face_geom<double>(const Mesh&, const Geometry<double>&, Index, Index, NfPolicy);
template CellFaceGeom<DoubleDouble> cell_face_geom<DoubleDouble>(const Mesh&, const Geometry<DoubleDouble>&, Index,
                                                                 Index, NfPolicy);

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        if (std::isnan(v)) continue;
        sum += v;
        s.max = std::max(s.max, v);
        ++n;
    }
    s.mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    return s;
}

}  // namespace

QualityMetrics quality(const Mesh& mesh) {
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    QualityMetrics q;
    const auto nf = static_cast<std::size_t>(mesh.n_faces());
    q.skewness.assign(nf, nan);
    q.unevenness.assign(nf, nan);
    q.nonorthogonality.assign(nf, nan);
    for (Index f = 0; f < mesh.n_faces(); ++f) {
        const Face& fc = mesh.face(f);
        if (fc.is_boundary()) continue;
        const auto g = cell_face_geom(mesh, fc.owner, f, NfPolicy::NeighbourCentroid);
        const double dlen = norm(g.D);
        const auto fi = static_cast<std::size_t>(f);
        q.skewness[fi] = norm(Vec2<double>(g.c - g.c_prime)) / dlen;
        q.unevenness[fi] = norm(Vec2<double>(g.c_prime - g.m)) / dlen;
        // atan2 keeps full precision near zero where acos(dot) would not.
        q.nonorthogonality[fi] = std::atan2(std::abs(cross(g.d_hat, g.s_hat)), dot(g.d_hat, g.s_hat));
    }
    const auto& geom = mesh.geometry();
    q.aspect_ratio.resize(static_cast<std::size_t>(mesh.n_cells()));
    for (Index c = 0; c < mesh.n_cells(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Index f : mesh.cell_faces(c)) {
            const double len = geom.face_length[static_cast<std::size_t>(f)];
            lo = std::min(lo, len);
            hi = std::max(hi, len);
        }
        q.aspect_ratio[static_cast<std::size_t>(c)] = hi / lo;
    }
    q.skewness_summary = summarize(q.skewness);
    q.unevenness_summary = summarize(q.unevenness);
    q.nonorthogonality_summary = summarize(q.nonorthogonality);
    q.aspect_ratio_summary = summarize(q.aspect_ratio);
    return q;
}

Mesh translated(const Mesh& mesh, const Vec2<double>& shift) {
    std::vector<Vec2<double>> nodes = mesh.nodes();
    for (auto& p : nodes) p += shift;
    std::vector<std::vector<Index>> cells;
    cells.reserve(static_cast<std::size_t>(mesh.n_cells()));
    for (Index c = 0; c < mesh.n_cells(); ++c) {
        const auto list = mesh.cell_faces(c);
        cells.emplace_back(list.begin(), list.end());
    }
    return Mesh(std::move(nodes), mesh.faces(), std::move(cells), mesh.boundary_names());
}

}  // namespace fvgrad
