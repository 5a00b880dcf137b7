#include "fvgrad/meshgen/meshgen.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

namespace fvgrad {

namespace {

const std::vector<std::string> kPlanarSides = {"west", "east", "south", "north"};
const std::vector<std::string> kAnnulusSides = {"inner", "outer", "theta_min", "theta_max"};

void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

int cells_per_side(int level, int n0) {
    require(level >= 0 && level <= 14, ErrorCode::InvalidParameter, "level must be in [0, 14]");
    require(n0 >= 1, ErrorCode::InvalidParameter, "n0 must be >= 1");
    return n0 << level;
}

void check_domain(const Rect& d) {
    require(d.xmax > d.xmin && d.ymax > d.ymin, ErrorCode::InvalidParameter, "domain must have positive extent");
}

std::vector<Vec2<double>> uniform_nodes(int n, const Rect& d) {
    const double hx = (d.xmax - d.xmin) / n;
    const double hy = (d.ymax - d.ymin) / n;
    std::vector<Vec2<double>> nodes;
    nodes.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double x = i == n ? d.xmax : d.xmin + i * hx;
            const double y = j == n ? d.ymax : d.ymin + j * hy;
            nodes.emplace_back(x, y);
        }
    }
    return nodes;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(GridFamily f) {
    switch (f) {
        case GridFamily::Cartesian: return "cartesian";
        case GridFamily::SmoothMapped: return "smooth-mapped";
        case GridFamily::LocallyRefined: return "locally-refined";
        case GridFamily::Perturbed: return "perturbed";
        case GridFamily::HARC: return "harc";
        case GridFamily::HARCO: return "harco";
    }
    return "unknown";
}

GridFamily parse_grid_family(std::string_view name) {
    for (GridFamily f : {GridFamily::Cartesian, GridFamily::SmoothMapped, GridFamily::LocallyRefined,
                         GridFamily::Perturbed, GridFamily::HARC, GridFamily::HARCO}) {
        if (name == to_string(f)) return f;
    }
    throw Error(ErrorCode::UsageError, "unknown grid family '" + std::string(name) + "'");
}

bool is_annular(GridFamily f) { return f == GridFamily::HARC || f == GridFamily::HARCO; }

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t bits = counter_hash(seed, stream, index) >> 11;  // 53 bits
    return static_cast<double>(bits) * 0x1.0p-52 - 1.0;
}

Mesh assemble_mesh(std::vector<Vec2<double>> nodes, const std::vector<std::vector<Index>>& loops,
                   std::vector<std::string> names, const std::function<int(Index, Index)>& boundary_tag,
                   std::vector<Vec2<double>> node_residuals) {
    std::vector<Face> faces;
    std::vector<std::vector<Index>> cells(loops.size());
    std::unordered_map<std::uint64_t, Index> edge_face;
    edge_face.reserve(loops.size() * 3);

    for (std::size_t c = 0; c < loops.size(); ++c) {
        const auto& loop = loops[c];
        // Signed area relative to the first vertex.
        double twice_area = 0.0;
        for (std::size_t k = 1; k + 1 < loop.size(); ++k) {
            const Vec2<double> e0 = nodes[static_cast<std::size_t>(loop[k])] - nodes[static_cast<std::size_t>(loop[0])];
            const Vec2<double> e1 =
                nodes[static_cast<std::size_t>(loop[k + 1])] - nodes[static_cast<std::size_t>(loop[0])];
            twice_area += cross(e0, e1);
        }
        require(twice_area > 0.0, ErrorCode::FoldedMesh, "cell " + std::to_string(c) + " is folded (area <= 0)");

        for (std::size_t k = 0; k < loop.size(); ++k) {
            const Index a = loop[k];
            const Index b = loop[(k + 1) % loop.size()];
            const auto lo = static_cast<std::uint64_t>(std::min(a, b));
            const auto hi = static_cast<std::uint64_t>(std::max(a, b));
            const std::uint64_t key = (lo << 32) | hi;
            auto it = edge_face.find(key);
            if (it == edge_face.end()) {
                Face f;
                f.a = a;
                f.b = b;
                f.owner = static_cast<Index>(c);
                edge_face.emplace(key, static_cast<Index>(faces.size()));
                cells[c].push_back(static_cast<Index>(faces.size()));
                faces.push_back(f);
            } else {
                Face& f = faces[static_cast<std::size_t>(it->second)];
                require(f.neighbour == kNoCell && f.a == b && f.b == a, ErrorCode::InvalidTopology,
                        "edge shared inconsistently between cells");
                f.neighbour = static_cast<Index>(c);
                cells[c].push_back(it->second);
            }
        }
    }
    for (Face& f : faces) {
        if (f.is_boundary()) f.boundary_tag = boundary_tag(f.a, f.b);
    }
    return Mesh(std::move(nodes), std::move(faces), std::move(cells), std::move(names), std::move(node_residuals));
}

Mesh structured_mesh(int ni, int nj, std::vector<Vec2<double>> nodes, const std::vector<std::string>& names,
                     std::vector<Vec2<double>> node_residuals) {
    const int stride = ni + 1;
    auto id = [stride](int i, int j) { return static_cast<Index>(i + j * stride); };
    std::vector<std::vector<Index>> loops;
    loops.reserve(static_cast<std::size_t>(ni * nj));
    for (int j = 0; j < nj; ++j) {
        for (int i = 0; i < ni; ++i) loops.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
    auto tag = [=](Index a, Index b) {
        const int ia = a % stride, ja = a / stride, ib = b % stride, jb = b / stride;
        if (ia == 0 && ib == 0) return 0;
        if (ia == ni && ib == ni) return 1;
        if (ja == 0 && jb == 0) return 2;
        if (ja == nj && jb == nj) return 3;
        return -1;
    };
    return assemble_mesh(std::move(nodes), loops, names, tag, std::move(node_residuals));
}

Mesh gen_cartesian(int level, const Rect& domain, int n0) {
    check_domain(domain);
    const int n = cells_per_side(level, n0);
    return structured_mesh(n, n, uniform_nodes(n, domain), kPlanarSides);
}

Mesh gen_smooth_mapped(int level, const Rect& domain, double amplitude, int n0) {
    check_domain(domain);
    require(amplitude >= 0.0 && amplitude <= 0.25, ErrorCode::InvalidParameter, "amplitude must be in [0, 0.25]");
    const int n = cells_per_side(level, n0);
    auto nodes = uniform_nodes(n, domain);
    const double half_w = 0.5 * (domain.xmax - domain.xmin);
    const double half_h = 0.5 * (domain.ymax - domain.ymin);
    const double pi = std::numbers::pi;
    for (int j = 1; j < n; ++j) {
        const double eta = -1.0 + 2.0 * j / n;
        for (int i = 1; i < n; ++i) {
            const double xi = -1.0 + 2.0 * i / n;
            const double s = amplitude * std::sin(pi * xi) * std::sin(pi * eta);
            auto& p = nodes[static_cast<std::size_t>(i + j * (n + 1))];
            p = Vec2<double>(p.x() + half_w * s, p.y() + half_h * s);
        }
    }
    return structured_mesh(n, n, std::move(nodes), kPlanarSides);
}

Mesh gen_perturbed(int level, const Rect& domain, double beta, std::uint64_t seed, int n0) {
    check_domain(domain);
    require(beta >= 0.0 && beta <= 0.4, ErrorCode::InvalidParameter, "beta must be in [0, 0.4]");
    const int n = cells_per_side(level, n0);
    auto nodes = uniform_nodes(n, domain);
    const double hx = (domain.xmax - domain.xmin) / n;
    const double hy = (domain.ymax - domain.ymin) / n;
    const auto stream = static_cast<std::uint64_t>(level);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const bool on_x_side = i == 0 || i == n;
            const bool on_y_side = j == 0 || j == n;
            if (on_x_side && on_y_side) continue;  // corner
            const auto node = static_cast<std::uint64_t>(i + j * (n + 1));
            auto& p = nodes[node];
            // Sides only move tangentially.
            const double dx = on_x_side ? 0.0 : beta * hx * counter_uniform(seed, stream, 2 * node);
            const double dy = on_y_side ? 0.0 : beta * hy * counter_uniform(seed, stream, 2 * node + 1);
            p = Vec2<double>(p.x() + dx, p.y() + dy);
        }
    }
    return structured_mesh(n, n, std::move(nodes), kPlanarSides);
}

namespace {

Mesh annulus(int level, double radius, double aspect, double dtheta0, double oblique_deg) {
    require(radius > 0.0 && aspect > 0.0 && dtheta0 > 0.0, ErrorCode::InvalidParameter,
            "annulus parameters must be positive");
    require(level >= 0 && level <= 12, ErrorCode::InvalidParameter, "annulus level must be in [0, 12]");
    using DD = DoubleDouble;
    const int n = 2 << level;  // 2^(level+1)
    const DD R(radius);
    const DD dtheta = DD(dtheta0) / DD(1 << level);
    const DD dr = R * dtheta / DD(aspect);
    DD shear(0.0);
    if (oblique_deg != 0.0) {
        const DD angle = DD(oblique_deg) * dd_constants::pi / DD(180.0);
        shear = sin(angle) / cos(angle);
    }
    std::vector<Vec2<double>> nodes;
    std::vector<Vec2<double>> residuals;
    nodes.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    residuals.reserve(nodes.capacity());
    // i runs radially (fastest), j circumferentially: (r, theta) is right-handed.
    for (int j = 0; j <= n; ++j) {
        const DD theta_j = DD(j - n / 2) * dtheta;
        for (int i = 0; i <= n; ++i) {
            const DD r = R + DD(i) * dr;
            const DD theta = theta_j + (r - R) * shear / R;
            const DD x = r * cos(theta);
            const DD y = r * sin(theta);
            nodes.emplace_back(x.hi(), y.hi());
            residuals.emplace_back(x.lo(), y.lo());
        }
    }
    return structured_mesh(n, n, std::move(nodes), kAnnulusSides, std::move(residuals));
}

}  // namespace

Mesh gen_harc(int level, double radius, double aspect, double dtheta0) {
    return annulus(level, radius, aspect, dtheta0, 0.0);
}

Mesh gen_harco(int level, double radius, double aspect, double dtheta0, double oblique_deg) {
    require(oblique_deg > -89.0 && oblique_deg < 89.0, ErrorCode::InvalidParameter, "oblique angle out of range");
    return annulus(level, radius, aspect, dtheta0, oblique_deg);
}

Mesh gen_locally_refined(int level, const Rect& domain, const std::vector<Rect>& patches, int n0) {
    check_domain(domain);
    const int n = cells_per_side(level, n0);
    const int depth = static_cast<int>(patches.size());
    require(depth <= 8, ErrorCode::BadPatch, "at most 8 nested patches are supported");
    const long fine = 1L << depth;      // lattice units per base cell
    const long m = static_cast<long>(n) * fine;  // lattice points per side - 1
    const double ux = (domain.xmax - domain.xmin) / static_cast<double>(m);
    const double uy = (domain.ymax - domain.ymin) / static_cast<double>(m);

    // Patch rectangles in lattice coordinates; region 0 is the domain.
    struct IRect {
        long x0, x1, y0, y1;
    };
    std::vector<IRect> region{{0, m, 0, m}};
    for (int k = 0; k < depth; ++k) {
        const Rect& p = patches[static_cast<std::size_t>(k)];
        const long step = fine >> k;  // cell size of the enclosing resolution
        auto snap = [&](double v, double origin, double u, const char* what) {
            const double t = (v - origin) / u / static_cast<double>(step);
            const double r = std::round(t);
            require(std::abs(t - r) < 1e-9, ErrorCode::BadPatch,
                    "patch " + std::to_string(k) + " " + what + " is not aligned to the enclosing cells");
            return static_cast<long>(r) * step;
        };
        IRect ir{snap(p.xmin, domain.xmin, ux, "xmin"), snap(p.xmax, domain.xmin, ux, "xmax"),
                 snap(p.ymin, domain.ymin, uy, "ymin"), snap(p.ymax, domain.ymin, uy, "ymax")};
        const IRect& outer = region.back();
        require(ir.x1 > ir.x0 && ir.y1 > ir.y0, ErrorCode::BadPatch, "patch " + std::to_string(k) + " is empty");
        if (k == 0) {
            require(ir.x0 >= outer.x0 && ir.x1 <= outer.x1 && ir.y0 >= outer.y0 && ir.y1 <= outer.y1,
                    ErrorCode::BadPatch, "patch 0 extends outside the domain");
        } else {
            // Strict nesting keeps the grading 2:1.
            require(ir.x0 > outer.x0 && ir.x1 < outer.x1 && ir.y0 > outer.y0 && ir.y1 < outer.y1, ErrorCode::BadPatch,
                    "patch " + std::to_string(k) + " is not strictly nested in patch " + std::to_string(k - 1));
        }
        region.push_back(ir);
    }

    auto inside = [](const IRect& r, long x0, long y0, long s) {
        return x0 >= r.x0 && x0 + s <= r.x1 && y0 >= r.y0 && y0 + s <= r.y1;
    };

    // Cells as lattice squares (lower-left corner, size).
    struct Square {
        long x, y, s;
    };
    std::vector<Square> squares;
    for (int r = 0; r <= depth; ++r) {
        const long s = fine >> r;
        const IRect& reg = region[static_cast<std::size_t>(r)];
        for (long y = reg.y0; y < reg.y1; y += s) {
            for (long x = reg.x0; x < reg.x1; x += s) {
                if (r < depth && inside(region[static_cast<std::size_t>(r) + 1], x, y, s)) continue;
                squares.push_back({x, y, s});
            }
        }
    }

    std::map<std::pair<long, long>, Index> node_id;
    std::vector<Vec2<double>> nodes;
    auto add_node = [&](long x, long y) {
        auto [it, inserted] = node_id.emplace(std::make_pair(x, y), static_cast<Index>(nodes.size()));
        if (inserted) {
            const double px = x == m ? domain.xmax : domain.xmin + static_cast<double>(x) * ux;
            const double py = y == m ? domain.ymax : domain.ymin + static_cast<double>(y) * uy;
            nodes.emplace_back(px, py);
        }
        return it->second;
    };
    for (const auto& q : squares) {
        add_node(q.x, q.y);
        add_node(q.x + q.s, q.y);
        add_node(q.x + q.s, q.y + q.s);
        add_node(q.x, q.y + q.s);
    }

    std::vector<std::vector<Index>> loops;
    loops.reserve(squares.size());
    for (const auto& q : squares) {
        std::vector<Index> loop;
        auto walk = [&](long x0, long y0, long dx, long dy) {
            for (long t = 0; t < q.s; ++t) {
                auto it = node_id.find({x0 + t * dx, y0 + t * dy});
                if (it != node_id.end()) loop.push_back(it->second);
            }
        };
        walk(q.x, q.y, 1, 0);
        walk(q.x + q.s, q.y, 0, 1);
        walk(q.x + q.s, q.y + q.s, -1, 0);
        walk(q.x, q.y + q.s, 0, -1);
        loops.push_back(std::move(loop));
    }

    std::vector<std::pair<long, long>> lattice(nodes.size());
    for (const auto& [key, id] : node_id) lattice[static_cast<std::size_t>(id)] = key;
    auto tag = [&](Index a, Index b) {
        const auto& pa = lattice[static_cast<std::size_t>(a)];
        const auto& pb = lattice[static_cast<std::size_t>(b)];
        if (pa.first == 0 && pb.first == 0) return 0;
        if (pa.first == m && pb.first == m) return 1;
        if (pa.second == 0 && pb.second == 0) return 2;
        if (pa.second == m && pb.second == m) return 3;
        return -1;
    };
    return assemble_mesh(std::move(nodes), loops, kPlanarSides, tag);
}

Mesh generate(const GridFamilySpec& spec) {
    const GridParams& p = spec.params;
    switch (spec.family) {
        case GridFamily::Cartesian: return gen_cartesian(spec.level, p.domain, p.n0);
        case GridFamily::SmoothMapped: return gen_smooth_mapped(spec.level, p.domain, p.amplitude, p.n0);
        case GridFamily::LocallyRefined: return gen_locally_refined(spec.level, p.domain, p.patches, p.n0);
        case GridFamily::Perturbed:
            require(p.seed.has_value(), ErrorCode::InvalidParameter, "the perturbed family requires a seed");
            return gen_perturbed(spec.level, p.domain, p.beta, *p.seed, p.n0);
        case GridFamily::HARC: return gen_harc(spec.level, p.radius, p.aspect, p.dtheta0);
        case GridFamily::HARCO: return gen_harco(spec.level, p.radius, p.aspect, p.dtheta0, p.oblique_deg);
    }
    throw Error(ErrorCode::InvalidParameter, "unknown grid family");
}

double annulus_dtheta(const GridFamilySpec& spec) {
    return spec.params.dtheta0 / static_cast<double>(1 << spec.level);
}

double spacing(const GridFamilySpec& spec, const Mesh& mesh) {
    if (is_annular(spec.family)) return spec.params.radius * annulus_dtheta(spec);
    const Rect& d = spec.params.domain;
    return std::sqrt((d.xmax - d.xmin) * (d.ymax - d.ymin) / mesh.n_cells());
}

double gamma_ratio(const GridFamilySpec& spec) {
    if (!is_annular(spec.family)) return std::numeric_limits<double>::quiet_NaN();
    return spec.params.aspect * annulus_dtheta(spec) / 2.0;
}

}  // namespace fvgrad
