#include "fvgrad/fields/fields.hpp"

#include <algorithm>
#include <cmath>

namespace fvgrad {

namespace {

struct KeyRef {
    const char* key;
    double AnalyticField::*member;
};

const std::vector<KeyRef>& keys_for(FieldKind kind) {
    static const std::vector<KeyRef> none;
    static const std::vector<KeyRef> radial = {{"fmin", &AnalyticField::fmin},
                                               {"fmax", &AnalyticField::fmax},
                                               {"rmin", &AnalyticField::rmin},
                                               {"rmax", &AnalyticField::rmax}};
    static const std::vector<KeyRef> circ = {{"fmin", &AnalyticField::fmin},
                                             {"fmax", &AnalyticField::fmax},
                                             {"thetamin", &AnalyticField::theta_min},
                                             {"thetamax", &AnalyticField::theta_max}};
    static const std::vector<KeyRef> lin = {
        {"a", &AnalyticField::a}, {"b", &AnalyticField::b}, {"c", &AnalyticField::c}};
    static const std::vector<KeyRef> quad = {{"a", &AnalyticField::a},     {"b", &AnalyticField::b},
                                             {"c", &AnalyticField::c},     {"cxx", &AnalyticField::cxx},
                                             {"cxy", &AnalyticField::cxy}, {"cyy", &AnalyticField::cyy}};
    switch (kind) {
        case FieldKind::TanhProduct: return none;
        case FieldKind::RadialTanh: return radial;
        case FieldKind::CircumferentialTanh: return circ;
        case FieldKind::Linear: return lin;
        case FieldKind::Quadratic: return quad;
    }
    return none;
}

/// d tanh(f) / df = 1 - tanh(f)^2
template <class T>
T tanh_prime(const T& f) {
    using std::tanh;
    const T t = tanh(f);
    return T(1.0) - t * t;
}

}  // namespace

std::string_view to_string(FieldKind k) {
    switch (k) {
        case FieldKind::TanhProduct: return "tanh-product";
        case FieldKind::RadialTanh: return "radial-tanh";
        case FieldKind::CircumferentialTanh: return "circumferential-tanh";
        case FieldKind::Linear: return "linear";
        case FieldKind::Quadratic: return "quadratic";
    }
    return "unknown";
}

FieldKind parse_field_kind(std::string_view name) {
    for (FieldKind k : {FieldKind::TanhProduct, FieldKind::RadialTanh, FieldKind::CircumferentialTanh,
                        FieldKind::Linear, FieldKind::Quadratic}) {
        if (name == to_string(k)) return k;
    }
    throw Error(ErrorCode::UsageError, "unknown field '" + std::string(name) + "'");
}

AnalyticField tanh_product() { return AnalyticField{}; }

AnalyticField radial_tanh() {
    AnalyticField f;
    f.kind = FieldKind::RadialTanh;
    return f;
}

AnalyticField circumferential_tanh() {
    AnalyticField f;
    f.kind = FieldKind::CircumferentialTanh;
    return f;
}

AnalyticField linear_field(double a, double b, double c) {
    AnalyticField f;
    f.kind = FieldKind::Linear;
    f.a = a;
    f.b = b;
    f.c = c;
    return f;
}

AnalyticField quadratic_field(double a, double b, double c, double cxx, double cxy, double cyy) {
    AnalyticField f = linear_field(a, b, c);
    f.kind = FieldKind::Quadratic;
    f.cxx = cxx;
    f.cxy = cxy;
    f.cyy = cyy;
    return f;
}

AnalyticField bind_to_mesh(AnalyticField field, const Mesh& mesh) {
    if (field.kind != FieldKind::CircumferentialTanh || mesh.n_nodes() == 0) return field;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& p : mesh.nodes()) {
        const double t = std::atan2(p.y(), p.x());
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    field.theta_min = lo;
    field.theta_max = hi;
    return field;
}

void set_field_param(AnalyticField& field, std::string_view key, double value) {
    for (const auto& k : keys_for(field.kind)) {
        if (key == k.key) {
            field.*k.member = value;
            return;
        }
    }
    throw Error(ErrorCode::UsageError,
                "field '" + std::string(to_string(field.kind)) + "' has no parameter '" + std::string(key) + "'");
}

std::vector<std::string> field_param_keys(FieldKind kind) {
    std::vector<std::string> out;
    for (const auto& k : keys_for(kind)) out.emplace_back(k.key);
    return out;
}

template <class T>
T eval(const AnalyticField& fd, const Vec2<T>& p) {
    using std::atan2;
    using std::tanh;
    const T x = p.x();
    const T y = p.y();
    switch (fd.kind) {
        case FieldKind::TanhProduct: return tanh(x) * tanh(y);
        case FieldKind::RadialTanh: {
            const T r = norm(p);
            const T f = T(fd.fmin) + (T(fd.fmax) - T(fd.fmin)) * (r - T(fd.rmin)) / (T(fd.rmax) - T(fd.rmin));
            return tanh(f);
        }
        case FieldKind::CircumferentialTanh: {
            const T th = atan2(y, x);
            const T f = T(fd.fmin) +
                        (T(fd.fmax) - T(fd.fmin)) * (th - T(fd.theta_min)) / (T(fd.theta_max) - T(fd.theta_min));
            return tanh(f);
        }
        case FieldKind::Linear: return T(fd.a) + T(fd.b) * x + T(fd.c) * y;
        case FieldKind::Quadratic:
            return T(fd.a) + T(fd.b) * x + T(fd.c) * y + T(fd.cxx) * x * x + T(fd.cxy) * x * y + T(fd.cyy) * y * y;
    }
    return T(0.0);
}

template <class T>
Vec2<T> exact_gradient(const AnalyticField& fd, const Vec2<T>& p) {
    using std::atan2;
    using std::tanh;
    const T x = p.x();
    const T y = p.y();
    switch (fd.kind) {
        case FieldKind::TanhProduct: return Vec2<T>(tanh_prime(x) * tanh(y), tanh(x) * tanh_prime(y));
        case FieldKind::RadialTanh: {
            const T r = norm(p);
            const T slope = (T(fd.fmax) - T(fd.fmin)) / (T(fd.rmax) - T(fd.rmin));
            const T f = T(fd.fmin) + slope * (r - T(fd.rmin));
            const T g = tanh_prime(f) * slope / r;
            return Vec2<T>(g * x, g * y);
        }
        case FieldKind::CircumferentialTanh: {
            const T th = atan2(y, x);
            const T slope = (T(fd.fmax) - T(fd.fmin)) / (T(fd.theta_max) - T(fd.theta_min));
            const T f = T(fd.fmin) + slope * (th - T(fd.theta_min));
            // (1/r) theta_hat = (-y, x) / r^2
            const T g = tanh_prime(f) * slope / dot(p, p);
            return Vec2<T>(-(g * y), g * x);
        }
        case FieldKind::Linear: return Vec2<T>(T(fd.b), T(fd.c));
        case FieldKind::Quadratic:
            return Vec2<T>(T(fd.b) + T(2.0 * fd.cxx) * x + T(fd.cxy) * y,
                           T(fd.c) + T(fd.cxy) * x + T(2.0 * fd.cyy) * y);
    }
    return Vec2<T>(T(0.0), T(0.0));
}

template <class T>
CellField<T> sample(const AnalyticField& field, const Mesh& mesh, const Geometry<T>& geom) {
    CellField<T> out;
    out.cell_values.resize(static_cast<std::size_t>(mesh.n_cells()));
    for (Index c = 0; c < mesh.n_cells(); ++c) {
        out.cell_values[static_cast<std::size_t>(c)] = eval(field, geom.cell_centroid[static_cast<std::size_t>(c)]);
    }
    out.boundary_values.resize(static_cast<std::size_t>(mesh.n_boundary_faces()));
    for (Index f = 0; f < mesh.n_faces(); ++f) {
        const Index slot = mesh.boundary_slot(f);
        if (slot < 0) continue;
        out.boundary_values[static_cast<std::size_t>(slot)] =
            eval(field, geom.face_centroid[static_cast<std::size_t>(f)]);
    }
    return out;
}

template double eval<double>(const AnalyticField&, const Vec2<double>&);
template DoubleDouble eval<DoubleDouble>(const AnalyticField&, const Vec2<DoubleDouble>&);
template Vec2<double> exact_gradient<double>(const AnalyticField&, const Vec2<double>&);
template Vec2<DoubleDouble> exact_gradient<DoubleDouble>(const AnalyticField&, const Vec2<DoubleDouble>&);
template CellField<double> sample<double>(const AnalyticField&, const Mesh&, const Geometry<double>&);
template CellField<DoubleDouble> sample<DoubleDouble>(const AnalyticField&, const Mesh&, const Geometry<DoubleDouble>&);

}  // namespace fvgrad
