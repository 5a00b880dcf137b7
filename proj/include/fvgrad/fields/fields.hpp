#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fvgrad/mesh/mesh.hpp"

namespace fvgrad {

enum class FieldKind { TanhProduct, RadialTanh, CircumferentialTanh, Linear, Quadratic };

std::string_view to_string(FieldKind k);
FieldKind parse_field_kind(std::string_view name);

/**
 * Analytic scalar field with closed-form gradient.
 *
 *   TanhProduct          tanh(x) tanh(y)
 *   RadialTanh           tanh(f(r)),     f linear from fmin at rmin to fmax at rmax
 *   CircumferentialTanh  tanh(f(theta)), f linear from fmin at theta_min to fmax at theta_max
 *   Linear               a + b x + c y
 *   Quadratic            a + b x + c y + cxx x^2 + cxy x y + cyy y^2
 */
struct AnalyticField {
    FieldKind kind = FieldKind::TanhProduct;
    double fmin = 1.0;
    double fmax = 3.0;
    double rmin = 1.0;
    double rmax = 1.0005;
    double theta_min = -0.256;
    double theta_max = 0.256;
    double a = 1.0;
    double b = 2.0;
    double c = -3.0;
    double cxx = 0.0;
    double cxy = 0.0;
    double cyy = 0.0;
};

AnalyticField tanh_product();
AnalyticField radial_tanh();
AnalyticField circumferential_tanh();
AnalyticField linear_field(double a, double b, double c);
AnalyticField quadratic_field(double a, double b, double c, double cxx, double cxy, double cyy);

/// Sets a circumferential field's theta extents to the mesh's angular extents.
AnalyticField bind_to_mesh(AnalyticField field, const Mesh& mesh);

/// Sets a named parameter; throws UsageError for keys the kind does not use.
void set_field_param(AnalyticField& field, std::string_view key, double value);

/// Parameter keys accepted by set_field_param for this kind.
std::vector<std::string> field_param_keys(FieldKind kind);

template <class T>
T eval(const AnalyticField& field, const Vec2<T>& p);

template <class T>
Vec2<T> exact_gradient(const AnalyticField& field, const Vec2<T>& p);

/// Cell-centred values and boundary-face values (indexed by Mesh::boundary_slot).
template <class T>
struct CellField {
    std::vector<T> cell_values;
    std::vector<T> boundary_values;
    PrecisionMode precision = ScalarTraits<T>::mode;

    T cell(Index c) const { return cell_values[static_cast<std::size_t>(c)]; }
    T boundary(Index slot) const { return boundary_values[static_cast<std::size_t>(slot)]; }
};

/// Samples at the cell centroids and boundary-face centroids of `geom`.
template <class T>
CellField<T> sample(const AnalyticField& field, const Mesh& mesh, const Geometry<T>& geom);

inline CellField<double> sample(const AnalyticField& field, const Mesh& mesh) {
    return sample<double>(field, mesh, mesh.geometry());
}

extern template double eval<double>(const AnalyticField&, const Vec2<double>&);
extern template DoubleDouble eval<DoubleDouble>(const AnalyticField&, const Vec2<DoubleDouble>&);
extern template Vec2<double> exact_gradient<double>(const AnalyticField&, const Vec2<double>&);
extern template Vec2<DoubleDouble> exact_gradient<DoubleDouble>(const AnalyticField&, const Vec2<DoubleDouble>&);
extern template CellField<double> sample<double>(const AnalyticField&, const Mesh&, const Geometry<double>&);
extern template CellField<DoubleDouble> sample<DoubleDouble>(const AnalyticField&, const Mesh&,
                                                             const Geometry<DoubleDouble>&);

}  // namespace fvgrad
