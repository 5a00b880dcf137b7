#pragma once

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <string_view>

#include "fvgrad/error.hpp"
#include "fvgrad/numerics/double_double.hpp"

namespace Eigen {

template <>
struct NumTraits<fvgrad::DoubleDouble> : GenericNumTraits<fvgrad::DoubleDouble> {
    using Real = fvgrad::DoubleDouble;
    using NonInteger = fvgrad::DoubleDouble;
    using Nested = fvgrad::DoubleDouble;
    using Literal = fvgrad::DoubleDouble;

    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 20,
        MulCost = 25
    };

    static inline int digits10() { return 31; }
    static inline Real dummy_precision() { return Real(1e-28); }
};

}  // namespace Eigen

namespace fvgrad {

/// Arithmetic used for geometry assembly, sampling and the per-cell solves.
enum class PrecisionMode { Double, Extended };

std::string_view to_string(PrecisionMode p);
PrecisionMode parse_precision(std::string_view name);

template <class T>
using Vec2 = Eigen::Matrix<T, 2, 1>;

template <class T>
using Mat2 = Eigen::Matrix<T, 2, 2>;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr PrecisionMode mode = PrecisionMode::Double;
    static constexpr double default_singular_tol = 1e-13;
};

template <>
struct ScalarTraits<DoubleDouble> {
    static constexpr PrecisionMode mode = PrecisionMode::Extended;
    static constexpr double default_singular_tol = 1e-28;
};

/// Relative singularity tolerance for the given precision mode.
double default_singular_tolerance(PrecisionMode p);

template <class To, class From>
Vec2<To> promote(const Vec2<From>& v) {
    return Vec2<To>(To(v.x()), To(v.y()));
}

template <class T>
Vec2<double> demote(const Vec2<T>& v) {
    return Vec2<double>(to_double(v.x()), to_double(v.y()));
}

// Fixed-order kernels: every scalar expression below is evaluated exactly as
// written, so double and double-double results are reproducible.

template <class T>
T dot(const Vec2<T>& a, const Vec2<T>& b) {
    return a.x() * b.x() + a.y() * b.y();
}

template <class T>
T norm(const Vec2<T>& a) {
    using std::sqrt;
    return sqrt(dot(a, a));
}

/// z-component of the planar cross product.
template <class T>
T cross(const Vec2<T>& a, const Vec2<T>& b) {
    return a.x() * b.y() - a.y() * b.x();
}

/// a b^T
template <class T>
Mat2<T> outer(const Vec2<T>& a, const Vec2<T>& b) {
    Mat2<T> m;
    m(0, 0) = a.x() * b.x();
    m(0, 1) = a.x() * b.y();
    m(1, 0) = a.y() * b.x();
    m(1, 1) = a.y() * b.y();
    return m;
}

template <class T>
T det(const Mat2<T>& a) {
    return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
}

template <class T>
Vec2<T> apply(const Mat2<T>& a, const Vec2<T>& x) {
    return Vec2<T>(a(0, 0) * x.x() + a(0, 1) * x.y(), a(1, 0) * x.x() + a(1, 1) * x.y());
}

/**
 * Solves A x = b through the adjugate.
 *
 * Returns nullopt when |det A| <= tol * |row0| * |row1|, i.e. when the rows
 * are parallel to within a relative angle of about tol. A tolerance <= 0
 * selects the precision default (1e-13 double, 1e-28 extended).
 */
template <class T>
std::optional<Vec2<T>> try_solve2(const Mat2<T>& a, const Vec2<T>& b, double tol = 0.0) {
    using std::abs;
    using std::sqrt;
    if (tol <= 0.0) tol = ScalarTraits<T>::default_singular_tol;
    const T d = det(a);
    const T r0 = sqrt(a(0, 0) * a(0, 0) + a(0, 1) * a(0, 1));
    const T r1 = sqrt(a(1, 0) * a(1, 0) + a(1, 1) * a(1, 1));
    if (!(abs(d) > T(tol) * r0 * r1)) return std::nullopt;
    const T x = (a(1, 1) * b.x() - a(0, 1) * b.y()) / d;
    const T y = (a(0, 0) * b.y() - a(1, 0) * b.x()) / d;
    return Vec2<T>(x, y);
}

/// As try_solve2, throwing ErrorCode::SingularSystem on failure.
template <class T>
Vec2<T> solve2(const Mat2<T>& a, const Vec2<T>& b, double tol = 0.0) {
    auto x = try_solve2(a, b, tol);
    if (!x) throw Error(ErrorCode::SingularSystem, "2x2 system is singular to working tolerance");
    return *x;
}

/// Runtime-dispatched solve on binary64 input; Extended promotes to
/// double-double, solves, and rounds the result back.
Vec2<double> solve2(const Mat2<double>& a, const Vec2<double>& b, PrecisionMode precision);

/**
 * 2-norm condition number sigma_max / sigma_min of a 2x2 matrix from the
 * closed-form singular values
 *   sigma_{1,2} = (sqrt((a+d)^2 + (c-b)^2) +- sqrt((a-d)^2 + (c+b)^2)) / 2.
 * Returns +inf for a rank-deficient matrix.
 */
template <class T>
double cond2(const Mat2<T>& m) {
    using std::abs;
    using std::sqrt;
    const T& a = m(0, 0);
    const T& b = m(0, 1);
    const T& c = m(1, 0);
    const T& d = m(1, 1);
    const T p = sqrt((a + d) * (a + d) + (c - b) * (c - b));
    const T q = sqrt((a - d) * (a - d) + (c + b) * (c + b));
    const T smax = (p + q) * T(0.5);
    if (!(to_double(smax) > 0.0)) return std::numeric_limits<double>::infinity();
    // sigma_min = |det| / sigma_max avoids the cancellation in p - q.
    const T smin = abs(det(m)) / smax;
    if (!(to_double(smin) > 0.0)) return std::numeric_limits<double>::infinity();
    return to_double(smax / smin);
}

}  // namespace fvgrad
