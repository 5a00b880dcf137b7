#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>

#include "fvgrad/fields/fields.hpp"
#include "fvgrad/meshgen/meshgen.hpp"
#include "support/gen.hpp"

using namespace fvgrad;
using Big = boost::multiprecision::cpp_dec_float_100;

namespace {

Big big(const DoubleDouble& a) { return Big(a.hi()) + Big(a.lo()); }

/// Decimal reference for RadialTanh at an extended-precision point.
Big radial_oracle(const AnalyticField& f, const Vec2<DoubleDouble>& p) {
    const Big x = big(p.x()), y = big(p.y());
    const Big r = boost::multiprecision::sqrt(x * x + y * y);
    const Big s = Big(f.fmin) + (Big(f.fmax) - Big(f.fmin)) * (r - Big(f.rmin)) / (Big(f.rmax) - Big(f.rmin));
    return boost::multiprecision::tanh(s);
}

std::vector<AnalyticField> all_kinds() {
    return {tanh_product(), radial_tanh(), circumferential_tanh(), linear_field(1.0, 2.0, -3.0),
            quadratic_field(0.5, -1.0, 2.0, 0.7, -0.4, 1.3)};
}

/// Random point where `f` is meant to be evaluated, and the length scale of its variation.
std::pair<Vec2<double>, double> sample_point(const AnalyticField& f, prop::Gen& g) {
    switch (f.kind) {
        case FieldKind::RadialTanh:
        case FieldKind::CircumferentialTanh: {
            const double r = g.uniform(f.rmin, f.rmax);
            const double t = g.uniform(f.theta_min, f.theta_max);
            const double scale = f.kind == FieldKind::RadialTanh ? (f.rmax - f.rmin) / (f.fmax - f.fmin)
                                                                 : (f.theta_max - f.theta_min) / (f.fmax - f.fmin);
            return {{r * std::cos(t), r * std::sin(t)}, scale};
        }
        default: return {g.vec(-1.0, 1.0), 1.0};
    }
}

}  // namespace

TEST(Eval, TanhProductAtOrigin) { EXPECT_EQ(eval<double>(tanh_product(), Vec2<double>(0.0, 0.0)), 0.0); }

TEST(Eval, RadialEndpoints) {
    const AnalyticField f = radial_tanh();
    EXPECT_NEAR(eval<double>(f, Vec2<double>(1.0, 0.0)), std::tanh(1.0), 1e-15);
    EXPECT_NEAR(eval<double>(f, Vec2<double>(0.0, 1.0)), std::tanh(1.0), 1e-15);
    EXPECT_NEAR(eval<double>(f, Vec2<double>(1.0005, 0.0)), std::tanh(3.0), 1e-12);
}

TEST(Eval, CircumferentialEndpoints) {
    const AnalyticField f = circumferential_tanh();
    EXPECT_NEAR(eval<double>(f, Vec2<double>(std::cos(-0.256), std::sin(-0.256))), std::tanh(1.0), 1e-14);
    EXPECT_NEAR(eval<double>(f, Vec2<double>(2.0 * std::cos(0.256), 2.0 * std::sin(0.256))), std::tanh(3.0), 1e-14);
}

TEST(Eval, LinearAndQuadratic) {
    EXPECT_DOUBLE_EQ(eval<double>(linear_field(1.0, 2.0, -3.0), Vec2<double>(0.5, 2.0)), 1.0 + 1.0 - 6.0);
    const AnalyticField q = quadratic_field(1.0, 0.0, 0.0, 2.0, 3.0, 4.0);
    EXPECT_DOUBLE_EQ(eval<double>(q, Vec2<double>(1.0, 2.0)), 1.0 + 2.0 + 6.0 + 16.0);
}

TEST(ExactGradient, TanhProductClosedForm) {
    const Vec2<double> g = exact_gradient<double>(tanh_product(), Vec2<double>(0.5, 0.5));
    const double want = std::tanh(0.5) / (std::cosh(0.5) * std::cosh(0.5));
    EXPECT_NEAR(g.x(), want, 1e-15);
    EXPECT_NEAR(g.y(), want, 1e-15);
    const double h = 1e-6;
    const auto f = [](double x, double y) { return eval<double>(tanh_product(), Vec2<double>(x, y)); };
    EXPECT_NEAR((f(0.5 + h, 0.5) - f(0.5 - h, 0.5)) / (2 * h), want, 1e-9);
    EXPECT_NEAR((f(0.5, 0.5 + h) - f(0.5, 0.5 - h)) / (2 * h), want, 1e-9);
}

TEST(ExactGradient, Linear) {
    prop::Gen g(61);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(exact_gradient<double>(linear_field(1.0, 2.0, -3.0), g.vec(-5.0, 5.0)), Vec2<double>(2.0, -3.0));
    }
}

TEST(ExactGradient, RadialToCircumferentialRatio) {
    // At matched f the tanh' factors cancel:
    //   (df/dr) / ((df/dtheta) / r) = (2 / 0.0005) / (2 / 0.512) = 1024 at r = 1.
    const AnalyticField rad = radial_tanh();
    AnalyticField circ = circumferential_tanh();
    const Vec2<double> pr(1.00025, 0.0);            // f = 2 radially
    const double rc = 1.0;
    const Vec2<double> pc(rc, 0.0);                 // f = 2 at theta = 0
    const double ratio = exact_gradient<double>(rad, pr).norm() / exact_gradient<double>(circ, pc).norm();
    EXPECT_NEAR(ratio, (2.0 / 0.0005) / (2.0 / 0.512), 1e-6);
    EXPECT_NEAR(ratio / 1000.0, 1.0, 0.03);
    EXPECT_EQ(eval<double>(circ, pc), std::tanh(2.0));
}

TEST(ExactGradient, DirectionsAreRadialAndCircumferential) {
    const Vec2<double> p(0.9, 0.3);
    const Vec2<double> gr = exact_gradient<double>(radial_tanh(), p);
    const Vec2<double> gc = exact_gradient<double>(circumferential_tanh(), p);
    EXPECT_NEAR(cross<double>(gr, p), 0.0, 1e-12 * gr.norm());
    EXPECT_NEAR(dot<double>(gc, p), 0.0, 1e-12 * gc.norm());
}

TEST(FieldsProperty, FiniteDifferenceAgreesWithExactGradient) {
    prop::Gen g(62);
    for (const AnalyticField& f : all_kinds()) {
        // Rounding |p| leaves ~1e-13 noise in the binary64 radial field;
        // it is checked in extended arithmetic below.
        if (f.kind == FieldKind::RadialTanh) continue;
        SCOPED_TRACE(std::string(to_string(f.kind)));
        for (int i = 0; i < 1000; ++i) {
            const auto [p, scale] = sample_point(f, g);
            // Step relative to the length over which the field varies by O(1).
            const double h = 1e-6 * scale;
            const Vec2<double> ex(h, 0.0), ey(0.0, h);
            const Vec2<double> fd((eval<double>(f, Vec2<double>(p + ex)) - eval<double>(f, Vec2<double>(p - ex))) / (2 * h),
                                  (eval<double>(f, Vec2<double>(p + ey)) - eval<double>(f, Vec2<double>(p - ey))) / (2 * h));
            const Vec2<double> exact = exact_gradient<double>(f, p);
            if (exact.norm() <= 1e-6) continue;
            EXPECT_LE((fd - exact).norm(), 1e-7 * exact.norm()) << p.transpose();
        }
    }
}

TEST(FieldsProperty, RadialFiniteDifferenceInExtended) {
    prop::Gen g(63);
    const AnalyticField f = radial_tanh();
    for (int i = 0; i < 1000; ++i) {
        const auto [p, scale] = sample_point(f, g);
        const DoubleDouble h(1e-7);
        const Vec2<DoubleDouble> q = promote<DoubleDouble>(p);
        auto at = [&](double k) { return eval<DoubleDouble>(f, Vec2<DoubleDouble>(q.x() + h * DoubleDouble(k), q.y())); };
        const DoubleDouble fd = (at(-2) - at(-1) * DoubleDouble(8.0) + at(1) * DoubleDouble(8.0) - at(2)) /
                                (h * DoubleDouble(12.0));
        const double ex = exact_gradient<double>(f, p).x();
        if (std::abs(ex) <= 1e-6) continue;
        EXPECT_LE(std::abs(to_double(fd) - ex), 1e-7 * std::abs(ex));
    }
}

TEST(FieldsProperty, RadialRotationInvarianceInExtended) {
    prop::Gen g(64);
    const AnalyticField f = radial_tanh();
    for (int i = 0; i < 1000; ++i) {
        const auto [p, scale] = sample_point(f, g);
        const Vec2<DoubleDouble> q = promote<DoubleDouble>(p);
        const DoubleDouble a(g.uniform(-3.0, 3.0));
        const DoubleDouble c = cos(a), s = sin(a);
        const Vec2<DoubleDouble> rq(c * q.x() - s * q.y(), s * q.x() + c * q.y());
        EXPECT_LE(std::abs(to_double(eval<DoubleDouble>(f, q) - eval<DoubleDouble>(f, rq))), 1e-14);
    }
}

TEST(FieldsProperty, RadialRotationInDoubleIsLimitedByRadiusRounding) {
    // A rotated binary64 point has |p| perturbed by ~eps, which the field
    // amplifies by df/dr = 4000.
    prop::Gen g(65);
    const AnalyticField f = radial_tanh();
    for (int i = 0; i < 1000; ++i) {
        const auto [p, scale] = sample_point(f, g);
        const double a = g.uniform(-3.0, 3.0);
        const Vec2<double> rp(std::cos(a) * p.x() - std::sin(a) * p.y(), std::sin(a) * p.x() + std::cos(a) * p.y());
        EXPECT_LE(std::abs(eval<double>(f, p) - eval<double>(f, rp)), 4000.0 * 4.0 * 2.3e-16);
    }
}

TEST(Sample, LinearOnUnitSquare) {
    const Mesh m = assemble_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}}, {"w"}, [](Index, Index) { return 0; });
    const CellField<double> s = sample(linear_field(1.0, 2.0, -3.0), m);
    ASSERT_EQ(s.cell_values.size(), 1u);
    EXPECT_DOUBLE_EQ(s.cell(0), 1.0 + 1.0 - 1.5);
    ASSERT_EQ(s.boundary_values.size(), 4u);
    for (Index f = 0; f < m.n_faces(); ++f) {
        const Vec2<double> c = m.geometry().face_centroid[static_cast<std::size_t>(f)];
        EXPECT_DOUBLE_EQ(s.boundary(m.boundary_slot(f)), 1.0 + 2.0 * c.x() - 3.0 * c.y());
    }
}

TEST(Sample, TanhProductMatchesPointwiseEval) {
    const Mesh m = gen_cartesian(0);
    const CellField<double> s = sample(tanh_product(), m);
    ASSERT_EQ(s.cell_values.size(), 16u);
    EXPECT_EQ(s.precision, PrecisionMode::Double);
    for (Index c = 0; c < 16; ++c) {
        EXPECT_EQ(s.cell(c), eval<double>(tanh_product(), m.geometry().cell_centroid[static_cast<std::size_t>(c)]));
    }
}

TEST(Sample, ExtendedTanhProductAgreesWithDouble) {
    // Two tanh calls and a product give up to three ulps; the remainder is
    // the centroid rounding times the gradient.
    const Mesh m = gen_smooth_mapped(2);
    const CellField<double> d = sample(tanh_product(), m);
    const auto gx = build_geometry<DoubleDouble>(m);
    const CellField<DoubleDouble> x = sample<DoubleDouble>(tanh_product(), m, gx);
    EXPECT_EQ(x.precision, PrecisionMode::Extended);
    for (std::size_t c = 0; c < d.cell_values.size(); ++c) {
        const double xv = to_double(x.cell_values[c]);
        const double ulp = std::nextafter(std::abs(xv), INFINITY) - std::abs(xv);
        const Vec2<double> pd = m.geometry().cell_centroid[c];
        const double shift = (pd - demote(gx.cell_centroid[c])).norm();
        const double bound = 3.0 * ulp + exact_gradient<double>(tanh_product(), pd).norm() * shift;
        EXPECT_LE(std::abs(d.cell_values[c] - xv), bound) << c;
    }
}

TEST(Sample, ExtendedEqualsDoubleOnDyadicCartesianForLinear) {
    const Mesh m = gen_cartesian(2);
    const AnalyticField f = linear_field(1.0, 2.0, -3.0);
    const CellField<double> d = sample(f, m);
    const CellField<DoubleDouble> x = sample<DoubleDouble>(f, m, build_geometry<DoubleDouble>(m));
    for (std::size_t c = 0; c < d.cell_values.size(); ++c) EXPECT_EQ(d.cell_values[c], to_double(x.cell_values[c]));
}

TEST(Sample, ExtendedRadialMatchesDecimalOracle) {
    const Mesh m = gen_harc(3);
    const auto gx = build_geometry<DoubleDouble>(m);
    const AnalyticField f = bind_to_mesh(radial_tanh(), m);
    const CellField<DoubleDouble> x = sample<DoubleDouble>(f, m, gx);
    const CellField<double> d = sample(f, m);
    for (std::size_t c = 0; c < x.cell_values.size(); ++c) {
        const Big want = radial_oracle(f, gx.cell_centroid[c]);
        EXPECT_LE(static_cast<double>(abs(big(x.cell_values[c]) - want)), 1e-28);
        // The binary64 value is off by the radius rounding times df/dr.
        EXPECT_LE(std::abs(d.cell_values[c] - static_cast<double>(want)), 4000.0 * 4.0 * 2.3e-16);
    }
}

TEST(Fields, BindToMeshUsesGridExtent) {
    const AnalyticField f = bind_to_mesh(circumferential_tanh(), gen_harc(2));
    EXPECT_NEAR(f.theta_min, -0.256, 1e-14);
    EXPECT_NEAR(f.theta_max, 0.256, 1e-14);
}

TEST(Fields, ParametersAndNames) {
    AnalyticField f = radial_tanh();
    set_field_param(f, "rmax", 1.001);
    EXPECT_EQ(f.rmax, 1.001);
    EXPECT_THROW(set_field_param(f, "cxx", 1.0), Error);
    AnalyticField q = quadratic_field(0, 0, 0, 0, 0, 0);
    set_field_param(q, "cxy", 2.0);
    EXPECT_EQ(q.cxy, 2.0);
    for (const AnalyticField& k : all_kinds()) {
        EXPECT_EQ(parse_field_kind(to_string(k.kind)), k.kind);
        for (const auto& key : field_param_keys(k.kind)) EXPECT_NO_THROW(set_field_param(f = k, key, 1.5));
    }
    try {
        parse_field_kind("sine");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UsageError);
    }
}
