#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>
#include <limits>

#include "fvgrad/numerics/linalg.hpp"
#include "support/gen.hpp"

using namespace fvgrad;
using Big = boost::multiprecision::cpp_dec_float_100;

namespace {

Big big(const DoubleDouble& a) { return Big(a.hi()) + Big(a.lo()); }

double ulp_distance(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / (std::nextafter(std::abs(b), std::numeric_limits<double>::infinity()) - std::abs(b));
}

double rel(const Big& got, const Big& want) {
    if (want == 0) return static_cast<double>(abs(got));
    return static_cast<double>(abs((got - want) / want));
}

}  // namespace

TEST(DoubleDouble, RoundTripThroughExtendedIsIdentity) {
    prop::Gen g(11);
    for (int i = 0; i < 1000; ++i) {
        const double x = g.uniform(-1e6, 1e6) * std::pow(10.0, g.integer(-30, 30));
        EXPECT_EQ(to_double(DoubleDouble(x)), x);
    }
}

TEST(DoubleDouble, BasicOperationsAgreeWithBinary64WithinOneUlp) {
    prop::Gen g(12);
    for (int i = 0; i < 1000; ++i) {
        const double a = g.uniform(-100.0, 100.0);
        const double b = g.uniform(0.5, 100.0);
        const DoubleDouble x(a), y(b);
        EXPECT_LE(ulp_distance(to_double(x + y), a + b), 1.0);
        EXPECT_LE(ulp_distance(to_double(x - y), a - b), 1.0);
        EXPECT_LE(ulp_distance(to_double(x * y), a * b), 1.0);
        EXPECT_LE(ulp_distance(to_double(x / y), a / b), 1.0);
        EXPECT_LE(ulp_distance(to_double(sqrt(y)), std::sqrt(b)), 1.0);
    }
}

TEST(DoubleDouble, ArithmeticMatchesDecimalOracle) {
    prop::Gen g(13);
    for (int i = 0; i < 500; ++i) {
        const DoubleDouble x = DoubleDouble::sum(g.uniform(-10.0, 10.0), g.uniform(-1e-17, 1e-17));
        const DoubleDouble y = DoubleDouble::sum(g.uniform(0.1, 10.0), g.uniform(-1e-17, 1e-17));
        EXPECT_LT(rel(big(x * y), big(x) * big(y)), 1e-30);
        EXPECT_LT(rel(big(x / y), big(x) / big(y)), 1e-30);
        EXPECT_LT(rel(big(sqrt(y)), boost::multiprecision::sqrt(big(y))), 1e-30);
        const Big sum = big(x) + big(y);
        if (abs(sum) > Big(1e-3)) EXPECT_LT(rel(big(x + y), sum), 1e-30);
    }
}

TEST(DoubleDouble, TranscendentalsMatchDecimalOracle) {
    prop::Gen g(14);
    for (int i = 0; i < 200; ++i) {
        const DoubleDouble x(g.uniform(-4.0, 4.0));
        EXPECT_LT(rel(big(tanh(x)), boost::multiprecision::tanh(big(x))), 1e-29);
        EXPECT_LT(rel(big(exp(x)), boost::multiprecision::exp(big(x))), 1e-29);
        EXPECT_LT(rel(big(sin(x)), boost::multiprecision::sin(big(x))), 1e-28);
        EXPECT_LT(rel(big(cos(x)), boost::multiprecision::cos(big(x))), 1e-28);
        const DoubleDouble y(g.uniform(0.1, 4.0));
        EXPECT_LT(rel(big(log(y)), boost::multiprecision::log(big(y))), 1e-29);
        EXPECT_LT(rel(big(atan2(x, y)), boost::multiprecision::atan2(big(x), big(y))), 1e-29);
    }
}

TEST(DoubleDouble, CancellationKeepsLowOrderBits) {
    const DoubleDouble one(1.0);
    const DoubleDouble tiny(1e-20);
    EXPECT_EQ(to_double((one + tiny) - one), 1e-20);
}

TEST(Solve2, Identity) {
    Mat2<double> a = Mat2<double>::Identity();
    const Vec2<double> x = solve2(a, Vec2<double>(3.0, -2.0));
    EXPECT_EQ(x, Vec2<double>(3.0, -2.0));
}

TEST(Solve2, Diagonal) {
    Mat2<double> a;
    a << 2.0, 0.0, 0.0, 4.0;
    EXPECT_EQ(solve2(a, Vec2<double>(2.0, 4.0)), Vec2<double>(1.0, 1.0));
}

TEST(Solve2, IntegerSystemIsExact) {
    Mat2<double> a;
    a << 3.0, 1.0, 2.0, 5.0;
    // x = (1, -2): b = (3 - 2, 2 - 10)
    EXPECT_EQ(solve2(a, Vec2<double>(1.0, -8.0)), Vec2<double>(1.0, -2.0));
}

TEST(Solve2, NearlyParallelRowsAreSingularInDouble) {
    Mat2<double> a;
    a << 1.0, 1.0, 1.0, 1.0 + 1e-16;
    // 1 + 1e-16 rounds to 1, so det is exactly 0.
    EXPECT_EQ(det(a), 0.0);
    try {
        solve2(a, Vec2<double>(1.0, 2.0));
        FAIL() << "expected SingularSystem";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
    }
    EXPECT_THROW(solve2(a, Vec2<double>(1.0, 2.0), PrecisionMode::Double), Error);
}

TEST(Solve2, ToleranceIsRelativeToRowNorms) {
    Mat2<double> a;
    a << 1.0, 0.0, 1.0, 1e-12;
    EXPECT_TRUE(try_solve2(a, Vec2<double>(1.0, 1.0)).has_value());
    EXPECT_TRUE(try_solve2<double>(a * 1e-100, Vec2<double>(1.0, 1.0)).has_value());
    Mat2<double> b;
    b << 1.0, 0.0, 1.0, 1e-14;
    EXPECT_FALSE(try_solve2(b, Vec2<double>(1.0, 1.0)).has_value());
    EXPECT_TRUE(try_solve2<DoubleDouble>(b.cast<DoubleDouble>(), Vec2<DoubleDouble>(1.0, 1.0)).has_value());
}

TEST(Solve2Property, ResidualIsSmallInDouble) {
    prop::Gen g(21);
    for (int i = 0; i < 1000; ++i) {
        const Mat2<double> a = g.well_conditioned();
        const Vec2<double> b = g.vec(-10.0, 10.0);
        const Vec2<double> x = solve2(a, b);
        EXPECT_LE((a * x - b).norm(), 1e-12 * b.norm());
    }
}

TEST(Solve2Property, ExtendedSolveMatchesDecimalOracle) {
    prop::Gen g(22);
    for (int i = 0; i < 1000; ++i) {
        const Mat2<double> a = g.well_conditioned();
        const Vec2<double> b = g.vec(-10.0, 10.0);
        const Vec2<DoubleDouble> x = solve2<DoubleDouble>(a.cast<DoubleDouble>(), promote<DoubleDouble>(b));

        const Big a00(a(0, 0)), a01(a(0, 1)), a10(a(1, 0)), a11(a(1, 1));
        const Big d = a00 * a11 - a01 * a10;
        const Big x0 = (a11 * Big(b.x()) - a01 * Big(b.y())) / d;
        const Big x1 = (a00 * Big(b.y()) - a10 * Big(b.x())) / d;
        const Big scale = boost::multiprecision::sqrt(x0 * x0 + x1 * x1);
        EXPECT_LE(static_cast<double>(abs(big(x.x()) - x0) / scale), 1e-25);
        EXPECT_LE(static_cast<double>(abs(big(x.y()) - x1) / scale), 1e-25);
    }
}

TEST(Solve2, RuntimeDispatchAgreesWithTemplates) {
    prop::Gen g(23);
    const Mat2<double> a = g.well_conditioned();
    const Vec2<double> b = g.vec(-1.0, 1.0);
    EXPECT_EQ(solve2(a, b, PrecisionMode::Double), solve2(a, b));
    EXPECT_EQ(solve2(a, b, PrecisionMode::Extended),
              demote(solve2<DoubleDouble>(a.cast<DoubleDouble>(), promote<DoubleDouble>(b))));
}

TEST(Cond2, Identity) { EXPECT_DOUBLE_EQ(cond2(Mat2<double>(Mat2<double>::Identity())), 1.0); }

TEST(Cond2, Diagonal) {
    Mat2<double> a;
    a << 10.0, 0.0, 0.0, 1.0;
    EXPECT_DOUBLE_EQ(cond2(a), 10.0);
}

TEST(Cond2, ShearMatchesEigenvaluesOfNormalMatrix) {
    Mat2<double> a;
    a << 1.0, 1.0, 0.0, 1.0;
    // A^T A = [[1, 1], [1, 2]]: eigenvalues from trace 3 and determinant 1.
    const double tr = 3.0, dt = 1.0;
    const double lmax = (tr + std::sqrt(tr * tr - 4.0 * dt)) / 2.0;
    const double lmin = dt / lmax;
    EXPECT_NEAR(cond2(a), std::sqrt(lmax / lmin), 1e-14);
    EXPECT_NEAR(cond2(a), (3.0 + std::sqrt(5.0)) / 2.0, 1e-14);
}

TEST(Cond2, SingularIsInfinite) {
    Mat2<double> a;
    a << 1.0, 2.0, 2.0, 4.0;
    EXPECT_TRUE(std::isinf(cond2(a)));
    EXPECT_TRUE(std::isinf(cond2(Mat2<double>(Mat2<double>::Zero()))));
}

TEST(Cond2Property, ScaleInvariant) {
    prop::Gen g(31);
    for (int i = 0; i < 1000; ++i) {
        const Mat2<double> a = g.well_conditioned(100.0);
        double s = g.uniform(1e-3, 1e3);
        if (g.integer(0, 1)) s = -s;
        const double c = cond2(a);
        EXPECT_NEAR(cond2(Mat2<double>(a * s)), c, 1e-12 * c);
    }
}

TEST(Cond2Property, AgreesWithNormalMatrixEigenvalues) {
    prop::Gen g(32);
    for (int i = 0; i < 200; ++i) {
        const Mat2<double> a = g.well_conditioned(1e4);
        const double want = [&] {
            const Mat2<double> n = a.transpose() * a;
            const double tr = n.trace(), dt = det(n);
            const double lmax = tr / 2.0 + std::sqrt(tr * tr / 4.0 - dt);
            return lmax / std::sqrt(dt);
        }();
        EXPECT_NEAR(cond2(a), want, 1e-8 * want);
    }
}

TEST(Precision, NamesRoundTrip) {
    for (PrecisionMode p : {PrecisionMode::Double, PrecisionMode::Extended}) {
        EXPECT_EQ(parse_precision(to_string(p)), p);
    }
    EXPECT_THROW(parse_precision("quad"), Error);
    EXPECT_EQ(default_singular_tolerance(PrecisionMode::Double), 1e-13);
    EXPECT_EQ(default_singular_tolerance(PrecisionMode::Extended), 1e-28);
}
