#include "fvgrad/numerics/double_double.hpp"

#include <array>
#include <cstdio>
#include <ostream>

namespace fvgrad {

namespace {

DoubleDouble sqr(const DoubleDouble& a) { return a * a; }

DoubleDouble mul_pow2(const DoubleDouble& a, double p) { return DoubleDouble::from_parts(a.hi() * p, a.lo() * p); }

// 1/3!, 1/4!, ..., 1/17!
const std::array<DoubleDouble, 15>& inverse_factorials() {
    static const std::array<DoubleDouble, 15> table = [] {
        std::array<DoubleDouble, 15> t{};
        DoubleDouble fact = 2.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            fact *= DoubleDouble(static_cast<double>(i + 3));
            t[i] = DoubleDouble(1.0) / fact;
        }
        return t;
    }();
    return table;
}

// Taylor series of sin and cos for |x| <= pi/4.
DoubleDouble sin_taylor(const DoubleDouble& x) {
    if (x.hi() == 0.0) return x;
    const DoubleDouble x2 = -sqr(x);
    // Straightforward recurrence: t_{n+1} = t_n * (-x^2) / ((2n+2)(2n+3)).
    DoubleDouble term = x;
    DoubleDouble sum = x;
    for (int n = 1; n < 30; ++n) {
        term = term * x2 / DoubleDouble(static_cast<double>((2 * n) * (2 * n + 1)));
        sum += term;
        if (std::abs(term.hi()) < dd_constants::eps * std::abs(sum.hi()) * 0.5) break;
    }
    return sum;
}

DoubleDouble cos_taylor(const DoubleDouble& x) {
    const DoubleDouble x2 = -sqr(x);
    DoubleDouble term = 1.0;
    DoubleDouble sum = 1.0;
    for (int n = 1; n < 30; ++n) {
        term = term * x2 / DoubleDouble(static_cast<double>((2 * n - 1) * (2 * n)));
        sum += term;
        if (std::abs(term.hi()) < dd_constants::eps * 0.5) break;
    }
    return sum;
}

// Reduces x to r in [-pi/4, pi/4] with x = r + k*pi/2; returns k mod 4.
int reduce_half_pi(const DoubleDouble& x, DoubleDouble& r) {
    const double k = std::nearbyint(x.hi() / dd_constants::half_pi.hi());
    r = x - dd_constants::half_pi * DoubleDouble(k);
    const long ki = static_cast<long>(k);
    return static_cast<int>(((ki % 4) + 4) % 4);
}

}  // namespace

DoubleDouble abs(const DoubleDouble& a) { return a.hi() < 0.0 ? -a : a; }
DoubleDouble fabs(const DoubleDouble& a) { return abs(a); }

DoubleDouble sqrt(const DoubleDouble& a) {
    if (a.hi() == 0.0) return DoubleDouble(0.0);
    if (a.hi() < 0.0) return std::numeric_limits<DoubleDouble>::quiet_NaN();
    // Karp's trick: one Newton step on the double approximation.
    const double x = 1.0 / std::sqrt(a.hi());
    const double ax = a.hi() * x;
    const DoubleDouble ax2 = DoubleDouble::product(ax, ax);
    const double corr = (a - ax2).hi() * (x * 0.5);
    return DoubleDouble::sum(ax, corr);
}

DoubleDouble exp(const DoubleDouble& a) {
    if (a.hi() > 709.0) return std::numeric_limits<DoubleDouble>::infinity();
    if (a.hi() < -745.0) return DoubleDouble(0.0);
    if (a.hi() == 0.0) return DoubleDouble(1.0);

    // a = k*ln2 + r, then exp(r) = (exp(r/512))^512 evaluated as expm1 with
    // nine squarings s <- s*(s+2) to keep the small quantity accurate.
    const double k = std::floor(a.hi() / dd_constants::ln2.hi() + 0.5);
    DoubleDouble r = a - dd_constants::ln2 * DoubleDouble(k);
    r = mul_pow2(r, 1.0 / 512.0);

    DoubleDouble p = sqr(r);
    DoubleDouble s = r + mul_pow2(p, 0.5);
    for (std::size_t i = 0; i < 9; ++i) {
        p = p * r;
        const DoubleDouble t = p * inverse_factorials()[i];
        s += t;
        if (std::abs(t.hi()) < 1e-35) break;
    }
    for (int i = 0; i < 9; ++i) s = s * (s + DoubleDouble(2.0));
    s += DoubleDouble(1.0);
    return ldexp(s, static_cast<int>(k));
}

DoubleDouble log(const DoubleDouble& a) {
    if (a.hi() <= 0.0) return std::numeric_limits<DoubleDouble>::quiet_NaN();
    if (a.hi() == 1.0 && a.lo() == 0.0) return DoubleDouble(0.0);
    // Newton on exp: x <- x + a*exp(-x) - 1, quadratically convergent from a
    // double-accurate start.
    DoubleDouble x = std::log(a.hi());
    x = x + a * exp(-x) - DoubleDouble(1.0);
    return x;
}

DoubleDouble pow(const DoubleDouble& a, int n) {
    if (n == 0) return DoubleDouble(1.0);
    DoubleDouble base = a;
    unsigned m = static_cast<unsigned>(n < 0 ? -n : n);
    DoubleDouble result = 1.0;
    while (m != 0) {
        if (m & 1u) result *= base;
        m >>= 1u;
        if (m != 0) base = sqr(base);
    }
    return n < 0 ? DoubleDouble(1.0) / result : result;
}

DoubleDouble pow(const DoubleDouble& a, const DoubleDouble& b) {
    if (b.lo() == 0.0 && b.hi() == std::nearbyint(b.hi()) && std::abs(b.hi()) < 64.0) {
        return pow(a, static_cast<int>(b.hi()));
    }
    return exp(b * log(a));
}

DoubleDouble tanh(const DoubleDouble& a) {
    if (a.hi() == 0.0) return DoubleDouble(0.0);
    if (std::abs(a.hi()) > 40.0) return DoubleDouble(a.hi() > 0.0 ? 1.0 : -1.0);
    if (std::abs(a.hi()) > 0.05) {
        const DoubleDouble e = exp(a);
        const DoubleDouble inv = DoubleDouble(1.0) / e;
        return (e - inv) / (e + inv);
    }
    // Small argument: sinh by Taylor series avoids the cancellation in e - 1/e.
    const DoubleDouble a2 = sqr(a);
    DoubleDouble term = a;
    DoubleDouble s = a;
    for (int n = 1; n < 20; ++n) {
        term = term * a2 / DoubleDouble(static_cast<double>((2 * n) * (2 * n + 1)));
        s += term;
        if (std::abs(term.hi()) < dd_constants::eps * std::abs(s.hi()) * 0.5) break;
    }
    const DoubleDouble c = sqrt(DoubleDouble(1.0) + sqr(s));
    return s / c;
}

DoubleDouble sin(const DoubleDouble& a) {
    DoubleDouble r;
    switch (reduce_half_pi(a, r)) {
        case 0: return sin_taylor(r);
        case 1: return cos_taylor(r);
        case 2: return -sin_taylor(r);
        default: return -cos_taylor(r);
    }
}

DoubleDouble cos(const DoubleDouble& a) {
    DoubleDouble r;
    switch (reduce_half_pi(a, r)) {
        case 0: return cos_taylor(r);
        case 1: return -sin_taylor(r);
        case 2: return -cos_taylor(r);
        default: return sin_taylor(r);
    }
}

DoubleDouble atan2(const DoubleDouble& y, const DoubleDouble& x) {
    if (x.hi() == 0.0 && y.hi() == 0.0) return DoubleDouble(0.0);
    // One Newton correction of the binary64 angle: the residual angle is
    // O(1e-16), so atan(delta) = delta to well below double-double precision.
    const DoubleDouble theta0 = std::atan2(y.hi(), x.hi());
    const DoubleDouble s = sin(theta0);
    const DoubleDouble c = cos(theta0);
    const DoubleDouble delta = (y * c - x * s) / (x * c + y * s);
    return theta0 + delta;
}

DoubleDouble acos(const DoubleDouble& a) {
    if (a.hi() >= 1.0) return DoubleDouble(0.0);
    if (a.hi() <= -1.0) return dd_constants::pi;
    const DoubleDouble s = sqrt((DoubleDouble(1.0) - a) * (DoubleDouble(1.0) + a));
    return atan2(s, a);
}

DoubleDouble ldexp(const DoubleDouble& a, int e) {
    return DoubleDouble::from_parts(std::ldexp(a.hi(), e), std::ldexp(a.lo(), e));
}

DoubleDouble floor(const DoubleDouble& a) {
    const double hi = std::floor(a.hi());
    if (hi == a.hi()) return dd_detail::quick_two_sum(hi, std::floor(a.lo()));
    return DoubleDouble(hi);
}

DoubleDouble min(const DoubleDouble& a, const DoubleDouble& b) { return b < a ? b : a; }
DoubleDouble max(const DoubleDouble& a, const DoubleDouble& b) { return a < b ? b : a; }

bool isfinite(const DoubleDouble& a) { return std::isfinite(a.hi()); }
bool isnan(const DoubleDouble& a) { return std::isnan(a.hi()); }
bool isinf(const DoubleDouble& a) { return std::isinf(a.hi()); }

std::string to_string(const DoubleDouble& a, int digits) {
    if (!std::isfinite(a.hi())) return std::to_string(a.hi());
    if (a.hi() == 0.0) return "0";
    digits = std::max(1, std::min(digits, 32));
    // Extract decimal digits one at a time from the normalized mantissa.
    DoubleDouble v = abs(a);
    int exp10 = static_cast<int>(std::floor(std::log10(v.hi())));
    v = v / pow(DoubleDouble(10.0), exp10);
    if (v.hi() >= 10.0) {
        v = v / DoubleDouble(10.0);
        ++exp10;
    } else if (v.hi() < 1.0) {
        v = v * DoubleDouble(10.0);
        --exp10;
    }
    std::string mant;
    for (int i = 0; i < digits; ++i) {
        int d = static_cast<int>(std::floor(v.hi()));
        if (d < 0) d = 0;
        if (d > 9) d = 9;
        mant.push_back(static_cast<char>('0' + d));
        v = (v - DoubleDouble(d)) * DoubleDouble(10.0);
    }
    std::string out = a.hi() < 0.0 ? "-" : "";
    out += mant.substr(0, 1);
    if (mant.size() > 1) out += "." + mant.substr(1);
    char buf[16];
    std::snprintf(buf, sizeof buf, "e%+03d", exp10);
    return out + buf;
}

std::ostream& operator<<(std::ostream& os, const DoubleDouble& a) { return os << to_string(a); }

}  // namespace fvgrad
