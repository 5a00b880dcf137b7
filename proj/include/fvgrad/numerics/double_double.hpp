#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>

namespace fvgrad {

/**
 * Unevaluated sum hi + lo of two binary64 numbers, |lo| <= ulp(hi)/2.
 *
 * Gives roughly 106 bits of significand with the exponent range of double.
 * All kernels use error-free transformations (Knuth two-sum, Dekker split
 * product) so they do not depend on hardware FMA. The translation units that
 * use this type must be compiled with floating-point contraction disabled.
 */
class DoubleDouble {
public:
    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double x) : hi_(x), lo_(0.0) {}
    template <std::integral I>
    constexpr DoubleDouble(I x)
        : hi_(static_cast<double>(x)),
          lo_(static_cast<double>(static_cast<long double>(x) - static_cast<long double>(hi_))) {}

    /// Caller guarantees the pair is already normalized.
    static constexpr DoubleDouble from_parts(double hi, double lo) {
        DoubleDouble r;
        r.hi_ = hi;
        r.lo_ = lo;
        return r;
    }

    constexpr double hi() const { return hi_; }
    constexpr double lo() const { return lo_; }

    explicit constexpr operator double() const { return hi_; }

    /// Exact sum of two doubles.
    static DoubleDouble sum(double a, double b);
    /// Exact product of two doubles.
    static DoubleDouble product(double a, double b);

    friend DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b);
    friend DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b);
    friend DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b);
    friend DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b);
    friend DoubleDouble operator-(const DoubleDouble& a) { return from_parts(-a.hi_, -a.lo_); }
    friend DoubleDouble operator+(const DoubleDouble& a) { return a; }

    DoubleDouble& operator+=(const DoubleDouble& b) { return *this = *this + b; }
    DoubleDouble& operator-=(const DoubleDouble& b) { return *this = *this - b; }
    DoubleDouble& operator*=(const DoubleDouble& b) { return *this = *this * b; }
    DoubleDouble& operator/=(const DoubleDouble& b) { return *this = *this / b; }

    friend bool operator==(const DoubleDouble& a, const DoubleDouble& b) { return a.hi_ == b.hi_ && a.lo_ == b.lo_; }
    friend bool operator!=(const DoubleDouble& a, const DoubleDouble& b) { return !(a == b); }
    friend bool operator<(const DoubleDouble& a, const DoubleDouble& b) {
        return a.hi_ < b.hi_ || (a.hi_ == b.hi_ && a.lo_ < b.lo_);
    }
    friend bool operator>(const DoubleDouble& a, const DoubleDouble& b) { return b < a; }
    friend bool operator<=(const DoubleDouble& a, const DoubleDouble& b) { return !(b < a); }
    friend bool operator>=(const DoubleDouble& a, const DoubleDouble& b) { return !(a < b); }

private:
    double hi_ = 0.0;
    double lo_ = 0.0;
};

namespace dd_detail {

inline DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    const double e = b - (s - a);
    return DoubleDouble::from_parts(s, e);
}

inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double e = (a - (s - bb)) + (b - bb);
    return DoubleDouble::from_parts(s, e);
}

// Dekker split; inputs beyond ~1e300 would overflow, which never occurs here.
inline void split(double a, double& hi, double& lo) {
    constexpr double splitter = 134217729.0;  // 2^27 + 1
    const double t = splitter * a;
    hi = t - (t - a);
    lo = a - hi;
}

inline DoubleDouble two_prod(double a, double b) {
    const double p = a * b;
    double ah, al, bh, bl;
    split(a, ah, al);
    split(b, bh, bl);
    const double e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    return DoubleDouble::from_parts(p, e);
}

}  // namespace dd_detail

inline DoubleDouble DoubleDouble::sum(double a, double b) { return dd_detail::two_sum(a, b); }
inline DoubleDouble DoubleDouble::product(double a, double b) { return dd_detail::two_prod(a, b); }

inline DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) {
    DoubleDouble s = dd_detail::two_sum(a.hi_, b.hi_);
    const DoubleDouble t = dd_detail::two_sum(a.lo_, b.lo_);
    double e = s.lo_ + t.hi_;
    s = dd_detail::quick_two_sum(s.hi_, e);
    e = s.lo_ + t.lo_;
    return dd_detail::quick_two_sum(s.hi_, e);
}

inline DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) { return a + (-b); }

inline DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) {
    DoubleDouble p = dd_detail::two_prod(a.hi_, b.hi_);
    const double e = p.lo_ + (a.hi_ * b.lo_ + a.lo_ * b.hi_);
    return dd_detail::quick_two_sum(p.hi_, e);
}

inline DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) {
    const double q1 = a.hi_ / b.hi_;
    DoubleDouble r = a - DoubleDouble(q1) * b;
    const double q2 = r.hi_ / b.hi_;
    r = r - DoubleDouble(q2) * b;
    const double q3 = r.hi_ / b.hi_;
    return dd_detail::quick_two_sum(q1, q2) + DoubleDouble(q3);
}

namespace dd_constants {
inline constexpr DoubleDouble pi = DoubleDouble::from_parts(3.141592653589793116e+00, 1.224646799147353207e-16);
inline constexpr DoubleDouble half_pi = DoubleDouble::from_parts(1.570796326794896558e+00, 6.123233995736766036e-17);
inline constexpr DoubleDouble ln2 = DoubleDouble::from_parts(6.931471805599452862e-01, 2.319046813846299558e-17);
inline constexpr double eps = 4.93038065763132e-32;  // 2^-104
}  // namespace dd_constants

// Free functions found by ADL; generic code should write `using std::sqrt;`
// and call unqualified.
DoubleDouble abs(const DoubleDouble& a);
DoubleDouble fabs(const DoubleDouble& a);
DoubleDouble sqrt(const DoubleDouble& a);
DoubleDouble exp(const DoubleDouble& a);
DoubleDouble log(const DoubleDouble& a);
DoubleDouble pow(const DoubleDouble& a, const DoubleDouble& b);
DoubleDouble pow(const DoubleDouble& a, int n);
DoubleDouble tanh(const DoubleDouble& a);
DoubleDouble sin(const DoubleDouble& a);
DoubleDouble cos(const DoubleDouble& a);
DoubleDouble atan2(const DoubleDouble& y, const DoubleDouble& x);
DoubleDouble acos(const DoubleDouble& a);
DoubleDouble ldexp(const DoubleDouble& a, int e);
DoubleDouble floor(const DoubleDouble& a);
DoubleDouble min(const DoubleDouble& a, const DoubleDouble& b);
DoubleDouble max(const DoubleDouble& a, const DoubleDouble& b);
bool isfinite(const DoubleDouble& a);
bool isnan(const DoubleDouble& a);
bool isinf(const DoubleDouble& a);

/// Decimal string with `digits` significant digits (up to 32).
std::string to_string(const DoubleDouble& a, int digits = 32);
std::ostream& operator<<(std::ostream& os, const DoubleDouble& a);

inline double to_double(double a) { return a; }
inline double to_double(const DoubleDouble& a) { return a.hi(); }

}  // namespace fvgrad

namespace std {

template <>
class numeric_limits<fvgrad::DoubleDouble> {
    using base = numeric_limits<double>;

public:
    static constexpr bool is_specialized = true;
    static constexpr bool is_signed = true;
    static constexpr bool is_integer = false;
    static constexpr bool is_exact = false;
    static constexpr bool has_infinity = true;
    static constexpr bool has_quiet_NaN = true;
    static constexpr bool has_signaling_NaN = false;
    static constexpr float_denorm_style has_denorm = denorm_absent;
    static constexpr bool has_denorm_loss = false;
    static constexpr float_round_style round_style = round_to_nearest;
    static constexpr bool is_iec559 = false;
    static constexpr bool is_bounded = true;
    static constexpr bool is_modulo = false;
    static constexpr int digits = 2 * base::digits;
    static constexpr int digits10 = 31;
    static constexpr int max_digits10 = 33;
    static constexpr int radix = 2;
    static constexpr int min_exponent = base::min_exponent + base::digits;
    static constexpr int min_exponent10 = base::min_exponent10 + base::digits10;
    static constexpr int max_exponent = base::max_exponent;
    static constexpr int max_exponent10 = base::max_exponent10;
    static constexpr bool traps = false;
    static constexpr bool tinyness_before = false;

    static constexpr fvgrad::DoubleDouble min() noexcept { return fvgrad::DoubleDouble(base::min() * 9007199254740992.0); }
    static constexpr fvgrad::DoubleDouble max() noexcept { return fvgrad::DoubleDouble(base::max()); }
    static constexpr fvgrad::DoubleDouble lowest() noexcept { return fvgrad::DoubleDouble(base::lowest()); }
    static constexpr fvgrad::DoubleDouble epsilon() noexcept { return fvgrad::DoubleDouble(fvgrad::dd_constants::eps); }
    static constexpr fvgrad::DoubleDouble round_error() noexcept { return fvgrad::DoubleDouble(0.5); }
    static constexpr fvgrad::DoubleDouble infinity() noexcept { return fvgrad::DoubleDouble(base::infinity()); }
    static constexpr fvgrad::DoubleDouble quiet_NaN() noexcept { return fvgrad::DoubleDouble(base::quiet_NaN()); }
    static constexpr fvgrad::DoubleDouble signaling_NaN() noexcept { return fvgrad::DoubleDouble(base::quiet_NaN()); }
    static constexpr fvgrad::DoubleDouble denorm_min() noexcept { return min(); }
};

}  // namespace std
