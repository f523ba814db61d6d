#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bloch {

using Complex = std::complex<double>;
inline constexpr Complex I{0.0, 1.0};

// Bad input: unparsable potential file, bad arguments, violated preconditions.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation that could not reach its tolerance or hit a singular point.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 2x2 complex matrix, row major.
struct Mat2 {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2 identity() { return {}; }
    Complex det() const { return a * d - b * c; }
    Complex trace() const { return a + d; }
    // inverse of a unimodular matrix
    Mat2 unimodular_inverse() const { return {d, -b, -c, a}; }
    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }

}  // namespace bloch
