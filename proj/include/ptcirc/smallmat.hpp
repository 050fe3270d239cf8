#pragma once

#include <array>
#include <cmath>
#include <complex>

// Fixed-size real/complex linear algebra for the 2x2 and 4x4 blocks of the
// coupled-resonator state space.  Everything is by-value; no heap, no aliasing.

namespace ptcirc {

using Complex = std::complex<double>;
using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;
using CVec4 = std::array<Complex, 4>;

struct Mat2 {
    double m[2][2]{};

    double trace() const { return m[0][0] + m[1][1]; }
    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
}

inline Vec2 operator*(const Mat2& a, const Vec2& x) {
    return {a.m[0][0] * x[0] + a.m[0][1] * x[1],
            a.m[1][0] * x[0] + a.m[1][1] * x[1]};
}

struct Mat4 {
    double m[4][4]{};

    static Mat4 identity() {
        Mat4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }

    // max absolute column sum
    double norm1() const {
        double best = 0.0;
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += std::fabs(m[i][j]);
            if (s > best) best = s;
        }
        return best;
    }
};

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

inline Mat4 operator+(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

inline Mat4 operator*(double s, const Mat4& a) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

inline Vec4 operator*(const Mat4& a, const Vec4& x) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += a.m[i][k] * x[k];
        r[i] = s;
    }
    return r;
}

inline Vec4 operator+(const Vec4& a, const Vec4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline Vec4 operator*(double s, const Vec4& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

inline double norm(const Vec4& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

}  // namespace ptcirc
