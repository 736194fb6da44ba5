#ifndef ELASTFEM_GEOMETRY_HPP
#define ELASTFEM_GEOMETRY_HPP

#include <cmath>

namespace elastfem {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// 90 degree rotations; cw = clockwise (by -90 degrees).
inline Vec2 rot90cw(const Vec2& v) { return {v.y, -v.x}; }
inline Vec2 rot90ccw(const Vec2& v) { return {-v.y, v.x}; }

// Row-major 2x2 matrix, used for gradients of vector fields:
// m(i,j) = d v_i / d x_j.
struct Mat2 {
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    static Mat2 identity(double s = 1.0) {
        Mat2 m;
        m.a[0][0] = s;
        m.a[1][1] = s;
        return m;
    }

    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] + o.a[i][j];
        return r;
    }
    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] - o.a[i][j];
        return r;
    }
    Mat2 operator*(double s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] * s;
        return r;
    }
    Vec2 operator*(const Vec2& v) const {
        return {a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y};
    }

    double trace() const { return a[0][0] + a[1][1]; }
    Mat2 sym() const {
        Mat2 r;
        r.a[0][0] = a[0][0];
        r.a[1][1] = a[1][1];
        r.a[0][1] = r.a[1][0] = 0.5 * (a[0][1] + a[1][0]);
        return r;
    }
};

inline double frob2(const Mat2& m) {
    return m(0, 0) * m(0, 0) + m(0, 1) * m(0, 1) + m(1, 0) * m(1, 0) + m(1, 1) * m(1, 1);
}

inline double ddot(const Mat2& a, const Mat2& b) {
    return a(0, 0) * b(0, 0) + a(0, 1) * b(0, 1) + a(1, 0) * b(1, 0) + a(1, 1) * b(1, 1);
}

} // namespace elastfem

#endif
