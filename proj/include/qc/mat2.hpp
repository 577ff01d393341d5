#pragma once

#include <array>
#include <cmath>

#include "qc/errors.hpp"

namespace qc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    double norm() const { return std::hypot(x, y); }
};

// Dense 2x2 matrix, row-major.
struct Mat2 {
    double a = 0.0, b = 0.0; // row 0
    double c = 0.0, d = 0.0; // row 1

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 transposed() const { return {a, c, b, d}; }

    Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
                l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
    friend Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
    friend Mat2 operator-(const Mat2& l, const Mat2& r) {
        return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
    }

    // Adjugate inverse; throws SingularTransform when det is negligible
    // relative to the entry scale.
    Mat2 inverse() const {
        const double dt = det();
        const double scale = std::fmax(std::fmax(std::fabs(a), std::fabs(b)),
                                       std::fmax(std::fabs(c), std::fabs(d)));
        if (dt == 0.0 || std::fabs(dt) < 1e-14 * scale * scale)
            throw SingularTransform("2x2 matrix is singular or near-singular");
        const double inv = 1.0 / dt;
        return {d * inv, -b * inv, -c * inv, a * inv};
    }

    double max_abs() const {
        return std::fmax(std::fmax(std::fabs(a), std::fabs(b)),
                         std::fmax(std::fabs(c), std::fabs(d)));
    }

    // Largest singular value from the closed-form eigenvalues of M^T M.
    double two_norm() const {
        const double t = a * a + b * b + c * c + d * d; // tr(M^T M)
        const double dt = det();
        const double disc = std::fmax(t * t - 4.0 * dt * dt, 0.0);
        return std::sqrt(0.5 * (t + std::sqrt(disc)));
    }
};

// Active rotation by angle s: R_s = [[cos s, -sin s], [sin s, cos s]].
inline Mat2 rotation(double s) {
    const double cs = std::cos(s);
    const double sn = std::sin(s);
    return {cs, -sn, sn, cs};
}

} // namespace qc
