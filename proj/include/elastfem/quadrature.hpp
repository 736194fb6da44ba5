#ifndef ELASTFEM_QUADRATURE_HPP
#define ELASTFEM_QUADRATURE_HPP

#include <array>
#include <cstddef>

#include "elastfem/geometry.hpp"

namespace elastfem {

// Triangle rules in barycentric coordinates. Weights sum to 1; integrals
// are weight * |T| * f(point).
struct TriQuadPoint {
    double l0, l1, l2;
    double w;
};

// 3-point midpoint rule, exact for polynomials of degree 2.
inline const std::array<TriQuadPoint, 3>& tri_rule_deg2() {
    static const std::array<TriQuadPoint, 3> rule = {{
        {0.5, 0.5, 0.0, 1.0 / 3.0},
        {0.0, 0.5, 0.5, 1.0 / 3.0},
        {0.5, 0.0, 0.5, 1.0 / 3.0},
    }};
    return rule;
}

// 12-point rule, exact for polynomials of degree 6.
inline const std::array<TriQuadPoint, 12>& tri_rule_deg6() {
    static const std::array<TriQuadPoint, 12> rule = [] {
        const double a1 = 0.063089014491502228340331602870819;
        const double w1 = 0.050844906370206816920936809106869;
        const double a2 = 0.249286745170910421291638553107019;
        const double w2 = 0.116786275726379366046164360899642;
        const double a3 = 0.053145049844816947353249671631398;
        const double b3 = 0.310352451033784405416607733956552;
        const double c3 = 1.0 - a3 - b3;
        const double w3 = 0.082851075618373575193553456420442;
        std::array<TriQuadPoint, 12> r{};
        r[0] = {1.0 - 2.0 * a1, a1, a1, w1};
        r[1] = {a1, 1.0 - 2.0 * a1, a1, w1};
        r[2] = {a1, a1, 1.0 - 2.0 * a1, w1};
        r[3] = {1.0 - 2.0 * a2, a2, a2, w2};
        r[4] = {a2, 1.0 - 2.0 * a2, a2, w2};
        r[5] = {a2, a2, 1.0 - 2.0 * a2, w2};
        r[6] = {a3, b3, c3, w3};
        r[7] = {a3, c3, b3, w3};
        r[8] = {b3, a3, c3, w3};
        r[9] = {b3, c3, a3, w3};
        r[10] = {c3, a3, b3, w3};
        r[11] = {c3, b3, a3, w3};
        return r;
    }();
    return rule;
}

// Gauss rules on [0,1]; weights sum to 1, integrals are weight * |e| * f.
struct EdgeQuadPoint {
    double t;
    double w;
};

inline const std::array<EdgeQuadPoint, 1>& edge_rule_1() {
    static const std::array<EdgeQuadPoint, 1> rule = {{{0.5, 1.0}}};
    return rule;
}

// exact to degree 3
inline const std::array<EdgeQuadPoint, 2>& edge_rule_2() {
    static const std::array<EdgeQuadPoint, 2> rule = [] {
        const double d = 0.5 / std::sqrt(3.0);
        return std::array<EdgeQuadPoint, 2>{{{0.5 - d, 0.5}, {0.5 + d, 0.5}}};
    }();
    return rule;
}

// exact to degree 5
inline const std::array<EdgeQuadPoint, 3>& edge_rule_3() {
    static const std::array<EdgeQuadPoint, 3> rule = [] {
        const double d = 0.5 * std::sqrt(3.0 / 5.0);
        return std::array<EdgeQuadPoint, 3>{{
            {0.5 - d, 5.0 / 18.0},
            {0.5, 8.0 / 18.0},
            {0.5 + d, 5.0 / 18.0},
        }};
    }();
    return rule;
}

// exact to degree 9, used only as a test oracle
inline const std::array<EdgeQuadPoint, 5>& edge_rule_5() {
    static const std::array<EdgeQuadPoint, 5> rule = [] {
        const double s = std::sqrt(10.0 / 7.0);
        const double x1 = std::sqrt(5.0 - 2.0 * s) / 3.0;
        const double x2 = std::sqrt(5.0 + 2.0 * s) / 3.0;
        const double w0 = 128.0 / 225.0;
        const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        return std::array<EdgeQuadPoint, 5>{{
            {0.5 * (1.0 - x2), 0.5 * w2},
            {0.5 * (1.0 - x1), 0.5 * w1},
            {0.5, 0.5 * w0},
            {0.5 * (1.0 + x1), 0.5 * w1},
            {0.5 * (1.0 + x2), 0.5 * w2},
        }};
    }();
    return rule;
}

} // namespace elastfem

#endif
