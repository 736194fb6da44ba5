#ifndef ELASTFEM_TESTS_SUPPORT_HPP
#define ELASTFEM_TESTS_SUPPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "elastfem/femspace.hpp"
#include "elastfem/linalg.hpp"
#include "elastfem/mesh.hpp"

namespace testsupport {

using namespace elastfem;

// Polynomial vector field with monomials x^a y^b, a+b <= deg, and its
// exact divergence; used as the ground truth for interpolation identities.
struct PolyField {
    int deg = 3;
    std::vector<double> cx, cy; // one coefficient per monomial, per component

    static int n_monomials(int deg) { return (deg + 1) * (deg + 2) / 2; }

    static PolyField random(std::mt19937& rng, int deg = 3) {
        PolyField f;
        f.deg = deg;
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const int m = n_monomials(deg);
        for (int i = 0; i < m; ++i) {
            f.cx.push_back(dist(rng));
            f.cy.push_back(dist(rng));
        }
        return f;
    }

    template <class F>
    void for_each_monomial(F&& fn) const {
        int i = 0;
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; b <= deg - a; ++b) fn(i++, a, b);
    }

    Vec2 operator()(Vec2 p) const {
        double vx = 0.0, vy = 0.0;
        for_each_monomial([&](int i, int a, int b) {
            const double m = std::pow(p.x, a) * std::pow(p.y, b);
            vx += cx[static_cast<std::size_t>(i)] * m;
            vy += cy[static_cast<std::size_t>(i)] * m;
        });
        return {vx, vy};
    }

    double divergence(Vec2 p) const {
        double d = 0.0;
        for_each_monomial([&](int i, int a, int b) {
            if (a > 0)
                d += cx[static_cast<std::size_t>(i)] * a * std::pow(p.x, a - 1) * std::pow(p.y, b);
            if (b > 0)
                d += cy[static_cast<std::size_t>(i)] * b * std::pow(p.x, a) * std::pow(p.y, b - 1);
        });
        return d;
    }
};

// Linear scan point location (test meshes are small).
inline int locate_cell(const Triangulation& mesh, const Vec2& p) {
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto b = mesh.barycentric(t, p);
        if (b[0] >= -1e-12 && b[1] >= -1e-12 && b[2] >= -1e-12) return t;
    }
    return -1;
}

// Writes the classical 1-based node/ele pair.
inline void save_node_ele(const Triangulation& mesh, const std::string& stem) {
    std::ofstream node(stem + ".node");
    node << mesh.n_vertices() << " 2 0 0\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", v + 1,
                      mesh.vertices[static_cast<std::size_t>(v)].x,
                      mesh.vertices[static_cast<std::size_t>(v)].y);
        node << buf;
    }
    std::ofstream ele(stem + ".ele");
    ele << mesh.n_cells() << " 3 0\n";
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        ele << (t + 1) << ' ' << (c[0] + 1) << ' ' << (c[1] + 1) << ' ' << (c[2] + 1) << '\n';
    }
}

inline std::string temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "elastfem_tests";
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Restriction of a raw-dof block matrix to the free dofs of a DofMap.
inline SparseMatrix restrict_to_free(const SparseMatrix& raw, const DofMap& dm) {
    std::vector<Triplet> t;
    for (int r = 0; r < raw.rows; ++r) {
        const int fr = dm.free_index[static_cast<std::size_t>(r)];
        if (fr < 0) continue;
        for (int k = raw.row_ptr[static_cast<std::size_t>(r)]; k < raw.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const int fc = dm.free_index[static_cast<std::size_t>(raw.col_idx[static_cast<std::size_t>(k)])];
            if (fc >= 0) t.push_back({fr, fc, raw.values[static_cast<std::size_t>(k)]});
        }
    }
    auto a = SparseMatrix::from_triplets(dm.n_free, dm.n_free, std::move(t));
    a.finalize();
    return a;
}

inline double quadratic_form(const SparseMatrix& A, const std::vector<double>& v,
                             const std::vector<double>& w) {
    const auto aw = A.multiply(w);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * aw[i];
    return s;
}

} // namespace testsupport

#endif
