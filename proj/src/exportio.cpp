#include "elastfem/exportio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace elastfem {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string num(double v) { return fmt("%.6e", v); }
std::string rate(double v) { return std::isnan(v) ? std::string() : fmt("%.4f", v); }

} // namespace

std::string convergence_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "ndof,h,l2_error,l2_rate,h1_error,h1_rate\n";
    for (const auto& r : report.conv)
        os << r.ndof << ',' << num(r.h) << ',' << num(r.l2) << ',' << rate(r.l2_rate) << ','
           << num(r.h1) << ',' << rate(r.h1_rate) << '\n';
    return os.str();
}

std::string sweep_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "lambda,mu,ndof,h1_semi_norm\n";
    for (const auto& r : report.sweep)
        os << fmt("%.10g", r.lambda) << ',' << fmt("%.10g", r.mu) << ',' << r.ndof << ','
           << num(r.h1_semi) << '\n';
    return os.str();
}

std::string cooks_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "scheme,nu,n,ndof,tip_y\n";
    for (const auto& r : report.cooks)
        os << r.scheme << ',' << fmt("%.10g", r.nu) << ',' << r.n << ',' << r.ndof << ','
           << num(r.tip_y) << '\n';
    return os.str();
}

std::string vtk_string(const Triangulation& mesh, const FeFunction& u,
                       const std::string& title) {
    const DofMap& dm = *u.map;
    if (!dm.has_vertex_block())
        throw ExportError("vtk export needs a layout with vertex displacements");

    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";

    const int nv = mesh.n_vertices(), nt = mesh.n_cells();
    os << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices)
        os << num(p.x) << ' ' << num(p.y) << " 0\n";

    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& c : mesh.cells) os << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    os << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) os << "5\n";

    os << "POINT_DATA " << nv << "\nVECTORS displacement double\n";
    for (int v = 0; v < nv; ++v)
        os << num(u.p1(v, 0)) << ' ' << num(u.p1(v, 1)) << " 0\n";

    os << "CELL_DATA " << nt << "\nSCALARS dilation double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) os << num(cell_divergence(u, t)) << '\n';

    if (dm.layout == DofLayout::p1_rt0) {
        // the RT0 part is linear per cell: its mean is the centroid value
        os << "VECTORS rt0_mean double\n";
        for (int t = 0; t < nt; ++t) {
            Vec2 m;
            const Vec2 xc = mesh.centroid(t);
            for (int le = 0; le < 3; ++le) {
                const auto& ce = mesh.cell_edges[static_cast<std::size_t>(t)][static_cast<std::size_t>(le)];
                m += u.rt(ce.edge) * rt0_value(mesh, t, le, xc);
            }
            os << num(m.x) << ' ' << num(m.y) << " 0\n";
        }
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ExportError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ExportError("write to '" + path + "' failed");
}

} // namespace elastfem
