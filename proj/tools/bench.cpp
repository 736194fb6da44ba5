// Compares the OpenMP kernels against the serial reference implementation
// and records the behavior of unpreconditioned CG on ill-conditioned
// systems (the reason the direct solver is the default).

#include <chrono>
#include <cstdio>
#include <functional>

#include "elastfem/analysis.hpp"
#include "elastfem/experiments.hpp"
#include "elastfem/parallel.hpp"
#include "elastfem/reference.hpp"

using namespace elastfem;

namespace {

double time_min(const std::function<void()>& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    int n = 128;
    if (argc > 1) n = std::atoi(argv[1]);

    std::printf("threads: %d, grid: structured %d x %d\n", max_threads(), n, n);

    const Triangulation mesh = generate_structured_unit_square(n);
    const BoundarySpec bspec = BoundarySpec::pure_dirichlet(mesh);
    const DofMap dm = DofMap::build(mesh, bspec, DofLayout::p1_rt0);
    const auto ms = ManufacturedSolution::trig_unit_square(1.0, 1.0);

    SchemeConfig cfg;
    cfg.scheme = Scheme::s1;
    cfg.body_force = [&](Vec2 p) { return ms.body_force(p); };

    LinearSystem sys_par, sys_ser;
    const double t_par = time_min([&] { sys_par = assemble_scheme(cfg, mesh, bspec, dm); });
    const double t_ser = time_min([&] { sys_ser = ref::assemble_scheme(cfg, mesh, bspec, dm); });
    const bool same = sys_par.A.same_pattern(sys_ser.A) && sys_par.A.values == sys_ser.A.values &&
                      sys_par.rhs == sys_ser.rhs;
    std::printf("%-28s %10.4fs\n", "assemble (omp)", t_par);
    std::printf("%-28s %10.4fs   speedup %.2fx   bitwise match: %s\n", "assemble (serial ref)",
                t_ser, t_ser / t_par, same ? "yes" : "NO");

    const auto x = solve_direct(sys_par.A, sys_par.rhs, true);
    FeFunction u = FeFunction::zeros(dm);
    for (std::size_t i = 0; i < x.size(); ++i)
        u.coef[static_cast<std::size_t>(dm.free_dofs[i])] = x[i];

    double e_par = 0.0, e_ser = 0.0;
    const double tn_par = time_min([&] { e_par = error_l2(u, ms.u); });
    const double tn_ser = time_min([&] { e_ser = ref::error_l2(u, ms.u); });
    std::printf("%-28s %10.4fs\n", "l2 error (omp)", tn_par);
    std::printf("%-28s %10.4fs   speedup %.2fx   rel diff %.2e\n", "l2 error (serial ref)",
                tn_ser, tn_ser / tn_par, std::abs(e_par - e_ser) / e_par);

    double h_par = 0.0, h_ser = 0.0;
    const double th_par = time_min([&] { h_par = h1_seminorm_broken(u); });
    const double th_ser = time_min([&] { h_ser = ref::h1_seminorm_broken(u); });
    std::printf("%-28s %10.4fs\n", "h1 seminorm (omp)", th_par);
    std::printf("%-28s %10.4fs   speedup %.2fx   rel diff %.2e\n", "h1 seminorm (serial ref)",
                th_ser, th_ser / th_par, std::abs(h_par - h_ser) / h_par);

    const double t_mv = time_min([&] {
        auto y = sys_par.A.multiply(sys_par.rhs);
        (void)y;
    }, 10);
    std::printf("%-28s %10.4fs   (nnz %lld)\n", "spmv", t_mv,
                static_cast<long long>(sys_par.A.nnz()));

    // Krylov observations on a smaller grid
    {
        const Triangulation m2 = generate_structured_unit_square(16);
        const BoundarySpec b2 = BoundarySpec::pure_dirichlet(m2);
        const DofMap d2 = DofMap::build(m2, b2, DofLayout::p1_rt0);
        SchemeConfig c2 = cfg;
        const auto s_soft = assemble_scheme(c2, m2, b2, d2);
        const auto cg = solve_cg(s_soft.A, s_soft.rhs, 1e-10, 10000);
        std::printf("cg (jacobi), lambda=1:        %d iterations, residual %.2e\n",
                    cg.iterations, cg.residual);

        c2.lambda = 1e6;
        const auto s_hard = assemble_scheme(c2, m2, b2, d2);
        try {
            const auto cg2 = solve_cg(s_hard.A, s_hard.rhs, 1e-10, 10000, /*jacobi=*/false);
            std::printf("cg (plain), lambda=1e6:       %d iterations, residual %.2e\n",
                        cg2.iterations, cg2.residual);
        } catch (const LinalgError& e) {
            std::printf("cg (plain), lambda=1e6:       %s\n", e.what());
        }
    }
    return 0;
}
